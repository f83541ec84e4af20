"""Closed-form quality bounds, LLL variant comparisons and complexity models."""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .rings import MultCost, RingId, as_ring

# Hermite constants known exactly
HERMITE = {
    1: 1.0,
    2: 2 / math.sqrt(3),
    3: 2 ** (1 / 3),
    4: math.sqrt(2),
    5: 8 ** (1 / 5),
    6: (64 / 3) ** (1 / 6),
    7: 64 ** (1 / 7),
    8: 2.0,
    24: 4.0,
}


def hermite_upper(K: int) -> float:
    """(2/pi) Gamma(2 + K/2)^(2/K)."""
    if K < 1:
        raise ValueError("K must be positive")
    return 2 / math.pi * math.exp(2 / K * math.lgamma(2 + K / 2))


def hermite(K: int) -> tuple[float, bool]:
    """Hermite constant for dimension K and whether it is exact (otherwise the
    upper bound is returned)."""
    if K in HERMITE:
        return HERMITE[K], True
    return hermite_upper(K), False


def _check_delta(ring: RingId, delta: float) -> None:
    if not ring.props.delta_ok(delta):
        raise ValueError(f"invalid delta {delta} for ring {ring.value}")


def det_generator(ring: RingId | str, K: int) -> float:
    """|det G_I| of the ring's right factor in the representation over Z."""
    ring = as_ring(ring)
    if ring is RingId.E:
        return (math.sqrt(3) / 2) ** K
    if ring is RingId.H:
        return 0.5 ** K
    return 1.0


def first_minimum_bound(ring: RingId | str, K: int, vol: float) -> float:
    """Upper bound on mu_1^2."""
    ring = as_ring(ring)
    n = ring.props.D_r * K
    eta, _ = hermite(n)
    return eta * det_generator(ring, K) ** (2 / n) * vol ** (2 / K)


def minima_product_bound(ring: RingId | str, K: int, L: int, vol: float) -> float:
    """Upper bound on mu_1^2 ... mu_L^2."""
    ring = as_ring(ring)
    if not 1 <= L <= K:
        raise ValueError("need 1 <= L <= K")
    n = ring.props.D_r * K
    eta, _ = hermite(n)
    return eta ** L * det_generator(ring, K) ** (2 * L / n) * vol ** (2 * L / K)


def sivp_defect_bound(ring: RingId | str, K: int) -> float:
    """Upper bound on the orthogonality defect of the successive-minima basis."""
    ring = as_ring(ring)
    eta, _ = hermite(ring.props.D_r * K)
    return eta ** (K / 2) * det_generator(ring, K) ** (1 / ring.props.D_r)


def _lll_factor(ring: RingId, delta: float, power: float) -> float:
    # the Lipschitz ring at delta = 1 has no finite bound beyond K = 1
    gap = delta - ring.props.eps2
    if power == 0:
        return 1.0
    return math.inf if gap <= 0 else (1 / gap) ** power


def lll_first_bound(ring: RingId | str, delta: float, K: int, vol: float) -> float:
    """Upper bound on |g_1|^2 after LLL reduction."""
    ring = as_ring(ring)
    _check_delta(ring, delta)
    return _lll_factor(ring, delta, (K - 1) / 2) * vol ** (2 / K)


def lll_defect_bound(ring: RingId | str, delta: float, K: int) -> float:
    """Upper bound on the orthogonality defect after LLL reduction."""
    ring = as_ring(ring)
    _check_delta(ring, delta)
    return _lll_factor(ring, delta, K * (K - 1) / 4)


@dataclass(frozen=True)
class LllVariant:
    ring: RingId
    K: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ring", as_ring(self.ring))

    @property
    def eps2(self) -> float:
        return self.ring.props.eps2

    @property
    def D_r(self) -> int:
        return self.ring.props.D_r


RLLL = LllVariant(RingId.Z)
CLLL = LllVariant(RingId.G)
ELLL = LllVariant(RingId.E)
QLLL = LllVariant(RingId.H)
PSEUDO_QLLL = LllVariant(RingId.L)


class Verdict(enum.Enum):
    V1_SMALLER = "v1_smaller"
    V2_SMALLER = "v2_smaller"
    EQUAL = "equal"


@dataclass(frozen=True)
class Comparison:
    verdict: Verdict
    thresholds: tuple[float, ...]


def _flip(v: Verdict) -> Verdict:
    return {Verdict.V1_SMALLER: Verdict.V2_SMALLER,
            Verdict.V2_SMALLER: Verdict.V1_SMALLER}.get(v, v)


def _compare(v1: LllVariant, v2: LllVariant, delta: float, power: int) -> Comparison:
    """v1 works on the smaller-rank problem; v2 on its expansion with rank
    m K. Asymptotically v1 has the smaller bound iff
    (delta - eps2_2)^(m^power) < delta - eps2_1."""
    if v1.D_r < v2.D_r:
        c = _compare(v2, v1, delta, power)
        return Comparison(_flip(c.verdict), c.thresholds)
    if v1.D_r % v2.D_r:
        raise ValueError(f"invalid pairing {v1.ring.value}/{v2.ring.value}")
    for v in (v1, v2):
        _check_delta(v.ring, delta)
    e = (v1.D_r // v2.D_r) ** power
    a = (delta - v2.eps2) ** e
    b = delta - v1.eps2
    if abs(a - b) <= 1e-12 * max(1.0, abs(b)):
        verdict = Verdict.EQUAL
    else:
        verdict = Verdict.V1_SMALLER if a < b else Verdict.V2_SMALLER
    return Comparison(verdict, _crossings(v1.eps2, v2.eps2, e))


@functools.lru_cache(maxsize=None)
def _crossings(eps1: float, eps2: float, e: int) -> tuple[float, ...]:
    def g(d):
        return (d - eps2) ** e - (d - eps1)

    return _roots(g, max(eps1, eps2), 1.0)


def _roots(g, lo: float, hi: float) -> tuple[float, ...]:
    # some crossings sit within 1e-9 of the lower end, hence the log spacing
    grid = np.union1d(np.linspace(lo, hi, 4001)[1:],
                      lo + np.geomspace(1e-14, hi - lo, 2000))
    vals = g(grid)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-15))
    # touching roots: local minima of |g| that reach zero
    absv = np.abs(vals)
    for i in range(1, len(grid) - 1):
        if absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1] and vals[i - 1] * vals[i + 1] > 0:
            r = minimize_scalar(lambda x: abs(g(x)), bounds=(grid[i - 1], grid[i + 1]),
                                method="bounded", options={"xatol": 1e-12})
            if abs(g(r.x)) < 1e-12:
                roots.append(float(r.x))
    out: list[float] = []
    for r in sorted(roots):
        if not out or r - out[-1] > 1e-9:
            out.append(r)
    return tuple(out)


def compare_first_norm(v1: LllVariant, v2: LllVariant, delta: float) -> Comparison:
    """Which variant has the smaller asymptotic bound on the first basis vector."""
    return _compare(v1, v2, delta, 1)


def compare_defect(v1: LllVariant, v2: LllVariant, delta: float) -> Comparison:
    """Which variant has the smaller asymptotic orthogonality-defect bound."""
    return _compare(v1, v2, delta, 2)


def expected_list_size(ring: RingId | str, K: int, psi2: float, vol: float) -> float:
    """Approximate number of lattice points in a ball of squared radius psi2."""
    ring = as_ring(ring)
    if psi2 <= 0 or vol <= 0:
        raise ValueError("psi2 and vol must be positive")
    n = ring.props.D_r * K
    log_n = (n / 2 * math.log(math.pi * psi2) - math.lgamma(n / 2 + 1)
             - math.log(det_generator(ring, K)) - ring.props.D_r * math.log(vol))
    return math.exp(log_n)


def xi(v1: LllVariant, v2: LllVariant) -> float:
    """Ratio of the iteration-count growth of two paired variants."""
    if v1.D_r < v2.D_r or v1.D_r % v2.D_r:
        raise ValueError(f"unknown pairing {v1.ring.value}/{v2.ring.value}")
    return v1.D_r / v2.D_r


def lll_mult_ratio(v1: LllVariant, v2: LllVariant, N1: int, N2: int, delta: float = 1.0,
                   cost: MultCost = MultCost.NAIVE) -> float:
    """Asymptotic ratio of real multiplications, variant 1 over variant 2."""
    for v in (v1, v2):
        _check_delta(v.ring, delta)
    x = xi(v1, v2)
    nr = cost.n_r(v1.ring.domain) / cost.n_r(v2.ring.domain)
    return nr * (v1.K ** 3 * N1) / (v2.K ** 3 * N2) * x
