"""Fading MIMO uplink with lattice-reduction-aided / integer-forcing linear
equalization over the integer rings.

A scheme is a ring plus a factorization method. When the ring lives in a
smaller domain than the channel (say G on a quaternion channel) the channel
is handled through its equivalent complex or real representation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (Matrix, RingMatrix, complex_to_vec, inverse, pinv, real_to_vec,
                     to_complex, to_real, vec_to_complex, vec_to_real, vstack)
from .reduction import lll
from .rings import Domain, RingId, as_domain, as_ring, quantize_array
from .sivp import smp

log = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based stream for (seed, keys...), independent of call order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=keys)))


@dataclass(frozen=True, eq=False)
class Constellation:
    name: str
    ring: RingId
    points: np.ndarray  # (M, 4)
    variance: float

    @property
    def domain(self) -> Domain:
        return self.ring.domain


def _signs(n: int) -> np.ndarray:
    return np.array(np.meshgrid(*[[1.0, -1.0]] * n, indexing="ij")).reshape(n, -1).T


A_G = Constellation("AG", RingId.G, np.pad(_signs(2), ((0, 0), (0, 2))), 2.0)
A_E = Constellation("AE", RingId.E, np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0],
                                               [0, SQRT3, 0, 0], [0, -SQRT3, 0, 0]]), 2.0)
A_L = Constellation("AL", RingId.L, _signs(4), 4.0)
CONSTELLATIONS = {c.name: c for c in (A_G, A_E, A_L)}


@dataclass(frozen=True)
class ChannelConfig:
    N: int
    K: int
    domain: Domain = Domain.C
    sigma_n2: float = 0.1
    sigma_x2: float = 2.0
    constellation: str = "AG"

    def __post_init__(self):
        object.__setattr__(self, "domain", as_domain(self.domain))
        if not self.N >= self.K >= 1:
            raise ValueError("need N >= K >= 1")
        if self.sigma_n2 <= 0 or self.sigma_x2 <= 0:
            raise ValueError("variances must be positive")

    @classmethod
    def at_snr(cls, N: int, K: int, domain, snr_db: float, constellation: str = "AG"
               ) -> ChannelConfig:
        c = CONSTELLATIONS[constellation]
        return cls(N, K, domain, c.variance / 10 ** (snr_db / 10), c.variance, constellation)

    def with_snr(self, snr_db: float) -> ChannelConfig:
        return ChannelConfig(self.N, self.K, self.domain,
                             self.sigma_x2 / 10 ** (snr_db / 10), self.sigma_x2,
                             self.constellation)


def sample_channel(cfg: ChannelConfig, seed: int | np.random.Generator) -> Matrix:
    """i.i.d. Gaussian gains with variance 1/2 per real component."""
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    D = cfg.domain.dim
    d = np.zeros((cfg.N, cfg.K, 4))
    d[..., :D] = rng.standard_normal((cfg.N, cfg.K, D)) * math.sqrt(0.5)
    return Matrix(d, cfg.domain)


# representations ------------------------------------------------------------

def equivalent_channel(H: Matrix, domain: Domain | str) -> Matrix:
    domain = as_domain(domain)
    if domain is H.domain:
        return H
    if domain is Domain.R:
        return to_real(H)
    if domain is Domain.C and H.domain is Domain.H:
        return to_complex(H)
    raise ValueError(f"no {domain.value} representation of a {H.domain.value} channel")


def _vecs_to(X: Matrix, domain: Domain) -> Matrix:
    """Columns of X (original domain) mapped into ``domain``."""
    if domain is X.domain:
        return X
    cols = []
    for s in range(X.cols):
        x = Matrix(X.data[:, s:s + 1], X.domain)
        v = vec_to_real(x) if domain is Domain.R else vec_to_complex(x)
        cols.append(v)
    arr = np.array(cols).T
    return Matrix.from_real(arr) if domain is Domain.R else Matrix.from_complex(arr)


def _vecs_from(Xw: Matrix, domain: Domain) -> np.ndarray:
    """Inverse of :func:`_vecs_to`, returning data of shape (K, S, 4)."""
    if domain is Xw.domain:
        return Xw.data
    out = []
    for s in range(Xw.cols):
        if Xw.domain is Domain.R:
            out.append(real_to_vec(Xw.data[:, s, 0], domain).data[:, 0])
        else:
            out.append(complex_to_vec(Xw.data[:, s, 0] + 1j * Xw.data[:, s, 1]).data[:, 0])
    return np.transpose(np.array(out), (1, 0, 2))


# factorization ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Equalizer:
    F: Matrix
    Z: RingMatrix
    Zinv: Matrix
    row_norms2: np.ndarray
    criterion: str
    method: str
    ring: RingId

    @property
    def worst_row_norm2(self) -> float:
        return float(np.max(self.row_norms2))


def _transform(G_dual: Matrix, ring: RingId, method: str, delta: float) -> RingMatrix:
    method = method.upper()
    if method == "LLL":
        return lll(G_dual, ring, delta).T
    if method == "SMP":
        return smp(G_dual, ring).T
    raise ValueError(f"unknown method {method!r}")


def _factorize(Hx: Matrix, N: int, ring: RingId, method: str, criterion: str,
               delta: float) -> Equalizer:
    if Hx.domain is not ring.domain:
        raise ValueError(f"ring {ring.value} needs a {ring.domain.value} channel")
    Hp = pinv(Hx)
    T = _transform(Hp.H, ring, method, delta)
    Z = T.H
    Zm = Z.to_matrix()
    Fa = Zm @ Hp
    F = Matrix(Fa.data[:, :N], Fa.domain)
    return Equalizer(F, Z, inverse(Zm), Fa.row_norms2(), criterion, method.upper(), ring)


def zf_factorize(H: Matrix, ring: RingId | str, method: str = "LLL",
                 delta: float = 1.0) -> Equalizer:
    """F = Z H^+ with Z^H taken from a reduction of the dual basis H^{+H}."""
    return _factorize(H, H.rows, as_ring(ring), method, "ZF", delta)


def mmse_factorize(H: Matrix, ring: RingId | str, method: str, sigma_n2: float,
                   sigma_x2: float, delta: float = 1.0) -> Equalizer:
    """Factorization of the augmented channel [H; (sigma_n/sigma_x) I]."""
    ring = as_ring(ring)
    aug = vstack([H, Matrix.identity(H.cols, H.domain).scale(math.sqrt(sigma_n2 / sigma_x2))])
    return _factorize(aug, H.rows, ring, method, "MMSE", delta)


def nearest_points(x: np.ndarray, const: Constellation) -> np.ndarray:
    """Index of the nearest constellation point for each entry of x[..., 4]."""
    d = np.sum((x[..., None, :] - const.points) ** 2, axis=-1)
    return np.argmin(d, axis=-1)


def equalize_detect(eq: Equalizer, y: Matrix, const: Constellation,
                    domain: Domain | None = None) -> np.ndarray:
    """Detected constellation indices for received columns ``y``.

    ``y`` lives in the equalizer's working domain; ``domain`` is the domain of
    the transmitted symbols (defaults to the working domain).
    """
    z = eq.F @ y
    zq = Matrix(quantize_array(eq.ring, z.data), z.domain)
    xw = eq.Zinv @ zq
    x = _vecs_from(xw, domain or xw.domain)
    return nearest_points(x, const)


# simulation --------------------------------------------------------------------

@dataclass(frozen=True)
class SerPoint:
    snr_db: float
    ser: float
    ci_radius: float
    errors: int
    symbols: int


def _draw_symbols(rng, K: int, S: int, const: Constellation) -> tuple[np.ndarray, Matrix]:
    idx = rng.integers(0, len(const.points), size=(K, S))
    return idx, Matrix(const.points[idx], const.domain)


def _noise(rng, N: int, S: int, domain: Domain, sigma_n2: float) -> Matrix:
    D = domain.dim
    d = np.zeros((N, S, 4))
    d[..., :D] = rng.standard_normal((N, S, D)) * math.sqrt(sigma_n2 / D)
    return Matrix(d, domain)


def simulate_ser(cfg: ChannelConfig, method: str, ring: RingId | str, snr_db: list[float],
                 trials: int, symbols_per_channel: int = 1000, seed: int = 0,
                 criterion: str = "MMSE", delta: float = 1.0) -> list[SerPoint]:
    """Block-fading SER of uncoded transmission with LRA/IF equalization."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ring = as_ring(ring)
    const = CONSTELLATIONS[cfg.constellation]
    work = ring.domain
    if work.dim > cfg.domain.dim:
        raise ValueError("ring domain exceeds the channel domain")
    errors = np.zeros(len(snr_db), dtype=np.int64)
    total = trials * cfg.K * symbols_per_channel
    for t in range(trials):
        rng = make_rng(seed, t)
        H = sample_channel(cfg, rng)
        idx, X = _draw_symbols(rng, cfg.K, symbols_per_channel, const)
        HX = H @ X
        Hw = equivalent_channel(H, work)
        for i, snr in enumerate(snr_db):
            c = cfg.with_snr(snr)
            noise = _noise(make_rng(seed, t, i + 1), cfg.N, symbols_per_channel,
                           cfg.domain, c.sigma_n2)
            if criterion.upper() == "ZF":
                eq = zf_factorize(Hw, ring, method, delta)
            else:
                eq = mmse_factorize(Hw, ring, method, c.sigma_n2, c.sigma_x2, delta)
            yw = _vecs_to(HX + noise, work)
            det = equalize_detect(eq, yw, const, cfg.domain)
            errors[i] += int(np.count_nonzero(det != idx))
    out = []
    for i, snr in enumerate(snr_db):
        p = errors[i] / total
        out.append(SerPoint(float(snr), float(p), 1.96 * math.sqrt(p * (1 - p) / total),
                            int(errors[i]), int(total)))
    return out


def achievable_rate(eq: Equalizer, sigma_x2: float, sigma_n2: float, D_r: int) -> float:
    """Worst-link rate (D_r/2) log2(sigma_x^2 / (max_k |f_k|^2 sigma_n^2)),
    floored at zero."""
    if sigma_x2 <= 0 or sigma_n2 <= 0:
        raise ValueError("variances must be positive")
    r = D_r / 2 * math.log2(sigma_x2 / (eq.worst_row_norm2 * sigma_n2))
    if r <= 0:
        log.warning("nonpositive rate %.3g reported as 0", r)
        return 0.0
    return r


@dataclass(frozen=True)
class RateSummary:
    mean: float
    quantile: float
    std_err: float
    trials: int
    clamped: int
    samples: np.ndarray


def rate_samples(cfg: ChannelConfig, method: str, ring: RingId | str, trials: int,
                 seed: int = 0, delta: float = 1.0) -> np.ndarray:
    """Per-channel MMSE worst-link rates; rates are per user of ``cfg.domain``."""
    ring = as_ring(ring)
    out = np.empty(trials)
    for t in range(trials):
        H = sample_channel(cfg, make_rng(seed, t))
        eq = mmse_factorize(equivalent_channel(H, ring.domain), ring, method,
                            cfg.sigma_n2, cfg.sigma_x2, delta)
        out[t] = achievable_rate(eq, cfg.sigma_x2, cfg.sigma_n2, cfg.domain.dim)
    return out


def rate_quantiles(cfg: ChannelConfig, method: str, ring: RingId | str, trials: int,
                   q: float = 0.01, seed: int = 0, delta: float = 1.0) -> RateSummary:
    from .cli import quantile
    r = rate_samples(cfg, method, ring, trials, seed, delta)
    se = float(np.std(r, ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return RateSummary(float(np.mean(r)), quantile(r, q), se, trials,
                       int(np.count_nonzero(r == 0.0)), r)


def diversity_order(cfg: ChannelConfig) -> float:
    return cfg.domain.dim / 2 * cfg.N
