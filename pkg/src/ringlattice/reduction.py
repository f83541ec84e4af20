"""Generalized size reduction and LLL reduction over the integer rings."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .linalg import (Matrix, RankDeficientError, RingMatrix, _rank_tol, gram_det,
                     gso)
from .rings import TOL, Domain, MultCost, RingId, Scalar, as_ring, norm2, quantize

log = logging.getLogger(__name__)

MAX_ITER = 10_000_000
INOPERATIVE_TOL = 1e-9


@dataclass(frozen=True)
class ReductionConfig:
    ring: RingId
    delta: float = 1.0

    def __post_init__(self):
        ring = as_ring(self.ring)
        object.__setattr__(self, "ring", ring)
        if not ring.props.delta_ok(self.delta):
            if ring.props.euclidean:
                raise ValueError(f"delta must lie in ({ring.props.delta_min:.4g}, 1] "
                                 f"for ring {ring.value}, got {self.delta}")
            raise ValueError(f"ring {ring.value} requires delta = 1, got {self.delta}")


@dataclass(frozen=True)
class Counters:
    iterations: int = 0
    swaps: int = 0
    size_reductions: int = 0
    scalar_mults: int = 0
    scaled_mults: int = 0
    inoperative: int = 0

    def real_mults(self, domain: Domain, cost: MultCost = MultCost.NAIVE) -> int:
        """Real multiplications: full scalar products cost N_r, products of a
        scalar with a real number (and squared magnitudes) cost D_r."""
        return cost.n_r(domain) * self.scalar_mults + domain.dim * self.scaled_mults


@dataclass(frozen=True)
class ReductionResult:
    G_red: Matrix
    Q: Matrix
    R: Matrix
    T: RingMatrix
    counters: Counters = field(default_factory=Counters)
    config: ReductionConfig | None = None

    @property
    def T_matrix(self) -> Matrix:
        return self.T.to_matrix()


def _counters(stats: np.ndarray) -> Counters:
    return Counters(int(stats[kern.ST_ITER]), int(stats[kern.ST_SWAP]),
                    int(stats[kern.ST_SIZERED]), int(stats[kern.ST_SCALAR]),
                    int(stats[kern.ST_REAL]), int(stats[kern.ST_INOP]))


def _check_domain(G: Matrix, ring: RingId) -> None:
    if G.domain is not ring.domain:
        raise ValueError(f"ring {ring.value} needs a {ring.domain.value} matrix, "
                         f"got {G.domain.value}")


def lll(G: Matrix, cfg: ReductionConfig | RingId | str, delta: float | None = None
        ) -> ReductionResult:
    """Generalized LLL reduction: returns G_red = G T with T unimodular over
    the ring. ``cfg`` may be a config or a ring (then ``delta`` defaults to 1)."""
    if not isinstance(cfg, ReductionConfig):
        cfg = ReductionConfig(as_ring(cfg), 1.0 if delta is None else delta)
    ring = cfg.ring
    _check_domain(G, ring)
    guard = INOPERATIVE_TOL if ring is RingId.L else 0.0
    B, Q, R, T, _, _, stats = kern.lll(G.columns(), ring.code, float(cfg.delta),
                                       _rank_tol(G), guard, MAX_ITER)
    status = int(stats[kern.ST_STATUS])
    if status > 0:
        raise RankDeficientError(f"rank_deficient at column {status}")
    if status < 0:
        raise RuntimeError("LLL did not terminate within the iteration limit")
    cnt = _counters(stats)
    if cnt.inoperative:
        log.info("LLL over %s: %d inoperative Lovasz steps", ring.value, cnt.inoperative)
    Tm = RingMatrix(ring, np.transpose(T, (1, 0, 2)))
    # recompute from the exact transform so that G_red = G T holds tightly
    G_red = G @ Tm.to_matrix()
    return ReductionResult(G_red, Matrix.from_columns(Q, G.domain), Matrix(R, G.domain),
                           Tm, cnt, cfg)


def pseudo_qlll(G: Matrix) -> ReductionResult:
    """LLL over the Lipschitz integers with delta = 1."""
    return lll(G, ReductionConfig(RingId.L, 1.0))


def size_reduce(G_red: Matrix, R: Matrix, T: RingMatrix, l: int, k: int,
                ring: RingId | str) -> tuple[Matrix, Matrix, RingMatrix]:
    """Size-reduce entry r[l, k] (1-based, l < k); returns new (G_red, R, T)."""
    ring = as_ring(ring)
    K = G_red.cols
    if not 1 <= l < k <= K:
        raise IndexError(f"need 1 <= l < k <= {K}, got l={l}, k={k}")
    B = G_red.columns()
    Rc = R.data.copy()
    Tc = np.transpose(T.coords, (1, 0, 2)).copy()
    stats = np.zeros(kern.N_STATS, dtype=np.int64)
    kern.size_reduce(B, Rc, Tc, l - 1, k - 1, ring.code, stats)
    return (Matrix.from_columns(B, G_red.domain), Matrix(Rc, R.domain),
            RingMatrix(ring, np.transpose(Tc, (1, 0, 2))))


def update_qr(Q: Matrix, R: Matrix, k: int) -> tuple[Matrix, Matrix]:
    """GSO factors after swapping basis columns k-1 and k (1-based k)."""
    K = Q.cols
    if not 2 <= k <= K:
        raise IndexError(f"need 2 <= k <= {K}, got {k}")
    Qc = Q.columns()
    Rc = R.data.copy()
    qn = np.sum(Qc ** 2, axis=(1, 2))
    stats = np.zeros(kern.N_STATS, dtype=np.int64)
    kern.update_qr(Qc, Rc, qn, k - 1, Q.domain.dim, stats)
    return Matrix.from_columns(Qc, Q.domain), Matrix(Rc, R.domain)


@dataclass(frozen=True)
class Certificate:
    ok: bool
    condition: str = ""
    l: int = 0
    k: int = 0

    def __bool__(self) -> bool:
        return self.ok


def is_lll_reduced(G_red: Matrix, ring: RingId | str, delta: float,
                   tol: float = TOL) -> Certificate:
    """Check both conditions of generalized LLL reduction on a fresh
    (unpivoted) GSO. Indices in the report are 1-based. The Lipschitz ring
    skips the Lovasz test wherever |r_{k-1,k}| reaches 1."""
    ring = as_ring(ring)
    res = gso(G_red)
    R = res.R.data
    qn = res.qnorms2
    K = G_red.cols
    for k in range(1, K):
        r = R[k - 1, k]
        rr = float(r @ r)
        if ring is RingId.L and rr >= 1.0 - INOPERATIVE_TOL:
            pass
        elif qn[k] < (delta - rr) * qn[k - 1] - tol * qn[k - 1]:
            return Certificate(False, "lovasz", k, k + 1)
        for l in range(k):
            s = Scalar.from_array(R[l, k], ring.domain)
            q = quantize(ring, s)
            if norm2(q) != 0.0 and norm2(s) - norm2(s - q) > tol * max(1.0, norm2(s)):
                return Certificate(False, "size", l + 1, k + 1)
    return Certificate(True)


def unimodularity(T: Matrix) -> float:
    """det(T^H T); quaternion matrices go through the complex representation."""
    return gram_det(T)
