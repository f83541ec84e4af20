"""Successive minima via a list sphere decoder.

The lattice is expanded to its real representation over Z, LLL-reduced to
shrink the search radius, and every lattice point inside the ball is listed.
The candidates are mapped back to the ring, sorted by length, and the
shortest independent ones are picked by a row-echelon sweep.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .linalg import (HAM, Matrix, RankDeficientError, RingMatrix, _rank_tol, gso_pivot,
                     ring_to_Z, z_to_ring_coords)
from .reduction import lll
from .rings import Domain, RingId, as_ring, coords_to_values

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


class InsufficientRankError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CandidateList:
    """Canonical (one per +/- pair) nonzero coefficient vectors, as columns."""

    C: np.ndarray
    radius2: float

    @property
    def n_canonical(self) -> int:
        return self.C.shape[1]

    @property
    def N_c(self) -> int:
        # lattice points in the ball excluding the origin, both signs counted
        return 2 * self.C.shape[1]


def _lead_sign(rows: np.ndarray) -> np.ndarray:
    first = np.argmax(rows != 0, axis=1)
    return np.sign(rows[np.arange(len(rows)), first])


def _canonical(rows: np.ndarray) -> np.ndarray:
    return rows[_lead_sign(rows) > 0]


def list_sphere_decode(G_real: Matrix, radius2: float) -> CandidateList:
    """All nonzero integer c with |G_real c|^2 <= radius2, one per sign pair
    (first nonzero coordinate positive)."""
    if G_real.domain is not Domain.R:
        raise ValueError("list_sphere_decode needs a real matrix")
    if not radius2 > 0:
        raise ValueError("radius2 must be positive")
    B = G_real.real()
    R = np.linalg.qr(B, mode="r")
    if np.min(np.abs(np.diag(R))) <= _rank_tol(G_real):
        raise RankDeficientError("rank_deficient generator in sphere decoder")
    pts = kern.enumerate_ball(np.ascontiguousarray(R), float(radius2))
    return CandidateList(np.ascontiguousarray(_canonical(pts).T), float(radius2))


def _left_mul(s: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """s * rows[i] for a single quaternion s and an array of quaternions."""
    return np.einsum("a,nb,abc->nc", s, rows, HAM)


def row_echelon(C: Matrix, K: int | None = None, tol: float = 1e-9) -> list[int]:
    """Indices (0-based) of the columns where the row-echelon form of ``C``
    gains a new dimension. Rows are normalized by a left inverse and
    eliminated with left coefficients."""
    A = C.data.copy()
    K = C.rows if K is None else K
    Nc = C.cols
    thresh = (tol * max(1.0, float(np.max(np.abs(A))))) ** 2
    idx: list[int] = []
    k = 0
    for l in range(Nc):
        if k == K:
            break
        mags = np.sum(A[k:, l] ** 2, axis=1)
        hits = np.nonzero(mags > thresh)[0]
        if len(hits) == 0:
            continue
        m = k + int(hits[0])
        if m != k:
            A[[k, m], l:] = A[[m, k], l:]
        p = A[k, l]
        pinv = p * _CONJ / float(p @ p)
        A[k, l:] = _left_mul(pinv, A[k, l:])
        for n in range(k + 1, A.shape[0]):
            c = A[n, l].copy()
            if np.any(c != 0):
                A[n, l:] -= _left_mul(c, A[k, l:])
        idx.append(l)
        k += 1
    if k < K:
        raise InsufficientRankError("insufficient rank in candidate list")
    return idx


@dataclass(frozen=True, eq=False)
class SmpResult:
    ring: RingId
    T: RingMatrix
    G_tra: Matrix
    minima: np.ndarray
    N_c: int
    radius2: float

    def to_json(self) -> str:
        k = self.T.coords
        vals = coords_to_values(self.ring, k)
        D = self.ring.domain.dim
        grid = [[[_num(v) for v in vals[i, j, :D]] for j in range(k.shape[1])]
                for i in range(k.shape[0])]
        return json.dumps({"ring": self.ring.value, "minima": [float(m) for m in self.minima],
                           "T": grid, "N_c": int(self.N_c), "radius2": float(self.radius2)})


def _num(x: float):
    return int(x) if float(x).is_integer() else float(x)


def _sort_order(norms2: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """Ascending norms; ties (to 1e-12 relative) broken lexicographically."""
    scale = float(np.max(norms2)) if len(norms2) else 1.0
    tie = np.round(norms2 / scale * 1e12)
    cols = [keys[i] for i in range(keys.shape[0] - 1, -1, -1)]
    return np.lexsort(cols + [tie])


def smp(G: Matrix, ring: RingId | str) -> SmpResult:
    """Successive minima of the lattice spanned by G over ``ring``."""
    ring = as_ring(ring)
    if G.domain is not ring.domain:
        raise ValueError(f"ring {ring.value} needs a {ring.domain.value} matrix")
    gso_pivot(G)  # rank check
    K = G.cols
    Gr = ring_to_Z(G, ring)
    red = lll(Gr, RingId.Z, 1.0)
    radius2 = float(np.max(red.G_red.col_norms2()))
    cand = list_sphere_decode(red.G_red, radius2)
    T_lll = red.T.coords[..., 0]
    C = T_lll @ cand.C
    # re-canonicalize in the original coordinates so the result does not
    # depend on the intermediate reduced basis
    C = C * _lead_sign(C.T)
    coords = z_to_ring_coords(C, ring, K)
    norms2 = np.sum((Gr.real() @ C) ** 2, axis=0)
    flat_keys = C
    order = _sort_order(norms2, flat_keys)
    coords = coords[:, order]
    norms2 = norms2[order]
    Cs = Matrix(coords_to_values(ring, coords), ring.domain)
    idx = row_echelon(Cs, K)
    T = RingMatrix(ring, coords[:, idx])
    G_tra = G @ T.to_matrix()
    minima = np.sqrt(norms2[idx])
    return SmpResult(ring, T, G_tra, minima, cand.N_c, radius2)


@dataclass(frozen=True)
class RepetitionReport:
    ring_minima: np.ndarray
    real_minima: np.ndarray
    ok: bool
    max_rel_err: float


def verify_minima_repetition(G: Matrix, ring: RingId | str, tol: float = 1e-7
                             ) -> RepetitionReport:
    """Compare ring minima with the minima of the equivalent lattice over Z,
    where each ring minimum should appear D_r times."""
    ring = as_ring(ring)
    mu = smp(G, ring).minima
    mu_r = smp(ring_to_Z(G, ring), RingId.Z).minima
    expect = np.repeat(mu, ring.props.D_r)
    err = float(np.max(np.abs(mu_r - expect) / expect))
    return RepetitionReport(mu, mu_r, err <= tol, err)
