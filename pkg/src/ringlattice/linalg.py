"""Matrices over R, C and H, Gram-Schmidt with pivoting, and equivalent
real/complex representations of lattice generator matrices."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .rings import (Domain, RingId, Scalar, as_domain, as_ring,
                    coords_to_values)

RANK_TOL = 1e-10

# structure constants of the Hamilton product: (uv)_c = sum u_a v_b HAM[a, b, c]
HAM = np.zeros((4, 4, 4))
for _a, _b, _c, _s in [
    (0, 0, 0, 1), (1, 1, 0, -1), (2, 2, 0, -1), (3, 3, 0, -1),
    (0, 1, 1, 1), (1, 0, 1, 1), (2, 3, 1, 1), (3, 2, 1, -1),
    (0, 2, 2, 1), (1, 3, 2, -1), (2, 0, 2, 1), (3, 1, 2, 1),
    (0, 3, 3, 1), (1, 2, 3, 1), (2, 1, 3, -1), (3, 0, 3, 1),
]:
    HAM[_a, _b, _c] = _s

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


class RankDeficientError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense N x K matrix; ``data`` has shape (N, K, 4)."""

    data: np.ndarray
    domain: Domain

    def __post_init__(self):
        d = np.array(self.data, dtype=float, copy=True)
        if d.ndim != 3 or d.shape[2] != 4:
            raise ValueError("matrix data must have shape (N, K, 4)")
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError("empty matrix")
        dom = as_domain(self.domain)
        if np.any(d[..., dom.dim:] != 0):
            raise ValueError(f"entries outside the {dom.value} domain")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)
        object.__setattr__(self, "domain", dom)

    # construction -------------------------------------------------------
    @classmethod
    def from_real(cls, a) -> Matrix:
        a = np.atleast_2d(np.asarray(a, dtype=float))
        d = np.zeros(a.shape + (4,))
        d[..., 0] = a
        return cls(d, Domain.R)

    @classmethod
    def from_complex(cls, a) -> Matrix:
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        d = np.zeros(a.shape + (4,))
        d[..., 0] = a.real
        d[..., 1] = a.imag
        return cls(d, Domain.C)

    @classmethod
    def from_quat(cls, a) -> Matrix:
        """From an array of shape (N, K, 4) holding quaternion components."""
        return cls(np.asarray(a, dtype=float), Domain.H)

    @classmethod
    def from_scalars(cls, rows) -> Matrix:
        rows = [list(r) for r in rows]
        dom = rows[0][0].domain
        if any(s.domain is not dom for r in rows for s in r):
            raise ValueError("mixed domains")
        return cls(np.array([[s.as_array() for s in r] for r in rows]), dom)

    @classmethod
    def identity(cls, K: int, domain: Domain | str = Domain.R) -> Matrix:
        d = np.zeros((K, K, 4))
        d[np.arange(K), np.arange(K), 0] = 1.0
        return cls(d, as_domain(domain))

    @classmethod
    def from_columns(cls, cols: np.ndarray, domain: Domain) -> Matrix:
        return cls(np.transpose(cols, (1, 0, 2)), domain)

    # views ----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, idx) -> Scalar:
        i, j = idx
        return Scalar.from_array(self.data[i, j], self.domain)

    def columns(self) -> np.ndarray:
        """Column-first contiguous copy, shape (K, N, 4)."""
        return np.transpose(self.data, (1, 0, 2)).copy()

    def real(self) -> np.ndarray:
        if self.domain is not Domain.R:
            raise ValueError("not a real matrix")
        return self.data[..., 0].copy()

    def complex(self) -> np.ndarray:
        if self.domain is Domain.H:
            raise ValueError("quaternion matrix has no complex array view")
        return self.data[..., 0] + 1j * self.data[..., 1]

    def lift(self, domain: Domain | str) -> Matrix:
        domain = as_domain(domain)
        if domain.dim < self.domain.dim:
            raise ValueError("cannot narrow a matrix")
        return Matrix(self.data, domain)

    # arithmetic -----------------------------------------------------------
    def _same(self, other: Matrix) -> None:
        if not isinstance(other, Matrix):
            raise TypeError("expected Matrix")
        if other.domain is not self.domain:
            raise ValueError(f"domain mismatch: {self.domain.value} vs {other.domain.value}")

    def __add__(self, other: Matrix) -> Matrix:
        self._same(other)
        return Matrix(self.data + other.data, self.domain)

    def __sub__(self, other: Matrix) -> Matrix:
        self._same(other)
        return Matrix(self.data - other.data, self.domain)

    def __neg__(self) -> Matrix:
        return Matrix(-self.data, self.domain)

    def __matmul__(self, other: Matrix) -> Matrix:
        self._same(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.domain is Domain.R:
            return Matrix.from_real(self.real() @ other.real())
        if self.domain is Domain.C:
            return Matrix.from_complex(self.complex() @ other.complex())
        return Matrix(np.einsum("nma,mkb,abc->nkc", self.data, other.data, HAM), Domain.H)

    def scale(self, x: float) -> Matrix:
        return Matrix(self.data * x, self.domain)

    @property
    def H(self) -> Matrix:
        """Hermitian (conjugate) transpose."""
        return Matrix(np.transpose(self.data, (1, 0, 2)) * _CONJ, self.domain)

    def col_norms2(self) -> np.ndarray:
        return np.sum(self.data ** 2, axis=(0, 2))

    def row_norms2(self) -> np.ndarray:
        return np.sum(self.data ** 2, axis=(1, 2))

    def max_abs_diff(self, other: Matrix) -> float:
        return float(np.max(np.abs(self.data - other.data)))

    def fro(self) -> float:
        return float(np.sqrt(np.sum(self.data ** 2)))

    def __repr__(self) -> str:
        return f"Matrix({self.domain.value}, {self.rows}x{self.cols})"


def hstack(mats: list[Matrix]) -> Matrix:
    return Matrix(np.concatenate([m.data for m in mats], axis=1), mats[0].domain)


def vstack(mats: list[Matrix]) -> Matrix:
    return Matrix(np.concatenate([m.data for m in mats], axis=0), mats[0].domain)


# equivalent representations ------------------------------------------------

def to_real(M: Matrix) -> Matrix:
    """Real representation: 2N x 2K for complex, 4N x 4K for quaternion input."""
    d = M.data
    if M.domain is Domain.C:
        a, b = d[..., 0], d[..., 1]
        return Matrix.from_real(np.block([[a, -b], [b, a]]))
    if M.domain is Domain.H:
        m1, m2, m3, m4 = (d[..., i] for i in range(4))
        return Matrix.from_real(np.block([
            [m1, -m2, -m3, -m4],
            [m2, m1, -m4, m3],
            [m3, m4, m1, -m2],
            [m4, -m3, m2, m1],
        ]))
    raise ValueError("to_real expects a complex or quaternion matrix")


def to_complex(M: Matrix) -> Matrix:
    """Complex representation [[M1, -M2], [M2*, M1*]] of a quaternion matrix,
    with M1 = m1 + m2 i and M2 = m3 + m4 i."""
    if M.domain is not Domain.H:
        raise ValueError("to_complex expects a quaternion matrix")
    d = M.data
    z1 = d[..., 0] + 1j * d[..., 1]
    z2 = d[..., 2] + 1j * d[..., 3]
    return Matrix.from_complex(np.block([[z1, -z2], [z2.conj(), z1.conj()]]))


def from_complex_rep(Mc: Matrix) -> Matrix:
    """Inverse of :func:`to_complex` (reads the first block row)."""
    if Mc.domain is not Domain.C or Mc.rows % 2 or Mc.cols % 2:
        raise ValueError("expected a 2N x 2K complex matrix")
    c = Mc.complex()
    N, K = Mc.rows // 2, Mc.cols // 2
    z1 = c[:N, :K]
    z2 = -c[:N, K:]
    d = np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)
    return Matrix(d, Domain.H)


def from_real_rep(Mr: Matrix, domain: Domain | str) -> Matrix:
    """Inverse of :func:`to_real` (reads the first block column)."""
    domain = as_domain(domain)
    D = domain.dim
    r = Mr.real()
    N, K = r.shape[0] // D, r.shape[1] // D
    d = np.zeros((N, K, 4))
    for c in range(D):
        d[..., c] = r[c * N:(c + 1) * N, :K]
    return Matrix(d, domain)


def vec_to_real(y: Matrix) -> np.ndarray:
    """Stacked component vector of an N x 1 matrix (first column of to_real)."""
    if y.domain is Domain.R:
        return y.real()[:, 0]
    return to_real(y).real()[:, 0]


def real_to_vec(v: np.ndarray, domain: Domain | str) -> Matrix:
    domain = as_domain(domain)
    D = domain.dim
    N = len(v) // D
    d = np.zeros((N, 1, 4))
    for c in range(D):
        d[:, 0, c] = v[c * N:(c + 1) * N]
    return Matrix(d, domain)


def vec_to_complex(y: Matrix) -> np.ndarray:
    """[y{1}; conj(y{2})] for a quaternion column vector."""
    return to_complex(y).complex()[:, 0]


def complex_to_vec(v: np.ndarray) -> Matrix:
    N = len(v) // 2
    z1 = v[:N]
    z2 = v[N:].conj()
    d = np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)[:, None, :]
    return Matrix(d, Domain.H)


# determinants, inverses ------------------------------------------------------

def _gram_logdet(G: Matrix) -> float:
    """log det(G^H G) from the R factor of a QR decomposition, which avoids
    squaring the condition number; H goes through the complex representation."""
    if G.domain is Domain.H:
        return 0.5 * _gram_logdet(to_complex(G))
    a = G.real() if G.domain is Domain.R else G.complex()
    d = np.abs(np.diag(np.linalg.qr(a, mode="r")))
    if d.size < G.cols or np.any(d == 0):
        raise RankDeficientError("rank_deficient: singular Gramian")
    return float(2 * np.sum(np.log(d)))


def _check_rank(G: Matrix) -> None:
    gso_pivot(G)


def volume(G: Matrix) -> float:
    """sqrt(det(G^H G))."""
    _check_rank(G)
    return math.exp(0.5 * _gram_logdet(G))


def gram_det(G: Matrix) -> float:
    return math.exp(_gram_logdet(G))


def orth_defect(G: Matrix) -> float:
    """Product of the column norms over the volume."""
    _check_rank(G)
    return math.exp(0.5 * np.sum(np.log(G.col_norms2())) - 0.5 * _gram_logdet(G))


def pinv(G: Matrix) -> Matrix:
    """Left pseudoinverse (G^H G)^-1 G^H."""
    if G.domain is Domain.R:
        return Matrix.from_real(np.linalg.pinv(G.real()))
    if G.domain is Domain.C:
        return Matrix.from_complex(np.linalg.pinv(G.complex()))
    return from_complex_rep(pinv(to_complex(G)))


def inverse(G: Matrix) -> Matrix:
    if G.rows != G.cols:
        raise ValueError("inverse needs a square matrix")
    if G.domain is Domain.R:
        return Matrix.from_real(np.linalg.inv(G.real()))
    if G.domain is Domain.C:
        return Matrix.from_complex(np.linalg.inv(G.complex()))
    return from_complex_rep(inverse(to_complex(G)))


# Gram-Schmidt ------------------------------------------------------------------

@dataclass(frozen=True)
class GsoResult:
    Q: Matrix
    R: Matrix
    P: Matrix
    perm: tuple[int, ...]
    qnorms2: np.ndarray


def _rank_tol(G: Matrix) -> float:
    return RANK_TOL * float(np.sqrt(np.max(G.col_norms2())))


def gso_pivot(G: Matrix, pivot: bool = True) -> GsoResult:
    """G P = Q R with unit-diagonal R; pivoting picks the shortest remaining
    projected column at each step (lowest index on ties)."""
    Q, R, perm, qn, bad = kern.gso(G.columns(), G.domain.dim, pivot, _rank_tol(G))
    if bad >= 0:
        raise RankDeficientError(f"rank_deficient at column {bad + 1}")
    K = G.cols
    P = np.zeros((K, K, 4))
    P[perm, np.arange(K), 0] = 1.0
    return GsoResult(Matrix.from_columns(Q, G.domain), Matrix(R, G.domain),
                     Matrix(P, G.domain), tuple(int(p) for p in perm), qn)


def gso(G: Matrix) -> GsoResult:
    return gso_pivot(G, pivot=False)


# ring <-> Z --------------------------------------------------------------------

def ring_generator(ring: RingId | str, K: int) -> np.ndarray:
    """Right factor G_I mapping Z coordinates to ring components."""
    ring = as_ring(ring)
    D = ring.props.D_r
    if ring is RingId.E:
        I = np.eye(K)
        return np.block([[I, -0.5 * I], [np.zeros((K, K)), math.sqrt(3.0) / 2 * I]])
    if ring is RingId.H:
        g = np.eye(4 * K)
        for b in range(4):
            g[b * K:(b + 1) * K, 3 * K:] = 0.5 * np.eye(K)
        return g
    return np.eye(D * K)


def ring_to_Z(G: Matrix, ring: RingId | str) -> Matrix:
    """Equivalent real generator matrix over Z: to_real(G) G_I."""
    ring = as_ring(ring)
    if G.domain is not ring.domain:
        raise ValueError(f"ring {ring.value} needs a {ring.domain.value} matrix")
    Gr = G if G.domain is Domain.R else to_real(G)
    return Matrix.from_real(Gr.real() @ ring_generator(ring, G.cols))


def z_to_ring_coords(C: np.ndarray, ring: RingId | str, K: int) -> np.ndarray:
    """Integer coordinate vectors over Z -> exact ring coordinates (K, Nc, 4)."""
    ring = as_ring(ring)
    C = np.asarray(C, dtype=np.int64)
    if C.ndim == 1:
        C = C[:, None]
    D = ring.props.D_r
    if C.shape[0] != D * K:
        raise ValueError(f"expected {D * K} rows, got {C.shape[0]}")
    blocks = [C[b * K:(b + 1) * K] for b in range(D)]
    out = np.zeros((K, C.shape[1], 4), dtype=np.int64)
    if ring is RingId.H:
        a, b, c, d = blocks
        out[..., 0] = 2 * a + d
        out[..., 1] = 2 * b + d
        out[..., 2] = 2 * c + d
        out[..., 3] = d
    else:
        # for E the two blocks are already the coordinates w.r.t. (1, w)
        for i, blk in enumerate(blocks):
            out[..., i] = blk
    return out


def ring_coords_to_Z(coords: np.ndarray, ring: RingId | str) -> np.ndarray:
    """Inverse of :func:`z_to_ring_coords`."""
    ring = as_ring(ring)
    k = np.asarray(coords, dtype=np.int64)
    D = ring.props.D_r
    if ring is RingId.H:
        d = k[..., 3]
        blocks = [(k[..., 0] - d) // 2, (k[..., 1] - d) // 2, (k[..., 2] - d) // 2, d]
    else:
        blocks = [k[..., i] for i in range(D)]
    return np.concatenate(blocks, axis=0)


def Z_to_ring(C: np.ndarray, ring: RingId | str, K: int) -> Matrix:
    """Reconvert Z coordinate columns to K x Nc ring-element columns."""
    ring = as_ring(ring)
    return Matrix(coords_to_values(ring, z_to_ring_coords(C, ring, K)), ring.domain)


@dataclass(frozen=True, eq=False)
class RingMatrix:
    """Matrix of exact ring elements stored as coordinates, shape (N, K, 4)."""

    ring: RingId
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.int64, copy=True)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "ring", as_ring(self.ring))

    @property
    def shape(self) -> tuple[int, int]:
        return self.coords.shape[0], self.coords.shape[1]

    def to_matrix(self) -> Matrix:
        return Matrix(coords_to_values(self.ring, self.coords), self.ring.domain)

    def entry(self, i: int, j: int):
        from .rings import RingInt
        return RingInt(self.ring, tuple(self.coords[i, j, : self.ring.props.coord_dim]))

    def columns(self, idx) -> RingMatrix:
        return RingMatrix(self.ring, self.coords[:, idx])

    @property
    def H(self) -> RingMatrix:
        k = np.transpose(self.coords, (1, 0, 2)).copy()
        if self.ring is RingId.E:
            # conj(a + b w) = (a - b) - b w
            k[..., 0] = k[..., 0] - k[..., 1]
            k[..., 1] = -k[..., 1]
        else:
            k[..., 1:] = -k[..., 1:]
        return RingMatrix(self.ring, k)


# file formats --------------------------------------------------------------------

def _num(x: float):
    return int(x) if float(x).is_integer() else float(x)


def matrix_to_json(M: Matrix) -> str:
    data = [[[_num(c) for c in M.data[i, j]] for j in range(M.cols)] for i in range(M.rows)]
    return json.dumps({"domain": M.domain.value, "rows": M.rows, "cols": M.cols,
                       "data": [e for row in data for e in row]})


def matrix_from_json(text: str) -> Matrix:
    obj = json.loads(text)
    rows, cols = int(obj["rows"]), int(obj["cols"])
    d = np.array(obj["data"], dtype=float)
    if d.shape[0] != rows * cols:
        raise ValueError("data length does not match rows*cols")
    if d.shape[1] < 4:
        d = np.pad(d, ((0, 0), (0, 4 - d.shape[1])))
    return Matrix(d.reshape(rows, cols, 4), Domain(obj["domain"]))


def matrix_to_csv(M: Matrix) -> str:
    D = M.domain.dim
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"#{M.domain.value}", M.rows, M.cols])
    for i in range(M.rows):
        w.writerow([repr(_num(M.data[i, j, c])) for j in range(M.cols) for c in range(D)])
    return buf.getvalue()


def matrix_from_csv(text: str) -> Matrix:
    rows = list(csv.reader(io.StringIO(text)))
    head = rows[0]
    domain = Domain(head[0].lstrip("#"))
    N, K = int(head[1]), int(head[2])
    D = domain.dim
    vals = np.array([[float(x) for x in r] for r in rows[1:N + 1]])
    if vals.shape != (N, K * D):
        raise ValueError("CSV body does not match the header")
    d = np.zeros((N, K, 4))
    d[..., :D] = vals.reshape(N, K, D)
    return Matrix(d, domain)


def load_matrix(path: str) -> Matrix:
    with open(path) as f:
        text = f.read()
    if path.endswith(".csv"):
        return matrix_from_csv(text)
    return matrix_from_json(text)


def save_matrix(M: Matrix, path: str) -> None:
    with open(path, "w") as f:
        f.write(matrix_to_csv(M) if path.endswith(".csv") else matrix_to_json(M))
