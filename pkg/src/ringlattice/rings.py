"""Scalars over R, C and H, and the five integer rings Z, G, E, L, H."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern

TOL = 1e-9


class Domain(enum.Enum):
    R = "R"
    C = "C"
    H = "H"

    @property
    def dim(self) -> int:
        return _DOMAIN_DIM[self]


_DOMAIN_DIM = {Domain.R: 1, Domain.C: 2, Domain.H: 4}


class RingId(enum.Enum):
    Z = "Z"
    G = "G"
    E = "E"
    L = "L"
    H = "H"

    @property
    def props(self) -> RingProps:
        return RING_PROPS[self]

    @property
    def code(self) -> int:
        return _RING_CODE[self]

    @property
    def domain(self) -> Domain:
        return self.props.domain


_RING_CODE = {RingId.Z: kern.RING_Z, RingId.G: kern.RING_G, RingId.E: kern.RING_E,
              RingId.L: kern.RING_L, RingId.H: kern.RING_H}


@dataclass(frozen=True)
class RingProps:
    domain: Domain
    D_r: int
    eps2: float
    euclidean: bool
    delta_min: float
    coord_dim: int

    def delta_ok(self, delta: float) -> bool:
        if not self.euclidean:
            return delta == 1.0
        return self.delta_min < delta <= 1.0


RING_PROPS = {
    RingId.Z: RingProps(Domain.R, 1, 0.25, True, 0.25, 1),
    RingId.G: RingProps(Domain.C, 2, 0.5, True, 0.5, 2),
    RingId.E: RingProps(Domain.C, 2, 1 / 3, True, 1 / 3, 2),
    RingId.L: RingProps(Domain.H, 4, 1.0, False, 1.0, 4),
    RingId.H: RingProps(Domain.H, 4, 0.5, True, 0.5, 4),
}


def as_ring(ring: RingId | str) -> RingId:
    return ring if isinstance(ring, RingId) else RingId(ring)


def as_domain(domain: Domain | str) -> Domain:
    return domain if isinstance(domain, Domain) else Domain(domain)


class MultCost(enum.Enum):
    """Real multiplications per scalar product, per domain."""

    NAIVE = "naive"
    REDUCED = "reduced"

    def n_r(self, domain: Domain) -> int:
        if domain is Domain.R:
            return 1
        if domain is Domain.C:
            return 4 if self is MultCost.NAIVE else 3
        return 16 if self is MultCost.NAIVE else 8


@dataclass(frozen=True)
class Scalar:
    """Quaternion ``c1 + c2 i + c3 j + c4 k`` tagged with its domain."""

    c1: float
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0
    domain: Domain = Domain.H

    def __post_init__(self):
        d = self.domain.dim
        if d < 4 and (self.c3 != 0 or self.c4 != 0):
            raise ValueError(f"{self.domain.value} scalar with j/k parts")
        if d < 2 and self.c2 != 0:
            raise ValueError("real scalar with imaginary part")

    @classmethod
    def real(cls, x: float) -> Scalar:
        return cls(float(x), domain=Domain.R)

    @classmethod
    def complex(cls, z: complex) -> Scalar:
        z = complex(z)
        return cls(z.real, z.imag, domain=Domain.C)

    @classmethod
    def quat(cls, a, b=0.0, c=0.0, d=0.0) -> Scalar:
        return cls(float(a), float(b), float(c), float(d), Domain.H)

    @classmethod
    def from_array(cls, v, domain: Domain) -> Scalar:
        v = [float(x) for x in v]
        v += [0.0] * (4 - len(v))
        return cls(*v[:4], domain=domain)

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c4])

    def lift(self, domain: Domain) -> Scalar:
        """View this scalar inside a larger domain."""
        if domain.dim < self.domain.dim:
            raise ValueError(f"cannot narrow {self.domain.value} to {domain.value}")
        return Scalar(self.c1, self.c2, self.c3, self.c4, domain)

    def _check(self, other: Scalar) -> None:
        if not isinstance(other, Scalar):
            raise TypeError(f"expected Scalar, got {type(other).__name__}")
        if other.domain is not self.domain:
            raise ValueError(f"domain mismatch: {self.domain.value} vs {other.domain.value}")

    def __add__(self, other: Scalar) -> Scalar:
        self._check(other)
        return Scalar(self.c1 + other.c1, self.c2 + other.c2,
                      self.c3 + other.c3, self.c4 + other.c4, self.domain)

    def __sub__(self, other: Scalar) -> Scalar:
        self._check(other)
        return Scalar(self.c1 - other.c1, self.c2 - other.c2,
                      self.c3 - other.c3, self.c4 - other.c4, self.domain)

    def __neg__(self) -> Scalar:
        return Scalar(-self.c1, -self.c2, -self.c3, -self.c4, self.domain)

    def __mul__(self, other: Scalar) -> Scalar:
        return qmul(self, other)

    def scale(self, x: float) -> Scalar:
        return Scalar(self.c1 * x, self.c2 * x, self.c3 * x, self.c4 * x, self.domain)

    def isclose(self, other: Scalar, tol: float = TOL) -> bool:
        return norm2(self - other) <= tol * tol * max(1.0, norm2(self), norm2(other))


def qmul(u: Scalar, v: Scalar) -> Scalar:
    """Hamilton product ``u v`` (reduces to the complex/real product)."""
    u._check(v)
    p = kern.qmul(u.c1, u.c2, u.c3, u.c4, v.c1, v.c2, v.c3, v.c4)
    return Scalar(*p, domain=u.domain)


def conj(s: Scalar) -> Scalar:
    return Scalar(s.c1, -s.c2, -s.c3, -s.c4, s.domain)


def norm2(s: Scalar) -> float:
    return s.c1 * s.c1 + s.c2 * s.c2 + s.c3 * s.c3 + s.c4 * s.c4


def inv(s: Scalar) -> Scalar:
    n = norm2(s)
    if n == 0.0:
        raise ZeroDivisionError("zero divisor")
    return conj(s).scale(1.0 / n)


def _check_ring_domain(ring: RingId, s: Scalar) -> None:
    if s.domain is not ring.domain:
        raise ValueError(f"ring {ring.value} needs a {ring.domain.value} scalar, "
                         f"got {s.domain.value}")


def quantize(ring: RingId | str, s: Scalar) -> Scalar:
    """Nearest element of ``ring``; coordinate ties round toward +inf."""
    ring = as_ring(ring)
    _check_ring_domain(ring, s)
    v, _ = kern.quantize_point(ring.code, s.c1, s.c2, s.c3, s.c4)
    return Scalar(*v, domain=s.domain)


def ring_mod(ring: RingId | str, s: Scalar) -> Scalar:
    return s - quantize(ring, s)


def is_ring_element(ring: RingId | str, s: Scalar, tol: float = TOL) -> bool:
    ring = as_ring(ring)
    if s.domain.dim > ring.domain.dim:
        return False
    if s.domain is not ring.domain:
        s = s.lift(ring.domain)
    return norm2(ring_mod(ring, s)) <= tol * tol


def quantize_array(ring: RingId | str, x: np.ndarray) -> np.ndarray:
    """Vectorized quantizer over an array of shape ``(..., 4)``."""
    ring = as_ring(ring)
    x = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(x.reshape(-1, 4))
    vals, _ = kern.quantize_many(ring.code, flat)
    return vals.reshape(x.shape)


def quantize_coords(ring: RingId | str, x: np.ndarray) -> np.ndarray:
    """Like :func:`quantize_array` but returns exact ring coordinates."""
    ring = as_ring(ring)
    x = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(x.reshape(-1, 4))
    _, coords = kern.quantize_many(ring.code, flat)
    return coords.reshape(x.shape)


def coords_to_values(ring: RingId | str, coords: np.ndarray) -> np.ndarray:
    """Map exact ring coordinates ``(..., 4)`` to component values."""
    ring = as_ring(ring)
    k = np.asarray(coords, dtype=np.int64)
    out = k.astype(float)
    if ring is RingId.E:
        out[..., 0] = k[..., 0] - 0.5 * k[..., 1]
        out[..., 1] = math.sqrt(3.0) / 2 * k[..., 1]
    elif ring is RingId.H:
        out *= 0.5
    return out


OMEGA = Scalar(-0.5, math.sqrt(3.0) / 2, domain=Domain.C)
O_H = Scalar(0.5, 0.5, 0.5, 0.5, Domain.H)


@dataclass(frozen=True)
class RingInt:
    """Exact ring element stored as integer coordinates.

    Coordinates are ``(a,)`` for Z, ``(a, b)`` meaning ``a + b i`` for G and
    ``a + b w`` for E, four integers for L, and the doubled components for H.
    """

    ring: RingId
    coords: tuple

    def __post_init__(self):
        n = self.ring.props.coord_dim
        c = tuple(int(x) for x in self.coords)
        if len(c) != n:
            raise ValueError(f"{self.ring.value} needs {n} coordinates")
        if self.ring is RingId.H and len({x & 1 for x in c}) != 1:
            raise ValueError("Hurwitz coordinates must share parity")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_scalar(cls, ring: RingId | str, s: Scalar, tol: float = TOL) -> RingInt:
        ring = as_ring(ring)
        if not is_ring_element(ring, s, tol):
            raise ValueError(f"{s} is not an element of {ring.value}")
        s = s.lift(ring.domain)
        _, c = kern.quantize_point(ring.code, s.c1, s.c2, s.c3, s.c4)
        return cls(ring, c[: ring.props.coord_dim])

    def _padded(self) -> tuple:
        return self.coords + (0,) * (4 - len(self.coords))

    def to_scalar(self) -> Scalar:
        v = kern.coords_value(self.ring.code, *self._padded())
        return Scalar(*v, domain=self.ring.domain)

    def _check(self, other: RingInt) -> None:
        if not isinstance(other, RingInt) or other.ring is not self.ring:
            raise ValueError("ring mismatch")

    def __add__(self, other: RingInt) -> RingInt:
        self._check(other)
        return RingInt(self.ring, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: RingInt) -> RingInt:
        self._check(other)
        return RingInt(self.ring, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> RingInt:
        return RingInt(self.ring, tuple(-a for a in self.coords))

    def __mul__(self, other: RingInt) -> RingInt:
        self._check(other)
        x, y = self._padded(), other._padded()
        if self.ring is RingId.H:
            p = kern.qmul(*x, *y)
            if any(int(v) % 2 for v in p):
                raise ArithmeticError("Hurwitz product left the ring")
            p = tuple(int(v) // 2 for v in p)
        else:
            p = tuple(int(v) for v in kern.coords_mul(self.ring.code, *x, *y))
        return RingInt(self.ring, p[: self.ring.props.coord_dim])
