"""Unit-trace spectra, symmetric 3x3 matrices and their invariants.

Everything here is a pure function on immutable values.  The plane
embedding uses the fixed orthonormal basis

    u = (m1 - m2) / sqrt(2)
    v = (m1 + m2 - 2 m3) / sqrt(6)

of the plane m1 + m2 + m3 = 1, so that swapping m1 and m2 is u -> -u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import NonPositive, NotPositive, TraceMismatch

TRACE_TOL = 1e-9
DISTINCT_RTOL = 1e-9

SQRT2 = math.sqrt(2.0)
SQRT6 = math.sqrt(6.0)

# rows: orthonormal basis of the unit-trace plane (both orthogonal to (1,1,1))
PLANE_BASIS = np.array(
    [[1.0 / SQRT2, -1.0 / SQRT2, 0.0],
     [1.0 / SQRT6, 1.0 / SQRT6, -2.0 / SQRT6]]
)
ISOTROPIC = np.full(3, 1.0 / 3.0)


class InvariantPair(NamedTuple):
    x: float  # i2
    y: float  # i3


class PlanePoint2(NamedTuple):
    u: float
    v: float


@dataclass(frozen=True)
class Spectrum3:
    """Ordered positive eigenvalue triple with unit trace."""

    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        if not (self.m1 <= self.m2 <= self.m3):
            raise ValueError(f"eigenvalues not ordered: {tuple(self)}")
        if self.m1 <= 0.0:
            raise NonPositive(f"smallest eigenvalue {self.m1} is not positive")
        if abs(self.m1 + self.m2 + self.m3 - 1.0) > 1e-12:
            raise TraceMismatch(f"trace {self.m1 + self.m2 + self.m3!r} is not 1")

    def __iter__(self) -> Iterator[float]:
        return iter((self.m1, self.m2, self.m3))

    def as_array(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3])

    @property
    def distinct(self) -> bool:
        """Membership in the distinct-eigenvalue subset D_d."""
        return is_distinct(self.as_array())

    @property
    def uniaxial(self) -> bool:
        return not self.distinct

    def diag(self) -> np.ndarray:
        return np.diag(self.as_array())


@dataclass(frozen=True)
class SymMat3:
    """Real symmetric 3x3 matrix stored by its upper triangle."""

    a11: float
    a22: float
    a33: float
    a12: float = 0.0
    a13: float = 0.0
    a23: float = 0.0

    @classmethod
    def from_array(cls, a) -> "SymMat3":
        a = np.asarray(a, dtype=float)
        if a.shape != (3, 3):
            raise ValueError(f"expected a 3x3 array, got shape {a.shape}")
        return cls(a[0, 0], a[1, 1], a[2, 2], a[0, 1], a[0, 2], a[1, 2])

    @classmethod
    def diagonal(cls, d1: float, d2: float, d3: float) -> "SymMat3":
        return cls(d1, d2, d3)

    def to_array(self) -> np.ndarray:
        return np.array(
            [[self.a11, self.a12, self.a13],
             [self.a12, self.a22, self.a23],
             [self.a13, self.a23, self.a33]]
        )

    @property
    def trace(self) -> float:
        return self.a11 + self.a22 + self.a33


def is_distinct(m, rtol: float = DISTINCT_RTOL) -> bool:
    m = np.sort(np.asarray(m, dtype=float))
    gap = min(m[1] - m[0], m[2] - m[1])
    return bool(gap > rtol * abs(m[2]))


def make_spectrum(v1: float, v2: float, v3: float) -> Spectrum3:
    """Sort and renormalize a positive triple whose sum is within 1e-9 of 1."""
    vals = np.array([v1, v2, v3], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"non-finite eigenvalue in {tuple(vals)}")
    if np.any(vals <= 0.0):
        raise NonPositive(f"all eigenvalues must be positive, got {tuple(vals)}")
    total = vals.sum()
    if abs(total - 1.0) > TRACE_TOL:
        raise TraceMismatch(f"|trace - 1| = {abs(total - 1.0):.3e} exceeds {TRACE_TOL}")
    return spectrum_from_sorted(np.sort(vals))


def spectrum_from_sorted(m) -> Spectrum3:
    """Internal constructor: renormalize an already sorted positive triple."""
    m = np.asarray(m, dtype=float)
    m = m / m.sum()
    # renormalizing can break a tie by one ulp; restore order
    m = np.sort(m)
    return Spectrum3(float(m[0]), float(m[1]), float(m[2]))


def invariants(sp: Spectrum3) -> tuple[float, float, float]:
    """(i1, i2, i3) elementary symmetric polynomials of the eigenvalues."""
    m1, m2, m3 = sp
    return (1.0, m1 * m2 + m2 * m3 + m3 * m1, m1 * m2 * m3)


def invariant_pair(sp: Spectrum3) -> InvariantPair:
    _, x, y = invariants(sp)
    return InvariantPair(x, y)


def invariants_array(m: np.ndarray) -> np.ndarray:
    """Vectorized (i2, i3) for an array of triples with shape (..., 3)."""
    m = np.asarray(m, dtype=float)
    m1, m2, m3 = m[..., 0], m[..., 1], m[..., 2]
    return np.stack([m1 * m2 + m2 * m3 + m3 * m1, m1 * m2 * m3], axis=-1)


# ---------------------------------------------------------------------------
# eigenvalues


def _cross(a, b):
    return np.stack(
        [a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
         a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
         a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]],
        axis=-1,
    )


def _quad(v, a, w):
    return np.einsum("...i,...ij,...j->...", v, a, w)


def eigvalsh3(a) -> np.ndarray:
    """Ascending eigenvalues of symmetric 3x3 matrices, shape (..., 3, 3).

    Trigonometric (Cardano) solution of the characteristic cubic, followed
    by a deflation step: the eigenvector of the best-isolated root is taken
    from a cross product of rows of A - eI, and the remaining pair is read off
    the 2x2 restriction of A to its orthogonal complement.  The cubic alone
    loses about half the digits near a double root; the deflation restores
    accuracy to a few ulps of ||A||.
    """
    a = np.asarray(a, dtype=float)
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    eye = np.eye(3)

    q = np.trace(a, axis1=-2, axis2=-1) / 3.0
    b = a - q[..., None, None] * eye
    p = np.sqrt(np.sum(b * b, axis=(-2, -1)) / 6.0)
    scalar = p <= 1e-15 * np.abs(q)
    bn = b / np.where(scalar, 1.0, p)[..., None, None]
    det = (
        bn[..., 0, 0] * (bn[..., 1, 1] * bn[..., 2, 2] - bn[..., 1, 2] * bn[..., 2, 1])
        - bn[..., 0, 1] * (bn[..., 1, 0] * bn[..., 2, 2] - bn[..., 1, 2] * bn[..., 2, 0])
        + bn[..., 0, 2] * (bn[..., 1, 0] * bn[..., 2, 1] - bn[..., 1, 1] * bn[..., 2, 0])
    )
    phi = np.arccos(np.clip(det / 2.0, -1.0, 1.0)) / 3.0
    hi = q + 2.0 * p * np.cos(phi)
    lo = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    mid = 3.0 * q - hi - lo

    e = np.where(hi - mid >= mid - lo, hi, lo)
    c = a - e[..., None, None] * eye
    cands = np.stack(
        [_cross(c[..., 0, :], c[..., 1, :]),
         _cross(c[..., 0, :], c[..., 2, :]),
         _cross(c[..., 1, :], c[..., 2, :])],
        axis=-2,
    )
    norms = np.linalg.norm(cands, axis=-1)
    best = np.argmax(norms, axis=-1)
    v = np.take_along_axis(cands, best[..., None, None], axis=-2)[..., 0, :]
    vn = np.take_along_axis(norms, best[..., None], axis=-1)[..., 0]
    ok = vn > 0.0
    v = np.where(ok[..., None], v / np.where(ok, vn, 1.0)[..., None], eye[0])

    # complement basis: cross v with the axis it is least aligned with
    axis = np.argmin(np.abs(v), axis=-1)
    w1 = _cross(v, eye[axis])
    w1 /= np.linalg.norm(w1, axis=-1, keepdims=True)
    w2 = _cross(v, w1)

    e_iso = _quad(v, a, v)
    a11 = _quad(w1, a, w1)
    a22 = _quad(w2, a, w2)
    a12 = _quad(w1, a, w2)
    centre = 0.5 * (a11 + a22)
    rad = np.hypot(0.5 * (a11 - a22), a12)
    out = np.sort(np.stack([e_iso, centre - rad, centre + rad], axis=-1), axis=-1)
    return np.where(scalar[..., None], q[..., None] * np.ones(3), out)


def eigen_spectrum(M: SymMat3 | np.ndarray) -> Spectrum3:
    """Ordered eigenvalues of a positive definite unit-trace symmetric matrix."""
    a = M.to_array() if isinstance(M, SymMat3) else np.asarray(M, dtype=float)
    tr = float(np.trace(a))
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceMismatch(f"|trace - 1| = {abs(tr - 1.0):.3e} exceeds {TRACE_TOL}")
    ev = eigvalsh3(a)
    if ev[0] <= 0.0:
        raise NotPositive(f"smallest eigenvalue {ev[0]:.3e} is not positive")
    return spectrum_from_sorted(ev)


# ---------------------------------------------------------------------------
# plane embedding


def embed_triple(m) -> np.ndarray:
    """Plane coordinates of (not necessarily ordered) triples, shape (..., 3)."""
    m = np.asarray(m, dtype=float)
    u = (m[..., 0] - m[..., 1]) / SQRT2
    v = (m[..., 0] + m[..., 1] - 2.0 * m[..., 2]) / SQRT6
    return np.stack([u, v], axis=-1)


def embed_plane(sp: Spectrum3) -> PlanePoint2:
    u, v = embed_triple(sp.as_array())
    return PlanePoint2(float(u), float(v))


def unembed(uv) -> np.ndarray:
    """Inverse of embed_triple onto the unit-trace plane."""
    uv = np.asarray(uv, dtype=float)
    return ISOTROPIC + uv @ PLANE_BASIS
