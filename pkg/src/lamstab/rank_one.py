"""Rank-one connections between unit-trace spectra.

A spectrum G is rank-one connected to F (F with distinct eigenvalues) with
scaling ``lam`` when some rotation of diag(G) equals

    lam * diag(F) + (1 - lam) * n n^T

for a unit vector n.  The admissible scalings form at most two closed
intervals, one on each side of 1.  The normalised lamination trajectory
between the two matrices is

    M(lam, t) = eta * diag(F) + (1 - eta) * n n^T,   eta = lam / (lam + t (1 - lam)).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import (
    DegenerateDenominator,
    DegenerateLambda,
    DegenerateXi1,
    NotAdmissible,
    NotDistinct,
    ReconstructionMismatch,
    Unsupported,
)
from .spectra import (
    InvariantPair,
    Spectrum3,
    eigvalsh3,
    invariant_pair,
    spectrum_from_sorted,
)

CLAMP_TOL = 1e-10
NORM_TOL = 1e-9
RECONSTRUCT_TOL = 1e-9
PUNCTURE = 1e-12
_TINY = 1e-14

Interval = tuple[float, float]


@dataclass(frozen=True)
class AdmissibleSet:
    """A(F, G): up to two closed intervals, with lam = 1 removed."""

    alpha_interval: Optional[Interval]
    beta_interval: Optional[Interval]
    exclude_one: bool = True

    @property
    def empty(self) -> bool:
        return not self.components()

    def components(self) -> list[Interval]:
        comps = []
        for iv in (self.alpha_interval, self.beta_interval):
            if iv is None:
                continue
            # a lone point at 1 is removed entirely by the puncture
            if iv[0] == iv[1] and abs(iv[0] - 1.0) < PUNCTURE:
                continue
            comps.append(iv)
        return comps

    def contains(self, lam: float, tol: float = 0.0) -> bool:
        if abs(lam - 1.0) < PUNCTURE:
            return False
        return any(lo - tol <= lam <= hi + tol for lo, hi in self.components())

    @property
    def lower(self) -> float:
        return min(lo for lo, _ in self.components())

    @property
    def upper(self) -> float:
        return max(hi for _, hi in self.components())

    def grid(self, n: int) -> np.ndarray:
        """About n scalings spread over every component, endpoints included.

        Points closer than the puncture width to 1 are dropped.
        """
        comps = self.components()
        if not comps:
            return np.empty(0)
        lengths = np.array([hi - lo for lo, hi in comps])
        total = lengths.sum()
        pieces = []
        for (lo, hi), length in zip(comps, lengths):
            if hi == lo:
                pieces.append(np.array([lo]))
                continue
            k = max(2, int(round(n * length / total)) if total > 0 else n)
            pieces.append(np.linspace(lo, hi, k))
        lam = np.concatenate(pieces)
        return lam[np.abs(lam - 1.0) >= PUNCTURE]


@dataclass(frozen=True)
class RankOneConnection:
    lam: float
    n_sq: tuple[float, float, float]
    source: Spectrum3
    target: Spectrum3

    @property
    def normal(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.n_sq))


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    eta: float
    spectrum: Spectrum3
    inv: InvariantPair


def eta(lam, t):
    """Mixing weight lam / (lam + t (1 - lam)); 1 at t=0 and lam at t=1."""
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    den = lam + t * (1.0 - lam)
    if np.any(den <= _TINY):
        raise DegenerateDenominator(f"lam + t(1 - lam) <= {_TINY} for lam={lam}, t={t}")
    out = lam / den
    return float(out) if out.ndim == 0 else out


def admissible_set(F: Spectrum3, G: Spectrum3) -> AdmissibleSet:
    f1, f2, f3 = F
    g1, g2, g3 = G
    a_lo = max(g1 / f2, g2 / f3)
    a_hi = min(g1 / f1, g2 / f2, g3 / f3)
    b_lo = max(g1 / f1, g2 / f2, g3 / f3)
    b_hi = min(g2 / f1, g3 / f2)
    return AdmissibleSet(
        alpha_interval=(a_lo, a_hi) if a_lo <= a_hi else None,
        beta_interval=(b_lo, b_hi) if b_lo <= b_hi else None,
    )


def admissible_bounds(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Vectorized (alpha_-, alpha_+, beta_-, beta_+) for sorted triples (..., 3)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    r = g / f
    a_lo = np.maximum(g[..., 0] / f[..., 1], g[..., 1] / f[..., 2])
    a_hi = r.min(axis=-1)
    b_lo = r.max(axis=-1)
    b_hi = np.minimum(g[..., 1] / f[..., 0], g[..., 2] / f[..., 1])
    return np.stack([a_lo, a_hi, b_lo, b_hi], axis=-1)


def normal_squares_raw(f, g, lam) -> np.ndarray:
    """Unclamped quotients n_i^2(F, G, lam), shape (..., 3).

    ``f`` and ``g`` are sorted triples of shape (..., 3); ``lam`` broadcasts
    against the leading dimensions.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    lam = np.asarray(lam, dtype=float)
    out = []
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        fi = f[..., i]
        num = (g[..., 0] - lam * fi) * (g[..., 1] - lam * fi) * (g[..., 2] - lam * fi)
        den = lam**2 * (1.0 - lam) * (f[..., j] - fi) * (f[..., k] - fi)
        out.append(num / den)
    return np.stack(out, axis=-1)


def _check_lambda(lam) -> None:
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam) < _TINY) or np.any(np.abs(1.0 - lam) < _TINY):
        raise DegenerateLambda(f"lam={lam!r} is 0 or 1")


def normal_squares(F: Spectrum3, G: Spectrum3, lam: float) -> tuple[float, float, float]:
    """Squared components of the lamination normal for an admissible lam.

    Quotients in [-1e-10, 0) are clamped to 0; anything more negative means
    lam lies outside A(F, G).
    """
    if not F.distinct:
        raise NotDistinct(f"F={tuple(F)} has a repeated eigenvalue")
    _check_lambda(lam)
    raw = normal_squares_raw(F.as_array(), G.as_array(), lam)
    if np.any(raw < -CLAMP_TOL):
        raise NotAdmissible(f"lam={lam!r} is not in A(F, G): n^2 = {tuple(raw)}")
    n_sq = np.where(raw < 0.0, 0.0, raw) + 0.0  # also turns -0.0 into 0.0
    if abs(n_sq.sum() - 1.0) > NORM_TOL:
        raise NotAdmissible(f"normal squares sum to {n_sq.sum()!r}, not 1")
    return tuple(float(x) for x in n_sq)


def lamination_matrices(f, n_sq, etas) -> np.ndarray:
    """eta * diag(f) + (1 - eta) * n n^T with n = sqrt(n_sq), for every eta.

    ``f`` and ``n_sq`` have shape (..., 3); ``etas`` has shape (..., T).
    Returns shape (..., T, 3, 3).
    """
    f = np.asarray(f, dtype=float)
    n = np.sqrt(np.clip(np.asarray(n_sq, dtype=float), 0.0, None))
    etas = np.asarray(etas, dtype=float)
    nn = n[..., :, None] * n[..., None, :]
    fd = f[..., :, None] * np.eye(3)
    e = etas[..., None, None]
    return e * fd[..., None, :, :] + (1.0 - e) * nn[..., None, :, :]


def connect(F: Spectrum3, G: Spectrum3, lam: float) -> RankOneConnection:
    """Build and validate the rank-one connection from F to G with scaling lam."""
    if not F.distinct and not G.distinct:
        raise Unsupported("both spectra are uniaxial; only canonical-axis connections exist")
    n_sq = normal_squares(F, G, lam)
    n = np.sqrt(n_sq)
    m = lam * F.diag() + (1.0 - lam) * np.outer(n, n)
    ev = eigvalsh3(m)
    err = np.max(np.abs(ev - G.as_array()))
    if err > RECONSTRUCT_TOL:
        raise ReconstructionMismatch(
            f"reconstructed spectrum {tuple(ev)} differs from G={tuple(G)} by {err:.3e}"
        )
    return RankOneConnection(lam=float(lam), n_sq=n_sq, source=F, target=G)


def trajectory_spectra(conn: RankOneConnection, ts) -> np.ndarray:
    """Ordered eigenvalues of M(lam, t) for an array of t, shape (T, 3)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    et = eta(conn.lam, ts)
    mats = lamination_matrices(conn.source.as_array(), conn.n_sq, np.atleast_1d(et))
    return eigvalsh3(mats)


def trajectory(conn: RankOneConnection, t: float) -> TrajectoryPoint:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t!r} outside [0, 1]")
    et = eta(conn.lam, t)
    if t == 0.0:
        sp = conn.source
    else:
        sp = spectrum_from_sorted(trajectory_spectra(conn, [t])[0])
    return TrajectoryPoint(t=float(t), eta=et, spectrum=sp, inv=invariant_pair(sp))


def invariant_path(lam, t, xF, xG, yF, yG):
    """Closed-form (i2, i3) along M(lam, t) from the endpoint invariants."""
    _check_lambda(lam)
    e = eta(lam, t)
    x = ((xG - lam**2 * xF) * e - (xG - lam * xF) * e**2) / (lam * (1.0 - lam))
    y = ((yG - lam**3 * yF) * e**2 - (yG - lam**2 * yF) * e**3) / (lam**2 * (1.0 - lam))
    return x, y


def velocity(lam, t, xF, xG, yF, yG):
    """t-derivatives of invariant_path."""
    _check_lambda(lam)
    e = eta(lam, t)
    x_dot = (2.0 * (xG - lam * xF) * e**3 - (xG - lam**2 * xF) * e**2) / lam**2
    y_dot = (3.0 * (yG - lam**2 * yF) * e**4 - 2.0 * (yG - lam**3 * yF) * e**3) / lam**3
    return x_dot, y_dot


def conserved_w(which: Literal[1, 2, 3], xi1, xi2, xi3):
    """Quantities w_1, w_2, w_3 that stay constant along a lamination trajectory."""
    xi1 = np.asarray(xi1, dtype=float)
    if np.any(np.abs(xi1) < _TINY) or np.any(np.abs(1.0 - xi1) < _TINY):
        raise DegenerateXi1(f"xi1={xi1} is 0 or 1")
    if which == 1:
        out = (xi3 - xi1 * xi2) / (1.0 - xi1)
    elif which == 2:
        out = (xi3 - xi1**2 * xi2) / (xi1 * (1.0 - xi1))
    elif which == 3:
        out = (xi3 - xi1**3 * xi2) / (xi1**2 * (1.0 - xi1))
    else:
        raise ValueError(f"which must be 1, 2 or 3, got {which!r}")
    return float(out) if np.ndim(out) == 0 else out
