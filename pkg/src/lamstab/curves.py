"""Optimal lamination curves from a base spectrum S to its uniaxial points.

The two uniaxial targets come from the roots u_alpha < u_beta of

    b(x) = 6 s2 x^2 + x (s1 s3 - 3 s2 - 4 s2^2) + 2 s2^2,

U_alpha = (u_a, u_a, 1 - 2u_a) and U_beta = (1 - 2u_b, u_b, u_b).  Laminating
S towards them with scaling alpha = u_a/s2 (resp. beta = u_b/s2) traces the
curves Gamma_alpha, Gamma_beta, along which the middle eigenvalue is
s2 * eta(lam, t) and the invariants have closed forms in that eigenvalue.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import (
    BracketViolation,
    NoRealRoots,
    OptimalityViolation,
    OrderingViolation,
    ReconstructionMismatch,
)
from .rank_one import (
    admissible_set,
    connect,
    eta,
    lamination_matrices,
)
from .spectra import (
    InvariantPair,
    Spectrum3,
    eigvalsh3,
    invariants_array,
    make_spectrum,
    spectrum_from_sorted,
)

Branch = Literal["alpha", "beta"]
BRANCHES: tuple[Branch, Branch] = ("alpha", "beta")

BRACKET_TOL = 1e-10
DEGENERATE_TOL = 1e-10
SAMPLE_TOL = 1e-9


@dataclass(frozen=True)
class OptimalParams:
    S: Spectrum3
    u_alpha: float
    u_beta: float
    alpha: float
    beta: float
    n_alpha_sq: tuple[float, float, float]
    n_beta_sq: tuple[float, float, float]
    U_alpha: Spectrum3
    U_beta: Spectrum3

    def root(self, branch: Branch) -> float:
        return self.u_alpha if branch == "alpha" else self.u_beta

    def scaling(self, branch: Branch) -> float:
        return self.alpha if branch == "alpha" else self.beta

    def normal_sq(self, branch: Branch) -> tuple[float, float, float]:
        return self.n_alpha_sq if branch == "alpha" else self.n_beta_sq

    def uniaxial(self, branch: Branch) -> Spectrum3:
        return self.U_alpha if branch == "alpha" else self.U_beta


@dataclass(frozen=True)
class CurveSample:
    t: float
    e2: float
    spectrum: Spectrum3
    inv: InvariantPair


def _check_branch(branch: str) -> None:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be 'alpha' or 'beta', got {branch!r}")


def b_poly(S: Spectrum3, x):
    s1, s2, s3 = S
    return 6.0 * s2 * x**2 + x * (s1 * s3 - 3.0 * s2 - 4.0 * s2**2) + 2.0 * s2**2


def solve_b_roots(S: Spectrum3) -> tuple[float, float]:
    """Smallest and largest real roots (u_alpha, u_beta) of b."""
    s1, s2, s3 = S
    a = 6.0 * s2
    b = s1 * s3 - 3.0 * s2 - 4.0 * s2**2
    c = 2.0 * s2**2
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NoRealRoots(f"b(x) has no real roots for S={tuple(S)} (disc={disc:.3e})")
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    u_alpha, u_beta = sorted((q / a, c / q))
    if not (s1 - BRACKET_TOL <= u_alpha < 1.0 / 3.0 < u_beta <= s3 + BRACKET_TOL):
        raise BracketViolation(
            f"expected s1 <= u_alpha < 1/3 < u_beta <= s3, got "
            f"u_alpha={u_alpha!r}, u_beta={u_beta!r} for S={tuple(S)}"
        )
    return u_alpha, u_beta


def uniaxial_points(S: Spectrum3) -> tuple[Spectrum3, Spectrum3]:
    u_a, u_b = solve_b_roots(S)
    U_alpha = Spectrum3(u_a, u_a, 1.0 - 2.0 * u_a)
    U_beta = Spectrum3(1.0 - 2.0 * u_b, u_b, u_b)
    return U_alpha, U_beta


@lru_cache(maxsize=256)
def optimal_params(S: Spectrum3) -> OptimalParams:
    """Roots, scalings and optimal normals, validated against their defining properties."""
    if not S.distinct:
        raise OptimalityViolation(f"S={tuple(S)} must have distinct eigenvalues")
    s2 = S.m2
    u_a, u_b = solve_b_roots(S)
    U_alpha, U_beta = uniaxial_points(S)
    alpha, beta = u_a / s2, u_b / s2

    if not u_a > 2.0 * s2 / 3.0:
        raise OptimalityViolation(f"u_alpha={u_a!r} must exceed 2 s2 / 3")

    a_set = admissible_set(S, U_alpha)
    b_set = admissible_set(S, U_beta)
    for name, iv, target in (
        ("alpha", a_set.alpha_interval, alpha),
        ("beta", b_set.beta_interval, beta),
    ):
        if iv is None or abs(iv[0] - target) > DEGENERATE_TOL or abs(iv[1] - target) > DEGENERATE_TOL:
            raise OptimalityViolation(
                f"{name} interval {iv} is not the single point {target!r}"
            )

    try:
        conn_a = connect(S, U_alpha, alpha)
        conn_b = connect(S, U_beta, beta)
    except (ReconstructionMismatch, ValueError) as exc:
        raise OptimalityViolation(f"optimal connection fails to reconstruct: {exc}") from exc

    for name, n_sq in (("alpha", conn_a.n_sq), ("beta", conn_b.n_sq)):
        if abs(n_sq[1]) > 1e-10:
            raise OptimalityViolation(f"second normal component of n_{name} is {n_sq[1]!r}")

    return OptimalParams(
        S=S,
        u_alpha=u_a,
        u_beta=u_b,
        alpha=alpha,
        beta=beta,
        n_alpha_sq=conn_a.n_sq,
        n_beta_sq=conn_b.n_sq,
        U_alpha=U_alpha,
        U_beta=U_beta,
    )


def check_angle_formulas(S: Spectrum3) -> dict:
    """Compare the printed closed forms for cos(2 phi), cos(2 theta) with the normals.

    Report-only: the printed cos(2 phi) quotient is evaluated literally and
    set against 2 n1^2 - 1 from the validated optimal normal.  Nothing is
    raised when they disagree.
    """
    op = optimal_params(S)
    s1, s2, s3 = S
    report = {"check": "angle_formulas", "informational": True, "S": [s1, s2, s3]}
    for branch in BRANCHES:
        u = op.root(branch)
        num = s2 * (s1 + s3) + u * (2.0 * s1 * s3 - s1 - s3)
        den = (s3 - s1) * (s2 - u)
        literal = num / den
        derived = 2.0 * op.normal_sq(branch)[0] - 1.0
        sign = 1.0 if branch == "alpha" else -1.0
        theta_literal = sign * (u * (s3 - s1) + (u - s2) * literal) / (s2 * (1.0 - 3.0 * u))
        theta_from_derived = sign * (u * (s3 - s1) + (u - s2) * derived) / (s2 * (1.0 - 3.0 * u))
        rel = abs(literal - derived) / max(abs(derived), 1e-300)
        report[branch] = {
            "cos2phi_numerator": num,
            "cos2phi_denominator": den,
            "cos2phi_literal": literal,
            "cos2phi_derived": derived,
            "relative_discrepancy": rel,
            "literal_is_cosine": bool(-1.0 <= literal <= 1.0),
            "mismatch": bool(rel > 1e-9),
            "cos2theta_literal": theta_literal,
            "cos2theta_with_derived_phi": theta_from_derived,
        }
    return report


# ---------------------------------------------------------------------------
# curve parametrisation


def e2(branch: Branch, S: Spectrum3, t):
    """Middle eigenvalue along the branch: s2 * eta(lam, t)."""
    _check_branch(branch)
    op = optimal_params(S)
    return S.m2 * eta(op.scaling(branch), t)


def t_from_e2(branch: Branch, S: Spectrum3, e):
    """Inverse of e2 in t."""
    op = optimal_params(S)
    lam = op.scaling(branch)
    e = np.asarray(e, dtype=float)
    t = lam * (S.m2 / e - 1.0) / (1.0 - lam)
    t = np.clip(t, 0.0, 1.0)
    return float(t) if t.ndim == 0 else t


def invariants_from_e2(u: float, e):
    """(i2, i3) on an optimal curve as functions of the middle eigenvalue."""
    x = (2.0 - 3.0 * u) / u * (2.0 * u - e) * e
    y = (1.0 - 2.0 * u) / u * (3.0 * u - 2.0 * e) * e**2
    return x, y


def curve_invariants(branch: Branch, S: Spectrum3, t) -> InvariantPair:
    """Closed-form invariants at parameter t.

    The beta branch uses the same form in (u_beta, F2); its derivative is the
    tangent formula for that branch.
    """
    op = optimal_params(S)
    x, y = invariants_from_e2(op.root(branch), e2(branch, S, t))
    return InvariantPair(x, y)


def curve_spectra(branch: Branch, S: Spectrum3, t) -> np.ndarray:
    """Ordered eigenvalues of M_branch(t) for an array of t, shape (T, 3)."""
    _check_branch(branch)
    op = optimal_params(S)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    mats = lamination_matrices(S.as_array(), op.normal_sq(branch), eta(op.scaling(branch), t))
    m = eigvalsh3(mats)
    m[t == 0.0] = S.as_array()
    return m


def curve_arrays(branch: Branch, S: Spectrum3, N: int):
    """N samples uniform in the middle eigenvalue: (t, e2, spectra, invariants)."""
    if N < 2:
        raise ValueError(f"need at least 2 samples, got {N}")
    op = optimal_params(S)
    e = np.linspace(S.m2, op.root(branch), N)
    t = t_from_e2(branch, S, e)
    t[0], t[-1] = 0.0, 1.0
    spectra = curve_spectra(branch, S, t)
    x, y = invariants_from_e2(op.root(branch), e)
    inv = np.stack([x, y], axis=-1)
    err = np.abs(invariants_array(spectra) - inv).max()
    if err > SAMPLE_TOL:
        raise ReconstructionMismatch(
            f"{branch} curve: eigen invariants differ from closed form by {err:.3e}"
        )
    return t, e, spectra, inv


def sample_curve(branch: Branch, S: Spectrum3, N: int) -> list[CurveSample]:
    t, e, spectra, inv = curve_arrays(branch, S, N)
    return [
        CurveSample(
            t=float(t[i]),
            e2=float(e[i]),
            spectrum=spectrum_from_sorted(spectra[i]),
            inv=InvariantPair(float(inv[i, 0]), float(inv[i, 1])),
        )
        for i in range(N)
    ]


def slope_at_S(branch: Branch, S: Spectrum3) -> float:
    """Slope di3/di2 of the branch at S, in invariant coordinates."""
    _check_branch(branch)
    op = optimal_params(S)
    s2 = S.m2
    slopes = {
        b: 3.0 * s2 * (1.0 - 2.0 * op.root(b)) / (2.0 - 3.0 * op.root(b)) for b in BRANCHES
    }
    if not slopes["alpha"] > slopes["beta"]:
        raise OrderingViolation(
            f"slope_alpha={slopes['alpha']!r} <= slope_beta={slopes['beta']!r}"
        )
    return slopes[branch]


def random_admissible_spectra(rng: np.random.Generator, n: int, min_gap: float = 1e-3) -> list[Spectrum3]:
    """n spectra drawn uniformly from the simplex with s1 < s2 < s3.

    Draws whose smallest relative gap is below ``min_gap`` are redrawn.
    """
    out: list[Spectrum3] = []
    while len(out) < n:
        m = np.sort(rng.dirichlet(np.ones(3)))
        if min(m[1] - m[0], m[2] - m[1]) <= min_gap * m[2]:
            continue
        out.append(make_spectrum(*m))
    return out

