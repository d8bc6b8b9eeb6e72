"""Slope comparison along the optimal curves and the lamination-stability sweep.

Along a trajectory from F to G the normalised slope of (i2, i3) at F is

    tau = [1 - lam^2 (3 - 2 lam) yF/yG] / [lam (1 - lam (2 - lam) xF/xG)].

For F = M(p), G = M(q) on one optimal branch the invariant ratios collapse
to r(p, q) and s(p, q), functions of the middle eigenvalues a = E2(p),
b = E2(q) only, which gives h(lam, p, q).  On the alpha branch h is maximised
over A(M(p), M(q)) at lam = b / a, on the beta branch minimised there; this is
what keeps every lamination trajectory between points of L inside L.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from .curves import BRANCHES, Branch, curve_spectra, e2, optimal_params, t_from_e2
from .errors import (
    DegenerateDenominator,
    ExtremalityViolation,
    MismatchWithAdmissibleSet,
    StrictnessViolation,
)
from .hull import INSIDE, HullPolygon, classify_uv, distance_to_boundary, locate_uv
from .rank_one import (
    CLAMP_TOL,
    NORM_TOL,
    PUNCTURE,
    admissible_bounds,
    admissible_set,
    eta,
    lamination_matrices,
    normal_squares_raw,
)
from .spectra import Spectrum3, eigvalsh3, embed_triple, spectrum_from_sorted, unembed

CAP_TOL = 1e-12
EXTREMAL_TOL = 1e-10
NONNEG_TOL = 1e-12
EIGEN_BOUND_TOL = 1e-9
# lamination trajectories with |lam - 1| below this are numerically meaningless
NEAR_ONE = 1e-9
_TINY = 1e-14


@dataclass
class CheckReport:
    """Outcome of one verification check, serialisable to JSON."""

    check: str
    passed: bool
    samples: int = 0
    max_residual: float = 0.0
    witnesses: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "passed": bool(self.passed),
            "samples": int(self.samples),
            "max_residual": float(self.max_residual),
            "witnesses": self.witnesses,
            "values": self.values,
        }


# ---------------------------------------------------------------------------
# slopes


def tau(lam, xF, xG, yF, yG):
    """Normalised slope (dy/dx at t=0) * (xG / yG) of the trajectory F -> G."""
    lam = np.asarray(lam, dtype=float)
    den = lam * (1.0 - lam * (2.0 - lam) * np.divide(xF, xG))
    if np.any(np.abs(den) < _TINY):
        bad = lam[np.abs(den) < _TINY] if lam.ndim else lam
        raise DegenerateDenominator(f"tau denominator vanishes at lam={bad}")
    out = (1.0 - lam**2 * (3.0 - 2.0 * lam) * np.divide(yF, yG)) / den
    return float(out) if np.ndim(out) == 0 else out


def _one_minus_r(u, a, b):
    return (a - b) * (a + b - 2.0 * u) / (b * (2.0 * u - b))


def _one_minus_s(u, a, b):
    return (b - a) * (3.0 * u * (a + b) - 2.0 * (a * a + a * b + b * b)) / (b * b * (3.0 * u - 2.0 * b))


def ratio_r(u, a, b):
    """r(p, q) from middle eigenvalues a = E2(p), b = E2(q)."""
    return a / b * (2.0 * u - a) / (2.0 * u - b)


def ratio_s(u, a, b):
    return a * a / (b * b) * (3.0 * u - 2.0 * a) / (3.0 * u - 2.0 * b)


def h_from_e2(u, a, b, lam):
    """h(lam) for middle eigenvalues a, b, in cancellation-free form.

    1 - lam(2 - lam) r and 1 - lam^2(3 - 2 lam) s are rewritten as
    (1-lam)^2 + d (1 - r) and (1-lam)^2 (1 + 2 lam) + c (1 - s), with 1 - r and
    1 - s factored through (a - b), so nothing cancels near lam = 1 or a = b.
    """
    lam = np.asarray(lam, dtype=float)
    d = lam * (2.0 - lam)
    c = lam * lam * (3.0 - 2.0 * lam)
    den = lam * ((1.0 - lam) ** 2 + d * _one_minus_r(u, a, b))
    num = (1.0 - lam) ** 2 * (1.0 + 2.0 * lam) + c * _one_minus_s(u, a, b)
    if np.any(np.abs(den) < _TINY):
        raise DegenerateDenominator(f"h denominator vanishes for lam in {np.atleast_1d(lam)[np.abs(np.atleast_1d(den)) < _TINY]}")
    out = num / den
    return float(out) if out.ndim == 0 else out


def _branch_e2(branch: Branch, S: Spectrum3, p: float, q: float) -> tuple[float, float, float]:
    if not 0.0 <= p <= q <= 1.0 or p == 1.0:
        raise ValueError(f"need 0 <= p <= q <= 1 and p != 1, got p={p!r}, q={q!r}")
    op = optimal_params(S)
    return op.root(branch), e2(branch, S, p), e2(branch, S, q)


def h_value(branch: Branch, S: Spectrum3, lam, p: float, q: float):
    """h(lam, p, q) on the given branch (the beta branch uses u_beta and F2)."""
    u, a, b = _branch_e2(branch, S, p, q)
    return h_from_e2(u, a, b, lam)


def h_at_cap(branch: Branch, S: Spectrum3, p: float, q: float) -> float:
    """Closed form of h at lam = E2(q)/E2(p): 3 (a/b)(2u - b)/(3u - 2b)."""
    u, a, b = _branch_e2(branch, S, p, q)
    return 3.0 * a / b * (2.0 * u - b) / (3.0 * u - 2.0 * b)


def _pair_spectra(branch: Branch, S: Spectrum3, p: float, q: float) -> tuple[Spectrum3, Spectrum3]:
    m = curve_spectra(branch, S, [p, q])
    return spectrum_from_sorted(m[0]), spectrum_from_sorted(m[1])


def lambda_cap(branch: Branch, S: Spectrum3, p: float, q: float) -> float:
    """E2(q)/E2(p); equals alpha_+ (alpha branch) or beta_- (beta branch) of the pair."""
    _, a, b = _branch_e2(branch, S, p, q)
    cap = b / a
    F, G = _pair_spectra(branch, S, p, q)
    A = admissible_set(F, G)
    iv = A.alpha_interval if branch == "alpha" else A.beta_interval
    end = None if iv is None else (iv[1] if branch == "alpha" else iv[0])
    if end is None or abs(end - cap) > CAP_TOL:
        raise MismatchWithAdmissibleSet(
            f"{branch}: E2 ratio {cap!r} differs from the admissible endpoint {end!r}"
        )
    return cap


# ---------------------------------------------------------------------------
# extremality


def _refine(fun, lo: float, hi: float) -> float:
    if hi - lo <= 0.0:
        return lo
    res = minimize_scalar(fun, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return float(res.x)


def extremal_check(branch: Branch, S: Spectrum3, p: float, q: float, grid: int = 10_000,
                   raise_on_failure: bool = True) -> CheckReport:
    """Grid search of h over A(M(p), M(q)); the optimum must sit at the cap.

    The alpha branch is a maximisation, the beta branch a minimisation.  Only
    p < q is meaningful: at p = q the cap is 1, which the admissible set
    excludes.
    """
    if not 0.0 <= p < q < 1.0:
        raise ValueError(f"extremal check needs 0 <= p < q < 1, got p={p!r}, q={q!r}")
    u, a, b = _branch_e2(branch, S, p, q)
    cap = lambda_cap(branch, S, p, q)
    F, G = _pair_spectra(branch, S, p, q)
    A = admissible_set(F, G)
    lam = A.grid(grid)
    sign = 1.0 if branch == "alpha" else -1.0
    hv = sign * h_from_e2(u, a, b, lam)
    h_cap = sign * h_at_cap(branch, S, p, q)

    best = int(np.argmax(hv))
    steps = np.diff(lam)
    steps = steps[~((lam[:-1] < 1.0) & (lam[1:] > 1.0))]  # not the jump between components
    cell = float(steps.max()) if steps.size else 0.0
    # refine inside the component that holds the grid winner
    comp = next(iv for iv in A.components() if iv[0] - 1e-15 <= lam[best] <= iv[1] + 1e-15)
    lo, hi = max(comp[0], lam[best] - cell), min(comp[1], lam[best] + cell)
    refined = _refine(lambda x: -sign * h_from_e2(u, a, b, x), lo, hi)
    excess = float(np.max(hv - h_cap))
    located = abs(lam[best] - cap) <= cell + 1e-12
    bounded = excess <= EXTREMAL_TOL
    passed = located and bounded
    witnesses = []
    if not passed:
        worst = int(np.argmax(hv - h_cap))
        witnesses.append({"lambda": float(lam[worst]), "h": float(sign * hv[worst]), "h_cap": float(sign * h_cap)})
    report = CheckReport(
        check=f"extremal_{branch}",
        passed=passed,
        samples=int(lam.size),
        max_residual=max(excess, 0.0),
        witnesses=witnesses,
        values={
            "p": p, "q": q, "lambda_cap": cap,
            "grid_argopt": float(lam[best]), "refined_argopt": refined,
            "grid_cell": cell, "h_cap": float(sign * h_cap),
        },
    )
    if not passed and raise_on_failure:
        raise ExtremalityViolation(f"{branch} p={p} q={q}: {witnesses[0]}")
    return report


def tangent_inward_check(branch: Branch, S: Spectrum3, p: float, q: float, grid: int = 2000,
                         raise_on_failure: bool = True) -> CheckReport:
    """Strict version of the extremality: h differs from h(cap) away from the cap."""
    if not 0.0 <= p < q < 1.0:
        raise ValueError(f"need 0 <= p < q < 1, got p={p!r}, q={q!r}")
    u, a, b = _branch_e2(branch, S, p, q)
    cap = lambda_cap(branch, S, p, q)
    F, G = _pair_spectra(branch, S, p, q)
    lam = admissible_set(F, G).grid(grid)
    lam = lam[np.abs(lam - cap) > CAP_TOL]
    sign = 1.0 if branch == "alpha" else -1.0
    gap = sign * (h_at_cap(branch, S, p, q) - h_from_e2(u, a, b, lam))
    passed = bool(np.all(gap > 0.0))
    witnesses = []
    if not passed:
        i = int(np.argmin(gap))
        witnesses.append({"lambda": float(lam[i]), "gap": float(gap[i])})
        if raise_on_failure:
            raise StrictnessViolation(f"{branch} p={p} q={q}: {witnesses[0]}")
    return CheckReport(
        check=f"tangent_inward_{branch}",
        passed=passed,
        samples=int(lam.size),
        max_residual=float(max(0.0, -gap.min())) if lam.size else 0.0,
        witnesses=witnesses,
        values={"p": p, "q": q, "lambda_cap": cap, "min_gap": float(gap.min()) if lam.size else None},
    )


def pq_polynomials(u, a, b, X, literal: bool = False):
    """P(X), Q(X) of the rational form h = (a/b)(2u - b)/(3u - 2b) P/Q.

    ``literal=True`` uses X^2 b (a - 2u) as the last term of Q, the sign as
    printed in the source; that version does not reproduce h.
    """
    P = a * (3.0 * u - 2.0 * b) + 3.0 * X**2 * a * (2.0 * a - 3.0 * u) + 2.0 * X**3 * b * (3.0 * u - 2.0 * a)
    last = b * (a - 2.0 * u) if literal else b * (2.0 * u - a)
    Q = X * (a * (2.0 * u - b) - 2.0 * X * a * (2.0 * u - a) + X**2 * last)
    return P, Q


def factorization_residual(S: Spectrum3, p: float, q: float, lam, literal: bool = False):
    """|3Q - P - (1-X)^2 a (2b + X b - 3u)| and its scale max(1, |P|, |Q|)."""
    u, a, b = _branch_e2("alpha", S, p, q)
    X = np.asarray(lam, dtype=float) * a / b
    P, Q = pq_polynomials(u, a, b, X, literal=literal)
    rhs = (1.0 - X) ** 2 * a * (2.0 * b + X * b - 3.0 * u)
    residual = np.abs(3.0 * Q - P - rhs)
    scale = np.maximum(1.0, np.maximum(np.abs(P), np.abs(Q)))
    if residual.ndim == 0:
        return float(residual), float(scale)
    return residual, scale


# ---------------------------------------------------------------------------
# inequality suite


def _lambda_grid(bounds: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n scalings per row spread over both components of A, with a validity mask.

    ``bounds`` has shape (P, 4) as returned by admissible_bounds.  The total
    length of the nonempty components is sampled uniformly, endpoints included.
    """
    a_lo, a_hi, b_lo, b_hi = bounds.T
    a_len = np.where(a_lo <= a_hi, a_hi - a_lo, -1.0)
    b_len = np.where(b_lo <= b_hi, b_hi - b_lo, -1.0)
    has_a, has_b = a_len >= 0.0, b_len >= 0.0
    total = np.where(has_a, a_len, 0.0) + np.where(has_b, b_len, 0.0)
    s = np.linspace(0.0, 1.0, n)[None, :] * total[:, None]
    in_a = has_a[:, None] & (s <= np.where(has_a, a_len, 0.0)[:, None])
    lam = np.where(
        in_a,
        a_lo[:, None] + s,
        b_lo[:, None] + s - np.where(has_a, a_len, 0.0)[:, None],
    )
    lam = np.where(has_b[:, None] | in_a, lam, a_hi[:, None])
    valid = (has_a | has_b)[:, None] & (np.abs(lam - 1.0) >= PUNCTURE)
    return lam, valid


def _branch_states(branch: Branch, S: Spectrum3, ts: np.ndarray):
    return e2(branch, S, ts), curve_spectra(branch, S, ts)


def inequality_suite(S: Spectrum3, grid: int = 64, n_lambda: int = 64) -> CheckReport:
    """Sign conditions behind the extremality proof, on (p, q, lam) grids."""
    op = optimal_params(S)
    s1, s2, s3 = S
    ts = np.linspace(0.0, 1.0, grid)
    ip, iq = np.triu_indices(grid)
    keep = ts[ip] != 1.0
    ip, iq = ip[keep], iq[keep]
    q_open = ts[iq] < 1.0

    violations: list[dict] = []
    values: dict[str, Any] = {}
    worst = 0.0
    samples = 0

    def record(name: str, ok: np.ndarray, slack: np.ndarray, where):
        nonlocal worst, samples
        samples += int(ok.size)
        bad = np.nonzero(~ok)
        values[f"min_{name}"] = float(np.min(slack)) if slack.size else None
        if bad[0].size:
            k = tuple(b[0] for b in bad)
            violations.append({"inequality": name, "count": int(bad[0].size), "witness": where(k), "value": float(slack[k])})
            worst = max(worst, float(-slack[k]))

    gap_a = s1 + 2.0 * s2 - 3.0 * op.u_alpha
    values["s1+2s2-3u_alpha"] = gap_a
    record("s1+2s2-3u_alpha", np.array([gap_a >= 0.0]), np.array([gap_a]), lambda k: {"S": list(S)})

    for branch in BRANCHES:
        u = op.root(branch)
        e, m = _branch_states(branch, S, ts)
        tag = "wd" if branch == "alpha" else "come4.14"
        lhs = 3.0 * u - 2.0 * e
        record(f"{tag}:3u-2E2(q)>0", lhs > 0.0, lhs, lambda k: {"q": float(ts[k[0]])})
        if branch == "alpha":
            K = m[:, 0] + 2.0 * e - 3.0 * u
            record("ccomb:K(q)>=0", K >= -NONNEG_TOL, K, lambda k: {"q": float(ts[k[0]])})

        bounds = admissible_bounds(m[ip], m[iq])
        if branch == "alpha":
            strict = bounds[:, 1] - bounds[:, 0]
            name = "974:alpha_-<alpha_+"
        else:
            strict = bounds[:, 3] - bounds[:, 2]
            name = "973:beta_-<beta_+"
        record(name, strict[q_open] > 0.0, strict[q_open],
               lambda k: {"p": float(ts[ip[q_open][k[0]]]), "q": float(ts[iq[q_open][k[0]]])})

        lam, valid = _lambda_grid(bounds, n_lambda)
        a, b = e[ip][:, None], e[iq][:, None]
        d = lam * (2.0 - lam)
        one_minus_dr = (1.0 - lam) ** 2 + d * _one_minus_r(u, a, b)
        where_pql = lambda k: {"p": float(ts[ip][k[0]]), "q": float(ts[iq][k[0]]), "lambda": float(lam[k])}
        slack = np.where(valid, one_minus_dr, np.inf)
        record(f"{tag}:1-lam(2-lam)r>0", slack > 0.0, slack, where_pql)
        if branch == "alpha":
            nonneg = np.where(valid, 2.0 * b + lam * a - 3.0 * u, np.inf)
            record("nonnegativa:2E2(q)+lam*E2(p)-3u>=0", nonneg >= -NONNEG_TOL, nonneg, where_pql)

    return CheckReport(
        check="inequalities",
        passed=not violations,
        samples=samples,
        max_residual=worst,
        witnesses=violations,
        values=values,
    )


# ---------------------------------------------------------------------------
# stability sweep


@dataclass(frozen=True)
class Violation:
    F: tuple[float, float, float]
    G: tuple[float, float, float]
    lam: float
    t: float
    spectrum: tuple[float, float, float]
    distance: float

    def to_dict(self) -> dict:
        return {"F": list(self.F), "G": list(self.G), "lambda": self.lam, "t": self.t,
                "spectrum": list(self.spectrum), "distance_outside": self.distance}


@dataclass
class StabilityReport:
    samples: int
    violations: list[Violation]
    max_boundary_excursion: float
    pairs: int = 0
    connected_pairs: int = 0
    trajectories: int = 0
    skipped_trajectories: int = 0
    eigen_bound_excess: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def eigen_bound_ok(self) -> bool:
        return self.eigen_bound_excess <= EIGEN_BOUND_TOL

    def to_check(self, name: str = "stability") -> CheckReport:
        return CheckReport(
            check=name,
            passed=self.passed and self.eigen_bound_ok,
            samples=self.samples,
            max_residual=self.max_boundary_excursion,
            witnesses=[v.to_dict() for v in self.violations[:20]],
            values={
                "violations": len(self.violations),
                "pairs": self.pairs,
                "connected_pairs": self.connected_pairs,
                "trajectories": self.trajectories,
                "skipped_trajectories": self.skipped_trajectories,
                "max_boundary_excursion": self.max_boundary_excursion,
                "eigen_bound_excess": self.eigen_bound_excess,
            },
        )


def boundary_samples(S: Spectrum3, rng: np.random.Generator, n: int) -> np.ndarray:
    """n sorted spectra on the optimal curves, uniform in the middle eigenvalue.

    Orbit images of curve points have the same sorted spectrum, so sampling the
    two curves covers the whole of Gamma for lamination purposes.
    """
    op = optimal_params(S)
    out = np.empty((n, 3))
    which = rng.integers(0, 2, size=n)
    for k, branch in enumerate(BRANCHES):
        idx = np.nonzero(which == k)[0]
        lo, hi = sorted((S.m2, op.root(branch)))
        e = rng.uniform(lo, hi, size=idx.size)
        t = np.atleast_1d(t_from_e2(branch, S, e))
        out[idx] = curve_spectra(branch, S, t)
    return out


def interior_samples(L: HullPolygon, rng: np.random.Generator, n: int) -> np.ndarray:
    """n sorted spectra drawn uniformly from the interior of L (rejection sampling)."""
    lo, hi = L.vertices.min(axis=0), L.vertices.max(axis=0)
    found: list[np.ndarray] = []
    count = 0
    while count < n:
        uv = rng.uniform(lo, hi, size=(max(2 * (n - count), 64), 2))
        codes, _ = classify_uv(L, uv)
        uv = uv[codes == INSIDE]
        found.append(uv)
        count += len(uv)
    uv = np.vstack(found)[:n]
    return np.sort(unembed(uv), axis=-1)


def _distinct_rows(m: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    gap = np.minimum(m[:, 1] - m[:, 0], m[:, 2] - m[:, 1])
    return gap > rtol * m[:, 2]


def stability_sweep(S: Spectrum3, L: HullPolygon, n_pairs: int = 1000, n_lambda: int = 32,
                    n_t: int = 64, seed: int = 0, chunk: int = 64) -> StabilityReport:
    """Trace lamination trajectories between sampled points of L and classify them.

    Pairs are drawn boundary-boundary, boundary-interior and interior-interior
    in equal shares.  For every pair with nonempty A(F, G), n_lambda scalings
    spread over A are traced at n_t parameter values; any point classified
    Outside is a violation.
    """
    rng = np.random.default_rng(seed)
    kinds = rng.integers(0, 3, size=n_pairs)
    n_bd = int(np.sum(kinds == 0) * 2 + np.sum(kinds == 1))
    n_in = int(np.sum(kinds == 2) * 2 + np.sum(kinds == 1))
    bd = boundary_samples(S, rng, n_bd)
    inner = interior_samples(L, rng, n_in)
    F = np.empty((n_pairs, 3))
    G = np.empty((n_pairs, 3))
    ib = ii = 0
    for k, kind in enumerate(kinds):
        if kind == 0:
            F[k], G[k] = bd[ib], bd[ib + 1]
            ib += 2
        elif kind == 1:
            F[k], G[k] = bd[ib], inner[ii]
            ib += 1
            ii += 1
        else:
            F[k], G[k] = inner[ii], inner[ii + 1]
            ii += 2
    F /= F.sum(axis=1, keepdims=True)
    G /= G.sum(axis=1, keepdims=True)
    # the source of a connection needs distinct eigenvalues
    swap = ~_distinct_rows(F) & _distinct_rows(G)
    F[swap], G[swap] = G[swap].copy(), F[swap].copy()
    usable = _distinct_rows(F)

    bounds = admissible_bounds(F, G)
    lam, valid = _lambda_grid(bounds, n_lambda)
    valid &= usable[:, None] & (np.abs(lam - 1.0) >= NEAR_ONE)
    connected = valid.any(axis=1)

    ts = np.linspace(0.0, 1.0, n_t)
    s1, s3 = S.m1, S.m3
    violations: list[Violation] = []
    max_exc = 0.0
    bound_excess = 0.0
    samples = 0
    traced = 0
    skipped = 0

    rows = np.nonzero(connected)[0]
    batches = []
    for start in range(0, rows.size, chunk):
        r = rows[start:start + chunk]
        f, g, lm, ok = F[r], G[r], lam[r], valid[r]
        raw = normal_squares_raw(f[:, None, :], g[:, None, :], lm)
        n_sq = np.where((raw < 0.0) & (raw >= -CLAMP_TOL), 0.0, raw)
        ok &= np.all(n_sq >= 0.0, axis=-1) & (np.abs(n_sq.sum(axis=-1) - 1.0) <= NORM_TOL)
        n_sq = np.where(ok[..., None], n_sq, 0.0)
        et = eta(np.where(ok, lm, 0.5)[..., None], ts)
        mats = lamination_matrices(np.broadcast_to(f[:, None, :], lm.shape + (3,)), n_sq, et)
        m = eigvalsh3(mats)  # (P, n_lambda, n_t, 3)
        # the endpoint must reproduce G, otherwise the connection is numerically void
        recon = np.abs(m[:, :, -1, :] - g[:, None, :]).max(axis=-1) <= 1e-9
        skipped += int(np.sum(ok & ~recon))
        ok &= recon
        pi, li = np.nonzero(ok)
        if pi.size:
            batches.append((r[pi], lm[pi, li], m[pi, li]))

    if batches:
        pair_idx = np.concatenate([b[0] for b in batches])
        traj_lam = np.concatenate([b[1] for b in batches])
        pts = np.concatenate([b[2] for b in batches])  # (K, n_t, 3)
        traced = len(pts)
        flat = pts.reshape(-1, 3)
        samples = len(flat)
        bound_excess = max(float(np.max(s1 - flat[:, 0])), float(np.max(flat[:, 2] - s3)))
        uv = embed_triple(flat)
        winding, dist = locate_uv(L, uv)
        # excursion: how far points stray outside the polygon, within tolerance or not
        near_out = (winding == 0) & (dist <= L.boundary_tol)
        if np.any(near_out):
            max_exc = float(dist[near_out].max())
        out_idx = np.nonzero((winding == 0) & (dist > L.boundary_tol))[0]
        if out_idx.size:
            exact = distance_to_boundary(L, uv[out_idx])
            max_exc = max(max_exc, float(exact.max()))
            for k, dval in zip(out_idx, exact):
                j, ti = divmod(int(k), n_t)
                violations.append(Violation(
                    F=tuple(float(x) for x in F[pair_idx[j]]),
                    G=tuple(float(x) for x in G[pair_idx[j]]),
                    lam=float(traj_lam[j]), t=float(ts[ti]),
                    spectrum=tuple(float(x) for x in flat[k]), distance=float(dval),
                ))

    return StabilityReport(
        samples=samples,
        violations=violations,
        max_boundary_excursion=max_exc,
        pairs=n_pairs,
        connected_pairs=int(connected.sum()),
        trajectories=traced,
        skipped_trajectories=skipped,
        eigen_bound_excess=max(bound_excess, 0.0),
    )
