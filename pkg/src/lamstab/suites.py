"""Batch property checks shared by the command line and the test-suite.

Each function returns CheckReport objects; nothing here raises on a failed
property, so a caller can collect every outcome before deciding.
"""
from __future__ import annotations

import numpy as np

from .curves import (
    BRANCHES,
    curve_arrays,
    optimal_params,
    random_admissible_spectra,
    slope_at_S,
)
from .errors import LaminationError
from .hull import build_gamma
from .rank_one import (
    admissible_set,
    conserved_w,
    connect,
    invariant_path,
    lamination_matrices,
    trajectory_spectra,
    velocity,
)
from .spectra import Spectrum3, eigvalsh3, invariant_pair, invariants_array, spectrum_from_sorted
from .stability import (
    CheckReport,
    _pair_spectra,
    extremal_check,
    factorization_residual,
    h_value,
    inequality_suite,
    stability_sweep,
    tangent_inward_check,
    tau,
)

IDENTITY_TOL = 1e-9
EIGEN_TOL = 1e-11
FD_STEP = 1e-5
FD_TOL = 1e-6
TAU_H_TOL = 1e-10
FACTOR_TOL = 1e-9


def random_connections(rng: np.random.Generator, n: int, min_eig: float = 1e-2):
    """n random rank-one connections (F, G, lam) with F distinct.

    F is uniform on the sorted simplex; G is the spectrum of
    lam F + (1 - lam) n n^T for random lam in (0.3, 1.7) and a random unit n,
    kept when it stays positive definite and away from lam = 1.
    """
    out = []
    while len(out) < n:
        F = random_admissible_spectra(rng, 1, min_gap=1e-3)[0]
        if F.m1 < min_eig:
            continue
        lam = rng.uniform(0.3, 1.7)
        if abs(lam - 1.0) < 0.05:
            continue
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        g = eigvalsh3(lam * F.diag() + (1.0 - lam) * np.outer(v, v))
        if g[0] < min_eig:
            continue
        G = spectrum_from_sorted(g)
        try:
            out.append(connect(F, G, lam))
        except LaminationError:
            continue
    return out


def _matrix_invariants(a: np.ndarray) -> np.ndarray:
    """(i2, i3) straight from matrix entries: sum of principal 2x2 minors and det."""
    i2 = (a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] ** 2
          + a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] ** 2
          + a[..., 0, 0] * a[..., 2, 2] - a[..., 0, 2] ** 2)
    return np.stack([i2, np.linalg.det(a)], axis=-1)


def rankone_suite(seed: int = 0, n_traj: int = 100, n_t: int = 101) -> list[CheckReport]:
    """Closed-form trajectory formulas against the eigenvalue path."""
    rng = np.random.default_rng(seed)
    conns = random_connections(rng, n_traj)
    ts = np.linspace(0.0, 1.0, n_t)
    inner = ts[(ts > 0.05) & (ts < 0.95)]
    err = {"reconstruction": 0.0, "invariant_path": 0.0, "endpoint": 0.0,
           "velocity": 0.0, "conserved_w2": 0.0, "conserved_w3": 0.0, "eigen": 0.0}
    worst: dict[str, dict] = {}

    def note(key, value, conn):
        if value > err[key]:
            err[key] = value
            worst[key] = {"F": list(conn.source), "G": list(conn.target), "lambda": conn.lam}

    for c in conns:
        xF, yF = invariant_pair(c.source)
        xG, yG = invariant_pair(c.target)
        m = trajectory_spectra(c, ts)
        inv = invariants_array(m)
        note("reconstruction", float(np.abs(m[-1] - c.target.as_array()).max()), c)
        x, y = invariant_path(c.lam, ts, xF, xG, yF, yG)
        note("invariant_path", float(max(np.abs(x - inv[:, 0]).max(), np.abs(y - inv[:, 1]).max())), c)
        x1, y1 = invariant_path(c.lam, 1.0, xF, xG, yF, yG)
        note("endpoint", max(abs(x1 - xG), abs(y1 - yG)), c)

        xd, yd = velocity(c.lam, inner, xF, xG, yF, yG)
        fwd = invariants_array(trajectory_spectra(c, inner + FD_STEP))
        bwd = invariants_array(trajectory_spectra(c, inner - FD_STEP))
        fd = (fwd - bwd) / (2.0 * FD_STEP)
        note("velocity", float(max(np.abs(xd - fd[:, 0]).max(), np.abs(yd - fd[:, 1]).max())), c)

        t_pos = ts[1:]
        e = c.lam / (c.lam + t_pos * (1.0 - c.lam))
        for key, which, ref, vals in (("conserved_w2", 2, xF, inv[1:, 0]), ("conserved_w3", 3, yF, inv[1:, 1])):
            w = conserved_w(which, e, ref, vals)
            note(key, float(np.ptp(w) / max(np.abs(w).max(), 1e-300)), c)

        mats = lamination_matrices(c.source.as_array(), c.n_sq, e)
        note("eigen", float(np.abs(_matrix_invariants(mats) - inv[1:]).max()), c)

    tols = {"reconstruction": IDENTITY_TOL, "invariant_path": IDENTITY_TOL, "endpoint": IDENTITY_TOL,
            "velocity": FD_TOL, "conserved_w2": IDENTITY_TOL, "conserved_w3": IDENTITY_TOL,
            "eigen": EIGEN_TOL}
    reports = []
    for key, tol in tols.items():
        ok = err[key] <= tol
        reports.append(CheckReport(
            check=f"rankone_{key}", passed=ok, samples=len(conns), max_residual=err[key],
            witnesses=[] if ok else [worst[key]], values={"tolerance": tol},
        ))
    return reports


def optimal_curve_suite(spectra: list[Spectrum3], N: int = 128) -> CheckReport:
    """Bracketing, degenerate intervals, reconstruction and closed forms for each S."""
    failures = []
    worst = {"interval": 0.0, "reconstruction": 0.0}
    for S in spectra:
        try:
            op = optimal_params(S)
            for branch in BRANCHES:
                U = op.uniaxial(branch)
                lam = op.scaling(branch)
                A = admissible_set(S, U)
                iv = A.alpha_interval if branch == "alpha" else A.beta_interval
                worst["interval"] = max(worst["interval"], abs(iv[0] - lam), abs(iv[1] - lam))
                n = np.sqrt(op.normal_sq(branch))
                ev = eigvalsh3(lam * S.diag() + (1.0 - lam) * np.outer(n, n))
                worst["reconstruction"] = max(worst["reconstruction"], float(np.abs(ev - U.as_array()).max()))
                curve_arrays(branch, S, N)
            slope_at_S("alpha", S)
        except LaminationError as exc:
            failures.append({"S": list(S), "error": type(exc).__name__, "message": str(exc)})
    passed = not failures and worst["interval"] <= 1e-10 and worst["reconstruction"] <= IDENTITY_TOL
    return CheckReport(
        check="optimal_curves", passed=passed, samples=len(spectra),
        max_residual=max(worst.values()), witnesses=failures[:20],
        values={"max_interval_width": worst["interval"], "max_reconstruction": worst["reconstruction"]},
    )


def tau_condition(lam, x_ratio, y_ratio):
    """Relative condition number of tau with respect to the invariant ratios.

    The denominator 1 - lam (2 - lam) xF/xG cancels when lam and xF/xG are both
    close to 1, so rounding in the ratios is amplified by this factor.
    """
    d = lam * (2.0 - lam) * x_ratio
    c = lam * lam * (3.0 - 2.0 * lam) * y_ratio
    return 1.0 + np.abs(d / (1.0 - d)) + np.abs(c / (1.0 - c))


def pq_grid(n: int) -> list[tuple[float, float]]:
    """Pairs p < q from the n-point grid k/n, k = 0..n-1 (so q < 1)."""
    pts = np.arange(n) / n
    return [(float(pts[i]), float(pts[j])) for i in range(n) for j in range(i + 1, n)]


def extremal_suite(S: Spectrum3, n_pq: int = 32, lam_grid: int = 10_000, n_factor: int = 1000,
                   seed: int = 0) -> list[CheckReport]:
    """Argmax/argmin location, strictness, tau = h, and the P/Q factorisation."""
    rng = np.random.default_rng(seed)
    pairs = pq_grid(n_pq)
    reports = []
    for branch in BRANCHES:
        bad, worst = [], 0.0
        for p, q in pairs:
            try:
                r = extremal_check(branch, S, p, q, lam_grid, raise_on_failure=False)
            except LaminationError as exc:
                bad.append({"p": p, "q": q, "error": str(exc)})
                continue
            worst = max(worst, r.max_residual)
            if not r.passed:
                bad.append(r.values | {"witness": r.witnesses})
        reports.append(CheckReport(
            check=f"extremal_{branch}", passed=not bad, samples=len(pairs),
            max_residual=worst, witnesses=bad[:20], values={"lambda_grid": lam_grid, "pq_grid": n_pq},
        ))

        strict_bad = []
        for p, q in pq_grid(8):
            r = tangent_inward_check(branch, S, p, q, raise_on_failure=False)
            if not r.passed:
                strict_bad.append(r.values | {"witness": r.witnesses})
        reports.append(CheckReport(
            check=f"tangent_inward_{branch}", passed=not strict_bad, samples=len(pq_grid(8)),
            witnesses=strict_bad[:20],
        ))

        # tau on eigen-computed invariants against the closed-form h
        dev, n, cond_max, rel_to_cond = 0.0, 0, 0.0, 0.0
        for p, q in pq_grid(8):
            F, G = _pair_spectra(branch, S, p, q)
            lam = admissible_set(F, G).grid(64)
            lam = lam[np.abs(lam - 1.0) > 1e-6]
            xF, yF = invariant_pair(F)
            xG, yG = invariant_pair(G)
            hv = h_value(branch, S, lam, p, q)
            d = np.abs(tau(lam, xF, xG, yF, yG) - hv)
            cond = tau_condition(lam, xF / xG, yF / yG)
            dev = max(dev, float(d.max()))
            cond_max = max(cond_max, float(cond.max()))
            rel_to_cond = max(rel_to_cond, float((d / (np.finfo(float).eps * cond * np.abs(hv))).max()))
            n += lam.size
        reports.append(CheckReport(
            check=f"tau_equals_h_{branch}", passed=dev <= TAU_H_TOL, samples=n, max_residual=dev,
            values={"tolerance": TAU_H_TOL, "max_condition": cond_max,
                    "max_deviation_in_eps_times_condition": rel_to_cond},
        ))

    worst, n = 0.0, 0
    witnesses = []
    while n < n_factor:
        p, q = np.sort(rng.uniform(0.0, 1.0, size=2))
        if q - p < 1e-6:
            continue
        F, G = _pair_spectra("alpha", S, float(p), float(q))
        comps = admissible_set(F, G).components()
        lo, hi = comps[rng.integers(len(comps))]
        lam = rng.uniform(lo, hi)
        res, scale = factorization_residual(S, float(p), float(q), lam)
        if res / scale > worst:
            worst = res / scale
            witnesses = [{"p": float(p), "q": float(q), "lambda": float(lam), "scaled_residual": worst}]
        n += 1
    reports.append(CheckReport(
        check="factorization_3Q_minus_P", passed=worst <= FACTOR_TOL, samples=n,
        max_residual=worst, witnesses=witnesses if worst > FACTOR_TOL else [],
        values={"tolerance": FACTOR_TOL},
    ))
    return reports


def stability_suite(S: Spectrum3, seed: int = 0, n_pairs: int = 1000, n_lambda: int = 32,
                    n_t: int = 64, resolution: int = 2048, boundary_tol: float = 1e-7) -> CheckReport:
    L = build_gamma(S, resolution, boundary_tol)
    rep = stability_sweep(S, L, n_pairs, n_lambda, n_t, seed)
    check = rep.to_check()
    check.values["resolution"] = resolution
    check.values["boundary_tol"] = boundary_tol
    return check


def inequality_checks(spectra: list[Spectrum3], grid: int = 32, n_lambda: int = 32) -> CheckReport:
    """inequality_suite over many spectra, merged into one report."""
    bad, worst, samples = [], 0.0, 0
    for S in spectra:
        r = inequality_suite(S, grid, n_lambda)
        samples += r.samples
        worst = max(worst, r.max_residual)
        if not r.passed:
            bad.append({"S": list(S), "violations": r.witnesses})
    return CheckReport(check="inequalities_many", passed=not bad, samples=samples,
                       max_residual=worst, witnesses=bad[:20], values={"spectra": len(spectra)})
