import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lamstab import HullPolygon, admissible_set, build_gamma, connect
from lamstab.curves import curve_spectra, e2, optimal_params, random_admissible_spectra
from lamstab.errors import DegenerateDenominator, ExtremalityViolation
from lamstab.hull import classify_spectra
from lamstab.rank_one import trajectory_spectra, velocity
from lamstab.spectra import invariants, spectrum_from_sorted
from lamstab.stability import (
    extremal_check,
    factorization_residual,
    h_at_cap,
    h_from_e2,
    h_value,
    inequality_suite,
    lambda_cap,
    stability_sweep,
    tangent_inward_check,
    tau,
)

from oracles import GOLDEN

seeds = st.integers(0, 2**32 - 1)


def one_spectrum(seed):
    return random_admissible_spectra(np.random.default_rng(seed), 1)[0]


def test_tau_optimal_alpha():
    val = tau(GOLDEN["alpha"], 0.31, GOLDEN["i2_Ua"], 0.03, GOLDEN["i3_Ua"])
    assert val == pytest.approx(GOLDEN["tau_alpha"], abs=1e-13)
    assert val == pytest.approx(GOLDEN["slope_alpha"] * GOLDEN["i2_Ua"] / GOLDEN["i3_Ua"], abs=1e-12)


def test_tau_matches_velocity_beta():
    args = (0.31, GOLDEN["i2_Ub"], 0.03, GOLDEN["i3_Ub"])
    xd, yd = velocity(GOLDEN["beta"], 0.0, *args)
    assert tau(GOLDEN["beta"], *args) == pytest.approx(yd / xd * GOLDEN["i2_Ub"] / GOLDEN["i3_Ub"], abs=1e-9)
    assert tau(GOLDEN["beta"], *args) == pytest.approx(GOLDEN["tau_beta"], abs=1e-12)


def test_tau_self_near_one_matches_finite_difference():
    lam, x, y = 0.999, 0.31, 0.03
    xd, yd = velocity(lam, 0.0, x, x, y, y)
    assert tau(lam, x, x, y, y) == pytest.approx(yd / xd * x / y, rel=1e-9)


def test_tau_degenerate():
    # 1 - lam (2 - lam) xF / xG = 0 at lam = 1 when xF = xG
    with pytest.raises(DegenerateDenominator):
        tau(1.0, 0.3, 0.3, 0.03, 0.03)


def test_h_full_curve(S):
    assert h_value("alpha", S, GOLDEN["alpha"], 0.0, 1.0) == pytest.approx(GOLDEN["tau_alpha"], abs=1e-12)
    assert 3 * 0.3 / GOLDEN["u_alpha"] == pytest.approx(GOLDEN["tau_alpha"], abs=1e-14)


def test_h_diagonal(S):
    lam = np.array([0.7, 0.9, 1.1, 1.4])
    assert np.allclose(h_value("alpha", S, lam, 0.3, 0.3), 2 + 1 / lam, atol=1e-14)


def test_h_at_cap_closed_form(S):
    for branch in ("alpha", "beta"):
        for p, q in ((0.0, 0.5), (0.2, 0.8), (0.1, 0.95)):
            cap = lambda_cap(branch, S, p, q)
            assert h_value(branch, S, cap, p, q) == pytest.approx(h_at_cap(branch, S, p, q), abs=1e-10)


def test_h_rejects_bad_pq(S):
    with pytest.raises(ValueError):
        h_value("alpha", S, 0.9, 0.6, 0.5)
    with pytest.raises(ValueError):
        h_value("alpha", S, 0.9, 1.0, 1.0)


def test_lambda_cap_examples(S):
    assert lambda_cap("alpha", S, 0.4, 0.4) == 1.0
    assert lambda_cap("alpha", S, 0.0, 1.0) == pytest.approx(GOLDEN["alpha"], abs=1e-15)
    assert lambda_cap("alpha", S, 0.0, 0.5) == pytest.approx(GOLDEN["eta_alpha_half"], abs=1e-15)


def test_lambda_cap_is_admissible_endpoint(S):
    for p, q in ((0.0, 0.3), (0.25, 0.75)):
        F, G = curve_spectra("beta", S, [p, q])
        A = admissible_set(spectrum_from_sorted(F), spectrum_from_sorted(G))
        assert lambda_cap("beta", S, p, q) == pytest.approx(A.beta_interval[0], abs=1e-12)


@pytest.mark.parametrize("branch,p,q", [("alpha", 0.0, 0.5), ("alpha", 0.2, 0.8), ("beta", 0.0, 0.5)])
def test_extremal_examples(S, branch, p, q):
    rep = extremal_check(branch, S, p, q, grid=10_000)
    assert rep.passed
    assert abs(rep.values["refined_argopt"] - lambda_cap(branch, S, p, q)) < 1e-6
    if (branch, p, q) == ("alpha", 0.0, 0.5):
        assert rep.values["lambda_cap"] == pytest.approx(GOLDEN["eta_alpha_half"], abs=1e-15)


def test_extremal_rejects_degenerate_pq(S):
    with pytest.raises(ValueError):
        extremal_check("alpha", S, 0.5, 0.5)
    with pytest.raises(ValueError):
        extremal_check("alpha", S, 0.0, 1.0)


def test_extremal_detects_wrong_objective(S, monkeypatch):
    # flipping the sign of h turns the maximum into a minimum, which must be caught
    import lamstab.stability as st_mod

    monkeypatch.setattr(st_mod, "h_from_e2", lambda u, a, b, lam: -h_from_e2(u, a, b, lam))
    with pytest.raises(ExtremalityViolation):
        st_mod.extremal_check("alpha", S, 0.0, 0.5, grid=500)


@pytest.mark.parametrize("branch,p,q", [("alpha", 0.0, 0.9), ("beta", 0.1, 0.9)])
def test_tangent_inward_examples(S, branch, p, q):
    rep = tangent_inward_check(branch, S, p, q)
    assert rep.passed and rep.values["min_gap"] > 0


def test_factorization_at_double_root(S):
    cap = lambda_cap("alpha", S, 0.1, 0.7)
    res, _ = factorization_residual(S, 0.1, 0.7, cap)
    assert res <= 1e-12


def test_factorization_random(S):
    rng = np.random.default_rng(0)
    p = rng.uniform(0, 0.9, 300)
    q = p + rng.uniform(0, 1, 300) * (1 - p)
    for pi, qi in zip(p, q):
        lam = rng.uniform(0.5, 1.5)
        res, scale = factorization_residual(S, pi, qi, lam)
        assert res <= 1e-9 * scale


def test_factorization_literal_sign_fails(S):
    res, scale = factorization_residual(S, 0.0, 0.5, 0.9, literal=True)
    assert res > 1e-3 * scale


def test_inequality_suite_example(S):
    rep = inequality_suite(S, grid=32, n_lambda=32)
    assert rep.passed
    assert rep.values["s1+2s2-3u_alpha"] == pytest.approx(GOLDEN["gap_alpha"], abs=1e-15)


def test_K_vanishes_at_uniaxial_end(S):
    m = curve_spectra("alpha", S, [1.0])[0]
    u = GOLDEN["u_alpha"]
    assert abs(m[0] + 2 * e2("alpha", S, 1.0) - 3 * u) < 1e-12


@given(seeds, st.floats(0.0, 0.95), st.floats(0.01, 1.0), st.booleans())
def test_tau_equals_h(seed, p, frac, beta):
    S = one_spectrum(seed)
    branch = "beta" if beta else "alpha"
    q = p + frac * (1 - p)
    assume(q < 1.0 and q - p > 1e-6)
    F, G = curve_spectra(branch, S, [p, q])
    F, G = spectrum_from_sorted(F), spectrum_from_sorted(G)
    lam = admissible_set(F, G).grid(9)
    lam = lam[np.abs(lam - 1) > 1e-3]
    assume(lam.size)
    _, xF, yF = invariants(F)
    _, xG, yG = invariants(G)
    t = tau(lam, xF, xG, yF, yG)
    h = h_value(branch, S, lam, p, q)
    assert np.abs(t - h).max() <= 1e-8 * max(1.0, np.abs(h).max())


@given(seeds)
def test_extremal_random_spectrum(seed):
    S = one_spectrum(seed)
    for branch in ("alpha", "beta"):
        assert extremal_check(branch, S, 0.1, 0.6, grid=2000).passed


def test_sweep_small_passes(S):
    L = build_gamma(S, 1024)
    rep = stability_sweep(S, L, n_pairs=120, n_lambda=8, n_t=16, seed=1)
    assert rep.passed and rep.eigen_bound_ok
    assert rep.connected_pairs > 0 and rep.trajectories > 0
    assert rep.to_check().passed


def test_sweep_deterministic(S):
    L = build_gamma(S, 256)
    a = stability_sweep(S, L, n_pairs=60, n_lambda=4, n_t=8, seed=5)
    b = stability_sweep(S, L, n_pairs=60, n_lambda=4, n_t=8, seed=5)
    assert a.to_check().to_dict() == b.to_check().to_dict()


def test_sweep_catches_shrunken_region(S):
    L = build_gamma(S, 256)
    small = HullPolygon(0.9 * L.vertices, L.resolution, L.boundary_tol)
    rep = stability_sweep(S, small, n_pairs=60, n_lambda=4, n_t=8, seed=0)
    assert not rep.passed
    assert rep.violations[0].distance > small.boundary_tol


def test_optimal_arc_stays_on_boundary(S, hull512):
    op = optimal_params(S)
    m = trajectory_spectra(connect(S, op.U_alpha, op.alpha), np.linspace(0, 1, 65))
    assert np.all(classify_spectra(hull512, m) == 1)


def test_arc_to_arc_no_escape(S, hull512):
    F, G = (spectrum_from_sorted(r) for r in curve_spectra("alpha", S, [0.3, 0.7]))
    L = hull512
    for lam in admissible_set(F, G).grid(32):
        if abs(lam - 1) < 1e-9:
            continue
        m = trajectory_spectra(connect(F, G, lam), np.linspace(0, 1, 64))
        assert np.all(classify_spectra(L, m) != 0)
