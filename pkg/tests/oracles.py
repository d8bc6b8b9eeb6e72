"""Independent high-precision oracles (mpmath, 40 digits).

Nothing here imports lamstab.  The frozen numbers in GOLDEN were produced
by these functions for S = (0.2, 0.3, 0.5) and are pinned so that a change
in either the oracle or the library shows up as a test failure.
"""
from __future__ import annotations

from mpmath import mp, mpf, sqrt

mp.dps = 40


def quadratic_roots(S):
    """Roots (u_alpha, u_beta) of 6 s2 x^2 + x (s1 s3 - 3 s2 - 4 s2^2) + 2 s2^2."""
    s1, s2, s3 = (mpf(x) for x in S)
    a, b, c = 6 * s2, s1 * s3 - 3 * s2 - 4 * s2**2, 2 * s2**2
    d = sqrt(b * b - 4 * a * c)
    return (-b - d) / (2 * a), (-b + d) / (2 * a)


def normal_squares(F, G, lam):
    """Squared normal components by direct substitution into the product formula."""
    F = [mpf(x) for x in F]
    G = [mpf(x) for x in G]
    lam = mpf(lam)
    out = []
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        num = (G[0] - lam * F[i]) * (G[1] - lam * F[i]) * (G[2] - lam * F[i])
        out.append(num / (lam**2 * (1 - lam) * (F[j] - F[i]) * (F[k] - F[i])))
    return out


def i2(m):
    m = [mpf(x) for x in m]
    return m[0] * m[1] + m[1] * m[2] + m[0] * m[2]


def i3(m):
    m = [mpf(x) for x in m]
    return m[0] * m[1] * m[2]


def eta(lam, t):
    lam, t = mpf(lam), mpf(t)
    return lam / (lam + t * (1 - lam))


def uniaxial(S):
    ua, ub = quadratic_roots(S)
    return [ua, ua, 1 - 2 * ua], [1 - 2 * ub, ub, ub]


def slope(S, u):
    s2 = mpf(S[1])
    return 3 * s2 * (1 - 2 * u) / (2 - 3 * u)


def tau(lam, xF, xG, yF, yG):
    lam = mpf(lam)
    return (1 - lam**2 * (3 - 2 * lam) * yF / yG) / (lam * (1 - lam * (2 - lam) * xF / xG))


def golden(S=("0.2", "0.3", "0.5")) -> dict:
    s1, s2, s3 = (mpf(x) for x in S)
    ua, ub = quadratic_roots(S)
    Ua, Ub = uniaxial(S)
    al, be = ua / s2, ub / s2
    return {
        "u_alpha": ua, "u_beta": ub, "alpha": al, "beta": be,
        "n_alpha_sq": normal_squares(S, Ua, al), "n_beta_sq": normal_squares(S, Ub, be),
        "i2_S": i2(S), "i3_S": i3(S), "i2_Ua": i2(Ua), "i3_Ua": i3(Ua),
        "i2_Ub": i2(Ub), "i3_Ub": i3(Ub),
        "slope_alpha": slope(S, ua), "slope_beta": slope(S, ub),
        "tau_alpha": tau(al, i2(S), i2(Ua), i3(S), i3(Ua)),
        "tau_beta": tau(be, i2(S), i2(Ub), i3(S), i3(Ub)),
        "gap_alpha": s1 + 2 * s2 - 3 * ua,
        "eta_alpha_half": eta(al, mpf(1) / 2),
        "embed_S": ((s1 - s2) / sqrt(2), (s1 + s2 - 2 * s3) / sqrt(6)),
    }


# frozen output of golden() at 17 significant digits
GOLDEN = {
    "u_alpha": 0.26035817374633309,
    "u_beta": 0.38408627069811135,
    "alpha": 0.86786057915444363,
    "beta": 1.2802875689937045,
    "n_alpha_sq": (0.77118429085533479, 0.0, 0.22881570914466521),
    "n_beta_sq": (0.028815709144665205, 0.0, 0.97118429085533479),
    "n_self_two_thirds": (0.91666666666666667, 0.0, 0.083333333333333333),
    "i2_S": 0.31,
    "i3_S": 0.03,
    "i2_Ua": 0.31735721158308887,
    "i3_Ua": 0.032488903143159174,
    "i2_Ub": 0.32560575137987409,
    "i3_Ub": 0.034199711397307219,
    "slope_alpha": 0.35388159060803247,
    "slope_beta": 0.24611840939196753,
    "tau_alpha": 3.4567764362830022,
    "tau_beta": 2.3432235637169978,
    "gap_alpha": 0.018925478761000731,
    "eta_alpha_half": 0.92925627195078223,
    "w2_alpha_endpoint": 0.73135528725660044,
    "cos2phi_literal_alpha": 6.7118429085533479,
    "cos2phi_derived_alpha": 0.54236858171066959,
    "cos2phi_derived_beta": -0.94236858171066959,
    "embed_S": (-0.070710678118654752, -0.20412414523193151),
}

# printed reference literals for S = (0.2, 0.3, 0.5), 7 significant digits
PRINTED = {
    "u_alpha": 0.2603582,
    "u_beta": 0.3840863,
    "alpha": 0.8678606,
    "beta": 1.2802876,
    "n_alpha_sq": (0.7711847, 0.0, 0.2288153),
    "n_beta_sq": (0.0288278, 0.0, 0.9711722),
    "i2_S": 0.31,
    "i3_S": 0.03,
    "i2_Ua": 0.3173586,
    "i3_Ua": 0.0324894,
    "slope_alpha": 0.3538820,
    "slope_beta": 0.2461172,
}
