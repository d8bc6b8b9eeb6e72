import csv
import json
import logging

import numpy as np
import pytest

from lamstab.cli import EXIT_CONFIG, EXIT_EMPTY, EXIT_FAILED, EXIT_IO, EXIT_OK, fmt, main

from oracles import GOLDEN


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def run(tmp_path, *args):
    return main([*args, "--output-dir", str(tmp_path)])


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, GOLDEN["u_alpha"], 1e-300, 2.0):
        assert float(fmt(x)) == x
    assert fmt(0.0) == "0" and fmt(7) == "7"


def test_curves(tmp_path):
    assert run(tmp_path, "curves", "--spectrum", "0.2,0.3,0.5", "--samples", "64") == EXIT_OK
    rows = read_csv(tmp_path / "curves.csv")
    assert rows[0] == ["branch", "t", "e2", "m1", "m2", "m3", "i2", "i3"]
    assert rows[1] == ["alpha", "0", "0.3", "0.2", "0.3", "0.5", "0.31", "0.03"]
    body = rows[1:]
    assert len(body) == 2 * 64
    last_alpha = [r for r in body if r[0] == "alpha"][-1]
    assert float(last_alpha[3]) == pytest.approx(GOLDEN["u_alpha"], abs=1e-12)
    assert float(last_alpha[4]) == pytest.approx(GOLDEN["u_alpha"], abs=1e-12)


def test_curves_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(a, "curves", "--samples", "32")
    run(b, "curves", "--samples", "32")
    assert (a / "curves.csv").read_bytes() == (b / "curves.csv").read_bytes()


def test_curves_json(tmp_path):
    assert run(tmp_path, "curves", "--samples", "16", "--format", "json") == EXIT_OK
    recs = json.loads((tmp_path / "curves.json").read_text())
    assert recs[0]["branch"] == "alpha" and recs[0]["i2"] == 0.31


def test_hull(tmp_path):
    assert run(tmp_path, "hull", "--samples", "64") == EXIT_OK
    rows = np.array([[float(x) for x in r] for r in read_csv(tmp_path / "hull.csv")[1:]])
    assert len(rows) == 12 * 64 - 12 + 1
    assert np.abs(rows[0, 1:] - rows[-1, 1:]).max() <= 1e-12
    s_rows = [r for r in rows[:, 3:] if sorted(r) == [0.2, 0.3, 0.5]]
    assert len({tuple(r) for r in s_rows}) == 6
    uv = rows[:-1, 1:3]
    c, s = np.cos(2 * np.pi / 3), np.sin(2 * np.pi / 3)
    rotated = uv @ np.array([[c, -s], [s, c]]).T
    d = np.min(np.linalg.norm(rotated[:, None] - uv[None], axis=-1), axis=1)
    assert d.max() < 1e-9
    hexa = read_csv(tmp_path / "hexagon.csv")[1:]
    assert len(hexa) == 6


def test_trajectory_optimal_arc(tmp_path):
    G = ",".join(repr(x) for x in (GOLDEN["u_alpha"], GOLDEN["u_alpha"], 1 - 2 * GOLDEN["u_alpha"]))
    code = run(tmp_path, "trajectory", "--F", "0.2,0.3,0.5", "--G", G, "--lambda", repr(GOLDEN["alpha"]))
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "trajectory.csv")[1:]
    assert len(rows) == 65
    assert {r[-1] for r in rows} == {"Boundary"}


def test_trajectory_self_loop(tmp_path):
    code = run(tmp_path, "trajectory", "--F", "0.2,0.3,0.5", "--G", "0.2,0.3,0.5", "--lambda", repr(2 / 3))
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "trajectory.csv")[1:]
    first = [float(x) for x in rows[0][2:5]]
    last = [float(x) for x in rows[-1][2:5]]
    assert first == [0.2, 0.3, 0.5]
    assert last == pytest.approx([0.2, 0.3, 0.5], abs=1e-12)


def test_trajectory_default_lambdas(tmp_path):
    assert run(tmp_path, "trajectory", "--F", "0.25,0.35,0.40", "--G", "0.25,0.30,0.45") == EXIT_OK
    lams = {r[0] for r in read_csv(tmp_path / "trajectory.csv")[1:]}
    assert len(lams) == 6


def test_trajectory_empty_set(tmp_path, caplog):
    with caplog.at_level(logging.ERROR, logger="lamstab"):
        code = run(tmp_path, "trajectory", "--F", "0.33,0.333,0.337", "--G", "0.1,0.3,0.6")
    assert code == EXIT_EMPTY
    assert "empty" in caplog.text


def test_trajectory_lambda_not_admissible(tmp_path):
    G = ",".join(repr(x) for x in (GOLDEN["u_alpha"], GOLDEN["u_alpha"], 1 - 2 * GOLDEN["u_alpha"]))
    assert run(tmp_path, "trajectory", "--F", "0.2,0.3,0.5", "--G", G, "--lambda", "0.5") == EXIT_CONFIG


@pytest.mark.parametrize("args", [
    ["curves", "--spectrum", "0.2,0.2,0.6"],
    ["curves", "--spectrum", "0.2,0.3"],
    ["curves", "--spectrum", "0.2,0.3,0.6"],
    ["curves", "--spectrum", "a,b,c"],
    ["hull", "--samples", "8"],
    ["curves", "--tol-membership", "0"],
])
def test_config_errors(tmp_path, args):
    assert run(tmp_path, *args) == EXIT_CONFIG


def test_trace_warning(tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="lamstab"):
        code = run(tmp_path, "curves", "--spectrum", "0.2,0.3,0.5000000005", "--samples", "16")
    assert code == EXIT_OK
    assert "renormalising" in caplog.text


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["curves", "--samples", "16", "--output-dir", str(blocker / "sub")]) == EXIT_IO


def test_verify_inequalities(tmp_path):
    assert run(tmp_path, "verify", "--suite", "inequalities", "--grid", "32") == EXIT_OK
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["passed"]
    (check,) = rep["checks"]
    assert check["values"]["s1+2s2-3u_alpha"] == pytest.approx(0.0189255, abs=1e-7)
    diag = rep["diagnostics"][0]
    assert diag["alpha"]["cos2phi_literal"] == pytest.approx(GOLDEN["cos2phi_literal_alpha"], abs=1e-12)


def test_verify_stability(tmp_path):
    assert run(tmp_path, "verify", "--suite", "stability", "--seed", "0") == EXIT_OK
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["passed"] and rep["checks"][0]["witnesses"] == []
    assert rep["checks"][0]["values"]["violations"] == 0


def test_verify_near_degenerate_completes(tmp_path):
    code = run(tmp_path, "verify", "--suite", "all", "--spectrum", "0.332,0.333,0.335")
    assert code in (EXIT_OK, EXIT_FAILED)
    rep = json.loads((tmp_path / "verify.json").read_text())
    names = {c["check"] for c in rep["checks"]}
    assert {"stability", "extremal_alpha", "tau_equals_h_beta"} <= names
    # every tau/h failure is explained by conditioning, not by a formula error
    for c in rep["checks"]:
        if c["check"].startswith("tau_equals_h") and not c["passed"]:
            assert c["values"]["max_deviation_in_eps_times_condition"] < 10


def test_figures(tmp_path):
    assert run(tmp_path, "figures", "--samples", "32") == EXIT_OK
    sext = read_csv(tmp_path / "fig_sextant.csv")
    quad = [r for r in sext[1:] if r[0] == "quadrilateral"]
    pts = [tuple(float(x) for x in r[4:7]) for r in quad]
    assert pts[1] == pytest.approx((0.25, 0.25, 0.5), abs=1e-15)
    assert pts[3] == pytest.approx((0.2, 0.4, 0.4), abs=1e-15)
    inv = read_csv(tmp_path / "fig_invariants.csv")[1:]
    starts = [r for r in inv if r[1] == "0"]
    assert len(starts) == 2
    for r in starts:
        assert (float(r[4]), float(r[5])) == pytest.approx((0.31, 0.03), abs=1e-15)
    hexa = read_csv(tmp_path / "fig_hexagon.csv")[1:]
    assert {r[0] for r in hexa} == {"gamma", "hexagon"}
