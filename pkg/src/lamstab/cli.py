"""Command line front end: curve, hull and trajectory data, verification, figure data.

Exit codes: 0 success, 1 verification failure, 2 empty admissible set,
3 configuration error, 4 file-system error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .curves import BRANCHES, check_angle_formulas, curve_arrays, optimal_params, random_admissible_spectra
from .errors import ConfigError, EmptyAdmissibleSet, LaminationError, NotAdmissible
from .hull import Membership, build_gamma, contains, hexagon
from .rank_one import admissible_set, connect, trajectory_spectra
from .spectra import ISOTROPIC, Spectrum3, embed_triple, invariants_array, is_distinct, make_spectrum
from .stability import CheckReport, inequality_suite
from . import suites

log = logging.getLogger("lamstab")

EXIT_OK, EXIT_FAILED, EXIT_EMPTY, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3, 4
SUITES = ("all", "rankone", "curves", "inequalities", "extremal", "stability")
SWEEP_RESOLUTION = 2048


@dataclass(frozen=True)
class Tolerances:
    eigen: float = 1e-11
    membership: float = 1e-7
    identity: float = 1e-9


@dataclass(frozen=True)
class RunConfig:
    spectrum: Spectrum3
    samples_per_branch: int = 512
    grid: int = 256
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    format: str = "csv"
    output: Path = Path(".")


def fmt(x) -> str:
    """Shortest decimal that reads back to the same double; integers without '.0'."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def parse_triple(text: str, name: str = "spectrum") -> tuple[float, float, float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ConfigError(f"--{name} needs three comma-separated numbers, got {text!r}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"--{name}: {exc}") from exc
    total = sum(vals)
    if 1e-12 < abs(total - 1.0) <= 1e-9:
        log.warning("%s sums to %r; renormalising to unit trace", name, total)
    try:
        return tuple(float(v) for v in make_spectrum(*vals))
    except LaminationError as exc:
        raise ConfigError(f"--{name}: {exc}") from exc


def parse_spectrum(text: str, name: str = "spectrum") -> Spectrum3:
    return Spectrum3(*parse_triple(text, name))


def config_from_args(args: argparse.Namespace) -> RunConfig:
    S = parse_spectrum(args.spectrum)
    if not is_distinct(S.as_array()):
        raise ConfigError(f"--spectrum must have s1 < s2 < s3, got {tuple(S)}")
    for name in ("samples", "grid"):
        if getattr(args, name) < 2:
            raise ConfigError(f"--{name} must be at least 2")
    if args.samples < 16 and args.command in ("hull", "figures", "trajectory"):
        raise ConfigError("--samples must be at least 16 to build the hull")
    if not args.tol_membership > 0.0:
        raise ConfigError("--tol-membership must be positive")
    try:
        optimal_params(S)
    except LaminationError as exc:
        raise ConfigError(f"--spectrum {tuple(S)}: {exc}") from exc
    return RunConfig(
        spectrum=S,
        samples_per_branch=args.samples,
        grid=args.grid,
        seed=args.seed,
        tolerances=Tolerances(membership=args.tol_membership),
        format=args.format,
        output=Path(args.output_dir),
    )


# ---------------------------------------------------------------------------
# output


def write_table(cfg: RunConfig, stem: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    cfg.output.mkdir(parents=True, exist_ok=True)
    rows = [[fmt(v) for v in row] for row in rows]
    if cfg.format == "json":
        path = cfg.output / f"{stem}.json"
        records = [{h: _json_value(v) for h, v in zip(header, row)} for row in rows]
        path.write_text(json.dumps(records, indent=1) + "\n")
    else:
        path = cfg.output / f"{stem}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    return path


def _json_value(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


# ---------------------------------------------------------------------------
# commands


def cmd_curves(cfg: RunConfig) -> int:
    S = cfg.spectrum
    rows = []
    for branch in BRANCHES:
        t, e, m, _ = curve_arrays(branch, S, cfg.samples_per_branch)
        inv = invariants_array(m)
        for k in range(len(t)):
            rows.append([branch, t[k], e[k], *m[k], *inv[k]])
    path = write_table(cfg, "curves", ["branch", "t", "e2", "m1", "m2", "m3", "i2", "i3"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_hull(cfg: RunConfig) -> int:
    L = build_gamma(cfg.spectrum, cfg.samples_per_branch, cfg.tolerances.membership)
    ring = L.closed_vertices
    m = L.spectra()
    m = np.vstack([m, m[:1]])
    rows = [[k, *ring[k], *m[k]] for k in range(len(ring))]
    p1 = write_table(cfg, "hull", ["idx", "u", "v", "m1", "m2", "m3"], rows)
    H = hexagon(cfg.spectrum)
    hm = H.spectra
    p2 = write_table(cfg, "hexagon", ["idx", "u", "v", "m1", "m2", "m3"],
                     [[k, *H.vertices[k], *hm[k]] for k in range(len(hm))])
    print(f"wrote {p1} ({len(rows)} rows, closed) and {p2}")
    return EXIT_OK


def trajectory_lambdas(F: Spectrum3, G: Spectrum3) -> list[float]:
    """Scalings traced when none is given: every component endpoint and midpoint."""
    A = admissible_set(F, G)
    if A.empty:
        raise EmptyAdmissibleSet(
            f"A(F, G) is empty for F={tuple(F)}, G={tuple(G)}: "
            "no scaling makes G a rank-one laminate of F (empty-interval convention)"
        )
    out = []
    for lo, hi in A.components():
        for lam in (lo, 0.5 * (lo + hi), hi):
            if abs(lam - 1.0) >= 1e-9 and lam not in out:
                out.append(lam)
    return out


def cmd_trajectory(cfg: RunConfig, F: Spectrum3, G: Spectrum3, lam: float | None, points: int) -> int:
    lams = trajectory_lambdas(F, G) if lam is None else [lam]
    if lam is not None and not admissible_set(F, G).contains(lam, tol=1e-10):
        if admissible_set(F, G).empty:
            raise EmptyAdmissibleSet(f"A(F, G) is empty for F={tuple(F)}, G={tuple(G)}")
        raise NotAdmissible(f"lambda={lam!r} is not in A(F, G)")
    L = build_gamma(cfg.spectrum, cfg.samples_per_branch, cfg.tolerances.membership)
    ts = np.linspace(0.0, 1.0, points)
    rows = []
    for lm in lams:
        conn = connect(F, G, lm)
        m = trajectory_spectra(conn, ts)
        m[0] = F.as_array()
        inv = invariants_array(m)
        for k, t in enumerate(ts):
            rows.append([lm, t, *m[k], *inv[k], contains(L, m[k]).value])
    path = write_table(cfg, "trajectory", ["lambda", "t", "m1", "m2", "m3", "i2", "i3", "membership"], rows)
    outside = sum(r[-1] == Membership.OUTSIDE.value for r in rows)
    print(f"wrote {path} ({len(lams)} scalings, {len(rows)} rows, {outside} outside)")
    return EXIT_OK


def run_checks(cfg: RunConfig, suite: str) -> list[CheckReport]:
    S = cfg.spectrum
    rng = np.random.default_rng(cfg.seed)
    checks: list[CheckReport] = []
    want = (lambda name: suite in ("all", name))
    if want("rankone"):
        checks += suites.rankone_suite(cfg.seed)
    if want("curves"):
        spectra = [S] + random_admissible_spectra(rng, 1000, min_gap=1e-6)
        checks.append(suites.optimal_curve_suite(spectra))
    if want("inequalities"):
        checks.append(inequality_suite(S, min(cfg.grid, 256), 64))
    if want("extremal"):
        checks += suites.extremal_suite(S, seed=cfg.seed)
    if want("stability"):
        res = max(cfg.samples_per_branch, SWEEP_RESOLUTION)
        checks.append(suites.stability_suite(S, cfg.seed, resolution=res, boundary_tol=cfg.tolerances.membership))
    return checks


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    checks = run_checks(cfg, suite)
    passed = all(c.passed for c in checks)
    report = {
        "spectrum": list(cfg.spectrum),
        "suite": suite,
        "seed": cfg.seed,
        "passed": passed,
        "checks": [c.to_dict() for c in checks],
        "diagnostics": [check_angle_formulas(cfg.spectrum)],
    }
    cfg.output.mkdir(parents=True, exist_ok=True)
    path = cfg.output / "verify.json"
    path.write_text(json.dumps(report, indent=1, default=_json_default) + "\n")
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.check} samples={c.samples} max_residual={c.max_residual:.3e}")
    print(f"wrote {path}: {'passed' if passed else 'FAILED'}")
    return EXIT_OK if passed else EXIT_FAILED


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def cmd_figures(cfg: RunConfig) -> int:
    S = cfg.spectrum
    s1, s2, s3 = S
    N = cfg.samples_per_branch
    c_alpha = np.array([(s1 + s2) / 2, (s1 + s2) / 2, s3])
    c_beta = np.array([s1, (s2 + s3) / 2, (s2 + s3) / 2])
    header = ["series", "idx", "u", "v", "m1", "m2", "m3"]

    def series(name, m):
        uv = embed_triple(m)
        return [[name, k, *uv[k], *m[k]] for k in range(len(m))]

    sextant, invariant_rows = [], []
    for branch in BRANCHES:
        t, e, m, _ = curve_arrays(branch, S, N)
        inv = invariants_array(m)
        sextant += series(f"gamma_{branch}", m)
        invariant_rows += [[f"gamma_{branch}", k, t[k], e[k], *inv[k]] for k in range(len(t))]
    sextant += series("uniaxial_alpha", np.array([ISOTROPIC, c_alpha]))
    sextant += series("uniaxial_beta", np.array([ISOTROPIC, c_beta]))
    quad = np.array([S.as_array(), c_alpha, ISOTROPIC, c_beta, S.as_array()])
    sextant += series("quadrilateral", quad)
    p1 = write_table(cfg, "fig_sextant", header, sextant)

    L = build_gamma(S, N, cfg.tolerances.membership)
    ring = L.spectra()
    H = hexagon(S)
    hm = H.spectra
    full = series("gamma", np.vstack([ring, ring[:1]])) + series("hexagon", np.vstack([hm, hm[:1]]))
    p2 = write_table(cfg, "fig_hexagon", header, full)
    p3 = write_table(cfg, "fig_invariants", ["series", "idx", "t", "e2", "i2", "i3"], invariant_rows)
    print(f"wrote {p1}, {p2}, {p3}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spectrum", default="0.2,0.3,0.5", help="base spectrum s1,s2,s3 (unit trace)")
    common.add_argument("--samples", type=int, default=512, help="samples per optimal branch")
    common.add_argument("--grid", type=int, default=256, help="(p, q) grid size for the inequality suite")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-membership", type=float, default=1e-7, help="boundary tolerance in plane units")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output-dir", default=".")

    parser = argparse.ArgumentParser(prog="lamstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("curves", parents=[common], help="sample both optimal curves")
    sub.add_parser("hull", parents=[common], help="closed polygon Gamma and the hexagon")
    traj = sub.add_parser("trajectory", parents=[common], help="lamination trajectory F -> G")
    traj.add_argument("--F", required=True, help="source spectrum f1,f2,f3")
    traj.add_argument("--G", required=True, help="target spectrum g1,g2,g3")
    traj.add_argument("--lambda", dest="lam", type=float, default=None)
    traj.add_argument("--points", type=int, default=65, help="t samples per scaling")
    ver = sub.add_parser("verify", parents=[common], help="run property suites, write verify.json")
    ver.add_argument("--suite", choices=SUITES, default="all")
    sub.add_parser("figures", parents=[common], help="plot-ready CSV data")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "curves":
            return cmd_curves(cfg)
        if args.command == "hull":
            return cmd_hull(cfg)
        if args.command == "trajectory":
            F = parse_spectrum(args.F, "F")
            G = parse_spectrum(args.G, "G")
            if args.points < 2:
                raise ConfigError("--points must be at least 2")
            return cmd_trajectory(cfg, F, G, args.lam, args.points)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        if args.command == "figures":
            return cmd_figures(cfg)
    except EmptyAdmissibleSet as exc:
        log.error("%s", exc)
        return EXIT_EMPTY
    except (ConfigError, LaminationError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
