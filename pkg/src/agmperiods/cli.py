"""Command-line front end: sweeps, period reports, theta scans, AGM.

Four subcommands map onto the library layers:

    agmperiods agm A B              one arithmetic-geometric mean
    agmperiods solve ...            continuation sweep -> CSV + manifest
    agmperiods periods A G ...      branch points, tau, Abel table
    agmperiods theta-scan ...       H3 nonvanishing scan -> plot data

Every output file embeds the resolved run configuration as comment lines
(CSV, plot data) or as a field (JSON manifest), and nothing in any output
depends on the clock or the environment, so identical configurations
produce byte-identical files.  Options can come from a flat key=value
configuration file (--config); explicit flags override file entries.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .agm import agm_sequence, elliptic_integral_agm
from .hyperpoly import DegenerateModelError
from .monopole import (
    CAL_CONJUGATE_PERIODS,
    ConventionMismatchError,
    CurveParams,
    abel_characteristics,
    infinity_characteristics,
    involution_matrix_checks,
    period_matrix,
    quotient_branch_points,
)
from .solver import (
    ContinuationError,
    NoSolutionError,
    SolutionPoint,
    _SEED_G,
    continuation_sweep,
    solve_continued,
    unscale,
)
from .theta import h3_scan, h3_summary

__all__ = ["RunConfig", "main"]

# Convention flags recorded in every manifest: where the square-root sheet
# is anchored, and how table entries are oriented when periods are built.
CONVENTIONS = {
    "sheet_anchor": "principal-root-right-of-spectrum",
    "orientation": "conjugated" if CAL_CONJUGATE_PERIODS else "direct",
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved options of one run; everything an output depends on."""

    a_min: float = 0.0
    a_max: float = 2.99
    step: float = 0.1
    step_fine: float = 0.01
    intset: tuple[int, int, int, int] = (4, 1, -3, 1)
    tol_residual: float = 1e-8
    tol_quad: float = 1e-10
    grid: int = 400
    out_dir: str = "."

    def __post_init__(self) -> None:
        if self.tol_residual <= 0.0 or self.tol_quad <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.tol_residual < 10.0 * self.tol_quad:
            raise ValueError("tol-residual must be at least ten times "
                             "tol-quad")
        if self.grid < 2:
            raise ValueError("grid needs at least two points")


def _parse_intset(text: str) -> tuple[int, int, int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            "intset must be four comma-separated integers")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_config_file(path: str) -> dict:
    """Flat key=value lines; blank lines and # comments are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, value: str):
    kind = _CONFIG_TYPES[name]
    if name == "intset":
        return _parse_intset(value)
    if kind == "float":
        return float(value)
    if kind == "int":
        return int(value)
    return value


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """Built-in defaults, overridden by the file, overridden by flags."""
    merged = {}
    if getattr(args, "config", None):
        for key, value in _read_config_file(args.config).items():
            if key not in _CONFIG_TYPES:
                raise ValueError(f"unknown configuration key {key!r}")
            merged[key] = _coerce(key, value)
    for name in _CONFIG_TYPES:
        flag = getattr(args, name, None)
        if flag is not None:
            merged[name] = flag
    return RunConfig(**merged)


def _config_lines(cfg: RunConfig) -> list[str]:
    items = asdict(cfg)
    items["intset"] = ",".join(str(v) for v in items["intset"])
    lines = [f"# {key}={items[key]}" for key in sorted(items)]
    lines.append(f"# orientation={CONVENTIONS['orientation']}")
    lines.append(f"# sheet_anchor={CONVENTIONS['sheet_anchor']}")
    lines.append(f"# tool_version={__version__}")
    return lines


def _manifest(cfg: RunConfig) -> dict:
    return {
        "config": asdict(cfg),
        "seed_point": {"a": 0.0, "g": _SEED_G[tuple(cfg.intset)]},
        "intset": list(cfg.intset),
        "conventions": dict(CONVENTIONS),
        "tool_version": __version__,
    }


def _write_manifest(cfg: RunConfig, out_dir: Path, name: str) -> Path:
    path = out_dir / name
    payload = json.dumps(_manifest(cfg), indent=2, sort_keys=True)
    path.write_text(payload + "\n")
    return path


def cmd_agm(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        seq = agm_sequence(args.a, args.b)
    except ValueError as exc:
        parser.error(str(exc))
    mean = 0.5 * (seq[-1][0] + seq[-1][1])
    print(f"M({args.a:g}, {args.b:g}) = {mean:.15g}")
    print(f"iterations = {len(seq) - 1}")
    print(f"I(a, b) = {elliptic_integral_agm(args.a, args.b):.15g}")
    return 0


def _csv_rows(points: list[SolutionPoint]) -> list[str]:
    rows = ["a,g,beta,alpha,gamma,residual_abs"]
    for pt in points:
        alpha, gamma = unscale(pt.a, pt.g, pt.beta)
        rows.append(",".join(f"{v:.17g}" for v in (
            pt.a, pt.g, pt.beta, alpha, gamma, abs(pt.residual))))
    return rows


def cmd_solve(args: argparse.Namespace,
              parser: argparse.ArgumentParser) -> int:
    try:
        cfg = _resolve_config(args)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        points = continuation_sweep(
            cfg.a_min, cfg.a_max, cfg.step, intset=tuple(cfg.intset),
            step_fine=cfg.step_fine, tol=cfg.tol_residual,
            verify_rtol=cfg.tol_quad)
    except ContinuationError as exc:
        last = exc.points[-1] if exc.points else None
        print(f"continuation stall: {exc}", file=sys.stderr)
        if last is not None:
            print(f"last good point: a = {last.a:.6g}, g = {last.g:.10g}",
                  file=sys.stderr)
        return 1
    if not points:
        print("sweep produced no points", file=sys.stderr)
        return 1
    csv_path = out_dir / "solutions.csv"
    body = _config_lines(cfg) + _csv_rows(points)
    csv_path.write_text("\n".join(body) + "\n")
    manifest_path = _write_manifest(cfg, out_dir, "manifest.json")
    top = max(pt.a for pt in points)
    if top < cfg.a_max - 0.5 * cfg.step_fine:
        print(f"sweep stopped at a = {top:.6g} (degeneracy or end of "
              f"locus before a_max = {cfg.a_max:g})")
    print(f"{len(points)} points -> {csv_path} (manifest {manifest_path})")
    return 0


def cmd_periods(args: argparse.Namespace,
                parser: argparse.ArgumentParser) -> int:
    p = CurveParams(args.a, args.g)
    try:
        bps = quotient_branch_points(p)
        pd = period_matrix(p)
        chars = abel_characteristics(p, pd)
        inf = infinity_characteristics(p, pd)
    except (DegenerateModelError, ConventionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print("branch points:")
    for k, z in enumerate(bps.points, 1):
        print(f"  B{k} = {z.real:+.12f} {z.imag:+.12f}i")
    print("tau:")
    for row in pd.tau:
        print("  " + "  ".join(f"{v.real:+.12f} {v.imag:+.12f}i"
                               for v in row))
    print("Abel characteristics (base point B1):")
    for name, match in {**chars, **inf}.items():
        al = ",".join(str(x) for x in match.alpha)
        be = ",".join(str(x) for x in match.beta)
        print(f"  {name:6s} [{al}; {be}]  residual {match.residual:.2e}")
    if args.check_involution:
        checks = involution_matrix_checks()
        rows = (
            ("involution squares to identity",
             checks["square_is_identity"]),
            ("involution conjugates the symplectic form to its negative",
             checks["symplectic_anti"]),
            ("distinguished cycles are anti-invariant",
             checks["anti_invariant_plus"] and checks["anti_invariant_minus"]),
        )
        for label, ok in rows:
            print(f"{'PASS' if ok else 'FAIL'}  {label}")
        if not all(ok for _, ok in rows):
            return 1
    return 0


def cmd_theta_scan(args: argparse.Namespace,
                   parser: argparse.ArgumentParser) -> int:
    try:
        cfg = _resolve_config(args)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        sp = solve_continued(args.a, intset=tuple(cfg.intset),
                             tol=cfg.tol_residual,
                             verify_rtol=cfg.tol_quad)
    except (DegenerateModelError, NoSolutionError,
            ConventionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    grid = np.linspace(0.0, 2.0, cfg.grid)
    points = h3_scan(sp, grid)
    summary = h3_summary(points)
    header = _config_lines(cfg) + [
        f"# a={sp.a:.17g}", f"# g={sp.g:.17g}",
        "# columns: lambda re im abs",
    ]
    paths = []
    for k in range(3):
        rows = list(header)
        for pt in points:
            v = pt.values[k]
            rows.append(f"{pt.lam:.17g} {v.real:.17g} {v.imag:.17g} "
                        f"{abs(v):.17g}")
        path = out_dir / f"h3_k{k}.dat"
        path.write_text("\n".join(rows) + "\n")
        paths.append(path)
    _write_manifest(cfg, out_dir, "theta_manifest.json")
    print(f"solved a = {sp.a:g}: g = {sp.g:.10g}, beta = {sp.beta:.10g}")
    print("interior minima: " + "  ".join(
        f"|theta_{k}| >= {summary.interior_min[k]:.3e}" for k in range(3)))
    print(f"endpoint vanishing: {len(summary.vanishing_lo)} of 3 at "
          f"lambda=0, {len(summary.vanishing_hi)} of 3 at lambda=2")
    print(f"wrote {', '.join(str(p) for p in paths)}")
    ok = (len(summary.vanishing_lo) == 2 and len(summary.vanishing_hi) == 2
          and summary.margin > 1e3)
    if not ok:
        print("nonvanishing re-verification failed", file=sys.stderr)
        return 1
    return 0


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--a-min", dest="a_min", type=float, default=None)
    sub.add_argument("--a-max", dest="a_max", type=float, default=None)
    sub.add_argument("--step", type=float, default=None)
    sub.add_argument("--step-fine", dest="step_fine", type=float,
                     default=None)
    sub.add_argument("--intset", type=_parse_intset, default=None,
                     help="four comma-separated integers (n0,n,m0,m)")
    sub.add_argument("--tol-residual", dest="tol_residual", type=float,
                     default=None)
    sub.add_argument("--tol-quad", dest="tol_quad", type=float,
                     default=None)
    sub.add_argument("--grid", type=int, default=None,
                     help="number of lambda samples in [0, 2]")
    sub.add_argument("--out-dir", dest="out_dir", default=None)
    sub.add_argument("--config", default=None,
                     help="key=value file; flags override entries")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agmperiods",
        description="Genus-2 period integrals and the monopole "
                    "constraint locus")
    sub = parser.add_subparsers(dest="command", required=True)

    p_agm = sub.add_parser("agm", help="one arithmetic-geometric mean")
    p_agm.add_argument("a", type=float)
    p_agm.add_argument("b", type=float)
    p_agm.set_defaults(func=cmd_agm, parser=p_agm)

    p_solve = sub.add_parser("solve", help="continuation sweep of g(a)")
    _add_config_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve, parser=p_solve)

    p_per = sub.add_parser("periods",
                           help="branch points, tau and Abel table")
    p_per.add_argument("a", type=float)
    p_per.add_argument("g", type=float)
    p_per.add_argument("--check-involution", action="store_true",
                       dest="check_involution")
    p_per.set_defaults(func=cmd_periods, parser=p_per)

    p_theta = sub.add_parser("theta-scan",
                             help="H3 nonvanishing scan at one a")
    p_theta.add_argument("--a", type=float, default=-12.3,
                         help="target a on the solution locus")
    _add_config_flags(p_theta)
    p_theta.set_defaults(func=cmd_theta_scan, parser=p_theta)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, args.parser)


if __name__ == "__main__":
    sys.exit(main())
