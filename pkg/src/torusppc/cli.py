"""Command-line entry point.

Exit codes: 0 success, 1 runtime or domain error, 2 usage or config error,
3 acceptance-band failure under ``experiment --check``.

Every output file starts with ``#`` lines naming the schema version, the
subcommand and the fully resolved configuration (including the seed). Paths
and thread counts are not part of that header, so reruns are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import discrepancy, experiments, paircorr, spectral
from .generators import KINDS, GeneratorSpec, SeedSpec, parse_step
from .torus import PointSet

SCHEMA_VERSION = experiments.SCHEMA_VERSION


class ConfigError(Exception):
    """Malformed input configuration (exit code 2)."""


def fmt(x) -> str:
    """Shortest decimal that round-trips the double."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def header(command: str, config: dict) -> str:
    cfg = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return (f"# schema_version: {SCHEMA_VERSION}\n"
            f"# command: {command}\n"
            f"# config: {cfg}\n")


def read_points(path: str) -> PointSet:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    return PointSet(np.array(values, dtype=np.float64))


def read_points_header(path: str) -> Optional[dict]:
    """Resolved config recorded in a points file, if any."""
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if line.startswith("# config:"):
                return json.loads(line.split(":", 1)[1])
    return None


def _write(text: str, path: Optional[str]):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, int, np.floating, np.integer)) else v
                    for v in row])
    return buf.getvalue()


# -- generator flags ------------------------------------------------------------

def _add_gen_flags(p: argparse.ArgumentParser, required: bool):
    p.add_argument("--gen", choices=KINDS, required=required, help="sequence family")
    p.add_argument("--n", type=int, help="number of points")
    p.add_argument("--seed", type=int, default=0, help="master seed (uint64)")
    p.add_argument("--stream", type=int, default=0, help="stream index (uint64)")
    p.add_argument("--M", type=int, help="jittered sample / batch size")
    p.add_argument("--x1", type=float, default=0.0, help="start point of walk/kronecker")
    p.add_argument("--c", type=float, help="kronecker step")
    p.add_argument("--step", help="walk step law, e.g. uniform:0:1, two_point:0:0.5:0.5, "
                                  "constant:0.3, triangle:64, tabulated:g1,g2,...")


def _spec_from_args(args) -> GeneratorSpec:
    try:
        step = parse_step(args.step) if args.step else None
        return GeneratorSpec(args.gen, M=args.M, x1=args.x1, step=step, c=args.c,
                             seed=SeedSpec(args.seed, args.stream))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- subcommands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.n is None:
        raise ConfigError("--n is required")
    spec = _spec_from_args(args)
    pts = spec.generate(args.n)
    config = dict(spec.to_dict(), n=args.n)
    body = "".join(fmt(v) + "\n" for v in pts)
    _write(header("generate", config) + body, args.out)
    return 0


def _load_points(args):
    if args.points:
        pts = read_points(args.points)
        config = {"points": read_points_header(args.points) or {}, "n": len(pts)}
        return pts, config
    if not args.gen:
        raise ConfigError("give --points FILE or --gen with generator flags")
    ns = list(args.prefix_scan or [])
    n = args.n if args.n is not None else (max(ns) if ns else None)
    if n is None:
        raise ConfigError("--n is required with --gen")
    spec = _spec_from_args(args)
    return spec.generate(n), dict(spec.to_dict(), n=n)


def cmd_ppc(args) -> int:
    pts, config = _load_points(args)
    ns = sorted(set(args.prefix_scan)) if args.prefix_scan else [len(pts)]
    if min(ns) < 2 or max(ns) > len(pts):
        raise ValueError(f"prefix lengths must lie in [2, {len(pts)}]")
    config.update(s=args.s, alpha=args.alpha, prefix_scan=ns if args.prefix_scan else None)
    rows = []
    for n in ns:
        prefix = pts.prefix(n)
        for s in args.s:
            for a in args.alpha:
                res = paircorr.r_statistic(prefix, paircorr.PairCorrParams(s, a))
                rows.append((n, s, a, res.pair_count, res.value))
    _write(header("ppc", config) + _csv(rows, ["n", "s", "alpha", "pair_count", "R"]), args.out)
    return 0


def cmd_discrepancy(args) -> int:
    pts = read_points(args.points)
    if len(pts) == 0:
        raise ValueError(f"{args.points} holds no points")
    res = discrepancy.extreme_discrepancy(pts)
    config = {"points": read_points_header(args.points) or {}, "n": len(pts)}
    _write(header("discrepancy", config) + _csv([(res.n, res.value)], ["n", "discrepancy"]),
           args.out)
    return 0


def cmd_spectral(args) -> int:
    try:
        step = parse_step(args.step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    config = {"step": step.to_string(), "rmax": args.rmax, "profile": args.profile,
              "grid": args.grid}
    rows = []
    for r in range(1, args.rmax + 1):
        c = spectral.fourier_coeff(step, r).value
        rows.append((r, abs(c), c.real, c.imag))
    text = header("spectral", config) + _csv(rows, ["r", "abs_c_r", "re_c_r", "im_c_r"])
    if args.profile:
        devs = spectral.cdf_deviation_profile(step, args.profile, args.grid)
        prof = header("spectral-profile", config) + _csv(zip(args.profile, devs), ["n", "sup_dev"])
        if args.profile_out:
            _write(prof, args.profile_out)
        else:
            text += prof
    _write(text, args.out)
    return 0


def _load_config(path: str) -> experiments.ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return experiments.ExperimentConfig.from_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config {path}: {exc}") from None


def write_config(cfg: experiments.ExperimentConfig, path: Optional[str]):
    _write(json.dumps(cfg.to_dict(), sort_keys=True, indent=1) + "\n", path)


_SUMMARY_COLUMNS = ["generator", "s", "alpha", "n", "replicates", "mean_R", "var_R",
                    "stderr", "min_R", "max_R", "master_seed"]


def cmd_experiment(args) -> int:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("give exactly one of --config or --preset")
    if args.preset:
        try:
            preset = experiments.theorem_preset(args.preset)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        configs, check = preset.configs, preset.check
    else:
        configs, check = (_load_config(args.config),), None

    if args.dump_config:
        if len(configs) != 1:
            raise ConfigError(f"preset {args.preset} has {len(configs)} configs; "
                              "--dump-config needs exactly one")
        write_config(configs[0], args.dump_config)
        return 0

    results = [experiments.estimate_moments(cfg) for cfg in configs]
    checks = check(results) if check is not None else []
    doc = {"schema_version": SCHEMA_VERSION, "preset": args.preset,
           "experiments": [r.to_dict() for r in results],
           "checks": [{"label": c.label, "passed": c.passed, "detail": c.detail}
                      for c in checks]}
    _write(json.dumps(doc, sort_keys=True, indent=1) + "\n", args.out)
    if args.csv:
        rows = [[getattr(rec, k) for k in _SUMMARY_COLUMNS]
                for res in results for rec in res.records]
        cfg = {"preset": args.preset, "configs": [c.to_dict() for c in configs]}
        _write(header("experiment", cfg) + _csv(rows, _SUMMARY_COLUMNS), args.csv)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.label}: {c.detail}", file=sys.stderr)
    if args.check and not all(c.passed for c in checks):
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusppc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a point sequence, one value per line")
    _add_gen_flags(p, required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ppc", help="pair-correlation statistic R_alpha(s, n)")
    p.add_argument("--points", help="points file")
    _add_gen_flags(p, required=False)
    p.add_argument("--s", type=float, nargs="+", required=True)
    p.add_argument("--alpha", type=float, nargs="+", default=[1.0])
    p.add_argument("--prefix-scan", type=int, nargs="+", help="evaluate at these prefix lengths")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ppc)

    p = sub.add_parser("discrepancy", help="extreme discrepancy of a points file")
    p.add_argument("--points", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("spectral", help="Fourier coefficients and n-fold CDF deviation")
    p.add_argument("--step", required=True)
    p.add_argument("--rmax", type=int, default=8)
    p.add_argument("--profile", type=int, nargs="+", help="fold counts for the deviation profile")
    p.add_argument("--grid", type=int, default=spectral.DEFAULT_GRID)
    p.add_argument("--out")
    p.add_argument("--profile-out")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("experiment", help="Monte Carlo moments of R over seeded replicates")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--preset", help=f"one of {', '.join(experiments.PRESET_IDS)}")
    p.add_argument("--out", help="result document (JSON, default stdout)")
    p.add_argument("--csv", help="flat per-cell summary")
    p.add_argument("--check", action="store_true", help="exit 3 if a preset band fails")
    p.add_argument("--dump-config", help="write the resolved config and exit")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"torusppc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError, OSError) as exc:
        print(f"torusppc {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
