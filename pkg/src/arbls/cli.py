"""``arbls-bench`` command line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .adaptive import AdaptiveConfig
from .bench import VARIANTS, ExperimentConfig, NoiseSetting, SearchRanges, render_report, run_experiment
from .data import load_csv, summarize
from .network import DEFAULT_LAMBDA
from .solvers import SolverConfig

log = logging.getLogger("arbls")

# keys accepted in --config files; same names as the long flags
_CONFIG_KEYS = {
    "data", "target", "no_header", "variants", "noise", "trials", "split", "seed", "lambda",
    "format", "structure", "search", "out", "tol", "max_iter", "alpha_min", "alpha_step",
    "epsilon", "c_policy", "denormalize", "describe", "verbose",
}


def _build_parser():
    p = argparse.ArgumentParser(
        prog="arbls-bench",
        description="Benchmark BLS, M-estimator BLS and adaptive-robust-kernel BLS "
                    "on a CSV regression dataset under target contamination.",
    )
    p.add_argument("--config", type=Path, help="JSON or 'key = value' file; flags override it")
    p.add_argument("--data", help="CSV file with a numeric body")
    p.add_argument("--target", default="-1", help="target column name or index (default: last)")
    p.add_argument("--no-header", dest="no_header", action="store_true",
                   help="first CSV line is data")
    p.add_argument("--variants", default=",".join(VARIANTS),
                   help="comma list from %s" % ",".join(VARIANTS))
    p.add_argument("--noise", action="append",
                   help="none | outlier:P | stable:RHO,MU; repeat or separate with ';'")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--split", type=float, default=0.5, help="training fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    p.add_argument("--structure", help="n,q,m,p; skips the structure search")
    p.add_argument("--search", help="search ranges, e.g. 'n=1:20:1;q=1:20:2;m=1;p=1:200:5'")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=50)
    p.add_argument("--alpha-min", dest="alpha_min", type=float, default=-10.0)
    p.add_argument("--alpha-step", dest="alpha_step", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=10.0)
    p.add_argument("--c-policy", dest="c_policy", choices=("fixed_one", "mad_scale"),
                   default="fixed_one")
    p.add_argument("--denormalize", action="store_true",
                   help="score predictions on the original target scale")
    p.add_argument("--describe", action="store_true",
                   help="print per-feature summary statistics and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _read_config(path: Path):
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        raw = json.loads(text)
    else:
        raw = {}
        for n, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{n}: expected 'key = value'")
            raw[key.strip()] = value.strip()
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}: unknown config key {key!r}")
        if key == "lambda":
            key = "lam"
        if key in ("no_header", "denormalize", "describe", "verbose") and isinstance(value, str):
            value = value.lower() in ("1", "true", "yes", "on")
        if key == "noise" and not isinstance(value, list):
            value = [value]
        if isinstance(value, list) and key == "variants":
            value = ",".join(value)
        out[key] = value
    return out


def parse_args(argv=None):
    parser = _build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config is not None:
        parser.set_defaults(**_read_config(pre.config))
    args = parser.parse_args(argv)
    # argparse does not type-convert defaults injected from a config file
    for key, typ in (("trials", int), ("split", float), ("seed", int), ("lam", float),
                     ("tol", float), ("max_iter", int), ("alpha_min", float),
                     ("alpha_step", float), ("epsilon", float)):
        setattr(args, key, typ(getattr(args, key)))
    if args.out is not None:
        args.out = Path(args.out)
    return args


def config_from_args(args) -> ExperimentConfig:
    noise = []
    for item in args.noise or ["none"]:
        noise.extend(NoiseSetting.parse(s) for s in str(item).split(";") if s.strip())
    structure = None
    if args.structure:
        structure = tuple(int(v) for v in str(args.structure).split(","))
        if len(structure) != 4:
            raise ValueError("--structure needs four integers n,q,m,p")
    solver = SolverConfig(args.lam, args.tol, args.max_iter)
    return ExperimentConfig(
        data=args.data,
        target=str(args.target),
        has_header=not args.no_header,
        variants=tuple(v.strip().lower() for v in str(args.variants).split(",") if v.strip()),
        noise=tuple(noise),
        trials=args.trials,
        split=args.split,
        seed=args.seed,
        lam=args.lam,
        structure=structure,
        search=SearchRanges.parse(args.search) if args.search else SearchRanges(),
        solver=solver,
        adaptive=AdaptiveConfig(args.alpha_min, args.alpha_step, args.epsilon,
                                args.c_policy, solver),
        denormalize=args.denormalize,
    )


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code
    except (OSError, ValueError) as exc:
        print(f"arbls-bench: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.data is None:
            raise ValueError("--data is required (directly or via --config)")
        if args.describe:
            ds = load_csv(args.data, args.target, not args.no_header)
            text = summarize(ds, include_target=True).to_table() + "\n"
        else:
            cfg = config_from_args(args)
            text = render_report(run_experiment(cfg), args.format)
        if args.out is not None:
            args.out.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except Exception as exc:  # noqa: BLE001 - report any failure as a diagnostic
        if args.verbose:
            log.exception("run failed")
        print(f"arbls-bench: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
