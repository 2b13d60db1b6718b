"""Command-line entry point: ``haltlab {run,compare,plot,validate}``.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 a threshold
checked by ``--assert`` was not met.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import harness, stats
from .errors import ArtifactIOError, ConfigInvalid, MismatchedConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_ASSERT = 4


def _add_config_flags(p):
    p.add_argument("--config", help="flat key = value config file")
    for f in dataclasses.fields(harness.ExperimentConfig):
        p.add_argument(f"--{f.name}", dest=f.name, default=None,
                       help=f"override config key {f.name}")


def _config_from_args(args):
    overrides = {}
    for f in dataclasses.fields(harness.ExperimentConfig):
        val = getattr(args, f.name)
        if val is not None:
            overrides[f.name] = harness._coerce(f.name, val)
    return harness.load_config(args.config, overrides)


def cmd_validate(args):
    cfg = _config_from_args(args)
    out = cfg.to_dict()
    out["config_hash"] = cfg.content_hash()
    out["in_scaling_region"] = stats.check_scaling_region(cfg.epsilon, cfg.n, cfg.sigma_scaling)
    if cfg.outside_scaling_region:
        out["flags"] = [harness.OUTSIDE_SCALING]
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_run(args):
    cfg = _config_from_args(args)
    art = harness.run_experiment(cfg)
    out = harness.save_artifact(art, args.out)
    s = art.summary
    print(f"{s['label']}: retained {s['retained']}/{s['requested']}, discards {s['discards']}")
    if "mean" in s:
        print(f"mean {s['mean']:.6g}  sd {s['sd']:.6g}")
    for key, val in s["ks"].items():
        print(f"KS {key}: {val:.4f}")
    if s["flags"]:
        print("flags: " + ", ".join(s["flags"]))
    print(f"wrote {out}")
    if args.assert_:
        ks = s["ks"].get(harness.GAP_PAIRING_KEY)
        if ks is not None and ks >= args.max_ks:
            print(f"FAIL: KS {ks:.4f} >= {args.max_ks}")
            return EXIT_ASSERT
        if s["retained"] < 2:
            print("FAIL: fewer than two retained samples")
            return EXIT_ASSERT
    return EXIT_OK


def cmd_compare(args):
    a = harness.load_artifact(args.a)
    b = harness.load_artifact(args.b)
    rep = harness.compare_runs(a, b)
    if args.json:
        print(json.dumps(rep, indent=2))
    else:
        print(f"{rep['labels'][0]} vs {rep['labels'][1]} "
              f"(algorithm {rep['algorithm']}, n={rep['n']}, eps={rep['epsilon']:g}): "
              f"KS = {rep['ks']:.4f}")
    if args.assert_ and rep["ks"] >= args.max_ks:
        print(f"FAIL: KS {rep['ks']:.4f} >= {args.max_ks}")
        return EXIT_ASSERT
    return EXIT_OK


def cmd_plot(args):
    arts = [harness.load_artifact(p) for p in args.artifacts]
    paths = harness.emit_plot_data(arts, args.out, bins=args.bins)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="haltlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a Monte Carlo experiment")
    _add_config_flags(p)
    p.add_argument("--out", default="runs", help="output root directory")
    p.add_argument("--assert", dest="assert_", action="store_true",
                   help="exit 4 if the KS distance between scaled Toda times and scaled inverse gaps is not below --max-ks")
    p.add_argument("--max-ks", type=float, default=0.10)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="KS distance between two runs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--json", action="store_true")
    p.add_argument("--assert", dest="assert_", action="store_true",
                   help="exit 4 if KS is not below --max-ks")
    p.add_argument("--max-ks", type=float, default=0.08)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="write histogram and ECDF CSVs")
    p.add_argument("artifacts", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--bins", type=int, default=None)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("validate", help="check a config and echo the effective settings")
    _add_config_flags(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigInvalid, MismatchedConfig) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArtifactIOError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
