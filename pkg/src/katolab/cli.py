"""Command-line interface: file-in/file-out batch experiment runs."""

import argparse
import dataclasses
import sys

from .config import ExperimentConfig, load_config
from .errors import (ClassificationError, KatolabError, ResolutionError,
                     ValidationError)
from .experiments import (run_experiment, write_csv, write_evolve_csv,
                          write_plot_script)

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_VALIDATION = 3
EXIT_RESOLUTION = 4

_SUBCOMMANDS = {
    "validate-symbol": "validate_symbol",
    "thm1": "thm1",
    "thm2": "thm2",
    "baseline": "baseline",
    "trace": "trace",
    "y1": "y1",
    "evolve": "evolve",
}


def _add_common(parser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--backend", choices=["auto", "oversampled_fft", "filon"])
    parser.add_argument("--threads", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--symbol")
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--s", type=float)
    parser.add_argument("--T", type=float)
    parser.add_argument("--R", type=float)
    parser.add_argument("--T-max", dest="T_max", type=float)
    parser.add_argument("--N", type=float)
    parser.add_argument("--x-step", dest="x_step", type=float)
    parser.add_argument("--t-step", dest="t_step", type=float)
    parser.add_argument("--n-schedule", dest="n_schedule",
                        help="comma-separated increasing levels, e.g. 8,16,32")
    parser.add_argument("--seeds", type=int)
    parser.add_argument("--band", help="lo,hi frequency band for random data")
    parser.add_argument("--data", help="data address, e.g. phi(8) or psi(16)")
    parser.add_argument("--growth-factor", dest="growth_factor", type=float)
    parser.add_argument("--trace-order", dest="trace_order", type=float)
    parser.add_argument("--sweep-T", dest="sweep_T",
                        help="comma-separated alternative horizons")
    parser.add_argument("--plot-script", dest="plot_script",
                        help="write a companion plot script to this path")
    parser.add_argument("--timing", action="store_true", default=None,
                        help="record wall-clock runtime per row "
                             "(breaks byte-identical reruns)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="katolab",
        description="Spectral laboratory for local smoothing of 1D evolution "
                    "equations: propagators, data families, and sharpness "
                    "experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
    return parser


def _tuple_arg(raw):
    vals = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            vals.append(int(part))
        except ValueError:
            vals.append(float(part))
    return tuple(vals)


def config_from_args(args) -> ExperimentConfig:
    overrides = {}
    valid = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        if key in ("n_schedule", "band", "sweep_T"):
            value = _tuple_arg(value)
        if key in valid:
            overrides[key] = value
    overrides["experiment"] = _SUBCOMMANDS[args.command]
    if args.config:
        cfg = load_config(args.config, overrides)
    else:
        cfg = ExperimentConfig(**overrides).validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        result = run_experiment(cfg)
    except (ClassificationError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except KatolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE

    for row in result.rows:
        bits = [f"n={row.n}"]
        for label, value in (("|data|", row.norm_data), ("A", row.A_n),
                             ("B", row.B_n), ("I", row.I_n),
                             ("W", row.finite_window), ("J", row.J_n)):
            if value is not None and value == value:
                bits.append(f"{label}={value:.6g}")
        bits.append(row.backend)
        print("  ".join(bits))
    for reason in result.reasons:
        print(f"# {reason}")
    print(f"VERDICT: {result.verdict}")

    if cfg.out:
        if result.kind == "evolve":
            write_evolve_csv(result, cfg.out)
        else:
            write_csv(cfg, result, cfg.out)
        print(f"wrote {cfg.out}")
        if cfg.plot_script:
            write_plot_script(cfg.out, cfg.plot_script, result.kind)
            print(f"wrote {cfg.plot_script}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
