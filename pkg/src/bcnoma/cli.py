"""Command-line front end: ``bcnoma minpower|sweep|dmt|figure``.

Worker count comes from the BCNOMA_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import harness as h
from .numerics import QuadratureError


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI file with [system] and [experiment] sections")
    p.add_argument("--scheme", help="nc, cr, ir, bc, a comma list, or all")
    p.add_argument("--snr-db", help="SNR grid as START:STOP:STEP (dB)")
    p.add_argument("--samples", type=int, help="Monte Carlo blocks per run")
    p.add_argument("--seed", type=int)
    p.add_argument("--method", choices=h.METHODS)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="override a system parameter, e.g. lambda_g=0.1 (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcnoma", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minpower", help="minimum power of each scheme on one fading block")
    p.add_argument("gains", nargs=3, type=float, metavar=("GA", "GB", "GZ"))
    _common(p)

    p = sub.add_parser("sweep", help="SOP or ESR over an SNR grid")
    p.add_argument("--metric", choices=("sop", "esr"), default="sop")
    _common(p)

    p = sub.add_parser("dmt", help="diversity gain along r_A, optionally with fitted slopes")
    p.add_argument("--r-points", default="0:1:0.05", help="r_A grid, START:STOP:STEP")
    p.add_argument("--r-b", type=float, default=0.0)
    p.add_argument("--empirical", action="store_true", help="also fit slopes by simulation")
    _common(p)

    p = sub.add_parser("figure", help="CSV behind one of the reference figures")
    p.add_argument("number", type=int, choices=(2, 3, 4, 5, 6))
    _common(p)
    return parser


def _config(args) -> h.ExperimentConfig:
    cfg = h.load_config(args.config)
    params = h.params_with(cfg.params, args.param)
    kw = dict(params=params, n_samples=args.samples, seed=args.seed, method=args.method,
              out=args.out)
    if args.scheme:
        kw["schemes"] = tuple(h.parse_schemes(args.scheme))
    if args.snr_db:
        kw["snr_grid_db"] = tuple(h.parse_range(args.snr_db))
    return cfg.with_overrides(**kw)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "minpower":
            text = h.write_csv(h.MINPOWER_COLUMNS, h.cmd_minpower(cfg, args.gains), cfg.out)
        elif args.command == "sweep":
            text = h.write_csv(h.SWEEP_COLUMNS, h.cmd_sweep(cfg, args.metric), cfg.out)
        elif args.command == "dmt":
            rows = h.cmd_dmt(cfg, h.parse_range(args.r_points), args.r_b, args.empirical)
            text = h.write_csv(h.DMT_COLUMNS, rows, cfg.out)
        else:
            header, rows = h.cmd_figure(args.number, cfg)
            text = h.write_csv(header, rows, cfg.out)
    except h.ConfigError as exc:
        print(f"bcnoma: error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, ValueError) as exc:
        print(f"bcnoma: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if not cfg.out:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
