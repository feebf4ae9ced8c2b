"""Command-line driver.

Subcommands:

  sweep <spec.toml>        run one declarative sweep, write its CSV
  figure <fig3..fig10>     reproduce a published curve family (CSV + PNG)
  check <suite>            run a verification suite, print pass/fail lines
  print-config             print the fully-commented default sweep spec

Exit codes: 0 success, 1 failed checks or runtime error, 2 invalid spec or
usage.  Validation failures print one machine-readable JSON line on stderr.
The default worker count can be overridden with the SOPSIM_WORKERS
environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .checks import SUITES
from .plotting import render_csv_plot
from .sweep import (
    FIGURE_IDS,
    SweepError,
    default_config_toml,
    load_sweep_spec,
    reproduce_figure,
    write_sweep_csv,
)

__all__ = ["main", "build_parser"]


def _default_workers() -> int:
    raw = os.environ.get("SOPSIM_WORKERS", "1")
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
    except ValueError:
        print(
            json.dumps({"error": f"SOPSIM_WORKERS must be a positive integer, got {raw!r}"}),
            file=sys.stderr,
        )
        return 1
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sopsim",
        description="Secrecy outage probability of network-coded cooperative networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a declarative sweep from a TOML spec")
    p_sweep.add_argument("spec", help="path to the sweep spec (TOML)")
    p_sweep.add_argument("--out", help="output CSV path (overrides the spec)")
    p_sweep.add_argument(
        "--plot", action="store_true", help="also render a PNG next to the CSV"
    )

    p_fig = sub.add_parser("figure", help="reproduce a published curve family")
    p_fig.add_argument("id", choices=FIGURE_IDS, help="figure identifier")
    p_fig.add_argument("--samples", type=int, default=10**6, help="samples per point")
    p_fig.add_argument("--seed", type=int, default=20260810)
    p_fig.add_argument("--out", help="output CSV path (default <id>.csv)")
    p_fig.add_argument(
        "--no-plot", action="store_true", help="skip the PNG rendered next to the CSV"
    )

    p_check = sub.add_parser("check", help="run a verification suite")
    p_check.add_argument("suite", choices=sorted(SUITES), help="suite name")
    p_check.add_argument(
        "--samples",
        type=int,
        default=10**7,
        help="Monte Carlo samples per point (statistical suite only)",
    )
    p_check.add_argument("--seed", type=int, default=None, help="statistical suite seed")

    sub.add_parser("print-config", help="print the default sweep spec with all defaults")
    return parser


def _cmd_sweep(args) -> int:
    workers = _default_workers()
    try:
        spec = load_sweep_spec(args.spec, default_workers=workers)
    except SweepError as exc:
        print(json.dumps(exc.payload, sort_keys=True), file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    out = args.out or spec.output or "sweep.csv"
    text = write_sweep_csv([spec], out)
    print(f"wrote {out} ({sum(1 for ln in text.splitlines() if not ln.startswith('#')) - 1} rows)")
    if args.plot:
        png = str(Path(out).with_suffix(".png"))
        render_csv_plot(text, png)
        print(f"wrote {png}")
    return 0


def _cmd_figure(args) -> int:
    out = args.out or f"{args.id}.csv"
    started = time.time()
    try:
        text = reproduce_figure(
            args.id,
            out,
            samples=args.samples,
            seed=args.seed,
            workers=_default_workers(),
        )
    except SweepError as exc:
        print(json.dumps(exc.payload, sort_keys=True), file=sys.stderr)
        return 2
    print(f"wrote {out} in {time.time() - started:.1f}s")
    if not args.no_plot:
        png = str(Path(out).with_suffix(".png"))
        render_csv_plot(text, png, title=args.id)
        print(f"wrote {png}")
    return 0


def _cmd_check(args) -> int:
    suite = SUITES[args.suite]
    if args.suite == "statistical":
        kwargs = {"samples": args.samples, "workers": _default_workers()}
        if args.seed is not None:
            kwargs["seed"] = args.seed
        results = suite(progress=print, **kwargs)
    else:
        results = suite()
    for result in results:
        print(result.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "figure":
        return _cmd_figure(args)
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "print-config":
        print(default_config_toml(), end="")
        return 0
    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
