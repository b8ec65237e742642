"""Command-line entry point.

Usage::

    cgfield <command> --config FILE [--out DIR] [--seed N] [--tol-scale X]

Commands: gamma-selftest, manifold, region, fields, appendix, all. The
two-word spellings ``gamma selftest`` and ``appendix verify`` are accepted.

Exit status: 0 all checks pass, 1 at least one check failed, 2 bad
configuration (nothing written), 3 output could not be written.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .runner import COMMANDS, ConfigError, load_config, run, write_outputs

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

_ALIASES = {("gamma", "selftest"): "gamma-selftest", ("appendix", "verify"): "appendix"}


def _normalise(argv: list[str]) -> list[str]:
    if len(argv) >= 2 and (argv[0], argv[1]) in _ALIASES:
        return [_ALIASES[(argv[0], argv[1])], *argv[2:]]
    return argv


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cgfield", description="Numerical checks for gauge-field metric identities.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="INI configuration file")
    ap.add_argument("--out", default=None, help="output directory (default: cgfield-out)")
    ap.add_argument("--seed", type=int, default=None, help="override [run] seed")
    ap.add_argument("--tol-scale", type=float, default=None, help="multiply every tolerance by this factor")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = _normalise(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.command, args.seed, args.tol_scale, args.out)
    except ConfigError as exc:
        print(f"cgfield: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run(cfg)
    try:
        paths = write_outputs(cfg, report)
    except OSError as exc:
        print(f"cgfield: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    summ = report.summary()
    print(f"{summ['pass']} pass, {summ['fail']} fail, {summ['diagnostic']} diagnostic -> {paths[-1]}")
    for rec in report.failed():
        print(f"FAIL {rec['suite']}/{rec['name']}: value={rec['value']} tol={rec['tolerance']}")
    return EXIT_FAIL if summ["fail"] else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
