"""Command line entry point.

    chtails run CONFIG          run the configured experiment and write outputs
    chtails validate CONFIG     parse and check a configuration only
    chtails list-scenarios      list experiments and their default data
    chtails convergence CONFIG  run the refinement studies and operator checks

Exit status: 0 all verdicts pass, 1 some verdict fails, 2 usage or
configuration error, 3 solver blow-up. ``CH_TAILS_OUT`` overrides the
output directory of the configuration.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import EXPERIMENTS, ConfigError, ScenarioConfig, load_config
from .convergence import run_convergence
from .report_io import format_value, write_series
from .scenarios import ScenarioError, run_experiment

log = logging.getLogger("chtails")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BLOWUP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chtails", description="Camassa-Holm decay and tail-coefficient lab")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("run", "run the configured experiment"),
                        ("validate", "parse the configuration only"),
                        ("convergence", "run refinement studies")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config")
        if name != "validate":
            sp.add_argument("--out", help="output directory (overrides config and CH_TAILS_OUT)")
    sub.add_parser("list-scenarios", help="list available experiments")
    return p


def _out_dir(cfg, args) -> str:
    return args.out or os.environ.get("CH_TAILS_OUT") or cfg.output.directory


def _print_report(report) -> None:
    for v in report.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        print(f"[{mark}] {v.criterion} {v.name}: measured={format_value(v.measured)} "
              f"tol={format_value(v.tolerance)}")
    print(f"{report.name}: {'partial (' + report.error + ')' if report.partial else 'complete'}, "
          f"{'all verdicts pass' if report.passed else 'some verdicts fail'}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-scenarios":
        for name in EXPERIMENTS:
            print(f"{name:20s} default data: {ScenarioConfig(name).default_kind}")
        return EXIT_OK

    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "validate":
        print(f"{args.config}: valid ({cfg.scenario.experiment})")
        return EXIT_OK

    try:
        if args.command == "run":
            report = run_experiment(cfg)
        else:
            report = run_convergence(cfg)
    except (ScenarioError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out = _out_dir(cfg, args)
    try:
        paths = write_series(report, out, profiles=cfg.output.profiles)
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    log.info("wrote %s", ", ".join(str(p) for p in paths))
    _print_report(report)
    if report.status == "blowup":
        return EXIT_BLOWUP
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
