"""Command line front end: ``regdyn <command> --config <path> [--out DIR] [--seed N]``.

Exit status 0 when every asserted invariant held, 1 when one failed (see
verdicts.txt for the witness), 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import config as config_mod
from .errors import ConfigError, RegDynError
from .report import RunResults, write_all
from .runner import run_config

log = logging.getLogger("regdyn")

COMMANDS = {
    "run": None,            # suites from the config
    "certify": ("certify",),
    "evolve": ("evolve",),
    "membership": ("membership",),
    "gibbs": ("gibbs",),
    "sweep": None,          # config suites at every sweep point
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regdyn", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=list(COMMANDS))
    p.add_argument("--config", required=True, help="key = value configuration file")
    p.add_argument("--out", help="output directory (overrides the config's out)")
    p.add_argument("--seed", type=int, help="seed for random operators (unsigned 64-bit)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def execute(command, cfg) -> RunResults:
    suites = COMMANDS[command] or cfg.suites
    if command == "sweep":
        if not cfg.sweep:
            raise ConfigError("sweep needs at least one sweep.<key> line")
        res = RunResults()
        for tag, point in cfg.sweep_points():
            log.info("sweep point %s", tag)
            res.extend(run_config(point, suites, tag))
        return res
    return run_config(cfg, suites)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_mod.load(args.config)
        if args.seed is not None:
            cfg = config_mod.validate(replace(cfg, seed=args.seed))
        if args.out:
            cfg = replace(cfg, out=args.out)
        res = execute(args.command, cfg)
    except RegDynError as exc:
        # ConfigError and any precondition failure from the config's values
        print(f"regdyn: config error: {exc}", file=sys.stderr)
        return 2
    paths = write_all(res, cfg.out, args.command)
    log.info("wrote %d files to %s", len(paths), cfg.out)
    failed = res.failures
    for suite, v in failed:
        print(f"regdyn: invariant failed: {suite} {v.line()}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
