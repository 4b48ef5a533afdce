"""Command line entry point: ``surftrap <subcommand> --config PATH --out PATH``."""

from __future__ import annotations

import argparse
import json
import sys

from . import _kernels
from .commands import SUBCOMMANDS, run_subcommand
from .config import PRESETS, load_config, loads_config
from .errors import ParseError, SurftrapError, ValidationError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surftrap",
                                     description="Magnetic + evanescent-wave surface trap toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="scenario file (INI grammar)")
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="base preset when the config names none")
        p.add_argument("--out", required=True, help="output CSV path, '-' for stdout")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="override one config key")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel workers for sweeps (output does not depend on it)")
    return parser


def _fail(exc: Exception, status: int) -> int:
    code = getattr(exc, "code", "internal_error")
    payload = {"error": code, "type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError) and exc.lineno is not None:
        payload["line"] = exc.lineno
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            sc = load_config(args.config, args.overrides, args.preset)
        else:
            sc = loads_config("", args.overrides, args.preset)
    except (ParseError, ValidationError) as exc:
        return _fail(exc, 2)
    except OSError as exc:
        return _fail(exc, 2)
    _kernels.set_threads(args.workers)
    try:
        run_subcommand(args.command, sc, args.out, workers=max(1, args.workers))
    except SurftrapError as exc:
        return _fail(exc, 1)
    except OSError as exc:
        return _fail(exc, 1)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
