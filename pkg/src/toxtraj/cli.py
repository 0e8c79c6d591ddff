"""Command-line entry point: ``toxtraj {ingest,extract,check,export,stats}``.

Exit codes: 0 success, 1 configuration/usage error, 2 backend error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .config import load_config
from .errors import BackendError, ConfigError, DataError

EXIT_OK, EXIT_CONFIG, EXIT_BACKEND, EXIT_DATA = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="flat key=value config file")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--jobs", type=int, default=None, help="parallel abstracts during extract")
    common.add_argument("--fixture-dir", default=None, metavar="PATH",
                        help="directory that relative fixture paths resolve against")
    common.add_argument("--human", action="store_true", help="print a readable summary instead of JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="toxtraj", description="Toxicity trajectory graph pipeline")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sub.add_parser("ingest", parents=[common], help="chunk, embed and index the corpus")
    sub.add_parser("extract", parents=[common], help="train the ranker and extract metapaths")
    sub.add_parser("check", parents=[common], help="check, resolve and integrate into the graph")
    exp = sub.add_parser("export", parents=[common], help="write analytics exports")
    exp.add_argument("--what", default=",".join(pipeline.EXPORTS),
                     help=f"comma-separated subset of {', '.join(pipeline.EXPORTS)}")
    sub.add_parser("stats", parents=[common], help="print graph summary counts")
    return parser


def _emit(result, human: bool) -> None:
    if human and isinstance(result, dict):
        for k, v in result.items():
            print(f"{k}: {v}")
    elif human:
        for item in result:
            print(item)
    else:
        print(json.dumps(result, default=str, sort_keys=True))


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = load_config(args.config, args.fixture_dir, {"seed": args.seed, "jobs": args.jobs})
        if args.verb == "ingest":
            result = pipeline.cmd_ingest(cfg)
        elif args.verb == "extract":
            result = pipeline.cmd_extract(cfg)
        elif args.verb == "check":
            result = pipeline.cmd_check(cfg)
        elif args.verb == "export":
            what = [w.strip() for w in args.what.split(",") if w.strip()]
            bad = [w for w in what if w not in pipeline.EXPORTS]
            if bad:
                raise ConfigError(f"unknown export(s): {', '.join(bad)}")
            result = [str(p) for p in pipeline.cmd_export(cfg, what)]
        else:
            result = pipeline.cmd_stats(cfg)
    except ConfigError as exc:
        print(f"toxtraj: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BackendError as exc:
        print(f"toxtraj: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except DataError as exc:
        print(f"toxtraj: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _emit(result, args.human)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
