"""`harness run --manifest F [--results F] [--only K=V ...]`"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from variaharness.runner import run_manifest

ONLY_KEYS = ("model", "task", "train_variant", "seed")


def parse_only(pairs: list[str]) -> dict[str, str]:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise SystemExit(f"--only expects K=V, got {pair!r}")
        key, value = pair.split("=", 1)
        if key not in ONLY_KEYS:
            raise SystemExit(f"--only key must be one of {ONLY_KEYS}, got {key!r}")
        out[key] = value
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="harness", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a variaforge experiment manifest")
    run.add_argument("--manifest", required=True)
    run.add_argument("--results", default=None,
                     help="override the results path named in the manifest")
    run.add_argument("--only", action="append", default=[],
                     help="filter cells, e.g. --only task=IC --only seed=1")
    run.add_argument("--json", action="store_true")
    run.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    summary = run_manifest(args.manifest, args.results, parse_only(args.only))
    if args.json:
        print(json.dumps(summary))
    else:
        print(
            f"ran {len(summary['ran'])} cell(s), skipped {len(summary['skipped'])}, "
            f"failed {len(summary['failed'])}; results at {summary['results']}"
        )
    return 1 if summary["failed"] else 0


if __name__ == "__main__":
    sys.exit(main())
