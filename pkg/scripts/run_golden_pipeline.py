#!/usr/bin/env python3
"""Run ingest, extract, check and export on a copy of the golden fixture and diff against the frozen outputs.

    python3 scripts/run_golden_pipeline.py              # temporary directory
    python3 scripts/run_golden_pipeline.py --out work   # keep the run in ./work
"""

from __future__ import annotations

import argparse
import shutil
import sys
import tempfile
import time
from pathlib import Path

from toxtraj import cli

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "fixtures" / "golden"
INPUTS = ("corpus.jsonl", "golden.conf", "kg.txt", "llm_fixtures.json", "search.json", "templates.txt",
          "terms.tsv")


def run(dest: Path) -> int:
    dest.mkdir(parents=True, exist_ok=True)
    for name in INPUTS:
        shutil.copy(GOLDEN / name, dest / name)
    conf = str(dest / "golden.conf")
    t0 = time.perf_counter()
    for verb in ("ingest", "extract", "check", "export"):
        print(f"== {verb}")
        code = cli.run([verb, "--config", conf])
        if code:
            print(f"{verb} failed with exit code {code}", file=sys.stderr)
            return code
    print(f"== finished in {time.perf_counter() - t0:.2f} s")

    run_dir, mismatches = dest / "run", 0
    for frozen in sorted((GOLDEN / "expected").iterdir()):
        produced = run_dir / frozen.name
        if not produced.exists():
            produced = run_dir / "exports" / frozen.name
        same = produced.exists() and produced.read_bytes() == frozen.read_bytes()
        mismatches += not same
        print(f"{'same' if same else 'DIFF'}  {frozen.name}")
    return 1 if mismatches else 0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=None, help="directory to run in (kept afterwards)")
    args = ap.parse_args()
    if args.out is not None:
        sys.exit(run(args.out))
    with tempfile.TemporaryDirectory() as tmp:
        sys.exit(run(Path(tmp)))


if __name__ == "__main__":
    main()
