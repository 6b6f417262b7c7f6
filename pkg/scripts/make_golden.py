#!/usr/bin/env python3
"""Pin the golden outputs for the bundled sample corpus.

Run after intentionally changing forecast numerics or output formats, then
review the diff before committing. The CLI determinism tests compare against
these files byte for byte.
"""

import shutil
import tempfile
from pathlib import Path

from issueforecast.cli import main

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"
PINNED = ("steps.csv", "forecasts.csv", "summary.json")


def run() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        code = main(["evaluate", str(ROOT / "data" / "sample"), "--out", tmp, "--jobs", "1"])
        if code != 0:
            raise SystemExit(f"evaluate failed with exit code {code}")
        for name in PINNED:
            shutil.copy(Path(tmp) / name, GOLDEN / name)
            print(f"pinned {GOLDEN / name}")


if __name__ == "__main__":
    run()
