#!/usr/bin/env python3
"""Regenerate the bundled sample corpus under data/sample/.

The sample is the fixture for CLI golden-file tests, so regenerate it only
when the cache format itself changes, then refresh the golden files too
(scripts/make_golden.py).
"""

from pathlib import Path

from issueforecast.ingest import cache_filename, save_cache
from issueforecast.synth import generate_project

SAMPLE_DIR = Path(__file__).resolve().parent.parent / "data" / "sample"
PROJECTS = [("sample/alpha", 901), ("sample/beta", 902), ("sample/gamma", 903)]


def main() -> None:
    SAMPLE_DIR.mkdir(parents=True, exist_ok=True)
    for project_id, seed in PROJECTS:
        bundle = generate_project(project_id, seed=seed, weeks=80)
        path = SAMPLE_DIR / cache_filename(project_id)
        save_cache(bundle, path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
