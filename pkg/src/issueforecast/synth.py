"""Synthetic project corpora for demos, benchmarks, and qualitative checks.

Each project gets a slowly drifting issue level (so training windows are
usually difference-once material), with bugs and enhancements derived from
issues as noisy fixed fractions. That coupling is what makes issue-to-bug
transfer forecasting work on these corpora, mirroring the behaviour the
pipeline is meant to surface on real repositories.
"""

from datetime import date

import numpy as np

from .filters import ProjectMeta
from .ingest import ProjectBundle
from .timeseries import Attribute, WeeklySeries

DEFAULT_START = date(2022, 1, 3)


def generate_project(
    project_id: str,
    seed: int,
    weeks: int = 120,
    base_level: float = 40.0,
    level_sigma: float = 5.0,
    level_floor: float = 10.0,
    level_ceiling: float = 300.0,
    issue_noise: float = 0.5,
    bug_ratio: float = 0.5,
    enhancement_ratio: float = 0.3,
    bug_noise: float = 1.5,
    enhancement_noise: float = 1.5,
    start_date: date = DEFAULT_START,
) -> ProjectBundle:
    """One project whose bugs/enhancements track a fixed fraction of issues."""
    rng = np.random.default_rng(seed)
    level = np.empty(weeks)
    level[0] = base_level
    steps = rng.normal(0.0, level_sigma, size=weeks - 1)
    for t in range(1, weeks):
        level[t] = min(max(level[t - 1] + steps[t - 1], level_floor), level_ceiling)

    issues = np.rint(level + rng.normal(0.0, issue_noise, size=weeks)).astype(np.int64)
    issues = np.maximum(issues, 0)
    bugs = np.rint(bug_ratio * issues + rng.normal(0.0, bug_noise, size=weeks)).astype(np.int64)
    bugs = np.clip(bugs, 0, issues)
    enhancements = np.rint(
        enhancement_ratio * issues + rng.normal(0.0, enhancement_noise, size=weeks)
    ).astype(np.int64)
    enhancements = np.clip(enhancements, 0, issues - bugs)

    meta = ProjectMeta(
        pull_request_count=int(rng.integers(5, 50)),
        commit_count=int(rng.integers(100, 2000)),
        duration_weeks=weeks,
        issue_count=int(issues.sum()),
        contributor_count=int(rng.integers(8, 40)),
        release_count=int(rng.integers(1, 12)),
        is_software_dev=True,
    )
    return ProjectBundle(
        project_id=project_id,
        meta=meta,
        issues=WeeklySeries(project_id, Attribute.ISSUES, start_date, issues),
        bugs=WeeklySeries(project_id, Attribute.BUGS, start_date, bugs),
        enhancements=WeeklySeries(project_id, Attribute.ENHANCEMENTS, start_date, enhancements),
    )


def generate_corpus(count: int, seed: int = 20240, weeks: int = 120) -> list[ProjectBundle]:
    """Deterministic corpus of coupled projects, ids proj000, proj001, ..."""
    return [
        generate_project(f"proj{i:03d}", seed=seed + i, weeks=weeks)
        for i in range(count)
    ]
