"""Project sanity filter: admit only repositories with real development activity.

Seven rules, all of which must hold: at least one pull request, more than 20
commits, at least 50 weeks of history, more than 10 issues, at least eight
contributors, at least one release, and the (configured, not inferred)
judgement that the repository holds software-development source code.
"""

from dataclasses import dataclass

# Rule evaluation order is part of the report format.
RULE_NAMES = (
    "collaboration",
    "commits",
    "duration",
    "issues",
    "personal_purpose",
    "releases",
    "software_development",
)


@dataclass(frozen=True)
class ProjectMeta:
    pull_request_count: int = 0
    commit_count: int = 0
    duration_weeks: int = 0
    issue_count: int = 0
    contributor_count: int = 0
    release_count: int = 0
    is_software_dev: bool = True

    def __post_init__(self):
        for name in (
            "pull_request_count",
            "commit_count",
            "duration_weeks",
            "issue_count",
            "contributor_count",
            "release_count",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} cannot be negative")


@dataclass(frozen=True)
class FilterOutcome:
    passed: bool
    rule_verdicts: dict[str, bool]


def evaluate_filters(meta: ProjectMeta) -> FilterOutcome:
    verdicts = {
        "collaboration": meta.pull_request_count >= 1,
        "commits": meta.commit_count > 20,
        "duration": meta.duration_weeks >= 50,
        "issues": meta.issue_count > 10,
        "personal_purpose": meta.contributor_count >= 8,
        "releases": meta.release_count >= 1,
        "software_development": meta.is_software_dev,
    }
    return FilterOutcome(passed=all(verdicts.values()), rule_verdicts=verdicts)


def filter_report_lines(outcomes: dict[str, FilterOutcome]) -> list[str]:
    """CSV report: per-rule discarded counts plus the surviving-project count."""
    lines = ["rule,discarded"]
    for rule in RULE_NAMES:
        discarded = sum(1 for o in outcomes.values() if not o.rule_verdicts[rule])
        lines.append(f"{rule},{discarded}")
    surviving = sum(1 for o in outcomes.values() if o.passed)
    lines.append(f"surviving,{surviving}")
    return lines
