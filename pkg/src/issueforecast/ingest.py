"""Issue acquisition, label classification, weekly bucketing, and caching.

Issues come either from a repository-hosting REST API (paginated, with
rate-limit-aware retries) or from cache files written earlier. Each record is
classified as bug / enhancement / other by case-insensitive label patterns,
then bucketed into contiguous weekly counts anchored at the project's first
issue. Caches are CSV (one row per week) plus a JSON sidecar holding the
project metadata the sanity filter needs; writes are atomic.
"""

import json
import os
import re
import time
from dataclasses import dataclass, replace
from datetime import date, datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np
import requests

from .errors import (
    AuthError,
    FormatError,
    InvalidRangeError,
    NetworkError,
    NotFoundError,
    RateLimitedError,
)
from .filters import ProjectMeta
from .timeseries import Attribute, WeeklySeries

DEFAULT_BASE_URL = "https://api.github.com"
TOKEN_ENV_VAR = "GITHUB_TOKEN"


class Kind(Enum):
    BUG = "bug"
    ENHANCEMENT = "enhancement"
    OTHER = "other"


@dataclass(frozen=True)
class LabelPatterns:
    """Case-insensitive substrings that map tracker labels to kinds.

    Bug patterns win when a record matches both groups.
    """

    bug: tuple[str, ...] = ("bug", "defect")
    enhancement: tuple[str, ...] = ("enhancement", "feature", "improvement")

    @classmethod
    def from_json(cls, path: str | Path) -> "LabelPatterns":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(
            bug=tuple(str(p).lower() for p in raw.get("bug", cls.bug)),
            enhancement=tuple(str(p).lower() for p in raw.get("enhancement", cls.enhancement)),
        )


DEFAULT_PATTERNS = LabelPatterns()


@dataclass(frozen=True)
class IssueRecord:
    id: int
    created_at: datetime
    labels: tuple[str, ...]
    is_pull_request: bool
    kind: Kind = Kind.OTHER


def classify(record: IssueRecord, patterns: LabelPatterns = DEFAULT_PATTERNS) -> Kind:
    """Kind of one record from its labels; bug match takes precedence."""
    lowered = [label.lower() for label in record.labels]
    if any(pat in label for label in lowered for pat in patterns.bug):
        return Kind.BUG
    if any(pat in label for label in lowered for pat in patterns.enhancement):
        return Kind.ENHANCEMENT
    return Kind.OTHER


def classify_records(
    records: list[IssueRecord], patterns: LabelPatterns = DEFAULT_PATTERNS
) -> list[IssueRecord]:
    return [replace(r, kind=classify(r, patterns)) for r in records]


@dataclass(frozen=True)
class ProjectBundle:
    """Three aligned weekly series plus the metadata the filter consumes.

    Bugs and enhancements are classified subsets of issues, so their weekly
    counts can never sum past the issue count.
    """

    project_id: str
    meta: ProjectMeta
    issues: WeeklySeries
    bugs: WeeklySeries
    enhancements: WeeklySeries

    def __post_init__(self):
        series = (self.issues, self.bugs, self.enhancements)
        lengths = {len(s) for s in series}
        starts = {s.start_date for s in series}
        if len(lengths) != 1 or len(starts) != 1:
            raise ValueError("the three series must share start date and length")
        excess = self.bugs.values + self.enhancements.values - self.issues.values
        if (excess > 0).any():
            raise ValueError("bugs + enhancements exceed issues in some week")


@dataclass(frozen=True)
class WeeklyBuckets:
    issues: WeeklySeries
    bugs: WeeklySeries
    enhancements: WeeklySeries
    dropped_records: int


def bucket_weekly(
    records: list[IssueRecord],
    project_id: str,
    start_date: date,
    end_date: date,
) -> WeeklyBuckets:
    """Count records per week; week i covers start_date + 7i .. +6 days.

    Pull requests never count. Weeks without records are explicit zeros;
    records outside [start_date, end_date] are dropped and counted.
    """
    if start_date > end_date:
        raise InvalidRangeError(f"start {start_date} is after end {end_date}")
    weeks = (end_date - start_date).days // 7 + 1
    issues = np.zeros(weeks, dtype=np.int64)
    bugs = np.zeros(weeks, dtype=np.int64)
    enhancements = np.zeros(weeks, dtype=np.int64)
    dropped = 0
    for record in records:
        if record.is_pull_request:
            continue
        created = record.created_at.date()
        if created < start_date or created > end_date:
            dropped += 1
            continue
        week = (created - start_date).days // 7
        issues[week] += 1
        if record.kind is Kind.BUG:
            bugs[week] += 1
        elif record.kind is Kind.ENHANCEMENT:
            enhancements[week] += 1

    def series(attribute: Attribute, values: np.ndarray) -> WeeklySeries:
        return WeeklySeries(project_id, attribute, start_date, values)

    return WeeklyBuckets(
        issues=series(Attribute.ISSUES, issues),
        bugs=series(Attribute.BUGS, bugs),
        enhancements=series(Attribute.ENHANCEMENTS, enhancements),
        dropped_records=dropped,
    )


def build_bundle(
    project_id: str,
    records: list[IssueRecord],
    meta: ProjectMeta | None = None,
    patterns: LabelPatterns = DEFAULT_PATTERNS,
    end_date: date | None = None,
) -> ProjectBundle:
    """Classify, bucket (anchored at the first issue's week), and assemble.

    Counts derivable from the records (pull requests, issues, duration)
    override whatever the caller supplied in meta; the rest pass through.
    """
    classified = classify_records(records, patterns)
    non_pr = [r for r in classified if not r.is_pull_request]
    if not non_pr:
        raise FormatError(f"{project_id}: no issue records to bucket")
    start = min(r.created_at.date() for r in non_pr)
    end = end_date or max(r.created_at.date() for r in non_pr)
    buckets = bucket_weekly(classified, project_id, start, end)
    base = meta or ProjectMeta()
    meta = replace(
        base,
        pull_request_count=sum(1 for r in classified if r.is_pull_request),
        issue_count=len(non_pr),
        duration_weeks=len(buckets.issues),
    )
    return ProjectBundle(
        project_id=project_id,
        meta=meta,
        issues=buckets.issues,
        bugs=buckets.bugs,
        enhancements=buckets.enhancements,
    )


# ---------------------------------------------------------------------------
# Cache files: <name>.csv + <name>.meta.json, atomic writes
# ---------------------------------------------------------------------------

CACHE_HEADER = "week_index,week_start_date,issues,bugs,enhancements"


def _sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".meta.json")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def save_cache(bundle: ProjectBundle, path: str | Path) -> None:
    path = Path(path)
    lines = [CACHE_HEADER]
    for i in range(len(bundle.issues)):
        week_start = bundle.issues.week_start(i).isoformat()
        lines.append(
            f"{i},{week_start},{bundle.issues.values[i]},"
            f"{bundle.bugs.values[i]},{bundle.enhancements.values[i]}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")
    meta = bundle.meta
    sidecar = {
        "project_id": bundle.project_id,
        "start_date": bundle.issues.start_date.isoformat(),
        "meta": {
            "pull_request_count": meta.pull_request_count,
            "commit_count": meta.commit_count,
            "duration_weeks": meta.duration_weeks,
            "issue_count": meta.issue_count,
            "contributor_count": meta.contributor_count,
            "release_count": meta.release_count,
            "is_software_dev": meta.is_software_dev,
        },
    }
    _atomic_write(_sidecar_path(path), json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def load_cache(path: str | Path) -> ProjectBundle:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        sidecar = json.loads(_sidecar_path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"cannot read cache {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad sidecar JSON for {path}: {exc}") from exc

    lines = [line for line in text.splitlines() if line]
    if not lines or lines[0] != CACHE_HEADER:
        raise FormatError(f"{path}: bad header")
    start_date = date.fromisoformat(sidecar["start_date"])
    issues, bugs, enhancements = [], [], []
    for row_number, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != 5:
            raise FormatError(f"{path}: row {row_number} has {len(parts)} columns")
        week_index = int(parts[0])
        if week_index != row_number:
            raise FormatError(f"{path}: week indices must be contiguous from 0 (row {row_number})")
        expected = start_date.toordinal() + 7 * row_number
        if date.fromisoformat(parts[1]).toordinal() != expected:
            raise FormatError(f"{path}: week_start_date mismatch at row {row_number}")
        i, b, e = int(parts[2]), int(parts[3]), int(parts[4])
        if min(i, b, e) < 0:
            raise FormatError(f"{path}: negative count at row {row_number}")
        if b + e > i:
            raise FormatError(f"{path}: bugs + enhancements exceed issues at row {row_number}")
        issues.append(i)
        bugs.append(b)
        enhancements.append(e)
    if not issues:
        raise FormatError(f"{path}: cache holds no weeks")

    m = sidecar["meta"]
    meta = ProjectMeta(
        pull_request_count=int(m["pull_request_count"]),
        commit_count=int(m["commit_count"]),
        duration_weeks=int(m["duration_weeks"]),
        issue_count=int(m["issue_count"]),
        contributor_count=int(m["contributor_count"]),
        release_count=int(m["release_count"]),
        is_software_dev=bool(m["is_software_dev"]),
    )
    project_id = str(sidecar["project_id"])

    def series(attribute: Attribute, values: list[int]) -> WeeklySeries:
        return WeeklySeries(project_id, attribute, start_date, np.array(values))

    return ProjectBundle(
        project_id=project_id,
        meta=meta,
        issues=series(Attribute.ISSUES, issues),
        bugs=series(Attribute.BUGS, bugs),
        enhancements=series(Attribute.ENHANCEMENTS, enhancements),
    )


def cache_filename(project_id: str) -> str:
    """Filesystem-safe cache name for a repository identifier."""
    return re.sub(r"[^A-Za-z0-9._-]+", "__", project_id) + ".csv"


def list_cache_files(directory: str | Path) -> list[Path]:
    return sorted(
        p for p in Path(directory).glob("*.csv") if _sidecar_path(p).exists()
    )


# ---------------------------------------------------------------------------
# REST client
# ---------------------------------------------------------------------------


def _parse_created(value: str) -> datetime:
    return datetime.fromisoformat(value.replace("Z", "+00:00")).astimezone(timezone.utc)


def _record_from_api(item: dict) -> IssueRecord:
    return IssueRecord(
        id=int(item["number"]),
        created_at=_parse_created(item["created_at"]),
        labels=tuple(label["name"] for label in item.get("labels", [])),
        is_pull_request="pull_request" in item,
    )


def _request_with_retries(
    session: requests.Session,
    repo: str,
    url: str,
    params: dict,
    headers: dict,
    max_retries: int,
    sleep,
) -> requests.Response:
    delay = 1.0
    for attempt in range(max_retries + 1):
        try:
            response = session.get(url, params=params, headers=headers, timeout=30)
        except requests.RequestException as exc:
            raise NetworkError(repo, str(exc)) from exc
        if response.status_code == 200:
            return response
        if response.status_code == 401:
            raise AuthError(repo, "authentication failed")
        if response.status_code == 404:
            raise NotFoundError(repo, "repository not found")
        rate_limited = response.status_code == 429 or (
            response.status_code == 403
            and response.headers.get("X-RateLimit-Remaining") == "0"
        )
        if rate_limited or response.status_code >= 500:
            if attempt == max_retries:
                break
            reset = response.headers.get("X-RateLimit-Reset")
            retry_after = response.headers.get("Retry-After")
            if retry_after is not None:
                wait = float(retry_after)
            elif reset is not None:
                wait = max(float(reset) - time.time(), 0.0)
            else:
                wait = delay
            sleep(min(wait, 60.0) + delay)
            delay *= 2
            continue
        if response.status_code == 403:
            raise AuthError(repo, "access forbidden")
        raise NetworkError(repo, f"unexpected status {response.status_code}")
    raise RateLimitedError(repo, f"still rate limited after {max_retries} retries")


def _auth_headers(token: str | None) -> dict:
    token = token or os.environ.get(TOKEN_ENV_VAR)
    headers = {"Accept": "application/vnd.github.v3+json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    return headers


def fetch_issues(
    repo: str,
    token: str | None = None,
    since: date | None = None,
    base_url: str = DEFAULT_BASE_URL,
    session: requests.Session | None = None,
    per_page: int = 100,
    max_retries: int = 5,
    sleep=time.sleep,
) -> list[IssueRecord]:
    """All issues of a repository, open and closed, paginated to exhaustion.

    Pull requests come back flagged (the listing endpoint mixes them in) so
    callers can count collaboration without polluting issue counts. `since`
    drops records created before that date.
    """
    session = session or requests.Session()
    headers = _auth_headers(token)
    records: list[IssueRecord] = []
    page = 1
    while True:
        params = {"state": "all", "per_page": per_page, "page": page}
        response = _request_with_retries(
            session, repo, f"{base_url}/repos/{repo}/issues", params, headers, max_retries, sleep
        )
        items = response.json()
        if not isinstance(items, list):
            raise NetworkError(repo, "issue listing did not return a list")
        records.extend(_record_from_api(item) for item in items)
        if len(items) < per_page:
            break
        page += 1
    if since is not None:
        records = [r for r in records if r.created_at.date() >= since]
    return records


def _count_via_link(
    session: requests.Session,
    repo: str,
    url: str,
    headers: dict,
    max_retries: int,
    sleep,
) -> int:
    """Total item count of a paginated listing via the rel="last" page number."""
    response = _request_with_retries(
        session, repo, url, {"per_page": 1, "page": 1}, headers, max_retries, sleep
    )
    link = response.headers.get("Link", "")
    match = re.search(r'[?&]page=(\d+)[^>]*>;\s*rel="last"', link)
    if match:
        return int(match.group(1))
    body = response.json()
    return len(body) if isinstance(body, list) else 0


def fetch_project_meta(
    repo: str,
    records: list[IssueRecord],
    token: str | None = None,
    base_url: str = DEFAULT_BASE_URL,
    session: requests.Session | None = None,
    max_retries: int = 5,
    sleep=time.sleep,
) -> ProjectMeta:
    """Counts the sanity filter needs, mostly via 1-per-page Link headers.

    Whether the repository is actually software development cannot be
    inferred from the API and defaults to True.
    """
    session = session or requests.Session()
    headers = _auth_headers(token)

    def count(endpoint: str) -> int:
        return _count_via_link(
            session, repo, f"{base_url}/repos/{repo}/{endpoint}", headers, max_retries, sleep
        )

    non_pr = sum(1 for r in records if not r.is_pull_request)
    return ProjectMeta(
        pull_request_count=sum(1 for r in records if r.is_pull_request),
        commit_count=count("commits"),
        contributor_count=count("contributors"),
        release_count=count("releases"),
        issue_count=non_pr,
        duration_weeks=0,  # filled in once the weekly series exists
        is_software_dev=True,
    )
