"""Command-line front end: fetch, filter, evaluate, correlate, compare, report.

Batch commands never abort on a single project's failure; failures are
collected and emitted as a JSON error listing with a nonzero exit code.
Every command accepts --dry-run to print the resolved plan without touching
anything. Outputs are deterministic: same inputs and configuration produce
byte-identical files regardless of --jobs.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import evaluation, report
from .arima import TransferMode
from .errors import FetchError, IssueForecastError
from .evaluation import ModelSource, WindowConfig
from .filters import evaluate_filters, filter_report_lines
from .ingest import (
    DEFAULT_BASE_URL,
    DEFAULT_PATTERNS,
    LabelPatterns,
    TOKEN_ENV_VAR,
    build_bundle,
    cache_filename,
    fetch_issues,
    fetch_project_meta,
    list_cache_files,
    load_cache,
    save_cache,
)
from .stats import welch_t_test
from .timeseries import Attribute


@dataclass(frozen=True)
class RunConfig:
    """Resolved plan for one batch run: inputs, windowing, and execution."""

    projects: tuple[str, ...]
    window: WindowConfig
    mode: TransferMode
    out_dir: str
    patterns_path: str | None
    token_source: str
    jobs: int

    def plan(self) -> dict:
        return {
            "projects": list(self.projects),
            "window": {
                "train_weeks": self.window.train_weeks,
                "test_weeks": self.window.test_weeks,
                "step_weeks": self.window.step_weeks,
            },
            "mode": self.mode.value,
            "out": self.out_dir,
            "patterns": self.patterns_path,
            "token_source": self.token_source,
            "jobs": self.jobs,
        }


def _add_window_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--train-weeks", type=int, default=20)
    parser.add_argument("--test-weeks", type=int, default=4)
    parser.add_argument("--step-weeks", type=int, default=1)
    parser.add_argument(
        "--mode",
        choices=[m.value for m in TransferMode],
        default=TransferMode.COEFFICIENTS.value,
        help="how issue-trained models forecast other attributes",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="issueforecast",
        description="Mine weekly issue streams and backtest count forecasts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fetch = sub.add_parser("fetch", help="download issue histories into cache files")
    p_fetch.add_argument("repos", nargs="+", help="owner/name repository identifiers")
    p_fetch.add_argument("--out", required=True, help="cache directory")
    p_fetch.add_argument("--token", default=None, help=f"API token (default: ${TOKEN_ENV_VAR})")
    p_fetch.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p_fetch.add_argument("--patterns", default=None, help="JSON file with label patterns")
    p_fetch.add_argument("--skip-meta", action="store_true", help="do not query count endpoints")
    p_fetch.add_argument("--dry-run", action="store_true")

    p_filter = sub.add_parser("filter", help="apply the project sanity filter to a cache dir")
    p_filter.add_argument("cache_dir")
    p_filter.add_argument("--out", required=True)
    p_filter.add_argument("--dry-run", action="store_true")

    p_eval = sub.add_parser("evaluate", help="rolling-window backtests (local + issue transfer)")
    p_eval.add_argument("cache_dir")
    p_eval.add_argument("--out", required=True)
    _add_window_flags(p_eval)
    p_eval.add_argument("--jobs", type=int, default=0, help="parallel workers (0 = cpu count)")
    p_eval.add_argument("--dry-run", action="store_true")

    p_corr = sub.add_parser("correlate", help="pairwise rank correlations per project")
    p_corr.add_argument("cache_dir")
    p_corr.add_argument("--out", required=True)
    p_corr.add_argument("--dry-run", action="store_true")

    p_cmp = sub.add_parser("compare", help="Welch comparison of transfer vs local errors")
    p_cmp.add_argument("eval_dir", help="directory produced by `evaluate`")
    p_cmp.add_argument("--out", required=True)
    p_cmp.add_argument("--dry-run", action="store_true")

    p_rep = sub.add_parser("report", help="summary tables and SVG charts")
    p_rep.add_argument("eval_dir")
    p_rep.add_argument("--out", required=True)
    p_rep.add_argument("--dry-run", action="store_true")

    return parser


def _print_plan(plan: dict) -> int:
    print(json.dumps({"dry_run": True, **plan}, indent=2, sort_keys=True))
    return 0


def _finish(errors: dict[str, str]) -> int:
    if errors:
        print(
            json.dumps({"failed_projects": errors}, indent=2, sort_keys=True),
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_fetch(args) -> int:
    patterns = LabelPatterns.from_json(args.patterns) if args.patterns else DEFAULT_PATTERNS
    out = Path(args.out)
    run = RunConfig(
        projects=tuple(args.repos),
        window=WindowConfig(),
        mode=TransferMode.COEFFICIENTS,
        out_dir=str(out),
        patterns_path=args.patterns,
        token_source="flag" if args.token else f"${TOKEN_ENV_VAR}",
        jobs=1,
    )
    if args.dry_run:
        return _print_plan({"command": "fetch", "base_url": args.base_url, **run.plan()})
    out.mkdir(parents=True, exist_ok=True)
    errors: dict[str, str] = {}
    for repo in args.repos:
        try:
            records = fetch_issues(repo, token=args.token, base_url=args.base_url)
            meta = None
            if not args.skip_meta:
                meta = fetch_project_meta(
                    repo, records, token=args.token, base_url=args.base_url
                )
            bundle = build_bundle(repo, records, meta=meta, patterns=patterns)
            path = out / cache_filename(repo)
            save_cache(bundle, path)
            print(f"{repo}: {len(bundle.issues)} weeks -> {path}")
        except (FetchError, IssueForecastError) as exc:
            errors[repo] = str(exc)
    return _finish(errors)


def _load_bundles(cache_dir: str) -> tuple[list, dict[str, str]]:
    bundles = []
    errors: dict[str, str] = {}
    for path in list_cache_files(cache_dir):
        try:
            bundles.append(load_cache(path))
        except IssueForecastError as exc:
            errors[path.stem] = str(exc)
    bundles.sort(key=lambda b: b.project_id)
    return bundles, errors


def cmd_filter(args) -> int:
    out = Path(args.out)
    if args.dry_run:
        plan_files = [str(p) for p in list_cache_files(args.cache_dir)]
        return _print_plan({"command": "filter", "cache_files": plan_files, "out": str(out)})
    bundles, errors = _load_bundles(args.cache_dir)
    outcomes = {b.project_id: evaluate_filters(b.meta) for b in bundles}
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "filter_report.csv"
    report_path.write_text("\n".join(filter_report_lines(outcomes)) + "\n", encoding="utf-8")
    verdict_path = out / "filter_verdicts.json"
    verdict_path.write_text(
        json.dumps(
            {
                pid: {"passed": o.passed, "rules": o.rule_verdicts}
                for pid, o in sorted(outcomes.items())
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"filter report -> {report_path}")
    return _finish(errors)


def _window_config(args) -> WindowConfig:
    return WindowConfig(
        train_weeks=args.train_weeks,
        test_weeks=args.test_weeks,
        step_weeks=args.step_weeks,
    )


def _evaluate_one(task: tuple[str, dict]) -> tuple[str, dict, list, str | None]:
    """Worker: evaluate one cached project. Returns (id, summary, results, error)."""
    path, options = task
    try:
        bundle = load_cache(path)
        config = WindowConfig(**options["window"])
        mode = TransferMode(options["mode"])
        local = evaluation.run_local_models(bundle, config)
        transfer = evaluation.run_issue_transfer(bundle, config, mode)
        correlations = evaluation.run_correlations(bundle)
        welch = {}
        for attribute in (Attribute.BUGS, Attribute.ENHANCEMENTS):
            issue_result = transfer[attribute]
            local_result = local[attribute]
            if issue_result.steps >= 2 and local_result.steps >= 2:
                welch[attribute.value] = evaluation.welch_summary(
                    evaluation.run_error_comparison(issue_result, local_result)
                )
            else:
                welch[attribute.value] = None
        results = [local[a] for a in Attribute] + [
            transfer[a] for a in (Attribute.BUGS, Attribute.ENHANCEMENTS)
        ]
        summary = {
            "project_id": bundle.project_id,
            "evaluations": [evaluation.result_summary(r) for r in results],
            "correlations": evaluation.correlation_summary(correlations),
            "welch": welch,
        }
        return bundle.project_id, summary, results, None
    except IssueForecastError as exc:
        return Path(path).stem, {}, [], str(exc)


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    run = RunConfig(
        projects=tuple(str(p) for p in list_cache_files(args.cache_dir)),
        window=_window_config(args),
        mode=TransferMode(args.mode),
        out_dir=str(out),
        patterns_path=None,
        token_source="none",
        jobs=args.jobs or (os.cpu_count() or 1),
    )
    if args.dry_run:
        return _print_plan({"command": "evaluate", **run.plan()})
    options = {"window": run.plan()["window"], "mode": run.mode.value}
    tasks = [(p, options) for p in run.projects]
    if run.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=run.jobs) as pool:
            outcomes = list(pool.map(_evaluate_one, tasks))
    else:
        outcomes = [_evaluate_one(t) for t in tasks]

    outcomes.sort(key=lambda item: item[0])
    errors: dict[str, str] = {}
    summaries: dict[str, dict] = {}
    all_results = []
    for project_id, summary, results, error in outcomes:
        if error is not None:
            errors[project_id] = error
            continue
        summaries[project_id] = summary
        all_results.extend(results)

    out.mkdir(parents=True, exist_ok=True)
    (out / "steps.csv").write_text(
        "\n".join(evaluation.steps_csv_lines(all_results)) + "\n", encoding="utf-8"
    )
    (out / "forecasts.csv").write_text(
        "\n".join(evaluation.forecast_csv_lines(all_results)) + "\n", encoding="utf-8"
    )
    (out / "summary.json").write_text(
        evaluation.summary_json_text(summaries), encoding="utf-8"
    )
    print(f"evaluated {len(summaries)} projects -> {out}")
    return _finish(errors)


def cmd_correlate(args) -> int:
    out = Path(args.out)
    if args.dry_run:
        plan_files = [str(p) for p in list_cache_files(args.cache_dir)]
        return _print_plan({"command": "correlate", "cache_files": plan_files, "out": str(out)})
    bundles, errors = _load_bundles(args.cache_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["project_id,pair,rho,strength"]
    doc = {}
    for bundle in bundles:
        rep = evaluation.run_correlations(bundle)
        doc[bundle.project_id] = evaluation.correlation_summary(rep)
        for pair, info in doc[bundle.project_id].items():
            rho = "" if info["rho"] is None else repr(info["rho"])
            lines.append(f"{bundle.project_id},{pair},{rho},{info['strength']}")
    (out / "correlations.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "correlations.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"correlations for {len(doc)} projects -> {out}")
    return _finish(errors)


def cmd_compare(args) -> int:
    out = Path(args.out)
    steps_path = Path(args.eval_dir) / "steps.csv"
    if args.dry_run:
        return _print_plan({"command": "compare", "steps_csv": str(steps_path), "out": str(out)})
    rows = report.read_steps_csv(steps_path)
    out.mkdir(parents=True, exist_ok=True)

    def trace(project: str | None, attribute: str, source: str) -> np.ndarray:
        return np.array(
            [
                r["mae"]
                for r in rows
                if (project is None or r["project_id"] == project)
                and r["attribute"] == attribute
                and r["source"] == source
            ]
        )

    doc: dict = {"per_project": {}, "pooled": {}}
    projects = sorted({r["project_id"] for r in rows})
    for project in projects:
        doc["per_project"][project] = {}
        for attribute in ("bugs", "enhancements"):
            issue = trace(project, attribute, ModelSource.ISSUE.value)
            local = trace(project, attribute, ModelSource.LOCAL.value)
            if issue.size >= 2 and local.size >= 2:
                doc["per_project"][project][attribute] = evaluation.welch_summary(
                    welch_t_test(issue, local)
                )
            else:
                doc["per_project"][project][attribute] = None
    for attribute in ("bugs", "enhancements"):
        issue = trace(None, attribute, ModelSource.ISSUE.value)
        local = trace(None, attribute, ModelSource.LOCAL.value)
        if issue.size >= 2 and local.size >= 2:
            doc["pooled"][attribute] = evaluation.welch_summary(welch_t_test(issue, local))
        else:
            doc["pooled"][attribute] = None
    issue_all = np.concatenate([trace(None, a, "issue") for a in ("bugs", "enhancements")])
    local_all = np.concatenate([trace(None, a, "local") for a in ("bugs", "enhancements")])
    if issue_all.size >= 2 and local_all.size >= 2:
        doc["pooled"]["all"] = evaluation.welch_summary(welch_t_test(issue_all, local_all))

    (out / "compare.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    pooled = doc["pooled"].get("all")
    if pooled:
        print(
            f"pooled: t={pooled['t_statistic']:.3f} df={pooled['degrees_of_freedom']:.1f} "
            f"p={pooled['p_value']:.4g} -> {pooled['conclusion']}"
        )
    return 0


def cmd_report(args) -> int:
    out = Path(args.out)
    if args.dry_run:
        return _print_plan({"command": "report", "eval_dir": args.eval_dir, "out": str(out)})
    written = report.build_report(args.eval_dir, out)
    for path in written:
        print(f"wrote {path}")
    return 0


_HANDLERS = {
    "fetch": cmd_fetch,
    "filter": cmd_filter,
    "evaluate": cmd_evaluate,
    "correlate": cmd_correlate,
    "compare": cmd_compare,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except IssueForecastError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
