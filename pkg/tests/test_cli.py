import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from issueforecast.cli import main
from issueforecast.ingest import cache_filename, save_cache
from issueforecast.synth import generate_project
from replay import issue_json as _issue_json

ROOT = Path(__file__).resolve().parent.parent
SAMPLE = ROOT / "data" / "sample"
GOLDEN = ROOT / "tests" / "golden"


@pytest.fixture(scope="module")
def eval_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("eval")
    assert main(["evaluate", str(SAMPLE), "--out", str(out), "--jobs", "1"]) == 0
    return out


class TestEvaluate:
    def test_matches_pinned_golden_files(self, eval_out):
        for name in ("steps.csv", "forecasts.csv", "summary.json"):
            assert (eval_out / name).read_bytes() == (GOLDEN / name).read_bytes()

    def test_parallel_output_is_byte_identical(self, eval_out, tmp_path):
        out8 = tmp_path / "eval8"
        assert main(["evaluate", str(SAMPLE), "--out", str(out8), "--jobs", "8"]) == 0
        for name in ("steps.csv", "forecasts.csv", "summary.json"):
            assert (out8 / name).read_bytes() == (eval_out / name).read_bytes()

    def test_pure_python_path_reproduces_golden_bytes(self, tmp_path):
        out = tmp_path / "pure"
        env = dict(os.environ, ISSUEFORECAST_DISABLE_NUMBA="1")
        result = subprocess.run(
            [
                sys.executable,
                "-m",
                "issueforecast.cli",
                "evaluate",
                str(SAMPLE),
                "--out",
                str(out),
                "--jobs",
                "1",
            ],
            env=env,
            capture_output=True,
        )
        assert result.returncode == 0, result.stderr
        for name in ("steps.csv", "forecasts.csv", "summary.json"):
            assert (out / name).read_bytes() == (GOLDEN / name).read_bytes()

    def test_summary_contains_all_sections(self, eval_out):
        doc = json.loads((eval_out / "summary.json").read_text())
        assert [p["project_id"] for p in doc["projects"]] == [
            "sample/alpha",
            "sample/beta",
            "sample/gamma",
        ]
        first = doc["projects"][0]
        assert {e["attribute"] for e in first["evaluations"]} == {
            "issues",
            "bugs",
            "enhancements",
        }
        assert {e["source"] for e in first["evaluations"]} == {"local", "issue"}
        assert set(first["correlations"]) == {
            "issues_bugs",
            "issues_enhancements",
            "bugs_enhancements",
        }
        assert set(first["welch"]) == {"bugs", "enhancements"}

    def test_dry_run_writes_nothing(self, tmp_path, capsys):
        out = tmp_path / "never"
        assert main(["evaluate", str(SAMPLE), "--out", str(out), "--dry-run"]) == 0
        plan = json.loads(capsys.readouterr().out)
        assert plan["dry_run"] is True and plan["command"] == "evaluate"
        assert len(plan["projects"]) == 3
        assert plan["window"] == {"train_weeks": 20, "test_weeks": 4, "step_weeks": 1}
        assert not out.exists()

    def test_bad_cache_reported_but_not_fatal(self, tmp_path, capsys):
        cache = tmp_path / "cache"
        cache.mkdir()
        save_cache(generate_project("ok", seed=4, weeks=40), cache / "ok.csv")
        (cache / "broken.csv").write_text("week_index,week_start_date,issues,bugs,enhancements\n0,2022-01-03,1,2,0\n")
        (cache / "broken.meta.json").write_text(
            json.dumps(
                {
                    "project_id": "broken",
                    "start_date": "2022-01-03",
                    "meta": {
                        "pull_request_count": 0,
                        "commit_count": 0,
                        "duration_weeks": 1,
                        "issue_count": 0,
                        "contributor_count": 0,
                        "release_count": 0,
                        "is_software_dev": True,
                    },
                }
            )
        )
        out = tmp_path / "out"
        code = main(["evaluate", str(cache), "--out", str(out), "--jobs", "1"])
        assert code == 1
        errors = json.loads(capsys.readouterr().err)
        assert "broken" in errors["failed_projects"]
        assert (out / "steps.csv").exists()  # the good project still evaluated


class TestFilter:
    def test_single_commits_failure_reported(self, tmp_path, capsys):
        import dataclasses

        cache = tmp_path / "cache"
        cache.mkdir()
        bundle = generate_project("fail/commits", seed=9, weeks=55)
        bundle = dataclasses.replace(
            bundle, meta=dataclasses.replace(bundle.meta, commit_count=5)
        )
        save_cache(bundle, cache / cache_filename(bundle.project_id))
        out = tmp_path / "out"
        assert main(["filter", str(cache), "--out", str(out)]) == 0
        lines = (out / "filter_report.csv").read_text().splitlines()
        table = dict(line.split(",") for line in lines[1:])
        assert table["commits"] == "1"
        assert table["surviving"] == "0"
        verdicts = json.loads((out / "filter_verdicts.json").read_text())
        assert verdicts["fail/commits"]["passed"] is False
        assert verdicts["fail/commits"]["rules"]["commits"] is False

    def test_sample_corpus_passes(self, tmp_path):
        out = tmp_path / "out"
        assert main(["filter", str(SAMPLE), "--out", str(out)]) == 0
        lines = (out / "filter_report.csv").read_text().splitlines()
        assert lines[-1] == "surviving,3"


class TestCorrelate:
    def test_outputs_both_formats(self, tmp_path):
        out = tmp_path / "out"
        assert main(["correlate", str(SAMPLE), "--out", str(out)]) == 0
        doc = json.loads((out / "correlations.json").read_text())
        assert set(doc) == {"sample/alpha", "sample/beta", "sample/gamma"}
        assert doc["sample/alpha"]["issues_bugs"]["rho"] > 0.7
        lines = (out / "correlations.csv").read_text().splitlines()
        assert lines[0] == "project_id,pair,rho,strength"
        assert len(lines) == 1 + 9


class TestCompare:
    def test_identical_traces_give_t_zero(self, tmp_path, capsys):
        eval_dir = tmp_path / "eval"
        eval_dir.mkdir()
        rows = ["project_id,attribute,source,step_index,mae"]
        for source in ("local", "issue"):
            for step, value in enumerate((1.0, 2.0, 3.0, 4.0)):
                rows.append(f"p,bugs,{source},{step},{value}")
                rows.append(f"p,enhancements,{source},{step},{value}")
        (eval_dir / "steps.csv").write_text("\n".join(rows) + "\n")
        out = tmp_path / "out"
        assert main(["compare", str(eval_dir), "--out", str(out)]) == 0
        doc = json.loads((out / "compare.json").read_text())
        pooled = doc["pooled"]["all"]
        assert pooled["t_statistic"] == 0.0
        assert pooled["p_value"] == pytest.approx(0.5)
        assert pooled["reject_at_5pct"] is False
        assert doc["per_project"]["p"]["bugs"]["t_statistic"] == 0.0

    def test_on_real_evaluation(self, eval_out, tmp_path):
        out = tmp_path / "out"
        assert main(["compare", str(eval_out), "--out", str(out)]) == 0
        doc = json.loads((out / "compare.json").read_text())
        assert set(doc["per_project"]) == {"sample/alpha", "sample/beta", "sample/gamma"}
        assert "all" in doc["pooled"]


class TestReport:
    def test_generates_summary_and_charts(self, eval_out, tmp_path):
        out = tmp_path / "report"
        assert main(["report", str(eval_out), "--out", str(out)]) == 0
        names = sorted(p.name for p in out.iterdir())
        assert "summary.csv" in names
        assert "mae_distribution.svg" in names
        assert "actual_vs_forecast_bugs.svg" in names
        assert "error_distribution_bugs.svg" in names
        svg = (out / "mae_distribution.svg").read_text()
        assert svg.startswith("<svg ") and svg.rstrip().endswith("</svg>")

    def test_report_is_deterministic(self, eval_out, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        main(["report", str(eval_out), "--out", str(out1)])
        main(["report", str(eval_out), "--out", str(out2)])
        for path in out1.iterdir():
            assert path.read_bytes() == (out2 / path.name).read_bytes()


class TestFetchCommand:
    def test_dry_run_plan(self, capsys, monkeypatch):
        monkeypatch.delenv("GITHUB_TOKEN", raising=False)
        assert main(["fetch", "o/r", "--out", "/tmp/nowhere", "--dry-run"]) == 0
        plan = json.loads(capsys.readouterr().out)
        assert plan["projects"] == ["o/r"] and plan["token_source"] == "$GITHUB_TOKEN"

    def test_fetch_writes_cache_end_to_end(self, tmp_path, replay_server):
        base, handler = replay_server
        items = [
            _issue_json(1, ["bug"], created="2022-01-03T08:00:00Z"),
            _issue_json(2, ["feature"], created="2022-01-12T08:00:00Z"),
            _issue_json(3, [], created="2022-01-20T08:00:00Z"),
            _issue_json(4, [], created="2022-01-21T08:00:00Z", pr=True),
        ]
        handler.responses[("/repos/o/r/issues", 1)] = (items, {})
        link = f'<{base}/repos/o/r/commits?per_page=1&page=40>; rel="last"'
        handler.responses[("/repos/o/r/commits", 1)] = ([{}], {"Link": link})
        handler.responses[("/repos/o/r/contributors", 1)] = ([{}], {})
        handler.responses[("/repos/o/r/releases", 1)] = ([{}], {})
        out = tmp_path / "cache"
        assert main(["fetch", "o/r", "--out", str(out), "--base-url", base]) == 0
        from issueforecast.ingest import load_cache

        bundle = load_cache(out / "o__r.csv")
        assert bundle.issues.values.tolist() == [1, 1, 1]
        assert bundle.bugs.values.tolist() == [1, 0, 0]
        assert bundle.meta.commit_count == 40
        assert bundle.meta.pull_request_count == 1

    def test_fetch_custom_patterns_flag(self, tmp_path, replay_server):
        base, handler = replay_server
        items = [_issue_json(1, ["oops"], created="2022-01-03T08:00:00Z")]
        handler.responses[("/repos/o/r/issues", 1)] = (items, {})
        patterns = tmp_path / "patterns.json"
        patterns.write_text(json.dumps({"bug": ["oops"], "enhancement": []}))
        out = tmp_path / "cache"
        code = main(
            [
                "fetch",
                "o/r",
                "--out",
                str(out),
                "--base-url",
                base,
                "--skip-meta",
                "--patterns",
                str(patterns),
            ]
        )
        assert code == 0
        from issueforecast.ingest import load_cache

        bundle = load_cache(out / "o__r.csv")
        assert bundle.bugs.values.tolist() == [1]

    def test_fetch_missing_repo_reports_failure(self, tmp_path, replay_server, capsys):
        base, handler = replay_server
        handler.failures = [(404, {})]
        out = tmp_path / "cache"
        assert main(["fetch", "o/missing", "--out", str(out), "--base-url", base]) == 1
        errors = json.loads(capsys.readouterr().err)
        assert "o/missing" in errors["failed_projects"]

    def test_console_script_installed(self):
        out = subprocess.run(
            [sys.executable, "-m", "issueforecast.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert out.returncode == 0
        for command in ("fetch", "filter", "evaluate", "correlate", "compare", "report"):
            assert command in out.stdout
