"""Plain-SVG rendering of evaluation outputs: no display server, no plotting
dependency, and deterministic bytes for golden-file comparison.

Charts produced: sorted per-project mean error curves per attribute/source
(the corpus-level accuracy picture), actual-vs-forecast traces for a single
project, and sorted error-trace overlays comparing transfer models against
local ones.
"""

from pathlib import Path

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_WIDTH = 720
_HEIGHT = 420
_MARGIN_LEFT = 64
_MARGIN_RIGHT = 16
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 48


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_chart(
    series: list[tuple[str, list[float], list[float]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Multi-line SVG chart; each entry is (label, xs, ys)."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    y_lo, y_hi = (min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    y_lo = min(y_lo, 0.0)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x: float) -> float:
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="monospace" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    axis_y = _MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{axis_y}" x2="{_WIDTH - _MARGIN_RIGHT}" y2="{axis_y}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" x2="{_MARGIN_LEFT}" y2="{axis_y}" stroke="black"/>'
    )
    for tick in _ticks(x_lo, x_hi):
        x = px(tick)
        parts.append(f'<line x1="{_fmt(x)}" y1="{axis_y}" x2="{_fmt(x)}" y2="{axis_y + 4}" stroke="black"/>')
        parts.append(
            f'<text x="{_fmt(x)}" y="{axis_y + 18}" text-anchor="middle">{_fmt(tick)}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        y = py(tick)
        parts.append(f'<line x1="{_MARGIN_LEFT - 4}" y1="{_fmt(y)}" x2="{_MARGIN_LEFT}" y2="{_fmt(y)}" stroke="black"/>')
        parts.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end">{_fmt(tick)}</text>'
        )
    parts.append(
        f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 8}" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_TOP + plot_h // 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_TOP + plot_h // 2})">{y_label}</text>'
    )

    for idx, (label, xs, ys) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        legend_y = _MARGIN_TOP + 6 + 16 * idx
        parts.append(
            f'<line x1="{_WIDTH - 170}" y1="{legend_y}" x2="{_WIDTH - 150}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{_WIDTH - 144}" y="{legend_y + 4}">{label}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def read_steps_csv(path: str | Path) -> list[dict]:
    """Rows of a step CSV as dicts (values parsed)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        row["step_index"] = int(row["step_index"])
        row["mae"] = float(row["mae"])
        rows.append(row)
    return rows


def read_forecast_csv(path: str | Path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        for key in ("step_index", "horizon", "week_index"):
            row[key] = int(row[key])
        for key in ("actual", "forecast"):
            row[key] = float(row[key])
        rows.append(row)
    return rows


def mean_mae_by_project(rows: list[dict], attribute: str, source: str) -> list[float]:
    per_project: dict[str, list[float]] = {}
    for row in rows:
        if row["attribute"] == attribute and row["source"] == source:
            per_project.setdefault(row["project_id"], []).append(row["mae"])
    means = [sum(v) / len(v) for v in per_project.values()]
    return sorted(means)


def build_report(eval_dir: str | Path, out_dir: str | Path) -> list[Path]:
    """Render summary.csv and the SVG charts from an evaluation output dir."""
    eval_dir = Path(eval_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    step_rows = read_steps_csv(eval_dir / "steps.csv")
    combos = sorted({(r["attribute"], r["source"]) for r in step_rows})

    summary_lines = ["attribute,source,projects,mean_mae,min_mae,max_mae"]
    dist_series = []
    for attribute, source in combos:
        means = mean_mae_by_project(step_rows, attribute, source)
        if not means:
            continue
        summary_lines.append(
            f"{attribute},{source},{len(means)},"
            f"{_fmt(sum(means) / len(means))},{_fmt(means[0])},{_fmt(means[-1])}"
        )
        dist_series.append(
            (f"{attribute}/{source}", [float(i) for i in range(len(means))], means)
        )
    summary_path = out_dir / "summary.csv"
    summary_path.write_text("\n".join(summary_lines) + "\n", encoding="utf-8")
    written.append(summary_path)

    dist_path = out_dir / "mae_distribution.svg"
    dist_path.write_text(
        line_chart(
            dist_series,
            "Per-project mean absolute error (sorted)",
            "project rank",
            "mean MAE",
        ),
        encoding="utf-8",
    )
    written.append(dist_path)

    forecast_path = eval_dir / "forecasts.csv"
    if forecast_path.exists():
        forecast_rows = read_forecast_csv(forecast_path)
        if forecast_rows:
            first_project = min(r["project_id"] for r in forecast_rows)
            for attribute in ("bugs", "enhancements"):
                series = []
                actual_added = False
                for source in ("local", "issue"):
                    trace = [
                        r
                        for r in forecast_rows
                        if r["project_id"] == first_project
                        and r["attribute"] == attribute
                        and r["source"] == source
                        and r["horizon"] == 1
                    ]
                    if not trace:
                        continue
                    trace.sort(key=lambda r: r["step_index"])
                    xs = [float(r["week_index"]) for r in trace]
                    if not actual_added:
                        series.append(("actual", xs, [r["actual"] for r in trace]))
                        actual_added = True
                    series.append((f"forecast/{source}", xs, [r["forecast"] for r in trace]))
                if not series:
                    continue
                chart_path = out_dir / f"actual_vs_forecast_{attribute}.svg"
                chart_path.write_text(
                    line_chart(
                        series,
                        f"{first_project}: {attribute}, 1-week-ahead forecasts",
                        "week",
                        "count",
                    ),
                    encoding="utf-8",
                )
                written.append(chart_path)

    # Error-distribution overlay: sorted step errors, transfer vs local.
    for attribute in ("bugs", "enhancements"):
        series = []
        for source in ("local", "issue"):
            errors = sorted(
                r["mae"] for r in step_rows if r["attribute"] == attribute and r["source"] == source
            )
            if errors:
                series.append((source, [float(i) for i in range(len(errors))], errors))
        if not series:
            continue
        err_path = out_dir / f"error_distribution_{attribute}.svg"
        err_path.write_text(
            line_chart(
                series,
                f"Sorted per-step errors: {attribute}",
                "step rank",
                "MAE",
            ),
            encoding="utf-8",
        )
        written.append(err_path)

    return written
