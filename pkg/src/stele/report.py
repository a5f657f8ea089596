"""Build report: delimited per-author metrics plus rendered figures.

The report command writes a CSV next to two PNG figures (heights and
the retention funnel) and prints a human-readable table. The CSV is
deterministic; the figures are for operators' eyes and carry no
contract.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .corpus import FILTER_RULE_IDS
from .pipeline import AuthorReport

__all__ = ["write_report_csv", "format_report_table", "render_figures"]

CSV_COLUMNS = (
    "author_id",
    "display_name",
    "ingested",
    "excluded_blocklist",
    "excluded_non_textual",
    "excluded_min_length",
    "excluded_duplicate",
    "kept",
    "retained",
    "height_lower",
    "height_upper",
    "top_keywords",
)


def write_report_csv(reports: list[AuthorReport], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow([
                r.author_id,
                r.display_name,
                r.ingested,
                *(r.excluded.get(rule, 0) for rule in FILTER_RULE_IDS),
                r.kept,
                r.retained,
                "" if r.height_lower is None else f"{r.height_lower:.6f}",
                "" if r.height_upper is None else f"{r.height_upper:.6f}",
                " ".join(r.top_keywords),
            ])


def format_report_table(reports: list[AuthorReport]) -> str:
    headers = ("author", "ingested", "excluded", "kept", "retained", "h_lower", "h_upper", "top keywords")
    rows = []
    for r in reports:
        rows.append((
            r.display_name,
            str(r.ingested),
            str(r.excluded_total),
            str(r.kept),
            str(r.retained),
            "-" if r.height_lower is None else f"{r.height_lower:.2f}",
            "-" if r.height_upper is None else f"{r.height_upper:.2f}",
            " ".join(r.top_keywords[:3]),
        ))
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


def render_figures(reports: list[AuthorReport], out_dir) -> list[Path]:
    """Heights chart and retention funnel as PNG files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if not reports:
        return written

    names = [r.display_name for r in reports]
    x = np.arange(len(names))

    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(names)), 4.5))
    lower = [r.height_lower or 0.0 for r in reports]
    upper = [r.height_upper or 0.0 for r in reports]
    ax.bar(x, lower, width=0.6, color="#555b6e", label="lower segment (lifetime works)")
    ax.bar(x, upper, width=0.6, bottom=lower, color="#89b0ae", label="upper segment (public response)")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("segment height (scene units)")
    ax.set_title("Monument heights by author")
    ax.legend(frameon=False)
    fig.tight_layout()
    heights_path = out_dir / "heights.png"
    fig.savefig(heights_path, dpi=120)
    plt.close(fig)
    written.append(heights_path)

    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(names)), 4.5))
    width = 0.27
    ax.bar(x - width, [r.ingested for r in reports], width, color="#bdbdbd", label="ingested")
    ax.bar(x, [r.kept for r in reports], width, color="#888da0", label="after filters")
    ax.bar(x + width, [r.retained for r in reports], width, color="#4a6fa5", label="retained (top salience)")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("posts")
    ax.set_title("Retention per filter stage")
    ax.legend(frameon=False)
    fig.tight_layout()
    retention_path = out_dir / "retention.png"
    fig.savefig(retention_path, dpi=120)
    plt.close(fig)
    written.append(retention_path)

    return written
