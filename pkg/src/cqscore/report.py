"""Render aggregate tables as TSV, JSON, Markdown and bar-chart figures.

Float cells use repr so a written table can be parsed back without loss;
best-per-column values carry a trailing '*' in the TSV and bold in Markdown.
"""

from __future__ import annotations

import json
from pathlib import Path

from .bench import LOWER_IS_BETTER, AggregateTable


def _cell(row: dict, col: str, best: dict[str, str], mark: str = "*") -> str:
    if col not in row:
        return ""
    value = repr(row[col])
    if best.get(col) == row["method"]:
        value += mark
    return value


def to_tsv(table: AggregateTable) -> str:
    lines = ["\t".join(["method", "n"] + table.columns)]
    for row in table.rows:
        lines.append(
            "\t".join([row["method"], str(row["n"])] + [_cell(row, c, table.best) for c in table.columns])
        )
    return "\n".join(lines) + "\n"


def to_json(table: AggregateTable) -> str:
    payload = {
        "columns": table.columns,
        "best": table.best,
        "rows": table.rows,
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def to_markdown(table: AggregateTable) -> str:
    arrows = {c: ("↓" if c in LOWER_IS_BETTER else "↑") for c in table.columns}
    header = ["Method"] + [f"{c} {arrows[c]}" for c in table.columns]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for row in table.rows:
        cells = [row["method"]]
        for col in table.columns:
            if col not in row:
                cells.append("")
            elif table.best.get(col) == row["method"]:
                cells.append(f"**{row[col]:.4f}**")
            else:
                cells.append(f"{row[col]:.4f}")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_figure(table: AggregateTable, path: str | Path) -> None:
    """Grouped bar chart of per-method means, one group per metric column."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    columns = [c for c in table.columns if any(c in r for r in table.rows)]
    methods = [r["method"] for r in table.rows]
    width = 0.8 / max(len(methods), 1)

    fig, ax = plt.subplots(figsize=(1.8 + 1.4 * len(columns), 4.0))
    for mi, row in enumerate(table.rows):
        xs = [ci + mi * width for ci in range(len(columns))]
        ys = [row.get(c, 0.0) for c in columns]
        ax.bar(xs, ys, width=width, label=row["method"])
    ax.set_xticks([ci + width * (len(methods) - 1) / 2 for ci in range(len(columns))])
    ax.set_xticklabels(columns)
    ax.set_ylabel("mean value")
    ax.set_title("Per-method alignment metrics")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
