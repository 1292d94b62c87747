"""Accuracy report tables: plain-text grids and CSV, 2-decimal percentages."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .training.matrix import MatrixAggregate


@dataclass
class ReportTable:
    caption: str
    row_labels: list[str]
    col_labels: list[str]
    cells: list[list[float]]
    col_groups: list[tuple[str, int]] | None = None
    std: list[list[float]] | None = None
    row_header: str = "Method"

    def __post_init__(self):
        n_rows, n_cols = len(self.row_labels), len(self.col_labels)
        if len(self.cells) != n_rows:
            raise ValueError(f"{len(self.cells)} cell rows for {n_rows} row labels")
        for r, row in enumerate(self.cells):
            if len(row) != n_cols:
                raise ValueError(
                    f"row {r} has {len(row)} cells, expected {n_cols} (ragged input)"
                )
            for value in row:
                if not 0.0 <= value <= 100.0:
                    raise ValueError(f"cell value {value} outside [0, 100]")
        if self.col_groups is not None:
            if sum(span for _, span in self.col_groups) != n_cols:
                raise ValueError("column group spans do not cover the columns")
        if self.std is not None:
            if len(self.std) != n_rows or any(len(r) != n_cols for r in self.std):
                raise ValueError("std layout must match the cell layout")


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def render_grid(table: ReportTable) -> str:
    """Human-readable fixed-width grid with the caption on top."""
    body = []
    for r, row in enumerate(table.cells):
        cells = []
        for c, value in enumerate(row):
            text = _fmt(value)
            if table.std is not None:
                text += f" ±{_fmt(table.std[r][c])}"
            cells.append(text)
        body.append([table.row_labels[r]] + cells)
    header = [table.row_header] + list(table.col_labels)
    widths = [max(len(row[c]) for row in [header] + body) for c in range(len(header))]

    lines = [table.caption]
    if table.col_groups is not None:
        group_cells = [" " * widths[0]]
        col = 1
        for name, span in table.col_groups:
            span_width = sum(widths[col : col + span]) + 2 * (span - 1)
            group_cells.append(name.ljust(span_width))
            col += span
        lines.append("  ".join(group_cells).rstrip())
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _csv_col_labels(table: ReportTable) -> list[str]:
    if table.col_groups is None:
        return list(table.col_labels)
    labels = []
    col = 0
    for name, span in table.col_groups:
        for _ in range(span):
            labels.append(f"{name}/{table.col_labels[col]}")
            col += 1
    return labels


def render_csv(table: ReportTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    labels = _csv_col_labels(table)
    if table.std is None:
        writer.writerow([table.row_header] + labels)
        for label, row in zip(table.row_labels, table.cells):
            writer.writerow([label] + [_fmt(v) for v in row])
    else:
        header = [table.row_header]
        for label in labels:
            header += [label, f"{label}_std"]
        writer.writerow(header)
        for label, row, std_row in zip(table.row_labels, table.cells, table.std):
            record = [label]
            for v, s in zip(row, std_row):
                record += [_fmt(v), _fmt(s)]
            writer.writerow(record)
    return out.getvalue()


def parse_csv(text: str) -> tuple[list[str], list[str], list[list[float]]]:
    """(row labels, column labels, cells) of a table written by render_csv.

    ``_std`` columns are folded back alongside their value columns and
    returned interleaved in the column order of the file.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) < 2:
        raise ValueError("not a report CSV")
    col_labels = rows[0][1:]
    row_labels = []
    cells = []
    for record in rows[1:]:
        if not record:
            continue
        if len(record) != len(rows[0]):
            raise ValueError(f"ragged CSV row: {record!r}")
        row_labels.append(record[0])
        cells.append([float(v) for v in record[1:]])
    return row_labels, col_labels, cells


def methods_by_views_table(
    caption: str, view_labels: Sequence[str], methods: Sequence[tuple[str, Sequence[float]]]
) -> ReportTable:
    """Rows are methods, columns are held-out camera views."""
    return ReportTable(
        caption=caption,
        row_labels=[name for name, _ in methods],
        col_labels=list(view_labels),
        cells=[list(values) for _, values in methods],
    )


def grouped_views_table(
    caption: str,
    groups: Sequence[tuple[str, Sequence[str]]],
    methods: Sequence[tuple[str, Sequence[float]]],
) -> ReportTable:
    """Like methods_by_views_table with a grouping header row (e.g. Day/Night)."""
    col_labels = [label for _, labels in groups for label in labels]
    return ReportTable(
        caption=caption,
        row_labels=[name for name, _ in methods],
        col_labels=col_labels,
        cells=[list(values) for _, values in methods],
        col_groups=[(name, len(labels)) for name, labels in groups],
    )


def single_vs_multi_table(
    caption: str, rows: Sequence[tuple[str, float, float]]
) -> ReportTable:
    """Rows are dataset/view pairs; columns compare single-view and multi-view."""
    return ReportTable(
        caption=caption,
        row_labels=[label for label, _, _ in rows],
        col_labels=["Single-view", "Multi-view"],
        cells=[[single, multi] for _, single, multi in rows],
        row_header="View",
    )


def matrix_table(caption: str, aggregates: Sequence[MatrixAggregate]) -> ReportTable:
    """Held-out views as rows, experiment modes as columns, mean +/- std cells.

    Accuracies arrive as fractions and are rendered as percentages.
    """
    views = sorted({a.view for a in aggregates})
    modes = sorted({a.mode for a in aggregates})
    by_key = {(a.view, a.mode): a for a in aggregates}
    cells, stds = [], []
    for view in views:
        row, std_row = [], []
        for mode in modes:
            agg = by_key.get((view, mode))
            if agg is None:
                raise ValueError(f"missing aggregate for view {view}, mode {mode!r}")
            row.append(100.0 * agg.mean)
            std_row.append(100.0 * agg.std)
        cells.append(row)
        stds.append(std_row)
    return ReportTable(
        caption=caption,
        row_labels=[f"Cam_{v}" for v in views],
        col_labels=list(modes),
        cells=cells,
        std=stds,
        row_header="View",
    )
