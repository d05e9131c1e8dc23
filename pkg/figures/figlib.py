"""Render sweep CSVs into the multi-panel sensitivity figures.

Decoupled from the model library on purpose: the only input is a CSV
produced by `rarelr sweep`, so the main suite runs without any plotting
stack.  Rendering is a pure function of the CSV contents; re-running on the
same file yields the same panel layout, line count, and data ranges.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


@dataclass(frozen=True)
class PanelSpec:
    """One panel: which output column it plots and an optional dashed overlay."""

    y_column: str
    title: str
    dashed_overlay: str | None = None


@dataclass(frozen=True)
class FigureRecipe:
    csv_path: str
    out_path: str
    x_column: str
    group_column: str
    panels: tuple[PanelSpec, ...]
    x_log: bool = True
    row_column: str | None = None  # facet the panel list over this column


RECIPE_LAYOUTS = {
    "fig5": dict(
        x_column="alpha",
        group_column="beta",
        panels=(
            PanelSpec("log10_lr", "log10 LR"),
            PanelSpec("log10_lr_plugin", "log10 plug-in LR"),
            PanelSpec("diff", "log10 plug-in LR - log10 LR"),
        ),
    ),
    "fig6": dict(
        x_column="lambda",
        group_column="k_obs",
        panels=(
            PanelSpec("log10_lr", "log10 LR", dashed_overlay="log10_lr_plugin"),
            PanelSpec("diff", "log10 plug-in LR - log10 LR"),
        ),
    ),
    "table3": dict(
        x_column="lambda",
        group_column="k_obs",
        row_column="r",
        panels=(
            PanelSpec("log10_lr", "log10 LR", dashed_overlay="log10_lr_plugin"),
            PanelSpec("diff", "log10 plug-in LR - log10 LR"),
        ),
    ),
}


def recipe_for(figure: str, csv_path: str, out_path: str) -> FigureRecipe:
    try:
        layout = RECIPE_LAYOUTS[figure]
    except KeyError:
        raise ValueError(
            f"unknown figure {figure!r}; expected one of {sorted(RECIPE_LAYOUTS)}"
        ) from None
    return FigureRecipe(csv_path=csv_path, out_path=out_path, **layout)


def _read_rows(recipe: FigureRecipe) -> list[dict[str, str]]:
    with open(recipe.csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{recipe.csv_path} is empty")
        needed = {recipe.x_column, recipe.group_column}
        needed |= {p.y_column for p in recipe.panels}
        needed |= {p.dashed_overlay for p in recipe.panels if p.dashed_overlay}
        if recipe.row_column:
            needed.add(recipe.row_column)
        missing = sorted(needed - set(reader.fieldnames))
        if missing:
            raise ValueError(
                f"{recipe.csv_path} is missing columns: {', '.join(missing)}"
            )
        rows = list(reader)
    if not rows:
        raise ValueError(f"{recipe.csv_path} has no data rows")
    return rows


def render(recipe: FigureRecipe):
    """Draw the figure and write it to recipe.out_path; returns the Figure."""
    rows = _read_rows(recipe)
    kept = [r for r in rows if not r.get("error")]
    skipped = len(rows) - len(kept)
    if skipped:
        print(f"skipped {skipped} error rows", file=sys.stderr)
    if not kept:
        raise ValueError(f"{recipe.csv_path} has no usable rows")

    if recipe.row_column:
        facet_values = sorted({float(r[recipe.row_column]) for r in kept})
    else:
        facet_values = [None]
    n_rows = len(facet_values)
    n_cols = len(recipe.panels)
    fig, axes = plt.subplots(
        n_rows, n_cols, figsize=(4.2 * n_cols, 3.2 * n_rows), squeeze=False
    )

    for i, facet in enumerate(facet_values):
        if facet is None:
            facet_rows = kept
        else:
            facet_rows = [r for r in kept if float(r[recipe.row_column]) == facet]
        groups = sorted({float(r[recipe.group_column]) for r in facet_rows})
        for j, panel in enumerate(recipe.panels):
            ax = axes[i][j]
            for g in groups:
                pts = sorted(
                    (float(r[recipe.x_column]), float(r[panel.y_column]))
                    for r in facet_rows
                    if float(r[recipe.group_column]) == g
                )
                ax.plot(
                    [p[0] for p in pts],
                    [p[1] for p in pts],
                    color="black",
                    linewidth=0.9,
                    label=f"{recipe.group_column}={g:g}",
                )
            if panel.dashed_overlay:
                # The overlay is constant across groups; draw it once.
                seen = {}
                for r in facet_rows:
                    seen[float(r[recipe.x_column])] = float(r[panel.dashed_overlay])
                pts = sorted(seen.items())
                ax.plot(
                    [p[0] for p in pts],
                    [p[1] for p in pts],
                    color="black",
                    linewidth=1.2,
                    linestyle="--",
                    label="plug-in",
                )
            if recipe.x_log:
                ax.set_xscale("log")
            ax.set_xlabel(recipe.x_column)
            title = panel.title if facet is None else f"{panel.title} ({recipe.row_column}={facet:g})"
            ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(recipe.out_path, dpi=150)
    return fig
