"""Full pipeline: built-in sweeps through the CLI, then rendered figures.

The renderer consumes the model library only through its public surfaces
(the `rarelr sweep` command and its CSV contract), exactly as a user would.
"""

import subprocess
import sys
import time
from pathlib import Path

import matplotlib.pyplot as plt
import pytest

from figlib import recipe_for, render

PLOT_SCRIPT = Path(__file__).resolve().parent.parent / "plot_figure.py"

EXPECTED = {
    # figure -> (axes, lines per axes, dashed lines per axes)
    "fig5": (3, [5, 5, 5], [0, 0, 0]),
    "fig6": (2, [9, 8], [1, 0]),
    "table3": (8, [9, 8] * 4, [1, 0] * 4),
}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("pipeline")


@pytest.mark.parametrize("figure", ["fig5", "fig6", "table3"])
def test_sweep_then_render(figure, workdir):
    start = time.monotonic()
    csv_path = workdir / f"{figure}.csv"
    png_path = workdir / f"{figure}.png"
    sweep = subprocess.run(
        [sys.executable, "-m", "rarelr", "sweep", "--figure", figure, "--out", str(csv_path)],
        capture_output=True,
        text=True,
    )
    assert sweep.returncode == 0, sweep.stderr
    plot = subprocess.run(
        [sys.executable, str(PLOT_SCRIPT), "--figure", figure,
         "--csv", str(csv_path), "--out", str(png_path)],
        capture_output=True,
        text=True,
    )
    assert plot.returncode == 0, plot.stderr
    assert png_path.exists() and png_path.stat().st_size > 0

    fig = render(recipe_for(figure, str(csv_path), str(workdir / f"{figure}_check.png")))
    try:
        n_axes, line_counts, dash_counts = EXPECTED[figure]
        assert len(fig.axes) == n_axes
        for ax, lines, dashes in zip(fig.axes, line_counts, dash_counts):
            assert len(ax.lines) == lines
            assert sum(l.get_linestyle() == "--" for l in ax.lines) == dashes
    finally:
        plt.close(fig)
    assert time.monotonic() - start < 300.0
