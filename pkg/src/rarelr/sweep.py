"""Parameter-grid sensitivity sweeps with CSV output.

A sweep fixes some model parameters, varies others over grids, and emits one
row per grid cell with the full-Bayes and plug-in log10 ratios plus their
difference.  Cells are independent and evaluated in a deterministic
lexicographic order; cells whose prior contradicts the data become error rows
rather than aborting the run.  Output is streamed, so large grids run in
constant memory.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, TextIO

import numpy as np

from .beta_binomial import BetaParams, BinomialData, lr_full, lr_plugin
from .dirichlet_multinomial import (
    EmptySupportError,
    RareMatchData,
    lr_negbinomial,
    lr_plugin_dirichlet,
    lr_poisson,
)
from .kpriors import nb_from_mean, PoissonTrunc
from .numerics import NonConvergenceError

__all__ = [
    "SweepSpec",
    "SweepRow",
    "run_sweep",
    "builtin_figure",
    "write_sweep_csv",
    "sweep_spec_from_json",
    "BUILTIN_FIGURES",
]

OUTPUT_ORDER = ("log10_lr", "log10_lr_plugin", "diff")

_MODEL_PARAMS = {
    "beta": {
        "required": {"alpha", "beta", "db_size", "count"},
        "optional": set(),
        "integer": {"db_size", "count"},
    },
    "dirichlet_poisson": {
        "required": {"lambda", "db_size", "k_obs"},
        "optional": {"m", "k_bar"},
        "integer": {"db_size", "k_obs", "m"},
    },
    "dirichlet_negbinomial": {
        "required": {"lambda", "r", "db_size", "k_obs"},
        "optional": {"m", "k_bar"},
        "integer": {"db_size", "k_obs", "m"},
    },
}


@dataclass(frozen=True)
class SweepSpec:
    """Grid description: model tag, fixed parameters, axis grids, outputs."""

    model: str
    fixed: dict[str, float]
    axes: dict[str, tuple[float, ...]]
    outputs: tuple[str, ...] = OUTPUT_ORDER

    def __post_init__(self) -> None:
        if self.model not in _MODEL_PARAMS:
            raise ValueError(
                f"unknown sweep model {self.model!r}; expected one of "
                f"{sorted(_MODEL_PARAMS)}"
            )
        object.__setattr__(self, "fixed", dict(self.fixed))
        object.__setattr__(
            self, "axes", {k: tuple(float(x) for x in v) for k, v in self.axes.items()}
        )
        outputs = tuple(o for o in OUTPUT_ORDER if o in set(self.outputs))
        if not outputs or set(self.outputs) - set(OUTPUT_ORDER):
            raise ValueError(
                f"outputs must be a nonempty subset of {OUTPUT_ORDER}, "
                f"got {self.outputs}"
            )
        object.__setattr__(self, "outputs", outputs)
        overlap = set(self.fixed) & set(self.axes)
        if overlap:
            raise ValueError(f"parameters {sorted(overlap)} are both fixed and swept")
        for name, grid in self.axes.items():
            if not grid:
                raise ValueError(f"axis {name!r} has an empty grid")
        params = _MODEL_PARAMS[self.model]
        known = params["required"] | params["optional"]
        given = set(self.fixed) | set(self.axes)
        unknown = given - known
        if unknown:
            raise ValueError(
                f"parameters {sorted(unknown)} are not valid for model {self.model!r}"
            )
        missing = params["required"] - given
        if missing:
            raise ValueError(
                f"model {self.model!r} is missing parameters {sorted(missing)}"
            )

    def axis_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.axes))

    def row_count(self) -> int:
        return math.prod(len(self.axes[a]) for a in self.axis_names())


@dataclass(frozen=True)
class SweepRow:
    """One grid cell: axis values, requested outputs, or an error note."""

    axis_values: dict[str, float]
    outputs: dict[str, float]
    error: str | None = None
    terms_evaluated: int | None = None
    truncated: bool | None = None


def _as_int(name: str, value: float) -> int:
    if value != int(value):
        raise ValueError(f"parameter {name!r} must be an integer, got {value}")
    return int(value)


def _evaluate_cell(model: str, params: dict[str, float]) -> SweepRow:
    cell_params = dict(params)
    ints = {
        name: _as_int(name, cell_params[name])
        for name in _MODEL_PARAMS[model]["integer"]
        if name in cell_params
    }
    try:
        if model == "beta":
            prior = BetaParams(cell_params["alpha"], cell_params["beta"])
            data = BinomialData(ints["db_size"], ints["count"])
            full = lr_full(prior, data)
            plug = lr_plugin(prior, data)
            diag = None
        else:
            data = RareMatchData(ints["db_size"], ints["k_obs"])
            m = ints.get("m")
            lam = cell_params["lambda"]
            if model == "dirichlet_poisson":
                full = lr_poisson(lam, m, data)
                prior_mean = PoissonTrunc(lam, m).mean()
            else:
                nb = nb_from_mean(lam, cell_params["r"], m)
                full = lr_negbinomial(nb.r, nb.q, m, data)
                prior_mean = nb.mean()
            k_bar = cell_params.get("k_bar", prior_mean)
            plug = lr_plugin_dirichlet(k_bar, data)
            diag = full.diagnostics
    except (EmptySupportError, NonConvergenceError, ValueError) as exc:
        return SweepRow(axis_values={}, outputs={}, error=str(exc))
    outputs = {
        "log10_lr": full.log10_lr,
        "log10_lr_plugin": plug.log10_lr,
        "diff": plug.log10_lr - full.log10_lr,
    }
    return SweepRow(
        axis_values={},
        outputs=outputs,
        terms_evaluated=diag.terms_evaluated if diag else None,
        truncated=diag.truncated if diag else None,
    )


def _thread_cap() -> int:
    raw = os.environ.get("LRCALC_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"LRCALC_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"LRCALC_THREADS must be >= 1, got {cap}")
    return cap


def run_sweep(spec: SweepSpec) -> Iterator[SweepRow]:
    """Yield one row per cell of the axis grid, in lexicographic axis order.

    Cell evaluation may be parallel (capped by LRCALC_THREADS) but the output
    order is always the deterministic grid order, and per-cell results do not
    depend on the schedule.
    """
    names = spec.axis_names()
    grids = [spec.axes[n] for n in names]
    cells = (dict(zip(names, combo)) for combo in itertools.product(*grids))

    def evaluate(axis_values: dict[str, float]) -> SweepRow:
        row = _evaluate_cell(spec.model, {**spec.fixed, **axis_values})
        return SweepRow(
            axis_values=axis_values,
            outputs={k: row.outputs[k] for k in spec.outputs} if not row.error else {},
            error=row.error,
            terms_evaluated=row.terms_evaluated,
            truncated=row.truncated,
        )

    workers = _thread_cap()
    if workers == 1:
        for axis_values in cells:
            yield evaluate(axis_values)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(evaluate, cells)


def _fmt(value: float | int | bool | None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.17g}"


def write_sweep_csv(spec: SweepSpec, out: TextIO) -> int:
    """Stream the sweep to CSV; returns the number of data rows written.

    Column order is axes (sorted), requested outputs, then error,
    terms_evaluated, truncated.  UTF-8 with LF line endings and 17
    significant digits, so reruns are byte-identical.
    """
    names = spec.axis_names()
    header = list(names) + list(spec.outputs) + ["error", "terms_evaluated", "truncated"]
    out.write(",".join(header) + "\n")
    rows = 0
    for row in run_sweep(spec):
        fields = [_fmt(row.axis_values[n]) for n in names]
        fields += [_fmt(row.outputs.get(o)) for o in spec.outputs]
        error = row.error or ""
        if "," in error or '"' in error or "\n" in error:
            error = '"' + error.replace('"', '""') + '"'
        fields += [error, _fmt(row.terms_evaluated), _fmt(row.truncated)]
        out.write(",".join(fields) + "\n")
        rows += 1
    return rows


def _log_grid(lo: float, hi: float, points: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.geomspace(lo, hi, points))


def _linear_grid(lo: float, hi: float, points: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.linspace(lo, hi, points))


# Grids behind the three built-in sensitivity studies.  The published alpha
# interval is open at zero, realised here as a log grid down to 0.01; the
# lambda grids use 200 log-spaced points.
BUILTIN_FIGURES = ("fig5", "fig6", "table3")

_KOBS_LINES = (30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0)


def builtin_figure(name: str) -> SweepSpec:
    """The exact grid behind one of the built-in sensitivity figures."""
    if name == "fig5":
        return SweepSpec(
            model="beta",
            fixed={"db_size": 100, "count": 0},
            axes={
                "alpha": _log_grid(0.01, 20.0, 200),
                "beta": (1.0, 5.0, 10.0, 15.0, 20.0),
            },
        )
    if name == "fig6":
        return SweepSpec(
            model="dirichlet_poisson",
            fixed={"db_size": 100},
            axes={
                "lambda": _log_grid(1.0, 10_000.0, 200),
                "k_obs": _KOBS_LINES,
            },
        )
    if name == "table3":
        return SweepSpec(
            model="dirichlet_negbinomial",
            fixed={"db_size": 100},
            axes={
                "lambda": _log_grid(1.0, 10_000.0, 200),
                "k_obs": _KOBS_LINES,
                "r": (1.0, 10.0, 100.0, 1000.0),
            },
        )
    raise ValueError(f"unknown figure {name!r}; expected one of {BUILTIN_FIGURES}")


def _grid_from_json(name: str, value) -> tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(x) for x in value)
    if isinstance(value, dict):
        try:
            scale = value.get("scale", "linear")
            lo = float(value["min"])
            hi = float(value["max"])
            points = int(value["points"])
        except (KeyError, TypeError, ValueError):
            raise ValueError(
                f"axis {name!r} needs min, max, points (and optional scale)"
            ) from None
        if points < 1:
            raise ValueError(f"axis {name!r} needs points >= 1")
        if scale == "log":
            if lo <= 0:
                raise ValueError(f"axis {name!r}: log scale needs min > 0")
            return _log_grid(lo, hi, points)
        if scale == "linear":
            return _linear_grid(lo, hi, points)
        raise ValueError(f"axis {name!r}: unknown scale {scale!r}")
    raise ValueError(f"axis {name!r} must be a list or a range object")


def sweep_spec_from_json(payload: dict | str) -> SweepSpec:
    """Build a SweepSpec from its JSON form (a dict or a JSON string).

    Schema: {"model": ..., "fixed": {name: value}, "axes": {name: grid},
    "outputs": [...]} where a grid is either an explicit list or
    {"scale": "log"|"linear", "min": ..., "max": ..., "points": ...}.
    """
    if isinstance(payload, str):
        payload = json.loads(payload)
    if not isinstance(payload, dict):
        raise ValueError("sweep spec must be a JSON object")
    unknown = set(payload) - {"model", "fixed", "axes", "outputs"}
    if unknown:
        raise ValueError(f"unknown sweep spec fields {sorted(unknown)}")
    model = payload.get("model")
    if not isinstance(model, str):
        raise ValueError("sweep spec needs a string 'model'")
    fixed = payload.get("fixed", {})
    axes = payload.get("axes", {})
    if not isinstance(fixed, dict) or not isinstance(axes, dict):
        raise ValueError("'fixed' and 'axes' must be objects")
    grids = {name: _grid_from_json(name, grid) for name, grid in axes.items()}
    outputs = payload.get("outputs", list(OUTPUT_ORDER))
    if not isinstance(outputs, (list, tuple)):
        raise ValueError("'outputs' must be a list")
    return SweepSpec(
        model=model,
        fixed={str(k): float(v) for k, v in fixed.items()},
        axes=grids,
        outputs=tuple(str(o) for o in outputs),
    )
