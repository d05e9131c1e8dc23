"""Tests for the sensitivity sweep engine and its CSV contract."""

import io
import json
import math

import pytest

from rarelr.sweep import (
    SweepSpec,
    builtin_figure,
    run_sweep,
    sweep_spec_from_json,
    write_sweep_csv,
)


def small_beta_spec(**overrides):
    base = dict(
        model="beta",
        fixed={"db_size": 100, "count": 0},
        axes={"alpha": (0.5, 1.0, 2.0), "beta": (1.0, 5.0)},
    )
    base.update(overrides)
    return SweepSpec(**base)


class TestSpecValidation:
    def test_unknown_model(self):
        with pytest.raises(ValueError, match="unknown sweep model"):
            SweepSpec(model="gamma", fixed={}, axes={})

    def test_axis_fixed_overlap(self):
        with pytest.raises(ValueError, match="both fixed and swept"):
            small_beta_spec(fixed={"db_size": 100, "count": 0, "alpha": 1.0})

    def test_empty_grid(self):
        with pytest.raises(ValueError, match="empty grid"):
            small_beta_spec(axes={"alpha": (), "beta": (1.0,)})

    def test_unknown_parameter(self):
        with pytest.raises(ValueError, match="not valid"):
            small_beta_spec(fixed={"db_size": 100, "count": 0, "lambda": 3.0})

    def test_missing_parameter(self):
        with pytest.raises(ValueError, match="missing parameters"):
            SweepSpec(model="beta", fixed={"db_size": 100}, axes={"alpha": (1.0,)})

    def test_bad_outputs(self):
        with pytest.raises(ValueError, match="outputs"):
            small_beta_spec(outputs=("log10_lr", "nope"))


class TestRunSweep:
    def test_row_count_and_order(self):
        rows = list(run_sweep(small_beta_spec()))
        assert len(rows) == 6
        # Lexicographic: alpha is the slower axis, beta the faster one.
        seen = [(r.axis_values["alpha"], r.axis_values["beta"]) for r in rows]
        assert seen == [(a, b) for a in (0.5, 1.0, 2.0) for b in (1.0, 5.0)]

    def test_beta_cell_values(self):
        row = next(iter(run_sweep(small_beta_spec(axes={"alpha": (1.0,), "beta": (1.0,)}))))
        assert row.outputs["log10_lr"] == pytest.approx(math.log10(51.5), abs=1e-14)
        assert row.outputs["log10_lr_plugin"] == pytest.approx(math.log10(102), abs=1e-14)
        assert row.outputs["diff"] == pytest.approx(
            math.log10(102) - math.log10(51.5), abs=1e-12
        )
        assert row.error is None
        assert row.terms_evaluated is None

    def test_empty_axes_single_row(self):
        spec = SweepSpec(
            model="beta", fixed={"db_size": 100, "count": 0, "alpha": 1.0, "beta": 1.0},
            axes={},
        )
        rows = list(run_sweep(spec))
        assert len(rows) == 1
        assert rows[0].outputs["log10_lr"] == pytest.approx(math.log10(51.5), abs=1e-14)

    def test_error_rows_are_kept(self):
        spec = SweepSpec(
            model="dirichlet_poisson",
            fixed={"db_size": 100, "lambda": 30.0, "m": 40},
            axes={"k_obs": (30.0, 50.0)},
        )
        rows = list(run_sweep(spec))
        assert len(rows) == 2
        assert rows[0].error is None
        assert rows[1].error is not None  # k_obs=50 contradicts m=40
        assert rows[1].outputs == {}

    def test_dirichlet_cell_uses_prior_mean_for_plugin(self):
        spec = SweepSpec(
            model="dirichlet_poisson",
            fixed={"db_size": 100, "lambda": 1000.0},
            axes={"k_obs": (50.0,)},
        )
        row = next(iter(run_sweep(spec)))
        assert row.outputs["log10_lr_plugin"] == pytest.approx(math.log10(1100.0), abs=1e-12)
        assert row.terms_evaluated is not None
        assert row.truncated is not None

    def test_k_bar_override(self):
        spec = SweepSpec(
            model="dirichlet_poisson",
            fixed={"db_size": 100, "lambda": 1000.0, "k_bar": 500.0},
            axes={"k_obs": (50.0,)},
        )
        row = next(iter(run_sweep(spec)))
        assert row.outputs["log10_lr_plugin"] == pytest.approx(math.log10(600.0), abs=1e-12)

    def test_negbinomial_model(self):
        spec = SweepSpec(
            model="dirichlet_negbinomial",
            fixed={"db_size": 100, "r": 10.0, "k_obs": 50},
            axes={"lambda": (1000.0,)},
        )
        row = next(iter(run_sweep(spec)))
        assert row.outputs["log10_lr_plugin"] == pytest.approx(math.log10(1100.0), abs=1e-12)
        assert row.outputs["diff"] == pytest.approx(
            row.outputs["log10_lr_plugin"] - row.outputs["log10_lr"], abs=1e-12
        )


class TestCsv:
    def test_header_and_layout(self):
        buf = io.StringIO()
        write_sweep_csv(small_beta_spec(), buf)
        lines = buf.getvalue().split("\n")
        assert lines[0] == "alpha,beta,log10_lr,log10_lr_plugin,diff,error,terms_evaluated,truncated"
        assert lines[-1] == ""  # trailing LF
        assert len(lines) == 8  # header + 6 rows + empty tail
        assert "\r" not in buf.getvalue()

    def test_rerun_is_byte_identical(self):
        a, b = io.StringIO(), io.StringIO()
        write_sweep_csv(small_beta_spec(), a)
        write_sweep_csv(small_beta_spec(), b)
        assert a.getvalue() == b.getvalue()

    def test_full_precision_round_trip(self):
        buf = io.StringIO()
        write_sweep_csv(small_beta_spec(axes={"alpha": (1/3,), "beta": (1.0,)}), buf)
        row = buf.getvalue().split("\n")[1].split(",")
        assert float(row[0]) == 1 / 3

    def test_error_cells_leave_outputs_blank(self):
        spec = SweepSpec(
            model="dirichlet_poisson",
            fixed={"db_size": 100, "lambda": 30.0, "m": 40},
            axes={"k_obs": (50.0,)},
        )
        buf = io.StringIO()
        assert write_sweep_csv(spec, buf) == 1
        fields = buf.getvalue().split("\n")[1].split(",")
        assert fields[1] == "" and fields[2] == "" and fields[3] == ""
        assert "k" in ",".join(fields[4:])  # the error text mentions the clash


class TestBuiltinFigures:
    def test_fig5_grid(self):
        spec = builtin_figure("fig5")
        assert spec.model == "beta"
        assert spec.fixed == {"db_size": 100, "count": 0}
        assert len(spec.axes["alpha"]) == 200
        assert spec.axes["alpha"][0] == pytest.approx(0.01)
        assert spec.axes["alpha"][-1] == pytest.approx(20.0)
        assert spec.axes["beta"] == (1.0, 5.0, 10.0, 15.0, 20.0)
        assert spec.row_count() == 1000

    def test_fig6_grid(self):
        spec = builtin_figure("fig6")
        assert spec.model == "dirichlet_poisson"
        assert len(spec.axes["lambda"]) == 200
        assert spec.axes["lambda"][0] == pytest.approx(1.0)
        assert spec.axes["lambda"][-1] == pytest.approx(10_000.0)
        assert spec.axes["k_obs"] == tuple(float(k) for k in range(30, 101, 10))
        assert spec.row_count() == 1600

    def test_table3_grid(self):
        spec = builtin_figure("table3")
        assert spec.model == "dirichlet_negbinomial"
        assert spec.axes["r"] == (1.0, 10.0, 100.0, 1000.0)
        assert spec.row_count() == 6400

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            builtin_figure("fig7")

    def test_fig5_rows_satisfy_anticonservativeness(self):
        for row in run_sweep(builtin_figure("fig5")):
            assert row.error is None
            assert row.outputs["log10_lr_plugin"] > row.outputs["log10_lr"]


class TestJsonSpec:
    def test_explicit_lists(self):
        spec = sweep_spec_from_json(
            {
                "model": "beta",
                "fixed": {"db_size": 100, "count": 0},
                "axes": {"alpha": [1.0, 2.0], "beta": [1.0]},
            }
        )
        assert spec.axes["alpha"] == (1.0, 2.0)
        assert spec.outputs == ("log10_lr", "log10_lr_plugin", "diff")

    def test_range_objects(self):
        spec = sweep_spec_from_json(
            json.dumps(
                {
                    "model": "dirichlet_poisson",
                    "fixed": {"db_size": 100, "k_obs": 50},
                    "axes": {"lambda": {"scale": "log", "min": 1, "max": 100, "points": 5}},
                    "outputs": ["log10_lr"],
                }
            )
        )
        grid = spec.axes["lambda"]
        assert len(grid) == 5
        assert grid[0] == pytest.approx(1.0)
        assert grid[-1] == pytest.approx(100.0)
        assert spec.outputs == ("log10_lr",)

    def test_linear_range(self):
        spec = sweep_spec_from_json(
            {
                "model": "beta",
                "fixed": {"db_size": 10, "count": 0, "beta": 1.0},
                "axes": {"alpha": {"min": 1, "max": 3, "points": 3}},
            }
        )
        assert spec.axes["alpha"] == (1.0, 2.0, 3.0)

    @pytest.mark.parametrize(
        "payload",
        [
            [],
            {"model": "beta"},
            {"model": "beta", "fixed": {"db_size": 100, "count": 0}, "axes": {"alpha": {"min": 1}}},
            {"model": "beta", "fixed": {}, "axes": {}, "bogus": 1},
            {"model": "beta", "fixed": {"db_size": 100, "count": 0},
             "axes": {"alpha": {"scale": "cubic", "min": 1, "max": 2, "points": 2}}},
        ],
    )
    def test_bad_payloads(self, payload):
        with pytest.raises(ValueError):
            sweep_spec_from_json(payload)


class TestThreadCap:
    def test_parallel_output_matches_serial(self, monkeypatch):
        spec = small_beta_spec()
        serial = io.StringIO()
        write_sweep_csv(spec, serial)
        monkeypatch.setenv("LRCALC_THREADS", "4")
        parallel = io.StringIO()
        write_sweep_csv(spec, parallel)
        assert serial.getvalue() == parallel.getvalue()

    def test_invalid_cap_rejected(self, monkeypatch):
        monkeypatch.setenv("LRCALC_THREADS", "zero")
        with pytest.raises(ValueError, match="LRCALC_THREADS"):
            list(run_sweep(small_beta_spec()))
