"""Command line front end.

Subcommands: beta, dirichlet, plugin, oracle, sweep, figures.  Exit codes
are a stable contract: 0 success, 2 validation failure, 3 the prior
contradicts the observed data, 4 an oracle comparison failed.  Prior
hyperparameters are never defaulted; every one must be given explicitly.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .beta_binomial import BetaParams, BinomialData, lr_full, lr_joint, lr_plugin, lr_two_step
from .dirichlet_multinomial import (
    DirichletModel,
    EmptySupportError,
    RareMatchData,
    lr_plugin_dirichlet,
    lr_series,
)
from .kpriors import parse_prior_spec
from .numerics import NonConvergenceError
from .oracles import (
    DegenerateWeightsError,
    OracleConfig,
    beta_lr_quadrature,
    dirichlet_posterior_mean_exact,
    dirichlet_posterior_mean_mc,
)
from .results import LRResult
from .sweep import (
    BUILTIN_FIGURES,
    builtin_figure,
    sweep_spec_from_json,
    write_sweep_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONTRADICTION = 3
EXIT_ORACLE_MISMATCH = 4


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def _positive(name: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise _CliError(f"{name} must be > 0")
    return value


def _nonneg_int(name: str, value: int) -> int:
    if value < 0:
        raise _CliError(f"{name} must be >= 0")
    return value


def _result_payload(result: LRResult) -> dict:
    payload = {
        "lr": result.lr,
        "log10_lr": result.log10_lr,
        "method": result.method,
        "model": result.model,
        "diagnostics": None,
    }
    if result.diagnostics is not None:
        payload["diagnostics"] = {
            "terms_evaluated": result.diagnostics.terms_evaluated,
            "k_stop": result.diagnostics.k_stop,
            "truncated": result.diagnostics.truncated,
            "peak_log_term": result.diagnostics.peak_log_term,
        }
    return payload


def _print_result(result: LRResult, plugin: LRResult | None, fmt: str) -> None:
    if fmt == "json":
        payload = _result_payload(result)
        if plugin is not None:
            payload["plugin"] = _result_payload(plugin)
            payload["diff_log10"] = plugin.log10_lr - result.log10_lr
        print(json.dumps(payload))
        return
    print(f"lr = {result.lr:.10g}")
    print(f"log10_lr = {result.log10_lr:.10g}")
    if result.diagnostics is not None:
        d = result.diagnostics
        print(
            f"series: terms={d.terms_evaluated} k_stop={d.k_stop} "
            f"truncated={'true' if d.truncated else 'false'}"
        )
    if plugin is not None:
        print(f"plugin_lr = {plugin.lr:.10g}")
        print(f"plugin_log10_lr = {plugin.log10_lr:.10g}")
        print(f"diff_log10 = {plugin.log10_lr - result.log10_lr:.10g}")


def _read_counts(path: str) -> tuple[int, ...]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _CliError(f"cannot read counts file: {exc}")
    tokens = text.replace(",", " ").split()
    try:
        counts = tuple(int(tok) for tok in tokens)
    except ValueError:
        raise _CliError(f"counts file {path} must contain integers") from None
    if not counts:
        raise _CliError(f"counts file {path} is empty")
    return counts


def _default_counts(n_db: int, k_obs: int) -> tuple[int, ...]:
    # Any composition works (the result provably ignores it); put the excess
    # on the first type.
    if k_obs == 0:
        if n_db != 0:
            raise _CliError("a nonempty database needs k-obs >= 1")
        return ()
    if n_db < k_obs:
        raise _CliError("db-size must be >= k-obs")
    return (n_db - k_obs + 1,) + (1,) * (k_obs - 1)


def _cmd_beta(args: argparse.Namespace) -> int:
    _positive("alpha", args.alpha)
    _positive("beta", args.beta)
    _nonneg_int("db-size", args.db_size)
    prior = BetaParams(args.alpha, args.beta)
    try:
        data = BinomialData(args.db_size, args.count)
    except ValueError as exc:
        raise _CliError(str(exc))
    if args.joint and args.two_step:
        raise _CliError("give at most one of --joint and --two-step")
    if args.joint:
        result = lr_joint(prior, data)
    elif args.two_step:
        result = lr_two_step(prior, data)
    else:
        result = lr_full(prior, data)
    plugin = lr_plugin(prior, data) if args.plugin else None
    _print_result(result, plugin, args.format)
    return EXIT_OK


def _dirichlet_inputs(args: argparse.Namespace) -> tuple[DirichletModel, RareMatchData]:
    try:
        prior = parse_prior_spec(args.k_prior)
    except (ValueError, OSError) as exc:
        raise _CliError(f"bad --k-prior: {exc}")
    _nonneg_int("db-size", args.db_size)
    _nonneg_int("k-obs", args.k_obs)
    counts = _read_counts(args.counts) if args.counts else None
    try:
        data = RareMatchData(args.db_size, args.k_obs, counts)
        model = DirichletModel(k_prior=prior, m=args.m)
    except ValueError as exc:
        raise _CliError(str(exc))
    return model, data


def _cmd_dirichlet(args: argparse.Namespace) -> int:
    model, data = _dirichlet_inputs(args)
    result = lr_series(model, data)
    plugin = None
    if args.plugin:
        k_bar = args.k_bar if args.k_bar is not None else model.k_prior.mean()
        plugin = lr_plugin_dirichlet(k_bar, data)
    _print_result(result, plugin, args.format)
    return EXIT_OK


def _cmd_plugin(args: argparse.Namespace) -> int:
    if args.model == "beta":
        for name in ("alpha", "beta", "count"):
            if getattr(args, name) is None:
                raise _CliError(f"--{name} is required for the beta model")
        _positive("alpha", args.alpha)
        _positive("beta", args.beta)
        result = lr_plugin(
            BetaParams(args.alpha, args.beta), BinomialData(args.db_size, args.count)
        )
    else:
        if args.k_bar is None and args.k_prior is None:
            raise _CliError("give --k-bar or --k-prior for the dirichlet model")
        k_bar = args.k_bar
        if k_bar is None:
            try:
                k_bar = parse_prior_spec(args.k_prior).mean()
            except (ValueError, OSError) as exc:
                raise _CliError(f"bad --k-prior: {exc}")
        data = RareMatchData(args.db_size, args.k_obs or 0)
        result = lr_plugin_dirichlet(k_bar, data)
    _print_result(result, None, args.format)
    return EXIT_OK


def _oracle_report(
    label: str,
    oracle_value: float,
    model_value: float,
    passed: bool,
    detail: str,
    fmt: str,
    extra: dict | None = None,
) -> int:
    abs_diff = abs(oracle_value - model_value)
    rel_diff = abs_diff / max(abs(oracle_value), abs(model_value))
    if fmt == "json":
        payload = {
            "mode": label,
            "oracle": oracle_value,
            "model": model_value,
            "abs_diff": abs_diff,
            "rel_diff": rel_diff,
            "pass": passed,
            "criterion": detail,
        }
        payload.update(extra or {})
        print(json.dumps(payload))
    else:
        print(f"oracle ({label}) = {oracle_value:.12g}")
        print(f"model value     = {model_value:.12g}")
        print(f"abs diff = {abs_diff:.3g}, rel diff = {rel_diff:.3g}")
        for key, value in (extra or {}).items():
            print(f"{key} = {value:.6g}")
        print(f"{'PASS' if passed else 'FAIL'} ({detail})")
    return EXIT_OK if passed else EXIT_ORACLE_MISMATCH


def _cmd_oracle(args: argparse.Namespace) -> int:
    cfg = OracleConfig(
        mc_samples=args.samples,
        rng_seed=args.seed,
        tolerance=args.tolerance if args.tolerance is not None else 1e-6,
    )
    if args.mode == "quadrature":
        for name in ("alpha", "beta", "count"):
            if getattr(args, name) is None:
                raise _CliError(f"--{name} is required for quadrature mode")
        _positive("alpha", args.alpha)
        _positive("beta", args.beta)
        prior = BetaParams(args.alpha, args.beta)
        data = BinomialData(args.db_size, args.count)
        oracle_lr = beta_lr_quadrature(prior, data, cfg)
        model_lr = lr_full(prior, data).lr
        tol = cfg.tolerance
        rel = abs(oracle_lr - model_lr) / max(oracle_lr, model_lr)
        return _oracle_report(
            "quadrature", oracle_lr, model_lr, rel <= tol,
            f"relative difference <= {tol:g}", args.format,
        )

    if args.k_prior is None:
        raise _CliError("--k-prior is required for exact and mc modes")
    if args.m is None:
        raise _CliError("--m is required for exact and mc modes")
    if args.counts:
        counts = _read_counts(args.counts)
    else:
        counts = _default_counts(args.db_size, args.k_obs or 0)
    ns = argparse.Namespace(**{**vars(args), "counts": None})
    model, _ = _dirichlet_inputs(ns)
    try:
        data = RareMatchData(args.db_size, args.k_obs or 0, counts)
    except ValueError as exc:
        raise _CliError(str(exc))
    model_lr = lr_series(model, data).lr
    if args.mode == "exact":
        mean = dirichlet_posterior_mean_exact(model, data, cfg)
        oracle_lr = 1.0 / mean
        tol = cfg.tolerance
        rel = abs(oracle_lr - model_lr) / max(oracle_lr, model_lr)
        return _oracle_report(
            "exact", oracle_lr, model_lr, rel <= tol,
            f"relative difference <= {tol:g}", args.format,
        )
    # mc: compare posterior means within a standard error band.
    sigmas = args.tolerance if args.tolerance is not None else 3.0
    estimate, std_error = dirichlet_posterior_mean_mc(model, data, cfg)
    model_mean = 1.0 / model_lr
    passed = abs(estimate - model_mean) <= sigmas * std_error
    return _oracle_report(
        "mc", 1.0 / estimate, model_lr, passed,
        f"posterior means within {sigmas:g} standard errors",
        args.format,
        extra={"std_error": std_error},
    )


def _cmd_sweep(args: argparse.Namespace) -> int:
    if (args.spec is None) == (args.figure is None):
        raise _CliError("give exactly one of --spec or --figure")
    if args.figure is not None:
        spec = builtin_figure(args.figure)
    else:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise _CliError(f"cannot read spec file: {exc}")
        except json.JSONDecodeError as exc:
            raise _CliError(f"spec file is not valid JSON: {exc}")
        try:
            spec = sweep_spec_from_json(payload)
        except ValueError as exc:
            raise _CliError(str(exc))
    tmp_path = args.out + ".partial"
    try:
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as fh:
            rows = write_sweep_csv(spec, fh)
        os.replace(tmp_path, args.out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    print(f"wrote {rows} rows to {args.out}")
    return EXIT_OK


def _cmd_figures(args: argparse.Namespace) -> int:
    entries = []
    for name in BUILTIN_FIGURES:
        spec = builtin_figure(name)
        entries.append(
            {
                "name": name,
                "model": spec.model,
                "fixed": spec.fixed,
                "axes": {a: len(spec.axes[a]) for a in spec.axis_names()},
                "rows": spec.row_count(),
            }
        )
    if args.format == "json":
        print(json.dumps(entries))
    else:
        for e in entries:
            axes = ", ".join(f"{a}[{n}]" for a, n in e["axes"].items())
            print(f"{e['name']}: model={e['model']} axes={axes} rows={e['rows']}")
    return EXIT_OK


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("human", "json"), default="human",
        help="output format (default human)",
    )


def _add_beta_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--alpha", type=float, required=required)
    parser.add_argument("--beta", type=float, required=required)
    parser.add_argument("--db-size", type=int, required=True, help="database size N")
    parser.add_argument(
        "--count", type=int, required=required,
        help="database count of the matching type",
    )


def _add_dirichlet_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument(
        "--k-prior", required=required,
        help="prior spec, e.g. poisson:lambda=1000 or degenerate:k=150",
    )
    parser.add_argument("--k-obs", type=int, required=required,
                        help="distinct types observed in the database")
    parser.add_argument("--m", type=int, default=None,
                        help="number of theoretically possible types")
    parser.add_argument("--counts", default=None,
                        help="file with per-type database counts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rarelr",
        description="Bayesian likelihood ratios for matches with database-unseen types",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_beta = sub.add_parser("beta", help="beta-binomial likelihood ratios")
    _add_beta_flags(p_beta, required=True)
    p_beta.add_argument("--plugin", action="store_true", help="also print the plug-in value")
    p_beta.add_argument("--joint", action="store_true",
                        help="evaluate via the posterior moment ratio")
    p_beta.add_argument("--two-step", action="store_true",
                        help="evaluate via sequential updating")
    _add_format(p_beta)
    p_beta.set_defaults(func=_cmd_beta)

    p_dir = sub.add_parser("dirichlet", help="random-K Dirichlet likelihood ratios")
    _add_dirichlet_flags(p_dir, required=True)
    p_dir.add_argument("--db-size", type=int, required=True, help="database size N")
    p_dir.add_argument("--plugin", action="store_true", help="also print the plug-in value")
    p_dir.add_argument("--k-bar", type=float, default=None,
                       help="plug-in number of types (default: prior mean)")
    _add_format(p_dir)
    p_dir.set_defaults(func=_cmd_dirichlet)

    p_plug = sub.add_parser("plugin", help="plug-in likelihood ratios only")
    p_plug.add_argument("--model", choices=("beta", "dirichlet"), required=True)
    p_plug.add_argument("--alpha", type=float, default=None)
    p_plug.add_argument("--beta", type=float, default=None)
    p_plug.add_argument("--db-size", type=int, required=True)
    p_plug.add_argument("--count", type=int, default=None)
    p_plug.add_argument("--k-bar", type=float, default=None)
    p_plug.add_argument("--k-prior", default=None)
    p_plug.add_argument("--k-obs", type=int, default=None)
    _add_format(p_plug)
    p_plug.set_defaults(func=_cmd_plugin)

    p_oracle = sub.add_parser("oracle", help="compare model values to oracles")
    p_oracle.add_argument("--mode", choices=("exact", "mc", "quadrature"), required=True)
    p_oracle.add_argument("--alpha", type=float, default=None)
    p_oracle.add_argument("--beta", type=float, default=None)
    p_oracle.add_argument("--db-size", type=int, required=True)
    p_oracle.add_argument("--count", type=int, default=None)
    _add_dirichlet_flags(p_oracle, required=False)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--samples", type=int, default=1_000_000)
    p_oracle.add_argument(
        "--tolerance", type=float, default=None,
        help="relative tolerance (exact/quadrature) or sigma multiplier (mc)",
    )
    _add_format(p_oracle)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_sweep = sub.add_parser("sweep", help="run a sensitivity sweep to CSV")
    p_sweep.add_argument("--spec", default=None, help="JSON sweep spec file")
    p_sweep.add_argument("--figure", choices=BUILTIN_FIGURES, default=None,
                         help="built-in figure grid")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_figs = sub.add_parser("figures", help="list built-in figure grids")
    _add_format(p_figs)
    p_figs.set_defaults(func=_cmd_figures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except EmptySupportError as exc:
        print(f"prior support excludes observed data: {exc}", file=sys.stderr)
        return EXIT_CONTRADICTION
    except DegenerateWeightsError as exc:
        print(f"FAIL (degenerate weights: {exc})", file=sys.stderr)
        return EXIT_ORACLE_MISMATCH
    except (NonConvergenceError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
