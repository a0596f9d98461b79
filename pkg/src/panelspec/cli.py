"""Command-line front end.

Three subcommands: ``fit`` estimates one model on a long-format CSV,
``test`` runs the specification tests, and ``simulate`` launches a
Monte Carlo study. JSON on standard output is the primary interface;
``--format csv`` emits a flat projection for spreadsheet or plotting
pipelines. Exit codes: 0 success, 1 data or estimation error (message
on standard error), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

import numpy as np

from .data import ColumnSchema, load_long_csv
from .estimators import (
    EstimateResult,
    fit_fixed_effects,
    fit_pooled_ols,
    fit_random_effects,
)
from .exceptions import PanelSpecError
from .inference import fit_statistics, hausman_test, weighted_hausman_test
from .mcstudy import (
    ALTERNATIVE,
    CONCENTRATED_VERTICAL,
    NO_CONTAMINATION,
    NULL,
    RANDOM_VERTICAL,
    ContaminationConfig,
    DgpConfig,
    run_study,
)
from .wle import HELLINGER, IDENTITY, WleConfig, fit_weighted_fixed_effects

__all__ = ["main", "build_parser", "cmd_fit", "cmd_test", "cmd_simulate"]

_METHODS = {
    "pooled": fit_pooled_ols,
    "fe": fit_fixed_effects,
    "re": fit_random_effects,
}

# Preset study grids for the simulate subcommand (--paper-figure):
# 1 and 2 sweep the cross-sectional size on clean data (size and power);
# 4 and 5 sweep contamination schemes on a fixed 100 x 3 panel.
_CLEAN_GAMMAS = (0.05, 0.10, 0.15, 0.20)
_CONTAMINATED_GAMMAS = (0.01, 0.02, 0.05, 0.10, 0.15, 0.20, 0.25)
_PRESET_N_GRID = (25, 50, 75, 100, 150, 200)


def _comma_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a comma-separated list of numbers, got {text!r}"
        ) from None


def _comma_names(text: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in text.split(",") if v.strip())
    if not names:
        raise argparse.ArgumentTypeError("expected at least one column name")
    return names


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="long-format CSV file")
    parser.add_argument("--unit", required=True, help="unit id column")
    parser.add_argument("--time", required=True, help="time id column")
    parser.add_argument("--y", required=True, help="response column")
    parser.add_argument(
        "--x",
        required=True,
        type=_comma_names,
        help="regressor columns, comma separated",
    )


def _add_wle_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--kappa", type=float, default=0.5,
        help="bandwidth fraction for the weighted fit (default 0.5)",
    )
    parser.add_argument(
        "--max-iter", type=int, default=50,
        help="iteration cap for the weighted fit (default 50)",
    )
    parser.add_argument(
        "--tol", type=float, default=1e-6,
        help="relative convergence tolerance (default 1e-6)",
    )
    parser.add_argument(
        "--raf", choices=[HELLINGER, IDENTITY], default=HELLINGER,
        help="residual adjustment function; 'identity' is the "
        "unweighted diagnostic (default hellinger)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panelspec",
        description="Panel-data estimation, robust weighting, and "
        "specification testing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="estimate one model on a CSV panel")
    _add_data_flags(p_fit)
    p_fit.add_argument(
        "--method", required=True, choices=["pooled", "fe", "re", "wfe"],
        help="pooled OLS, fixed effects, random effects, or weighted "
        "fixed effects",
    )
    _add_wle_flags(p_fit)
    p_fit.add_argument(
        "--seed", type=int, default=0,
        help="accepted for interface stability; current methods are "
        "deterministic and ignore it",
    )
    p_fit.add_argument("--format", choices=["json", "csv"], default="json")
    p_fit.set_defaults(func=cmd_fit)

    p_test = sub.add_parser("test", help="run specification tests on a CSV panel")
    _add_data_flags(p_test)
    p_test.add_argument(
        "--which", choices=["hausman", "weighted", "both"], default="both",
        help="which specification test(s) to run (default both)",
    )
    _add_wle_flags(p_test)
    p_test.add_argument(
        "--force-theta", type=float, default=None,
        help="override the estimated quasi-demeaning fraction "
        "(testing hook)",
    )
    p_test.add_argument("--seed", type=int, default=0,
                        help="accepted for interface stability; unused")
    p_test.add_argument("--format", choices=["json", "csv"], default="json")
    p_test.set_defaults(func=cmd_test)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo study")
    p_sim.add_argument(
        "--hypothesis", choices=["null", "alt", "alternative"],
        default="null",
        help="data-generating process (default null)",
    )
    p_sim.add_argument("--n", type=int, default=100, help="units N (default 100)")
    p_sim.add_argument("--t", type=int, default=4, help="periods T (default 4)")
    p_sim.add_argument("--s", type=int, default=1000,
                       help="replications (default 1000)")
    p_sim.add_argument(
        "--gammas", type=_comma_floats, default=(0.05,),
        help="nominal levels, comma separated (default 0.05)",
    )
    p_sim.add_argument(
        "--contamination",
        choices=[NO_CONTAMINATION, RANDOM_VERTICAL, CONCENTRATED_VERTICAL],
        default=NO_CONTAMINATION,
    )
    p_sim.add_argument("--m", type=int, default=0,
                       help="number of replaced response cells")
    p_sim.add_argument("--low", type=float, default=None,
                       help="lower replacement bound")
    p_sim.add_argument("--high", type=float, default=None,
                       help="upper replacement bound")
    p_sim.add_argument("--seed", type=int, default=0, help="master seed")
    p_sim.add_argument(
        "--beta", type=_comma_floats, default=(1.0, -1.5),
        help="slope vector (default 1,-1.5)",
    )
    p_sim.add_argument(
        "--tau", type=_comma_floats, default=(1.0, 1.0),
        help="correlation loadings under the alternative (default 1,1)",
    )
    _add_wle_flags(p_sim)
    p_sim.add_argument(
        "--threads", type=int, default=None,
        help="worker threads; default reads PANELSPEC_THREADS "
        "(0 or unset = auto). Results are identical for any value.",
    )
    p_sim.add_argument(
        "--paper-figure", type=int, choices=[1, 2, 4, 5], default=None,
        help="preset study grid: 1 size vs N, 2 power vs N, "
        "4 contaminated size, 5 contaminated power; overrides "
        "--hypothesis/--n/--t/--gammas/--contamination/--m",
    )
    p_sim.add_argument("--out", default=None,
                       help="output file (default standard output)")
    p_sim.add_argument("--format", choices=["json", "csv"], default="json")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def _print(doc: str, out: Optional[str] = None) -> None:
    if out is None:
        sys.stdout.write(doc)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(doc)


def _load(args: argparse.Namespace):
    schema = ColumnSchema(
        unit_col=args.unit, time_col=args.time, y_col=args.y, x_cols=args.x
    )
    return load_long_csv(args.data, schema)


def _wle_config(args: argparse.Namespace) -> WleConfig:
    return WleConfig(
        kappa=args.kappa,
        max_iterations=args.max_iter,
        tolerance=args.tol,
        raf=args.raf,
    )


def _fit_doc(result: EstimateResult, regressors: Sequence[str]) -> dict:
    doc = {
        "method": result.method,
        "regressors": list(regressors),
        "beta": [float(b) for b in result.beta],
        "std_errors": [float(s) for s in result.std_errors()],
        "sigma2_eps": result.sigma2_eps,
        "sigma2_alpha": result.sigma2_alpha,
        "theta": (
            result.variance_components.theta
            if result.variance_components is not None
            else None
        ),
        "rss": result.rss,
        "r_squared": result.r_squared,
        "converged": result.converged,
        "iterations": result.iterations,
        "n_units": int(result.residuals.shape[0]),
        "n_periods": int(result.residuals.shape[1]),
        "weights": (
            [[float(w) for w in row] for row in result.weights]
            if result.weights is not None
            else None
        ),
        "min_weight": (
            float(np.min(result.weights))
            if result.weights is not None
            else None
        ),
    }
    return doc


def cmd_fit(args: argparse.Namespace) -> int:
    """Estimate one model and print the result."""
    dataset = _load(args)
    if args.method == "wfe":
        result = fit_weighted_fixed_effects(dataset, _wle_config(args))
    else:
        result = _METHODS[args.method](dataset)
    if args.format == "json":
        _print(json.dumps(_fit_doc(result, args.x), indent=2) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["regressor", "estimate", "std_error"])
        for name, b, s in zip(args.x, result.beta, result.std_errors()):
            writer.writerow([name, repr(float(b)), repr(float(s))])
        _print(buf.getvalue())
    return 0


def cmd_test(args: argparse.Namespace) -> int:
    """Run the specification tests and print a report.

    The report carries both statistics with p-values plus the residual
    sums of squares and R-squared under the fixed- and random-effects
    fits, so a model choice can be read off one document.
    """
    dataset = _load(args)
    fe = fit_fixed_effects(dataset)
    re = fit_random_effects(dataset, theta=args.force_theta)
    records = []
    if args.which in ("hausman", "both"):
        records.append(hausman_test(fe, re))
    if args.which in ("weighted", "both"):
        wfe = fit_weighted_fixed_effects(dataset, _wle_config(args))
        records.append(weighted_hausman_test(wfe, re))
    rss_fe, r2_fe = fit_statistics(fe)
    rss_re, r2_re = fit_statistics(re)
    if args.format == "json":
        doc = {
            "tests": [
                {
                    "kind": t.kind,
                    "statistic": t.statistic,
                    "df": t.df,
                    "p_value": t.p_value,
                    "repaired": t.repaired,
                    "q": [float(v) for v in t.q],
                }
                for t in records
            ],
            "fit_statistics": {
                "rss_fe": rss_fe,
                "rss_re": rss_re,
                "r_squared_fe": r2_fe,
                "r_squared_re": r2_re,
            },
            "theta": re.variance_components.theta,
            "n_units": dataset.n_units,
            "n_periods": dataset.n_periods,
        }
        _print(json.dumps(doc, indent=2) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["test", "statistic", "df", "p_value", "repaired",
             "rss_fe", "rss_re", "r_squared_fe", "r_squared_re"]
        )
        for t in records:
            writer.writerow(
                [t.kind, repr(t.statistic), t.df, repr(t.p_value),
                 t.repaired, repr(rss_fe), repr(rss_re),
                 repr(r2_fe), repr(r2_re)]
            )
        _print(buf.getvalue())
    return 0


def _preset_runs(args: argparse.Namespace) -> list[dict]:
    fig = args.paper_figure
    hypothesis = NULL if fig in (1, 4) else ALTERNATIVE
    if fig in (1, 2):
        return [
            {
                "hypothesis": hypothesis,
                "n": n,
                "t": 4,
                "gammas": _CLEAN_GAMMAS,
                "scheme": NO_CONTAMINATION,
                "m": 0,
            }
            for n in _PRESET_N_GRID
        ]
    return [
        {
            "hypothesis": hypothesis,
            "n": 100,
            "t": 3,
            "gammas": _CONTAMINATED_GAMMAS,
            "scheme": scheme,
            "m": m,
        }
        for scheme in (RANDOM_VERTICAL, CONCENTRATED_VERTICAL)
        for m in (15, 30)
    ]


def _single_run(args: argparse.Namespace) -> list[dict]:
    hypothesis = NULL if args.hypothesis == "null" else ALTERNATIVE
    return [
        {
            "hypothesis": hypothesis,
            "n": args.n,
            "t": args.t,
            "gammas": args.gammas,
            "scheme": args.contamination,
            "m": args.m,
        }
    ]


def cmd_simulate(args: argparse.Namespace) -> int:
    """Run one or more studies and write the tabulated results."""
    runs = _preset_runs(args) if args.paper_figure else _single_run(args)
    wle_config = _wle_config(args)
    docs = []
    for run in runs:
        dgp = DgpConfig(
            n_units=run["n"],
            n_periods=run["t"],
            beta=args.beta,
            hypothesis=run["hypothesis"],
            tau=args.tau,
            seed=args.seed,
        )
        contamination = ContaminationConfig(
            scheme=run["scheme"],
            n_outliers=run["m"],
            low=args.low if run["scheme"] != NO_CONTAMINATION else None,
            high=args.high if run["scheme"] != NO_CONTAMINATION else None,
        )
        study = run_study(
            dgp,
            contamination,
            s=args.s,
            gamma_grid=run["gammas"],
            wle_config=wle_config,
            n_threads=args.threads,
        )
        docs.append((run, contamination, study))

    if args.format == "json":
        _print(_simulate_json(args, docs), args.out)
    else:
        _print(_simulate_csv(docs), args.out)
    return 0


def _simulate_json(args: argparse.Namespace, docs) -> str:
    runs = []
    for run, contamination, study in docs:
        low, high = (
            contamination.bounds()
            if contamination.scheme != NO_CONTAMINATION
            else (None, None)
        )
        runs.append(
            {
                "hypothesis": run["hypothesis"],
                "n_units": run["n"],
                "n_periods": run["t"],
                "scheme": contamination.scheme,
                "n_outliers": contamination.n_outliers,
                "low": low,
                "high": high,
                "seed": args.seed,
                "kappa": args.kappa,
                "gamma_grid": list(study.gamma_grid),
                "s_replications": study.s_replications,
                "failures": study.failures,
                "df": study.df,
                "tests": {
                    kind: {
                        "rejection_rates": list(study.rejection_rates[kind]),
                        "statistics": [float(v) for v in study.statistics[kind]],
                    }
                    for kind in sorted(study.statistics)
                },
            }
        )
    return json.dumps({"runs": runs}, indent=2, sort_keys=True) + "\n"


def _simulate_csv(docs) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["test", "hypothesis", "n_units", "n_periods", "scheme", "m",
         "gamma", "rejection_rate", "s", "failures"]
    )
    for run, contamination, study in docs:
        for kind in sorted(study.rejection_rates):
            for gamma, rate in zip(
                study.gamma_grid, study.rejection_rates[kind]
            ):
                writer.writerow(
                    [kind, run["hypothesis"], run["n"], run["t"],
                     contamination.scheme, contamination.n_outliers,
                     repr(float(gamma)), repr(float(rate)),
                     study.s_replications, study.failures]
                )
    return buf.getvalue()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PanelSpecError, OSError, ValueError) as exc:
        print(f"panelspec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
