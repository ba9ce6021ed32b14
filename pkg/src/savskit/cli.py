"""Command-line surface: fit, select, cd, bench, metrics, report.

Every run writes its result files plus a ``run_manifest.json`` recording the
resolved configuration, the seeds used and the tool version, so that outputs
can be reproduced bit-for-bit from the manifest and the inputs.  Result files
never contain timestamps; the manifest does.

Exit codes: 0 success, 2 usage error, 3 invalid configuration, 4 missing or
malformed input file, 5 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bench import (
    BenchConfig,
    BenchReport,
    DesignSpec,
    SignalSpec,
    replicate_seeds,
    run_replicates,
)
from .coord_descent import coordinate_descent, early_stop_report, objective
from .data import CSV_FLOAT_FMT, RegressionData, TruthSpec, column_sq_norms, load_csv
from .errors import ConfigError, DataError, NumericalError, SavskitError
from .horseshoe import McmcConfig, gibbs_fit
from .metrics import from_counts
from .savs import adaptive_penalties, savs

__all__ = ["main", "dispatch", "RunManifest"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_DATA = 4
EXIT_NUMERICAL = 5

PROFILES = {
    "desk": {"replicates": 50, "n_iter": 6000, "burn_in": 1000, "thin": 1},
    "full": {"replicates": 1000, "n_iter": 6000, "burn_in": 1000, "thin": 1},
}

_EPILOG = """\
exit codes:
  0  success
  2  usage error (unknown flag or subcommand)
  3  invalid configuration value or config-file schema violation
  4  missing or malformed input file
  5  numerical failure during computation
environment:
  SAVSKIT_WORKERS  default worker count for `bench`
"""


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    config_snapshot: dict
    seeds: list
    tool_version: str
    started_at: str
    finished_at: str
    outputs: list

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


def dispatch(argv) -> int:
    """Parse arguments, run the selected subcommand, report errors on one line."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = _utcnow()
    try:
        outputs, config_snapshot, seeds = args.handler(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except (DataError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        return _fail(EXIT_DATA, "data", exc)
    except NumericalError as exc:
        return _fail(EXIT_NUMERICAL, "numerical", exc)
    except SavskitError as exc:
        return _fail(EXIT_NUMERICAL, "runtime", exc)
    manifest = RunManifest(
        subcommand=args.subcommand,
        config_snapshot=config_snapshot,
        seeds=seeds,
        tool_version=__version__,
        started_at=started,
        finished_at=_utcnow(),
        outputs=[str(p) for p in outputs],
    )
    out_dir = Path(args.out_dir)
    (out_dir / "run_manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="savskit",
        description=(
            "Sparse Bayesian regression: horseshoe-prior Gibbs sampling, "
            "signal-adaptive post-fit variable selection, coordinate-descent "
            "diagnostics and a Monte Carlo benchmark harness."
        ),
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"savskit {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    fit = sub.add_parser("fit", help="posterior mean under the horseshoe prior")
    fit.add_argument("--x", required=True, help="design matrix CSV")
    fit.add_argument("--y", required=True, help="response CSV (one column)")
    fit.add_argument("--standardize", action="store_true",
                     help="mean-center y and the columns of X (no rescaling); "
                          "note: no intercept is modeled, center y if you need one")
    fit.add_argument("--n-iter", type=int, default=6000)
    fit.add_argument("--burn-in", type=int, default=1000)
    fit.add_argument("--thin", type=int, default=1)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--retain-draws", action="store_true",
                     help="also write the retained coefficient draws")
    fit.add_argument("--out-dir", default=".")
    fit.set_defaults(handler=_cmd_fit)

    sel = sub.add_parser("select", help="sparsify a point estimate")
    sel.add_argument("--beta", required=True, help="point-estimate CSV (one column)")
    src = sel.add_mutually_exclusive_group(required=True)
    src.add_argument("--design", help="design matrix CSV (norms computed from it)")
    src.add_argument("--norms", help="precomputed column squared-norms CSV")
    sel.add_argument("--kappa", type=float, default=2.0)
    sel.add_argument("--out-dir", default=".")
    sel.set_defaults(handler=_cmd_select)

    cd = sub.add_parser("cd", help="coordinate descent toward a sparse projection")
    cd.add_argument("--beta", required=True, help="target point-estimate CSV")
    cd.add_argument("--design", required=True, help="design matrix CSV")
    cd.add_argument("--mode", choices=["gauss_seidel", "jacobi"], default="gauss_seidel")
    cd.add_argument("--max-iter", type=int, default=100)
    cd.add_argument("--rel-tol", type=float, default=1e-8)
    cd.add_argument("--mu", default="savs",
                    help='penalties CSV, or "savs" for the adaptive 1/|b_j|^2 choice')
    cd.add_argument("--out-dir", default=".")
    cd.set_defaults(handler=_cmd_cd)

    bench = sub.add_parser("bench", help="Monte Carlo replicate benchmark")
    bench.add_argument("--config", help="INI config file (sections: design, signal, bench, mcmc)")
    bench.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    bench.add_argument("--workers", type=int, default=None,
                       help="parallel replicate workers (default: SAVSKIT_WORKERS or 1)")
    bench.add_argument("--seed", type=int, default=None, help="override master_seed")
    bench.add_argument("--replicates", type=int, default=None)
    bench.add_argument("--design-kind", choices=["independent", "compound_symmetry", "ar1"],
                       default=None)
    bench.add_argument("--rho", type=float, default=None)
    bench.add_argument("--n", type=int, default=None)
    bench.add_argument("--p", type=int, default=None)
    bench.add_argument("--case", choices=["case1_set1", "case1_set2", "case2"], default=None)
    bench.add_argument("--placement", choices=["uniform", "leading_block"], default=None)
    bench.add_argument("--sigma", type=float, default=None)
    bench.add_argument("--n-iter", type=int, default=None)
    bench.add_argument("--burn-in", type=int, default=None)
    bench.add_argument("--thin", type=int, default=None)
    bench.add_argument("--skip-failures", action="store_true")
    bench.add_argument("--out-dir", default=".")
    bench.set_defaults(handler=_cmd_bench)

    met = sub.add_parser("metrics", help="score a selected support against the truth")
    met.add_argument("--estimate", required=True,
                     help="CSV of selected indices (one per line)")
    met.add_argument("--truth", required=True, help="true coefficient vector CSV")
    met.add_argument("--out-dir", default=".")
    met.set_defaults(handler=_cmd_metrics)

    rep = sub.add_parser("report", help="export plot-ready figure data from results")
    rep.add_argument("--results", required=True,
                     help="directory holding bench/cd/fit outputs")
    rep.add_argument("--out-dir", default=".")
    rep.set_defaults(handler=_cmd_report)
    return parser


# ---------------------------------------------------------------- subcommands

def _cmd_fit(args):
    out = _ensure_out_dir(args.out_dir)
    data = load_csv(args.x, args.y, standardize=args.standardize)
    config = McmcConfig(
        n_iter=args.n_iter, burn_in=args.burn_in, thin=args.thin,
        seed=args.seed, retain_draws=args.retain_draws,
    )
    summary = gibbs_fit(data, config)
    outputs = []
    beta_path = out / "beta_mean.csv"
    _write_csv(beta_path, ["beta_mean"], ((v,) for v in summary.beta_mean))
    outputs.append(beta_path)
    if summary.draws is not None:
        draws_path = out / "draws.csv"
        _write_csv(
            draws_path,
            [f"beta_{j}" for j in range(data.p)],
            (tuple(row) for row in summary.draws),
        )
        outputs.append(draws_path)
    summary_path = out / "fit_summary.json"
    summary_path.write_text(
        json.dumps(
            {
                "n": data.n,
                "p": data.p,
                "standardized": data.standardized,
                "sigma_mean": summary.sigma_mean,
                "clamp_events": summary.clamp_events,
                "retained_draws": int(summary.draws.shape[0]) if summary.draws is not None
                else (config.n_iter - config.burn_in) // config.thin,
            },
            indent=2, sort_keys=True,
        ) + "\n",
        encoding="utf-8",
    )
    outputs.append(summary_path)
    snapshot = {
        "x": str(args.x), "y": str(args.y), "standardize": args.standardize,
        "mcmc": dataclasses.asdict(config),
    }
    return outputs, snapshot, [args.seed]


def _cmd_select(args):
    out = _ensure_out_dir(args.out_dir)
    beta_hat = _read_vector(args.beta, "point estimate")
    if args.design is not None:
        norms = column_sq_norms(_read_matrix(args.design, "design"))
    else:
        norms = _read_vector(args.norms, "column norms")
    est = savs(beta_hat, norms, kappa=args.kappa)
    outputs = []
    star_path = out / "beta_star.csv"
    _write_csv(star_path, ["beta_star"], ((v,) for v in est.beta_star))
    outputs.append(star_path)
    support_path = out / "support.csv"
    _write_csv(
        support_path,
        ["index", "beta_hat", "mu", "beta_star"],
        ((j, beta_hat[j], est.mu[j], est.beta_star[j]) for j in sorted(est.support)),
    )
    outputs.append(support_path)
    snapshot = {
        "beta": str(args.beta), "design": args.design, "norms": args.norms,
        "kappa": args.kappa,
    }
    return outputs, snapshot, []


def _cmd_cd(args):
    out = _ensure_out_dir(args.out_dir)
    beta_hat = _read_vector(args.beta, "point estimate")
    X = _read_matrix(args.design, "design")
    y_placeholder = np.zeros(X.shape[0])  # the objective never reads the response
    data = RegressionData.from_arrays(X, y_placeholder)
    if beta_hat.shape[0] != data.p:
        raise DataError(
            f"point estimate has {beta_hat.shape[0]} entries but design has p={data.p}"
        )
    if args.mu == "savs":
        mu = adaptive_penalties(beta_hat)
    else:
        mu = _read_vector(args.mu, "penalties")
    initial = objective(beta_hat, beta_hat, data, mu)
    trace = coordinate_descent(
        beta_hat, data, mu, mode=args.mode,
        max_iter=args.max_iter, rel_tol=args.rel_tol,
    )
    outputs = []
    sol_path = out / "solution.csv"
    _write_csv(sol_path, ["solution"], ((v,) for v in trace.solution))
    outputs.append(sol_path)
    trace_path = out / "trace.csv"
    rows = [(0, initial)] + [
        (i + 1, q) for i, q in enumerate(trace.objective_per_iteration)
    ]
    _write_csv(trace_path, ["pass", "objective"], rows)
    outputs.append(trace_path)
    snapshot = {
        "beta": str(args.beta), "design": str(args.design), "mode": args.mode,
        "max_iter": args.max_iter, "rel_tol": args.rel_tol, "mu": str(args.mu),
        "converged": trace.converged, "iterations_run": trace.iterations_run,
    }
    return outputs, snapshot, []


def _cmd_bench(args):
    out = _ensure_out_dir(args.out_dir)
    config = _resolve_bench_config(args)
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("SAVSKIT_WORKERS", "1"))
    report = run_replicates(config, workers=workers)
    outputs = []
    results_path = out / "results.csv"
    s = report.summary
    _write_csv(
        results_path,
        ["method", "design", "rho", "n", "p", "case",
         "Prop", "MCC_mean", "MCC_sd", "TPR_mean", "TPR_sd", "TNR_mean", "TNR_sd"],
        [(
            "SAVS", config.design.kind,
            "" if config.design.rho is None else config.design.rho,
            config.design.n, config.design.p, config.signal.case,
            s.prop, s.mcc_mean, s.mcc_sd, s.tpr_mean, s.tpr_sd, s.tnr_mean, s.tnr_sd,
        )],
    )
    outputs.append(results_path)
    jsonl_path = out / "replicates.jsonl"
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for rec in report.records:
            m = rec.metrics
            fh.write(json.dumps({
                "replicate": rec.replicate,
                "design": config.design.kind,
                "rho": config.design.rho,
                "n": config.design.n,
                "p": config.design.p,
                "case": config.signal.case,
                "mcmc_seed": rec.mcmc_seed,
                "tp": m.tp, "tn": m.tn, "fp": m.fp, "fn": m.fn,
                "mcc": m.mcc, "tpr": m.tpr, "tnr": m.tnr,
                "exact_model": m.exact_model,
                "selected_size": rec.selected_size,
                "true_support": list(rec.true_support),
                "selected_support": list(rec.selected_support),
            }, sort_keys=True) + "\n")
        for r, msg in report.failures:
            fh.write(json.dumps({"replicate": r, "failed": True, "error": msg},
                                sort_keys=True) + "\n")
    outputs.append(jsonl_path)
    snapshot = {
        "design": dataclasses.asdict(config.design),
        "signal": dataclasses.asdict(config.signal),
        "sigma": config.sigma,
        "replicates": config.replicates,
        "mcmc": dataclasses.asdict(config.mcmc),
        "master_seed": config.master_seed,
        "skip_failures": config.skip_failures,
        "profile": args.profile,
        "workers": workers,
    }
    seeds = [config.master_seed] + [
        replicate_seeds(config.master_seed, r)[1] for r in range(config.replicates)
    ]
    return outputs, snapshot, seeds


def _cmd_metrics(args):
    out = _ensure_out_dir(args.out_dir)
    beta_true = _read_vector(args.truth, "true coefficients")
    truth = TruthSpec.from_beta(beta_true)
    est_raw = _read_vector(args.estimate, "estimated support")
    selected = set()
    for v in est_raw:
        if v != int(v) or not 0 <= int(v) < truth.beta0.shape[0]:
            raise DataError(
                f"estimated support entries must be integer indices in "
                f"[0, {truth.beta0.shape[0]}), got {v}"
            )
        selected.add(int(v))
    tp = len(selected & truth.support)
    fp = len(selected - truth.support)
    fn = len(truth.support - selected)
    tn = truth.beta0.shape[0] - tp - fp - fn
    m = from_counts(tp=tp, tn=tn, fp=fp, fn=fn)
    record = {
        "tp": m.tp, "tn": m.tn, "fp": m.fp, "fn": m.fn,
        "mcc": m.mcc, "tpr": m.tpr, "tnr": m.tnr, "exact_model": m.exact_model,
    }
    outputs = []
    json_path = out / "metrics.json"
    json_path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    outputs.append(json_path)
    csv_path = out / "metrics.csv"
    _write_csv(
        csv_path,
        ["tp", "tn", "fp", "fn", "mcc", "tpr", "tnr", "exact_model"],
        [(m.tp, m.tn, m.fp, m.fn, m.mcc, m.tpr, m.tnr, m.exact_model)],
    )
    outputs.append(csv_path)
    snapshot = {"estimate": str(args.estimate), "truth": str(args.truth)}
    return outputs, snapshot, []


def _cmd_report(args):
    out = _ensure_out_dir(args.out_dir)
    results = Path(args.results)
    if not results.is_dir():
        raise DataError(f"results path {results} is not a directory")
    outputs = []

    jsonl = results / "replicates.jsonl"
    if jsonl.exists():
        rows = []
        for line in jsonl.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec.get("failed"):
                continue
            rows.append((
                rec["design"], "" if rec.get("rho") is None else rec["rho"],
                rec["n"], rec["p"], rec["case"], rec["replicate"], rec["mcc"],
            ))
        if not rows:
            raise DataError(f"{jsonl}: no successful replicate rows")
        box_path = out / "boxplot_mcc.csv"
        _write_csv(box_path, ["design", "rho", "n", "p", "case", "replicate", "mcc"], rows)
        outputs.append(box_path)

    trace = results / "trace.csv"
    if trace.exists():
        passes, objectives = _read_trace(trace)
        drops = np.diff(objectives)
        if np.any(drops > 1e-9 * np.maximum(np.abs(objectives[:-1]), 1.0)):
            raise DataError(f"{trace}: objective column is not non-increasing")
        trace_path = out / "objective_trace.csv"
        _write_csv(trace_path, ["pass", "objective"],
                   zip(passes.astype(int), objectives))
        outputs.append(trace_path)

    beta_mean = results / "beta_mean.csv"
    if beta_mean.exists():
        bm = _read_vector(beta_mean, "posterior mean")
        truth_path = results / "beta_true.csv"
        if truth_path.exists():
            bt = _read_vector(truth_path, "true coefficients")
            if bt.shape != bm.shape:
                raise DataError(
                    f"beta_true.csv has {bt.shape[0]} entries, beta_mean.csv has {bm.shape[0]}"
                )
            idx = np.flatnonzero(bt == 0.0)
        else:
            idx = np.arange(bm.shape[0])
        null_path = out / "null_magnitudes.csv"
        _write_csv(null_path, ["index", "abs_beta_mean"],
                   ((int(j), abs(bm[j])) for j in idx))
        outputs.append(null_path)

    if not outputs:
        raise DataError(
            f"no recognized result files in {results} "
            "(looked for replicates.jsonl, trace.csv, beta_mean.csv)"
        )
    snapshot = {"results": str(results)}
    return outputs, snapshot, []


# ------------------------------------------------------------------- plumbing

def _resolve_bench_config(args) -> BenchConfig:
    values = {
        "kind": "independent", "rho": None, "n": 200, "p": 500,
        "case": "case2", "placement": "uniform",
        "sigma": 1.5, "master_seed": 0, "skip_failures": False,
    }
    values.update(PROFILES[args.profile])
    if args.config is not None:
        values.update(_read_config_file(args.config))
    cli_overrides = {
        "kind": args.design_kind, "rho": args.rho, "n": args.n, "p": args.p,
        "case": args.case, "placement": args.placement, "sigma": args.sigma,
        "replicates": args.replicates, "master_seed": args.seed,
        "n_iter": args.n_iter, "burn_in": args.burn_in, "thin": args.thin,
    }
    values.update({k: v for k, v in cli_overrides.items() if v is not None})
    if args.skip_failures:
        values["skip_failures"] = True
    if values["kind"] != "ar1":
        values["rho"] = None
    design = DesignSpec(kind=values["kind"], n=values["n"], p=values["p"], rho=values["rho"])
    signal = SignalSpec(case=values["case"], placement=values["placement"])
    mcmc = McmcConfig(n_iter=values["n_iter"], burn_in=values["burn_in"], thin=values["thin"])
    return BenchConfig(
        design=design, signal=signal, sigma=values["sigma"],
        replicates=values["replicates"], mcmc=mcmc,
        master_seed=values["master_seed"], skip_failures=values["skip_failures"],
    )


_CONFIG_SCHEMA = {
    "design": {"kind": str, "n": int, "p": int, "rho": float},
    "signal": {"case": str, "placement": str},
    "bench": {"sigma": float, "replicates": int, "master_seed": int, "skip_failures": bool},
    "mcmc": {"n_iter": int, "burn_in": int, "thin": int},
}


def _read_config_file(path) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: malformed config file: {exc}") from exc
    values: dict = {}
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise ConfigError(f"{path}: unknown config section [{section}]")
        schema = _CONFIG_SCHEMA[section]
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(f"{path}: unknown key {key!r} in section [{section}]")
            kind = schema[key]
            try:
                if kind is bool:
                    values[key] = raw.strip().lower() in ("1", "true", "yes", "on")
                else:
                    values[key] = kind(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"{path}: key {key!r} in [{section}] expects {kind.__name__}, got {raw!r}"
                ) from exc
    return values


def _ensure_out_dir(out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return CSV_FLOAT_FMT % value
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(v) for v in row) + "\n")


def _read_matrix(path, what: str) -> np.ndarray:
    from .data import _read_csv_matrix

    if not Path(path).exists():
        raise DataError(f"{what} file not found: {path}")
    return _read_csv_matrix(path)


def _read_vector(path, what: str) -> np.ndarray:
    mat = _read_matrix(path, what)
    if mat.shape[1] != 1:
        raise DataError(f"{path}: expected a single-column CSV for {what}, "
                        f"found {mat.shape[1]} columns")
    return mat[:, 0]


def _read_trace(path) -> tuple[np.ndarray, np.ndarray]:
    mat = _read_matrix(path, "objective trace")
    if mat.shape[1] != 2:
        raise DataError(f"{path}: expected two columns (pass, objective)")
    return mat[:, 0], mat[:, 1]


def _utcnow() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _fail(code: int, category: str, exc: Exception) -> int:
    message = " ".join(str(exc).split())
    sys.stderr.write(
        json.dumps({"error": category, "code": code, "message": message}) + "\n"
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
