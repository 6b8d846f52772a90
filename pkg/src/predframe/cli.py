"""Command-line frontend: CSV ingestion, JSON/CSV report emission, and
subcommands for every library operation.

Exit codes: 0 on success, 1 on domain errors (bad data, invalid parameters,
estimation failures), 2 on usage errors.  Structured results are JSON with a
top-level ``schema_version``; series and tables are CSV.  Floating-point
output uses 17 significant digits so a written series reloads losslessly.
The ``PREDFRAME_SEED`` environment variable supplies a fallback seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import PredframeError, SeriesParseError, UnsupportedModelError
from .estimation import OptimizerConfig, estimate
from .intervals import (
    Scheme,
    ci_naive_plugin,
    ci_sample_split,
    ci_two_process,
    make_split_plan,
)
from .mc import (
    ExperimentConfig,
    gradient_check,
    run_coverage,
    truncation_decay,
)
from .models import (
    AR1Params,
    ARMA11Params,
    GARCH11Params,
    Innovations,
    ModelKind,
    Series,
    TGARCH11Params,
    simulate,
    stationarity_margin,
)
from .prediction import (
    RiskLevel,
    Truncation,
    conditional_es,
    conditional_var,
    evaluate_prediction,
)

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def load_series(path: str, column: str = "x") -> Series:
    """Read a CSV with header ``t,x``: t strictly increasing by 1, x decimal."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise SeriesParseError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise SeriesParseError(f"{path} is empty")
    header = [h.strip() for h in lines[0].split(",")]
    if "t" not in header or column not in header:
        raise SeriesParseError(f"header must contain 't' and '{column}'", line=1)
    t_idx, x_idx = header.index("t"), header.index(column)
    values: list[float] = []
    prev_t: int | None = None
    t0 = 1
    for lineno, line in enumerate(lines[1:], start=2):
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(header):
            raise SeriesParseError("wrong number of fields", line=lineno)
        try:
            t_val = int(fields[t_idx])
        except ValueError:
            raise SeriesParseError(f"non-integer time index {fields[t_idx]!r}", line=lineno)
        try:
            x_val = float(fields[x_idx])
        except ValueError:
            raise SeriesParseError(f"non-numeric value {fields[x_idx]!r}", line=lineno)
        if prev_t is None:
            t0 = t_val
        elif t_val != prev_t + 1:
            raise SeriesParseError(
                f"time index jumps from {prev_t} to {t_val}", line=lineno
            )
        prev_t = t_val
        values.append(x_val)
    if not values:
        raise SeriesParseError(f"{path} has a header but no observations")
    try:
        return Series(np.array(values), t0=t0)
    except ValueError as exc:
        raise SeriesParseError(str(exc)) from exc


def write_series(series: Series, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,x\n")
        for offset, value in enumerate(series.values):
            fh.write(f"{series.t0 + offset},{_fmt(value)}\n")


def _write_json(payload: dict, path: str | None) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    text = json.dumps(payload, indent=2, allow_nan=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("PREDFRAME_SEED")
    if env is not None:
        return int(env)
    return 0


_PARAM_FLAGS = {
    ModelKind.AR1: ("beta",),
    ModelKind.ARMA11: ("omega", "alpha", "beta"),
    ModelKind.GARCH11: ("omega", "alpha", "beta"),
    ModelKind.TGARCH11: ("omega", "alpha_plus", "alpha_minus", "beta"),
}


def _params_from_args(args):
    kind = ModelKind(args.model)
    vals = []
    for name in _PARAM_FLAGS[kind]:
        v = getattr(args, name, None)
        if v is None:
            raise PredframeError(f"--{name.replace('_', '-')} is required for {kind.value}")
        vals.append(float(v))
    cls = {
        ModelKind.AR1: AR1Params,
        ModelKind.ARMA11: ARMA11Params,
        ModelKind.GARCH11: GARCH11Params,
        ModelKind.TGARCH11: TGARCH11Params,
    }[kind]
    return cls(*vals)


def _innovations_from_args(args) -> Innovations:
    law = getattr(args, "innov", "normal")
    sigma = float(getattr(args, "sigma_eps", 1.0))
    if law == "normal":
        return Innovations.std_normal(sigma_eps=sigma)
    if law == "student-t":
        nu = getattr(args, "nu", None)
        if nu is None:
            raise PredframeError("--nu is required with --innov student-t")
        return Innovations.std_student_t(float(nu), sigma_eps=sigma)
    raise PredframeError(f"unknown innovation law {law!r}")


def _optimizer_from_args(args) -> OptimizerConfig:
    return OptimizerConfig(
        max_iters=int(getattr(args, "max_iters", 500)),
        tol=float(getattr(args, "tol", 1e-8)),
        restarts=int(getattr(args, "restarts", 3)),
    )


def _estimation_payload(fit) -> dict:
    theta = fit.theta_hat
    payload = {
        "model": theta.kind.value,
        "theta_hat": {name: getattr(theta, name) for name in theta.names},
        "upsilon_hat": fit.upsilon_hat.tolist(),
        "objective": fit.objective,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "clamped": fit.clamped,
    }
    if fit.sigma_eps2_hat is not None:
        payload["sigma_eps2_hat"] = fit.sigma_eps2_hat
    if fit.kurtosis_hat is not None:
        payload["kurtosis_hat"] = fit.kurtosis_hat
    return payload


def _interval_payload(ci) -> dict:
    payload = {
        "center": ci.center,
        "lower": ci.lower,
        "upper": ci.upper,
        "half_width": ci.half_width,
        "v_hat": ci.v_hat,
        "scale": ci.scale,
        "level": ci.level,
        "scheme": ci.scheme.value,
        "clamped": ci.clamped,
    }
    if ci.plan is not None:
        payload["T_E"] = ci.plan.T_E
        payload["T_P"] = ci.plan.T_P
    return payload


def _cmd_simulate(args) -> int:
    theta = _params_from_args(args)
    innov = _innovations_from_args(args)
    series = simulate(theta, innov, args.T, burn_in=args.burn_in, seed=_seed(args))
    write_series(series, args.out)
    return 0


def _cmd_estimate(args) -> int:
    series = load_series(args.infile)
    fit = estimate(ModelKind(args.model), series, _optimizer_from_args(args))
    _write_json(_estimation_payload(fit), args.out)
    return 0


def _cmd_predict(args) -> int:
    theta = _params_from_args(args)
    series = load_series(args.infile)
    ev = evaluate_prediction(theta, series, Truncation(args.t1))
    _write_json(
        {
            "model": theta.kind.value,
            "value": ev.value,
            "gradient": ev.gradient.tolist(),
            "hessian": ev.hessian.tolist(),
            "tail_mass": ev.tail_mass,
        },
        args.out,
    )
    return 0


def _cmd_ci(args) -> int:
    kind = ModelKind(args.model)
    series = load_series(args.infile)
    cfg = _optimizer_from_args(args)
    scheme = Scheme(args.scheme)
    if scheme is Scheme.TWO_PROCESS:
        if not args.pred_in:
            raise PredframeError("--pred-in is required for the 2ip scheme")
        pred = load_series(args.pred_in)
        ci = ci_two_process(kind, series, pred, Truncation(args.t1), args.level, cfg)
    elif scheme is Scheme.SAMPLE_SPLIT:
        plan = make_split_plan(len(series), args.a, args.b)
        ci = ci_sample_split(kind, series, plan, args.level, cfg)
    else:
        ci = ci_naive_plugin(kind, series, Truncation(args.t1), args.level, cfg)
    _write_json(_interval_payload(ci), args.out)
    return 0


def _write_decay_csv(rows, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t1,gap\n")
        for t1, gap in rows:
            fh.write(f"{t1},{_fmt(gap)}\n")


def _cmd_coverage(args) -> int:
    theta = _params_from_args(args)
    cfg = ExperimentConfig(
        kind=ModelKind(args.model),
        theta0=theta,
        innov=_innovations_from_args(args),
        T=args.T,
        reps=args.reps,
        seed=_seed(args),
        schemes=tuple(s.strip() for s in args.schemes.split(",")),
        level=args.level,
        a_exp=args.a,
        b_exp=args.b,
        t1=args.t1,
        burn_in=args.burn_in,
        exclude_clamped=args.exclude_clamped,
        optimizer=_optimizer_from_args(args),
    )
    report = run_coverage(cfg, jobs=args.jobs)
    payload = report.to_dict()
    payload["diagnostics"]["decay_table"] = [
        {"t1": t1, "gap": gap} for t1, gap in payload["diagnostics"]["decay_table"]
    ]
    if args.table_out:
        cols = ("coverage", "avg_half_width", "reps_used", "failures", "covered",
                "clamped")
        with open(args.table_out, "w", encoding="utf-8") as fh:
            fh.write("scheme," + ",".join(cols) + "\n")
            for name, cell in payload["schemes"].items():
                fh.write(name + "," + ",".join(_fmt(cell[c]) if isinstance(cell[c], float)
                         else str(cell[c]) for c in cols) + "\n")
    _write_json(payload, args.out)
    return 0


def _cmd_check(args) -> int:
    theta = _params_from_args(args)
    if args.infile:
        series = load_series(args.infile)
    else:
        series = simulate(
            theta, _innovations_from_args(args), args.T, burn_in=args.burn_in,
            seed=_seed(args),
        )
    grid = (
        [int(v) for v in args.t1_grid.split(",")]
        if args.t1_grid
        else sorted({max(1, len(series) // 4), max(1, len(series) // 2),
                     max(1, 3 * len(series) // 4)})
    )
    decay = truncation_decay(theta, series, grid)
    payload = {
        "model": theta.kind.value,
        "gradient_check_max_err": gradient_check(theta, series, Truncation(args.t1), args.h),
        "decay_table": [{"t1": t1, "gap": gap} for t1, gap in decay],
    }
    if theta.kind in (ModelKind.GARCH11, ModelKind.TGARCH11):
        payload["stationarity_margin"] = stationarity_margin(
            theta, _innovations_from_args(args), seed=_seed(args)
        )
    if args.decay_out:
        _write_decay_csv(decay, args.decay_out)
    _write_json(payload, args.out)
    return 0


def _cmd_risk(args) -> int:
    kind = ModelKind(args.model)
    if kind is not ModelKind.TGARCH11:
        raise UnsupportedModelError(
            "the conditional VaR/ES mapping is defined for tgarch11 only"
        )
    series = load_series(args.infile)
    cfg = _optimizer_from_args(args)
    fit = estimate(kind, series, cfg)
    theta = fit.theta_hat
    from . import kernels  # residuals need the fitted volatility path

    x = series.values
    sig = kernels.tgarch_filter(
        x, theta.omega, theta.alpha_plus, theta.alpha_minus, theta.beta,
        float(np.sqrt(np.mean(x**2))),
    )
    residuals = x / sig
    risk = RiskLevel.from_residuals(residuals, args.a)
    trunc = Truncation(args.t1)
    _write_json(
        {
            "model": kind.value,
            "a": risk.a,
            "xi_a": risk.xi_a,
            "mu_a": risk.mu_a,
            "psi": evaluate_prediction(theta, series, trunc).value,
            "var": conditional_var(theta, series, trunc, risk.xi_a),
            "es": conditional_es(theta, series, trunc, risk.mu_a),
            "theta_hat": {name: getattr(theta, name) for name in theta.names},
        },
        args.out,
    )
    return 0


def _add_model_flags(p: argparse.ArgumentParser, require_params: bool) -> None:
    p.add_argument("--model", required=True,
                   choices=[k.value for k in ModelKind])
    if require_params:
        p.add_argument("--beta", type=float)
        p.add_argument("--omega", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--alpha-plus", dest="alpha_plus", type=float)
        p.add_argument("--alpha-minus", dest="alpha_minus", type=float)


def _add_innov_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--innov", default="normal", choices=["normal", "student-t"])
    p.add_argument("--nu", type=float)
    p.add_argument("--sigma-eps", dest="sigma_eps", type=float, default=1.0)


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iters", dest="max_iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--restarts", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predframe",
        description="Prediction-function inference for AR/ARMA/GARCH-type models",
    )
    parser.add_argument("--config", help="JSON file of default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a model path to CSV")
    _add_model_flags(p, require_params=True)
    _add_innov_flags(p)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=500)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="fit a model to a CSV series")
    _add_model_flags(p, require_params=False)
    p.add_argument("--in", dest="infile", required=True)
    _add_optimizer_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("predict", help="evaluate the prediction function")
    _add_model_flags(p, require_params=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--t1", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("ci", help="conditional confidence interval")
    _add_model_flags(p, require_params=False)
    p.add_argument("--scheme", required=True, choices=[s.value for s in Scheme])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--pred-in", dest="pred_in", help="prediction series (2ip only)")
    p.add_argument("--level", type=float, default=0.9)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=0.8)
    p.add_argument("--t1", type=int, default=1)
    _add_optimizer_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ci)

    p = sub.add_parser("coverage", help="Monte Carlo coverage experiment")
    _add_model_flags(p, require_params=True)
    _add_innov_flags(p)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--schemes", default="2ip,spl")
    p.add_argument("--level", type=float, default=0.9)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=0.8)
    p.add_argument("--t1", type=int, default=1)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=500)
    p.add_argument("--exclude-clamped", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    _add_optimizer_flags(p)
    p.add_argument("--out")
    p.add_argument("--table-out", dest="table_out",
                   help="also write the per-scheme coverage table as CSV")
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("check", help="derivative and truncation diagnostics")
    _add_model_flags(p, require_params=True)
    _add_innov_flags(p)
    p.add_argument("--in", dest="infile")
    p.add_argument("--T", type=int, default=400)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=500)
    p.add_argument("--seed", type=int)
    p.add_argument("--t1", type=int, default=1)
    p.add_argument("--t1-grid", dest="t1_grid")
    p.add_argument("--h", type=float, default=1e-5)
    p.add_argument("--out")
    p.add_argument("--decay-out", dest="decay_out",
                   help="also write the truncation-decay table as CSV")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("risk", help="conditional VaR/ES for T-GARCH")
    _add_model_flags(p, require_params=False)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--t1", type=int, default=1)
    _add_optimizer_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_risk)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Fold --config JSON values in as defaults; explicit flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        parser.error("--config needs a file path")
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    extra: list[str] = []
    for key, value in config.items():
        flag = "--" + key.replace("_", "-")
        if flag in argv:
            continue
        if isinstance(value, bool):
            if value:
                extra.append(flag)
        else:
            extra.extend([flag, str(value)])
    out = argv[:idx] + argv[idx + 2 :]
    # insert after the subcommand token so argparse scopes them correctly
    return out + extra


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (PredframeError, ValueError, np.linalg.LinAlgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
