"""Command-line front end.

    bergproj <subcommand> [--weight SPEC] [options]

Exit status: 0 when every check run by the subcommand passes, 2 when a
check fails, 1 on usage or configuration errors.  Output goes to ``--out``,
else to ``$BERGPROJ_OUT_DIR/<subcommand>.<format>`` when that variable is
set, else to stdout.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import acceptance
from ._io import dumps, to_csv
from .analysis import AnalysisError, CrossValidationError, bv_report, lemma_limits, limit_convergence, opnorm_experiment, richardson, sn_experiment
from .funcspace import DEFAULT_K, DEFAULT_R, FunctionSpecError, make_grid, sample
from .kernel import KernelError, eval_kernel_closed, eval_kernel_series, kernel_series, truncation_degree
from .moments import QuadratureError, moment_table
from .projector import ProjectionError, default_degree, multiplier_seq, project, project_via_identity
from .weights import WeightError, WeightSpec, parse_weight

SUBCOMMANDS = ("moments", "coeffs", "kernel", "project", "identity-check",
               "bv", "limits", "opnorm", "sn", "report")
OUT_DIR_ENV = "BERGPROJ_OUT_DIR"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    weight: str = "alpha=0;M=one"
    alpha: float | None = None
    n_max: int | None = None
    R: int = DEFAULT_R
    K: int = DEFAULT_K
    p: list[float] = field(default_factory=list)
    tol: float | None = None
    format: str = "json"
    out: str | None = None
    precision: str = "double"
    fn: list[str] = field(default_factory=list)
    z: list[str] = field(default_factory=list)
    w: list[str] = field(default_factory=list)
    degree: int | None = None
    ns: list[int] = field(default_factory=list)

    def validate(self):
        if self.R < 8:
            raise ConfigError("R must be >= 8")
        if self.K < 4 or self.K & (self.K - 1):
            raise ConfigError("K must be a power of two >= 4")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tolerances must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.precision not in ("double", "extended"):
            raise ConfigError("precision must be double or extended")

    def weight_spec(self) -> WeightSpec:
        w = parse_weight(self.weight)
        if self.alpha is not None:
            w = WeightSpec(float(self.alpha), w.form, w.params)
        return w


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _csv_floats(text):
    return [float(x) for x in text.split(",") if x]


def _csv_ints(text):
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--weight", help='e.g. "alpha=0;M=poly-r2:2,-1"')
    common.add_argument("--alpha", type=float, help="override the exponent of --weight")
    common.add_argument("--n-max", dest="n_max", type=int)
    common.add_argument("--R", type=int, help="radial grid nodes")
    common.add_argument("--K", type=int, help="angular grid nodes (power of two)")
    common.add_argument("--p", type=_csv_floats, help="comma-separated exponents")
    common.add_argument("--tol", type=float, help="tolerance of the subcommand's check")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out")
    common.add_argument("--precision", choices=("double", "extended"))
    common.add_argument("--fn", action="append", help="function spec (repeatable)")
    common.add_argument("--z", action="append", help="complex point, e.g. 0.3+0.1j (repeatable)")
    common.add_argument("--w", action="append", help="complex point paired with --z")
    common.add_argument("--degree", type=int, help="truncation degree N of projections")
    common.add_argument("--ns", type=_csv_ints, help="comma-separated indices n")

    parser = _Parser(prog="bergproj", description="Weighted Bergman projections on the disc.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < config file < flags."""
    cfg = RunConfig()
    names = {f.name for f in dataclasses.fields(RunConfig)}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        unknown = set(doc) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = dataclasses.replace(cfg, **doc)
    flags = {k: v for k, v in vars(args).items() if k in names and v is not None}
    cfg = dataclasses.replace(cfg, **flags)
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# subcommands: each returns (header, rows, document, passed)
# --------------------------------------------------------------------------


def cmd_moments(cfg: RunConfig):
    w = cfg.weight_spec()
    tol = cfg.tol or 1e-12
    tab = moment_table(w, cfg.n_max if cfg.n_max is not None else 16, precision=cfg.precision)
    I = tab.I
    passed = bool(np.all(I > 0) and np.all(np.diff(I) < 0) and np.all(tab.err <= tol * I))
    rows = [[n, float(I[n]), float(tab.err[n]), int(tab.orders[n])] for n in range(len(I))]
    doc = tab.to_dict()
    doc["pass"] = passed
    return ["n", "I_n", "err_n", "order"], rows, doc, passed


def cmd_coeffs(cfg: RunConfig):
    w = cfg.weight_spec()
    n_max = cfg.n_max if cfg.n_max is not None else 16
    tab = moment_table(w, n_max, precision=cfg.precision)
    ms = multiplier_seq(w, n_max, precision=cfg.precision)
    coeffs = tab.bergman()
    passed = bool(np.all(coeffs > 0))
    rows = [[n, float(coeffs[n]), float(ms.t[n])] for n in range(n_max + 1)]
    doc = {"weight": w.spec_string(), "n_max": n_max, "coeffs": coeffs.tolist(),
           "multiplier": ms.t.tolist(), "pass": passed}
    return ["n", "coeff", "t_n"], rows, doc, passed


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"not a complex number: {text!r}") from exc


def cmd_kernel(cfg: RunConfig):
    w = cfg.weight_spec()
    tol = cfg.tol or 1e-10
    zs = [_complex(z) for z in (cfg.z or ["0"])]
    ws = [_complex(v) for v in (cfg.w or ["0"])]
    if len(zs) != len(ws):
        raise ConfigError("--z and --w must be given the same number of times")
    scale = 1.0 / w.validation_bounds()[0]
    rows, records, passed = [], [], True
    for z, v in zip(zs, ws):
        N = truncation_degree(w.alpha, abs(z) * abs(v), tol, scale=scale)
        val = eval_kernel_series(kernel_series(w, N), z, v)
        closed = eval_kernel_closed(w.alpha, z, v) if w.is_lambda else None
        if closed is not None:
            abs_err = abs(val - closed)
            rel_err = abs_err / abs(closed)
            passed &= abs_err <= 2 * tol + 1e-14 * abs(closed)
        else:
            abs_err = rel_err = math.nan
        rows.append([z.real, z.imag, v.real, v.imag, val.real, val.imag,
                     closed.real if closed is not None else math.nan,
                     closed.imag if closed is not None else math.nan, abs_err, rel_err, N])
        records.append({"z": [z.real, z.imag], "w": [v.real, v.imag], "N": N,
                        "series": [val.real, val.imag],
                        "closed": None if closed is None else [closed.real, closed.imag],
                        "abs_err": abs_err, "rel_err": rel_err})
    header = ["z_re", "z_im", "w_re", "w_im", "series_re", "series_im",
              "closed_re", "closed_im", "abs_err", "rel_err", "N"]
    return header, rows, {"weight": w.spec_string(), "tol": tol, "rows": records, "pass": passed}, passed


def _grid_fn(cfg: RunConfig, w: WeightSpec):
    if len(cfg.fn) != 1:
        raise ConfigError("give exactly one --fn")
    f = sample(cfg.fn[0], make_grid(w.alpha, cfg.R, cfg.K))
    N = cfg.degree if cfg.degree is not None else default_degree(f)
    return f, N


def cmd_project(cfg: RunConfig):
    w = cfg.weight_spec()
    f, N = _grid_fn(cfg, w)
    c = project(f, w, N)
    rows = [[n, float(x.real), float(x.imag)] for n, x in enumerate(c.coeffs)]
    doc = {"weight": w.spec_string(), "fn": cfg.fn[0], "N": N, "coeffs": c.to_pairs(), "pass": True}
    return ["n", "re", "im"], rows, doc, True


def cmd_identity(cfg: RunConfig):
    w = cfg.weight_spec()
    f, N = _grid_fn(cfg, w)
    tol = cfg.tol or 1e-8
    direct = project(f, w, N)
    via = project_via_identity(f, w, N)
    residual = float(np.max(np.abs(direct.coeffs - via.coeffs)))
    passed = residual <= tol
    rows = [[n, float(a.real), float(a.imag), float(b.real), float(b.imag)]
            for n, (a, b) in enumerate(zip(direct.coeffs, via.coeffs))]
    doc = {"weight": w.spec_string(), "fn": cfg.fn[0], "N": N, "direct": direct.to_pairs(),
           "identity": via.to_pairs(), "residual": residual, "tol": tol, "pass": passed}
    return ["n", "direct_re", "direct_im", "identity_re", "identity_im"], rows, doc, passed


def cmd_bv(cfg: RunConfig):
    w = cfg.weight_spec()
    rep = bv_report(w, n_max=cfg.n_max or 2000, precision=cfg.precision)
    dinf = rep.predicted[2]
    bound = 2 * (abs(dinf) + 1)
    checks = {
        "sup_scaled_finite": math.isfinite(rep.sup_scaled),
        "scaled_difference_bound": rep.sup_scaled <= bound,
        "overlap_agreement": rep.overlap_discrepancy <= 1e-6,
    }
    passed = all(checks.values())
    doc = rep.summary()
    doc["empirical_bound"] = bound
    doc["checks"] = checks
    doc["pass"] = passed
    n = np.arange(1, rep.n_max + 1)
    rows = [[0, float(rep.t[0]), math.nan, math.nan]] + [
        [int(k), float(rep.t[k]), float(d), float(k * k * d)] for k, d in zip(n, rep.deltas)
    ]
    return ["n", "t_n", "delta", "scaled_delta"], rows, doc, passed


def cmd_limits(cfg: RunConfig):
    w = cfg.weight_spec()
    ns = sorted(cfg.ns or [256, 512, 1024, 2048, 4096])
    tol = cfg.tol or 0.01
    L12, L34, dinf = lemma_limits(w)
    rows = limit_convergence(w, None, ns, precision=cfg.precision)
    passed = all(math.isfinite(v) for r in rows for v in r.values())
    observed = {}
    if len(rows) >= 2 and rows[-1]["n"] == 2 * rows[-2]["n"]:
        full, half = rows[-1], rows[-2]
        observed = {"ratio12_extrapolated": richardson(full["ratio12"], half["ratio12"]),
                    "ratio34_extrapolated": richardson(full["ratio34"], half["ratio34"])}
        for key, target in (("ratio12_extrapolated", L12), ("ratio34_extrapolated", L34)):
            err = abs(observed[key] - target) / max(abs(target), 1e-300)
            ok = err <= tol if target != 0 else abs(observed[key]) <= tol
            observed[key.replace("extrapolated", "ok")] = ok
            passed &= ok
    doc = {"weight": w.spec_string(), "alpha": w.alpha,
           "predicted": {"t_limit": 1 / float(w.M_u(1.0)), "L12": L12, "L34": L34, "delta_inf": dinf},
           "observed": observed, "rows": rows, "tol": tol, "pass": passed}
    table = [[r["n"], r["t"], r["scaled_delta"], r["ratio12"], r["ratio34"]] for r in rows]
    return ["n", "t_n", "scaled_delta", "ratio12", "ratio34"], table, doc, passed


def cmd_opnorm(cfg: RunConfig):
    w = cfg.weight_spec()
    ps = cfg.p or [1.5, 2.0, 3.0, 4.0]
    runs, rows, passed = [], [], True
    for p in ps:
        battery = cfg.fn or acceptance.opnorm_battery(p, w.alpha)
        res = opnorm_experiment(w, p, battery, N=cfg.degree, R=cfg.R, K=cfg.K)
        for r in res["rows"]:
            passed &= math.isfinite(r["ratio"])
            rows.append([p, r["fn"], r["norm_f"], r["norm_Pf"], r["ratio"]])
        runs.append(res)
    doc = {"weight": w.spec_string(), "runs": runs, "pass": passed}
    return ["p", "fn", "norm_f", "norm_Pf", "ratio"], rows, doc, passed


def cmd_sn(cfg: RunConfig):
    w = cfg.weight_spec()
    fn = cfg.fn[0] if cfg.fn else "logsing"
    ps = cfg.p or [2.0]
    n_max = cfg.n_max or 256
    rows, runs, passed = [], [], True
    for p in ps:
        res = sn_experiment(w, p, fn, n_max, R=cfg.R, K=cfg.K)
        for r in res:
            passed &= math.isfinite(r["ratio"]) and math.isfinite(r["error"])
            rows.append([p, r["N"], r["ratio"], r["error"]])
        runs.append({"p": p, "rows": res})
    doc = {"weight": w.spec_string(), "fn": fn, "runs": runs, "pass": passed}
    return ["p", "N", "ratio", "error"], rows, doc, passed


def cmd_report(cfg: RunConfig):
    results = acceptance.run_all(echo=lambda line: print(line, file=sys.stderr))
    passed = all(r.passed for r in results)
    doc = {"criteria": [{"name": r.name, "pass": r.passed, "detail": r.detail} for r in results],
           "pass": passed}
    rows = [[r.name, "pass" if r.passed else "fail"] for r in results]
    return ["criterion", "result"], rows, doc, passed


COMMANDS = {
    "moments": cmd_moments,
    "coeffs": cmd_coeffs,
    "kernel": cmd_kernel,
    "project": cmd_project,
    "identity-check": cmd_identity,
    "bv": cmd_bv,
    "limits": cmd_limits,
    "opnorm": cmd_opnorm,
    "sn": cmd_sn,
    "report": cmd_report,
}


def _destination(cfg: RunConfig, command: str) -> str | None:
    out_dir = os.environ.get(OUT_DIR_ENV)
    if cfg.out:
        if out_dir and not os.path.isabs(cfg.out):
            return os.path.join(out_dir, cfg.out)
        return cfg.out
    if out_dir:
        return os.path.join(out_dir, f"{command}.{cfg.format}")
    return None


def run(command: str, cfg: RunConfig) -> int:
    try:
        header, rows, doc, passed = COMMANDS[command](cfg)
    except CrossValidationError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, WeightError, FunctionSpecError, KernelError, ProjectionError,
            QuadratureError, AnalysisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = to_csv(header, rows) if cfg.format == "csv" else dumps(doc) + "\n"
    dest = _destination(cfg, command)
    if dest is None:
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(dest)), exist_ok=True)
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0 if passed else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
