"""Command-line frontend: evaluation, verification suites, experiments.

    qdunkl eval       --f monomial --p 1 --n 10 --q 0.9 --mu 1 --grid 0:4:201
    qdunkl verify     gamma|integrals|moments|moduli [--seed 1234 ...]
    qdunkl experiment korovkin|modulus|lipschitz|smooth|second_order|weighted

Configuration comes from defaults, overlaid by --config JSON, overlaid by
flags; the fully resolved configuration is echoed into every output.  Exit
codes: 0 success / all-pass, 1 bound-check failure, 2 config error,
3 numeric error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .dunkl import GammaTable, gamma_classical, gamma_q
from .errors import ConfigError, QDomainError, SeriesOverflowError
from .experiments import (DEFAULT_GRID, WEIGHTED_GRID, ExperimentReport,
                          QnScheme, korovkin_run, rate_bound_lipschitz,
                          rate_bound_modulus, rate_bound_second_order,
                          rate_bound_smooth, rate_bound_weighted,
                          render_report, write_report)
from .functions import make_function
from .moduli import DomainGrid, lipschitz_estimate, modulus, modulus2, weighted_modulus
from .operators import (StancuParams, central_moment_bound, central_moment_exact,
                        eval_T_sweep, lambda_exact, moment_engine, moment_T1,
                        moment_T_bounds, phi_n)
from .qcore import QContext, q_bracket
from .qintegral import QCell, jackson_integral, monomial_cell_integral

EXIT_OK = 0
EXIT_BOUND_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

DEFAULTS = {
    "q": 0.9,
    "mu": 1.0,
    "n": 10,
    "n_list": [10, 25, 50, 100, 200],
    "alpha": 0.0,
    "beta": 0.0,
    "f": "monomial",
    "f_params": {},
    "grid": "0:4:201",
    "tol": 1e-12,
    "format": "csv",
    "out": None,
    "threads": 1,
    "seed": 1234,
    "qn_scheme": {"kind": "one_minus_inv", "offset": 1.0},
    "moments": False,
}


def _parse_grid(spec: str) -> DomainGrid:
    try:
        lo, hi, pts = spec.split(":")
        lo, hi, pts = float(lo), float(hi), int(pts)
    except ValueError:
        raise ConfigError(f"grid must look like '0:4:201', got {spec!r}") from None
    if lo != 0.0:
        raise ConfigError("grids start at 0 (operator domain is [0, inf))")
    return DomainGrid(hi, pts)


def _load_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in ("q", "mu", "n", "alpha", "beta", "f", "grid", "tol", "out",
                "format", "threads", "seed"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "n_list", None):
        cfg["n_list"] = [int(s) for s in args.n_list.split(",")]
    if getattr(args, "p", None) is not None:
        cfg["f_params"] = dict(cfg["f_params"], p=args.p)
    if getattr(args, "moments", False):
        cfg["moments"] = True
    if cfg["threads"] == DEFAULTS["threads"] and os.environ.get("QDUNKL_THREADS"):
        try:
            cfg["threads"] = int(os.environ["QDUNKL_THREADS"])
        except ValueError:
            raise ConfigError(
                f"QDUNKL_THREADS must be an integer, got {os.environ['QDUNKL_THREADS']!r}"
            ) from None
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    return cfg


def _context(cfg) -> QContext:
    try:
        ctx = QContext(q=float(cfg["q"]), mu=float(cfg["mu"]))
    except QDomainError as exc:
        raise ConfigError(str(exc)) from exc
    if ctx.mu_warning:
        print(f"# WARNING: mu={ctx.mu} <= 1/2 lies outside the operators' stated "
              "range (mu > 1/2); proceeding", file=sys.stderr)
    return ctx


def _function(cfg):
    f = make_function(cfg["f"], **cfg.get("f_params", {}))
    if not f.is_nondecreasing:
        print(f"# WARNING: {f.label} is not nondecreasing; cell q-integrals are "
              "formal differences for such f", file=sys.stderr)
    return f


def _emit(report: ExperimentReport, cfg) -> None:
    if cfg["out"]:
        write_report(report, cfg["out"], cfg["format"])
        print(f"wrote {cfg['out']} ({len(report.rows)} rows)")
    else:
        sys.stdout.write(render_report(report, cfg["format"]))


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------

def cmd_eval(args) -> int:
    cfg = _load_config(args)
    ctx = _context(cfg)
    f = _function(cfg)
    grid = _parse_grid(cfg["grid"])
    params = StancuParams(n=int(cfg["n"]), alpha=float(cfg["alpha"]),
                          beta=float(cfg["beta"]), ctx=ctx)
    xs = grid.xs
    vals, dom = eval_T_sweep(f, params, xs, float(cfg["tol"]))
    cols = ["x", "T_f", "status"]
    if cfg["moments"]:
        cols += ["moment_T1", "phi_n", "lambda_n"]
    rep = ExperimentReport(
        "eval",
        {"command": "eval", "version": __version__, "x_radius": params.x_radius,
         **{k: cfg[k] for k in ("q", "mu", "n", "alpha", "beta", "f", "f_params",
                                "grid", "tol", "moments")}},
        cols)
    for i, x in enumerate(xs):
        row = {"x": float(x),
               "T_f": float(vals[i]) if np.isfinite(vals[i]) else None,
               "status": "ok" if dom[i] or np.isfinite(vals[i]) else "out_of_domain"}
        if cfg["moments"]:
            row["moment_T1"] = moment_T1(float(x), params)
            row["phi_n"] = phi_n(float(x), params)
            row["lambda_n"] = lambda_exact(float(x), params)
        rep.rows.append(row)
    rep.summary["evaluated"] = int(np.isfinite(vals).sum())
    rep.summary["out_of_domain"] = int((~np.isfinite(vals)).sum())
    _emit(rep, cfg)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify suites
# --------------------------------------------------------------------------

def _suite_gamma(cfg):
    """Recursion vs printed special cases, ratio invariant, q->1 bridge."""
    fails = []
    checked = 0
    for mu in (0.75, 1.0, 2.0):
        for q in (0.3, 0.5, 0.9):
            ctx = QContext(q=q, mu=mu)
            tab = GammaTable(ctx)
            b = lambda t: (1 - q**t) / (1 - q)
            printed = [1.0,
                       b(2 * mu + 1),
                       b(2 * mu + 1) * b(2),
                       b(2 * mu + 1) * b(2) * b(2 * mu + 3),
                       b(2 * mu + 1) * b(2) * b(2 * mu + 3) * b(4)]
            for k in range(5):
                checked += 1
                got = gamma_q(k, tab)
                if abs(got - printed[k]) > 1e-12 * abs(printed[k]):
                    fails.append({"check": "gamma_special_case", "mu": mu, "q": q,
                                  "k": k, "got": got, "want": printed[k]})
            for k in range(60):
                checked += 1
                ratio = gamma_q(k + 1, tab) / gamma_q(k, tab)
                step = q_bracket(2 * mu * ((k + 1) % 2) + k + 1, ctx)
                if abs(ratio - step) > 1e-13 * abs(step):
                    fails.append({"check": "gamma_recursion_ratio", "mu": mu,
                                  "q": q, "k": k, "got": ratio, "want": step})
    for mu in (0.75, 1.0, 2.0):
        ctx = QContext(q=1 - 1e-7, mu=mu)
        tab = GammaTable(ctx)
        for k in range(21):
            checked += 1
            got = gamma_q(k, tab)
            want = gamma_classical(k, mu)
            if abs(got - want) > 1e-4 * abs(want):
                fails.append({"check": "gamma_q1_bridge", "mu": mu, "k": k,
                              "got": got, "want": want})
    return checked, fails


def _suite_integrals(cfg):
    """Closed-form cell integrals vs numeric Jackson; cell width identity."""
    fails = []
    checked = 0
    for q in (0.3, 0.5, 0.9):
        for mu in (0.75, 1.0):
            ctx = QContext(q=q, mu=mu)
            for n in (1, 5, 20):
                for k in range(0, 31, 3):
                    cell = QCell(k=k, n_index=n, ctx=ctx)
                    for p in range(5):
                        checked += 1
                        closed = monomial_cell_integral(p, cell)
                        num = jackson_integral(lambda t, p=p: t**p, cell, tol=1e-14)
                        if abs(closed - num) > 1e-10 * (1 + abs(closed)):
                            fails.append({"check": "cell_integral", "q": q, "mu": mu,
                                          "n": n, "k": k, "p": p,
                                          "got": num, "want": closed})
    rng = np.random.default_rng(int(cfg["seed"]))
    for _ in range(1000):
        checked += 1
        q = rng.uniform(0.05, 0.99)
        mu = rng.uniform(-0.45, 3.0)
        k = int(rng.integers(0, 200))
        n = int(rng.integers(1, 200))
        import warnings as _w
        with _w.catch_warnings():
            _w.simplefilter("ignore")
            ctx = QContext(q=q, mu=mu)
        cell = QCell(k=k, n_index=n, ctx=ctx)
        want = 1.0 / q_bracket(n, ctx)
        if abs(cell.width - want) > 1e-13 * max(1.0, want):
            fails.append({"check": "cell_width", "q": q, "mu": mu, "k": k,
                          "n": n, "got": cell.width, "want": want})
    return checked, fails


def _suite_moments(cfg):
    """Operator identities on [0,4]; bracket/central-bound checks on the
    series domain, where the ratio-bearing bounds are theorems."""
    fails = []
    checked = 0
    xs = np.linspace(0, 4, 51)
    for q in (0.5, 0.9):
        for mu in (0.75, 1.0):
            ctx = QContext(q=q, mu=mu)
            eng = moment_engine(ctx)
            for n in (5, 20, 100):
                for alpha in (0.0, 1.0):
                    for beta in (0.0, 2.0):
                        p = StancuParams(n=n, alpha=alpha, beta=beta, ctx=ctx)
                        for x in xs:
                            x = float(x)
                            T = eng.raw_moments(p, x, 4)
                            checked += 3
                            if abs(T[0] - 1.0) > 1e-10:
                                fails.append({"check": "T_1", "q": q, "mu": mu,
                                              "n": n, "x": x, "got": T[0]})
                            if abs(T[1] - moment_T1(x, p)) > 1e-9 * (1 + x):
                                fails.append({"check": "T_t_identity", "q": q,
                                              "mu": mu, "n": n, "x": x,
                                              "got": T[1],
                                              "want": moment_T1(x, p)})
                            lam = T[2] - 2 * x * T[1] + x * x
                            if lam > central_moment_bound(2, x, p) + 1e-9:
                                fails.append({"check": "central2_bound", "q": q,
                                              "mu": mu, "n": n, "x": x})
                            if p.in_domain(x):
                                checked += 3
                                for j in (2, 3, 4):
                                    b = moment_T_bounds(j, x, p)
                                    if not (b.lower - 1e-9 <= T[j] <= b.upper + 1e-9):
                                        fails.append({"check": f"bracket_t{j}",
                                                      "q": q, "mu": mu, "n": n,
                                                      "x": x, "got": T[j],
                                                      "low": b.lower,
                                                      "up": b.upper})
    return checked, fails


def _suite_moduli(cfg):
    """Modulus estimators on known functions and sampled inequalities."""
    fails = []
    checked = 0
    grid = DomainGrid(4.0, 401)
    f_const = lambda t: np.ones_like(np.asarray(t, dtype=float))
    f_lin = lambda t: np.asarray(t, dtype=float)
    f_sq = lambda t: np.asarray(t, dtype=float) ** 2
    checks = [
        ("modulus_const", modulus(f_const, 0.3, grid), 0.0, 1e-12),
        ("modulus_linear", modulus(f_lin, 0.1, grid), 0.1, 2 * grid.h),
        ("modulus2_affine", modulus2(lambda t: 2 * np.asarray(t) + 1, 0.2, grid),
         0.0, 1e-12),
        ("modulus2_square", modulus2(f_sq, 0.2, grid), 0.08, 4 * grid.h),
        ("weighted_const", weighted_modulus(f_const, 0.1, grid), 0.0, 1e-12),
        ("lip_linear", lipschitz_estimate(f_lin, 1.0, grid), 1.0, 1e-9),
    ]
    for name, got, want, tol in checks:
        checked += 1
        if abs(got - want) > tol:
            fails.append({"check": name, "got": got, "want": want, "tol": tol})
    # omega monotone + subadditive, and the (|y-x|/delta + 1) inequality
    f_sin = lambda t: np.sin(np.asarray(t, dtype=float))
    for delta in (0.05, 0.1, 0.2):
        checked += 2
        w1 = modulus(f_sin, delta, grid)
        w2 = modulus(f_sin, 2 * delta, grid)
        if w2 < w1 - 1e-12:
            fails.append({"check": "omega_monotone", "delta": delta})
        if w2 > 2 * w1 + 1e-9:
            fails.append({"check": "omega_subadditive", "delta": delta})
    rng = np.random.default_rng(int(cfg["seed"]))
    delta = 0.15
    om = modulus(f_sin, delta, grid)
    Om = weighted_modulus(f_sin, delta, grid)
    for _ in range(500):
        checked += 2
        x, y = rng.uniform(0, 4, size=2)
        gap = abs(f_sin(y) - f_sin(x))
        if gap > (abs(y - x) / delta + 1) * om + 1e-9:
            fails.append({"check": "omega_pointwise_ineq", "x": x, "y": y})
        t = y
        lhs = gap
        rhs = (2 * (1 + abs(t - x) / delta) * (1 + delta**2)
               * (1 + x**2) * (1 + (t - x) ** 2) * Om)
        if lhs > rhs + 1e-9:
            fails.append({"check": "weighted_pointwise_ineq", "x": x, "t": t})
    return checked, fails


_SUITES = {"gamma": _suite_gamma, "integrals": _suite_integrals,
           "moments": _suite_moments, "moduli": _suite_moduli}


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    _context(cfg)  # validates + prints mu warning banner
    suite = args.suite
    if suite not in _SUITES:
        raise ConfigError(f"unknown suite {suite!r} (known: {sorted(_SUITES)})")
    checked, fails = _SUITES[suite](cfg)
    print(f"suite={suite} checks={checked} failures={len(fails)}")
    for row in fails[:200]:
        print("FAIL " + json.dumps(row, sort_keys=True, default=float))
    return EXIT_OK if not fails else EXIT_BOUND_FAIL


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------

_ESTIMATE_ONLY = {"second_order", "weighted"}


def cmd_experiment(args) -> int:
    cfg = _load_config(args)
    ctx = _context(cfg)
    name = args.name
    scheme_cfg = cfg["qn_scheme"]
    scheme = QnScheme(kind=scheme_cfg.get("kind", "one_minus_inv"),
                      offset=float(scheme_cfg.get("offset", 1.0)),
                      q_fixed=scheme_cfg.get("q"))
    n_list = [int(v) for v in cfg["n_list"]]
    grid = _parse_grid(cfg["grid"]) if name != "weighted" else (
        _parse_grid(cfg["grid"]) if cfg["grid"] != DEFAULTS["grid"] else WEIGHTED_GRID)
    kw = dict(mu=float(cfg["mu"]), alpha=float(cfg["alpha"]),
              beta=float(cfg["beta"]), threads=int(cfg["threads"]))
    if name == "korovkin":
        rep = korovkin_run(scheme, n_list, grid, **kw)
    else:
        f = _function(cfg)
        runners = {"modulus": rate_bound_modulus, "lipschitz": rate_bound_lipschitz,
                   "smooth": rate_bound_smooth,
                   "second_order": rate_bound_second_order,
                   "weighted": rate_bound_weighted}
        if name not in runners:
            raise ConfigError(f"unknown experiment {name!r} "
                              f"(known: korovkin, {', '.join(sorted(runners))})")
        rep = runners[name](f, n_list, scheme, grid, **kw)
    _emit(rep, cfg)
    print(f"summary: {json.dumps(rep.summary, sort_keys=True, default=float)}",
          file=sys.stderr)
    if name in _ESTIMATE_ONLY:
        return EXIT_OK
    return EXIT_OK if rep.summary.get("all_pass", False) else EXIT_BOUND_FAIL


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--config", help="JSON config file; flags override it")
    sp.add_argument("--q", type=float, help="q in (0,1)")
    sp.add_argument("--mu", type=float, help="Dunkl parameter mu > -1/2")
    sp.add_argument("--n", type=int, help="operator index n >= 1")
    sp.add_argument("--n-list", dest="n_list",
                    help="comma-separated n values for experiments")
    sp.add_argument("--alpha", type=float, help="Stancu shift alpha >= 0")
    sp.add_argument("--beta", type=float, help="Stancu shift beta >= 0")
    sp.add_argument("--f", help="test function name "
                    "(const, monomial, exp_decay, sine, abs_shift, holder_cusp)")
    sp.add_argument("--p", type=int, help="monomial power (shorthand for f_params.p)")
    sp.add_argument("--grid", help="x grid as 'lo:hi:points', e.g. 0:4:201")
    sp.add_argument("--tol", type=float, help="series truncation tolerance")
    sp.add_argument("--out", help="output file path (stdout if omitted)")
    sp.add_argument("--format", choices=("csv", "json"), help="output format")
    sp.add_argument("--threads", type=int,
                    help="worker threads (env QDUNKL_THREADS as fallback)")
    sp.add_argument("--seed", type=int, help="seed for randomized sweeps")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qdunkl",
        description="Stancu-type q-Dunkl Kantorovich-Szasz-Mirakjan operators: "
                    "evaluation, verification suites, convergence experiments.")
    ap.add_argument("--version", action="version", version=f"qdunkl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sp_eval = sub.add_parser("eval", help="evaluate T*(f;x) on a grid")
    _add_common(sp_eval)
    sp_eval.add_argument("--moments", action="store_true",
                         help="add moment_T1 / phi_n / lambda_n columns")
    sp_eval.set_defaults(fn=cmd_eval)
    sp_ver = sub.add_parser("verify", help="run a named invariant suite")
    sp_ver.add_argument("suite", choices=sorted(_SUITES))
    _add_common(sp_ver)
    sp_ver.set_defaults(fn=cmd_verify)
    sp_exp = sub.add_parser("experiment", help="run a convergence experiment")
    sp_exp.add_argument("name", choices=["korovkin", "modulus", "lipschitz",
                                         "smooth", "second_order", "weighted"])
    _add_common(sp_exp)
    sp_exp.set_defaults(fn=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SeriesOverflowError, OverflowError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QDomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
