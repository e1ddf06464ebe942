"""Desk-scale convergence experiments and their reports.

Each runner sweeps the operator over a grid and checks one of the
convergence statements: Korovkin sup-errors for the test monomials, the
modulus rate bound (1+sqrt(phi_n(x))) omega(f, 1/sqrt([n]_q)), the Lipschitz
rate M lambda_n(x)^(nu/2), the C_B^2 smooth-function bound, the
second-order-modulus bound with its free constant estimated empirically, and
the weighted-modulus bound with its constant C* likewise estimated.

Reports are deterministic: rows are sorted by (n, quantity, x), floats are
serialized with '%.15e', config is echoed in full, and identical configs
produce byte-identical files.  A bound row passes iff

    lhs <= rhs * (1 + 1e-9) + 1e-12

(the two sides share series truncation error).  Rows at x beyond the
operator's series domain for non-polynomial f carry status "out_of_domain"
and are excluded from pass/fail; polynomial integrands are evaluated exactly
everywhere.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, QDomainError
from .functions import TestFunction, make_function, monomial, sine
from .moduli import DomainGrid, Modulus2Table, modulus, weighted_modulus
from .operators import (StancuParams, central_moment_bound, central_moment_T1,
                        eval_T_sweep, lambda_exact, moment_engine, moment_T1,
                        phi_n)
from .qcore import QContext, q_bracket

PASS_REL = 1e-9
PASS_ABS = 1e-12

DEFAULT_GRID = DomainGrid(4.0, 201)
WEIGHTED_GRID = DomainGrid(40.0, 801)
MODULUS_REFINE = 10


@dataclass(frozen=True)
class QnScheme:
    """Sequence q_n in (0,1).

    kinds: "one_minus_inv" (q_n = 1 - 1/(n+offset); q_n^n -> e^{-offset... }
    e^{-1} for offset 1), "one_minus_inv_sqrt" (q_n = 1 - 1/sqrt(n+offset);
    q_n^n -> 0), "fixed" (constant q).  The recorded limit a = lim q_n^n.
    """

    kind: str = "one_minus_inv"
    offset: float = 1.0
    q_fixed: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("one_minus_inv", "one_minus_inv_sqrt", "fixed"):
            raise ConfigError(f"unknown q_n scheme kind {self.kind!r}")
        if self.kind == "fixed":
            if self.q_fixed is None or not (0.0 < self.q_fixed < 1.0):
                raise ConfigError("fixed scheme requires q in (0,1)")
        elif self.offset < 1.0:
            raise ConfigError("scheme offset must be >= 1 so q_1 in (0,1)")

    def q(self, n: int) -> float:
        if self.kind == "fixed":
            return self.q_fixed
        if self.kind == "one_minus_inv":
            return 1.0 - 1.0 / (n + self.offset)
        return 1.0 - 1.0 / math.sqrt(n + self.offset)

    @property
    def a_limit(self) -> float:
        """lim q_n^n (recorded in reports)."""
        if self.kind == "fixed":
            return 0.0
        if self.kind == "one_minus_inv":
            return math.exp(-1.0)
        return 0.0

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "fixed":
            d["q"] = self.q_fixed
        else:
            d["offset"] = self.offset
            d["a_limit"] = self.a_limit
        return d


@dataclass
class ExperimentReport:
    name: str
    config: dict
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add_row(self, **kw):
        self.rows.append(kw)

    def finalize(self):
        def key(row):
            x = row.get("x", "")
            xk = (1, 0.0) if isinstance(x, str) else (0, float(x))
            return (row.get("n", 0), str(row.get("quantity", "")), xk)

        self.rows.sort(key=key)
        checked = [r for r in self.rows if r.get("pass") in (0, 1)]
        ratios = [r["ratio"] for r in checked if np.isfinite(r.get("ratio", np.nan))]
        self.summary.setdefault("rows", len(self.rows))
        self.summary.setdefault("rows_checked", len(checked))
        self.summary.setdefault("all_pass", bool(all(r["pass"] for r in checked)))
        self.summary.setdefault("max_ratio", max(ratios) if ratios else 0.0)
        return self


def bound_pass(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1.0 + PASS_REL) + PASS_ABS


def _pmap(fn, items, threads: int = 1):
    """Order-preserving map, threaded when threads > 1.  Report assembly
    stays a deterministic serial reduction regardless."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _ratio(lhs: float, rhs: float) -> float:
    return lhs / max(rhs, 1e-300)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, sort_keys=True, default=float).replace(",", ";")
    return "%.15e" % float(v)


def render_report(report: ExperimentReport, format: str = "csv") -> str:
    """Deterministic serialization (see module docstring)."""
    if format not in ("csv", "json"):
        raise ConfigError(f"unknown report format {format!r}")
    buf = io.StringIO()
    if format == "csv":
        for line in json.dumps(report.config, sort_keys=True, indent=1).splitlines():
            buf.write(f"# {line}\n")
        for k in sorted(report.summary):
            buf.write(f"# summary.{k}: {_fmt(report.summary[k])}\n")
        buf.write(",".join(report.columns) + "\n")
        for row in report.rows:
            buf.write(",".join(_fmt(row.get(c)) for c in report.columns) + "\n")
    else:
        payload = {"config": report.config, "rows": report.rows,
                   "summary": report.summary}
        buf.write(json.dumps(payload, sort_keys=True, separators=(",", ": "),
                             indent=1, default=float))
        buf.write("\n")
    return buf.getvalue()


def write_report(report: ExperimentReport, path, format: str = "csv") -> None:
    """Render and write a report; re-running an identical config reproduces
    the file byte for byte."""
    text = render_report(report, format)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _base_config(name, scheme, n_list, grid, mu, alpha, beta, f=None, extra=None):
    cfg = {
        "experiment": name,
        "qn_scheme": scheme.describe(),
        "n_list": list(n_list),
        "grid": {"x_max": grid.x_max, "points": grid.points},
        "mu": mu, "alpha": alpha, "beta": beta,
        "pass_rule": "lhs <= rhs*(1+1e-9) + 1e-12",
    }
    if f is not None:
        cfg["f"] = f.label
    if extra:
        cfg.update(extra)
    return cfg


def _params(scheme: QnScheme, n: int, mu: float, alpha: float, beta: float) -> StancuParams:
    ctx = QContext(q=scheme.q(n), mu=mu)
    return StancuParams(n=n, alpha=alpha, beta=beta, ctx=ctx)


# --------------------------------------------------------------------------
# Korovkin
# --------------------------------------------------------------------------

def korovkin_run(scheme: QnScheme, n_list: Sequence[int],
                 grid: DomainGrid = DEFAULT_GRID,
                 mu: float = 1.0, alpha: float = 0.0, beta: float = 0.0,
                 trend_slack: float = 0.10, threads: int = 1) -> ExperimentReport:
    """sup_x |T*(t^j;x) - x^j| for j = 0,1,2 (exact moments, full grid) plus
    the rho-weighted sup errors for f in {t^2, sine}.

    Pass semantics: each quantity's sup error at n must not exceed
    (1+trend_slack) times its value at the previous n in n_list (monotone
    trend with slack); the first n always passes.
    """
    cols = ["n", "q_n", "x", "quantity", "lhs", "rhs", "ratio", "pass", "status"]
    rep = ExperimentReport(
        "korovkin",
        _base_config("korovkin", scheme, n_list, grid, mu, alpha, beta,
                     extra={"trend_slack": trend_slack}),
        cols)
    xs = grid.xs

    def one(n):
        p = _params(scheme, n, mu, alpha, beta)
        eng = moment_engine(p.ctx)
        sups = {}
        moments = [eng.raw_moments(p, float(x), 2) for x in xs]
        for j in (0, 1, 2):
            sups[f"korovkin_sup_err_j{j}"] = max(
                abs(m[j] - float(x) ** j) for m, x in zip(moments, xs))
        w = 1.0 + xs * xs
        vals_t2 = np.array([m[2] for m in moments])
        sups["rho_norm_err_t^2"] = float(np.max(np.abs(vals_t2 - xs**2) / w))
        fs = sine()
        vals_s, dom = eval_T_sweep(fs, p, xs)
        if dom.any():
            fsx = np.asarray(fs(xs), dtype=float)
            sups["rho_norm_err_sine"] = float(
                np.max(np.abs(vals_s[dom] - fsx[dom]) / w[dom]))
        return p.q, sups

    results = _pmap(one, list(n_list), threads)
    prev: dict[str, float] = {}
    for n, (qn, sups) in zip(n_list, results):
        for qty, lhs in sorted(sups.items()):
            rhs = prev.get(qty, math.inf) * (1.0 + trend_slack)
            ok = lhs <= rhs
            rep.add_row(n=n, q_n=qn, x="sup", quantity=qty, lhs=lhs,
                        rhs=rhs if math.isfinite(rhs) else None,
                        ratio=_ratio(lhs, rhs) if math.isfinite(rhs) else 0.0,
                        **{"pass": int(ok)}, status="ok")
            prev[qty] = lhs
    return rep.finalize()


# --------------------------------------------------------------------------
# Rate bounds
# --------------------------------------------------------------------------

def _rate_rows(f, p, grid, rhs_fn, tol=1e-12):
    """Shared per-x row block: lhs = |T*f - f| where evaluable."""
    xs = grid.xs
    vals, dom = eval_T_sweep(f, p, xs, tol)
    fx = np.asarray(f(xs), dtype=float)
    rows = []
    for i, x in enumerate(xs):
        x = float(x)
        if not np.isfinite(vals[i]):
            rows.append(dict(n=p.n, q_n=p.q, x=x, quantity=f"|T*f-f| {f.label}",
                             lhs=None, rhs=None, ratio=None,
                             **{"pass": ""}, status="out_of_domain"))
            continue
        lhs = abs(vals[i] - fx[i])
        rhs = rhs_fn(x)
        rows.append(dict(n=p.n, q_n=p.q, x=x, quantity=f"|T*f-f| {f.label}",
                         lhs=lhs, rhs=rhs, ratio=_ratio(lhs, rhs),
                         **{"pass": int(bound_pass(lhs, rhs))}, status="ok"))
    return rows


def rate_bound_modulus(f: TestFunction, n_list: Sequence[int], scheme: QnScheme,
                       grid: DomainGrid = DEFAULT_GRID, mu: float = 1.0,
                       alpha: float = 0.0, beta: float = 0.0,
                       threads: int = 1) -> ExperimentReport:
    """|T*f - f| <= (1 + sqrt(phi_n(x))) omega(f, 1/sqrt([n]_q)); f must be
    uniformly continuous.  The modulus is taken on a 10x finer grid."""
    if not f.is_uniformly_continuous:
        raise ConfigError(
            f"rate_bound_modulus requires uniformly continuous f, got {f.label}")
    cols = ["n", "q_n", "x", "quantity", "lhs", "rhs", "ratio", "pass", "status"]
    rep = ExperimentReport(
        "modulus_rate",
        _base_config("modulus_rate", scheme, n_list, grid, mu, alpha, beta, f),
        cols)
    fine = grid.refined(MODULUS_REFINE)

    def one(n):
        p = _params(scheme, n, mu, alpha, beta)
        om = modulus(f, 1.0 / math.sqrt(p.bracket_n), fine)
        return _rate_rows(
            f, p, grid,
            lambda x, p=p, om=om: (1.0 + math.sqrt(max(phi_n(x, p), 0.0))) * om)

    for rows in _pmap(one, list(n_list), threads):
        rep.rows.extend(rows)
    return rep.finalize()


def rate_bound_lipschitz(f: TestFunction, n_list: Sequence[int], scheme: QnScheme,
                         grid: DomainGrid = DEFAULT_GRID, mu: float = 1.0,
                         alpha: float = 0.0, beta: float = 0.0,
                         threads: int = 1) -> ExperimentReport:
    """|T*f - f| <= M lambda_n(x)^(nu/2) for certified Lip_M(nu) members;
    lambda_n is the exact second central moment, cross-checked against its
    closed bound in the summary."""
    if f.lipschitz is None:
        raise ConfigError(
            f"rate_bound_lipschitz requires certified (nu, M), got {f.label}")
    nu, M = f.lipschitz
    cols = ["n", "q_n", "x", "quantity", "lhs", "rhs", "ratio", "pass", "status"]
    rep = ExperimentReport(
        "lipschitz_rate",
        _base_config("lipschitz_rate", scheme, n_list, grid, mu, alpha, beta, f,
                     extra={"nu": nu, "M": M}),
        cols)
    def one(n):
        p = _params(scheme, n, mu, alpha, beta)
        dominated = all(
            lambda_exact(float(x), p) <= central_moment_bound(2, float(x), p) + 1e-9
            for x in grid.xs)
        rows = _rate_rows(
            f, p, grid,
            lambda x, p=p: M * max(lambda_exact(x, p), 0.0) ** (nu / 2.0))
        return dominated, rows

    results = _pmap(one, list(n_list), threads)
    for _, rows in results:
        rep.rows.extend(rows)
    rep.summary["lambda_within_bound"] = bool(all(d for d, _ in results))
    return rep.finalize()


def rate_bound_smooth(g: TestFunction, n_list: Sequence[int], scheme: QnScheme,
                      grid: DomainGrid = DEFAULT_GRID, mu: float = 1.0,
                      alpha: float = 0.0, beta: float = 0.0,
                      threads: int = 1) -> ExperimentReport:
    """|T*g - g| <= (|T*(t-x;x)| + bound_lambda(x)/2) ||g||_{C_B^2} for g with
    certified derivative sup-norms."""
    if g.cb2_norm is None:
        raise ConfigError(
            f"rate_bound_smooth requires bounded g, g', g'' metadata, got {g.label}")
    norm = g.cb2_norm
    cols = ["n", "q_n", "x", "quantity", "lhs", "rhs", "ratio", "pass", "status"]
    rep = ExperimentReport(
        "smooth_rate",
        _base_config("smooth_rate", scheme, n_list, grid, mu, alpha, beta, g,
                     extra={"cb2_norm": norm}),
        cols)

    def one(n):
        p = _params(scheme, n, mu, alpha, beta)
        return _rate_rows(
            g, p, grid,
            lambda x, p=p: (abs(central_moment_T1(x, p))
                            + 0.5 * central_moment_bound(2, x, p)) * norm)

    for rows in _pmap(one, list(n_list), threads):
        rep.rows.extend(rows)
    return rep.finalize()


def rate_bound_second_order(f: TestFunction, n_list: Sequence[int],
                            scheme: QnScheme, grid: DomainGrid = DEFAULT_GRID,
                            mu: float = 1.0, alpha: float = 0.0,
                            beta: float = 0.0, stability_factor: float = 2.0,
                            threads: int = 1) -> ExperimentReport:
    """Estimate-only: M*_n = max_x lhs / bracket(x) with

        bracket(x) = omega2(f, sqrt(delta_n(x))) + min(1, delta_n(x)) ||f||,
        delta_n(x) = (2 |T*(t-x;x)| + lambda_n(x)) / 4.

    Asserts M* finite and stable within `stability_factor` across n_list; no
    specific constant is asserted."""
    cols = ["n", "q_n", "x", "quantity", "lhs", "rhs", "ratio", "pass", "status"]
    rep = ExperimentReport(
        "second_order_rate",
        _base_config("second_order_rate", scheme, n_list, grid, mu, alpha, beta, f,
                     extra={"stability_factor": stability_factor}),
        cols)
    fine = grid.refined(MODULUS_REFINE)
    omega2 = Modulus2Table(f, fine, s_max=2.0 * math.sqrt(grid.x_max))
    xs_norm = np.linspace(0.0, 2.0 * grid.x_max, 2 * grid.points - 1)
    f_sup = float(np.max(np.abs(np.asarray(f(xs_norm), dtype=float))))
    def one(n):
        p = _params(scheme, n, mu, alpha, beta)
        xs = grid.xs
        vals, dom = eval_T_sweep(f, p, xs)
        fx = np.asarray(f(xs), dtype=float)
        m_star = 0.0
        for i, x in enumerate(xs):
            x = float(x)
            if not np.isfinite(vals[i]):
                continue
            lhs = abs(vals[i] - fx[i])
            delta = (2.0 * abs(central_moment_T1(x, p)) + lambda_exact(x, p)) / 4.0
            if delta <= 0:
                continue
            bracket = omega2(math.sqrt(delta)) + min(1.0, delta) * f_sup
            if bracket > 0:
                m_star = max(m_star, lhs / (2.0 * bracket))
        return p.q, m_star

    m_stars = {}
    for n, (qn, m_star) in zip(n_list, _pmap(one, list(n_list), threads)):
        m_stars[n] = m_star
        rep.add_row(n=n, q_n=qn, x="sup", quantity=f"M* {f.label}", lhs=m_star,
                    rhs=None, ratio=None, **{"pass": ""}, status="estimate")
    vals = [v for v in m_stars.values() if v > 0]
    stable = bool(vals and max(vals) / min(vals) <= stability_factor)
    rep.summary["M_star"] = m_stars
    rep.summary["M_star_finite"] = bool(all(math.isfinite(v) for v in m_stars.values()))
    rep.summary["M_star_stable"] = stable
    rep.summary["all_pass"] = rep.summary["M_star_finite"] and (stable or not vals)
    return rep.finalize()


def rate_bound_weighted(f: TestFunction, n_list: Sequence[int], scheme: QnScheme,
                        grid: DomainGrid = WEIGHTED_GRID, mu: float = 1.0,
                        alpha: float = 0.0, beta: float = 0.0,
                        trend_slack: float = 0.20, stability_factor: float = 2.0,
                        threads: int = 1) -> ExperimentReport:
    """Estimate-only: C*_n = [sup_x |T*f-f|/(1+x^2)] / [(1+1/[n]_q)
    Omega(f, 1/sqrt([n]_q))]; asserts C* finite with a non-increasing trend
    (slack `trend_slack`) across n_list."""
    if f.rho_class_constant is None:
        raise ConfigError(
            f"rate_bound_weighted requires rho-class metadata, got {f.label}")
    cols = ["n", "q_n", "x", "quantity", "lhs", "rhs", "ratio", "pass", "status"]
    rep = ExperimentReport(
        "weighted_rate",
        _base_config("weighted_rate", scheme, n_list, grid, mu, alpha, beta, f,
                     extra={"trend_slack": trend_slack,
                            "stability_factor": stability_factor}),
        cols)
    fine = grid.refined(MODULUS_REFINE)

    def one(n):
        p = _params(scheme, n, mu, alpha, beta)
        xs = grid.xs
        vals, dom = eval_T_sweep(f, p, xs)
        fx = np.asarray(f(xs), dtype=float)
        w = 1.0 + xs * xs
        mask = np.isfinite(vals)
        lhs = float(np.max(np.abs(vals[mask] - fx[mask]) / w[mask])) if mask.any() else 0.0
        bn = p.bracket_n
        kernel = (1.0 + 1.0 / bn) * weighted_modulus(f, 1.0 / math.sqrt(bn), fine)
        return p.q, lhs, kernel

    c_stars = {}
    prev = math.inf
    trend_ok = True
    for n, (qn, lhs, kernel) in zip(n_list, _pmap(one, list(n_list), threads)):
        c_star = _ratio(lhs, kernel)
        c_stars[n] = c_star
        if c_star > prev * (1.0 + trend_slack):
            trend_ok = False
        prev = c_star
        rep.add_row(n=n, q_n=qn, x="sup", quantity=f"C* {f.label}", lhs=lhs,
                    rhs=kernel, ratio=c_star, **{"pass": ""}, status="estimate")
    vals = [v for v in c_stars.values() if v > 0]
    rep.summary["C_star"] = c_stars
    rep.summary["C_star_finite"] = bool(all(math.isfinite(v) for v in c_stars.values()))
    rep.summary["C_star_trend_ok"] = bool(trend_ok)
    rep.summary["C_star_stable"] = bool(
        not vals or max(vals) / min(vals) <= stability_factor)
    rep.summary["all_pass"] = rep.summary["C_star_finite"] and trend_ok
    return rep.finalize()
