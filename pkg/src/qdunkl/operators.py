"""The Dunkl q-Szasz operator D_{n,q} and its Stancu-Kantorovich variant T*_{n,q}.

    D_{n,q}(f;x)  = (1/e_{mu,q}([n]_q x)) sum_k ([n]_q x)^k/gamma(k)
                    * f([k+2*mu*theta_k]_q / [n]_q)

    T*_{n,q}(f;x) = ([n]_q/e_{mu,q}([n]_q x)) sum_k ([n]_q x)^k/gamma(k)
                    * int_cell_k f((n t + alpha)/(n + beta)) d_q t

(the D node is the bracket ratio [k+2*mu*theta_k]_q/[n]_q, the reading under
which D(t;x) = x holds exactly).

Domain.  gamma(k) ~ C (1-q)^{-k}, so both series converge iff
y = [n]_q x < 1/(1-q), i.e. x < x_rad = 1/(1-q^n).  Inside that radius the
operators are evaluated by their honest truncated series.  Every closed
moment identity extends analytically beyond x_rad; for polynomial
integrands this module evaluates the extension exactly through the parity
node-moment recursion

    s+_p(z) = z sum_i C(p-1,i) (q^{2mu}[1-2mu]_q)^{p-1-i} s-_i(q^{p-1-i} z)
    s-_p(z) = z sum_i C(p-1,i) ([1+2mu]_q)^{p-1-i}        s+_i(q^{p-1-i} z)

seeded by the continued parity halves of e_{mu,q} (see dunkl).  The two
routes agree to ~1e-14 relative inside the radius.

Moment bounds.  The sharp lower bounds carry ratio factors
e(q^j y)/e(y); they are theorems on the series domain and are flagged with
`valid` accordingly.  The upper bounds used here are the ratio-free
compositions (node moments m2 <= y^2+[1+2mu]y, m3 <= y^3+3[1+2mu]y^2
+[1+2mu]^2 y, m4 <= y^4+6[1+2mu]y^3+7[1+2mu]^2y^2+[1+2mu]^3y), which also
hold for the continued moments on the tested grids.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .dunkl import DunklKernel, GammaTable, theta
from .errors import OutOfOperatorDomainError, QDomainError, SeriesOverflowError
from .functions import TestFunction, monomial
from .qcore import DEFAULT_TOL, QContext, q_bracket, q_number
from .qintegral import (QCell, jackson_cells_vectorized, jackson_integral,
                        monomial_cell_integral)

_DOMAIN_MARGIN = 0.995  # raw series used for y <= margin * radius


@dataclass(frozen=True)
class StancuParams:
    """Operator parameters (n, alpha, beta) over a QContext."""

    n: int
    alpha: float
    beta: float
    ctx: QContext

    def __post_init__(self):
        if self.n < 1 or self.n != int(self.n):
            raise QDomainError(f"operator index n must be a positive integer, got {self.n}")
        if self.alpha < 0 or self.beta < 0:
            raise QDomainError(
                f"Stancu parameters must be nonnegative, got alpha={self.alpha}, beta={self.beta}")
        if self.alpha > self.beta:
            warnings.warn(
                f"alpha={self.alpha} > beta={self.beta}: outside the customary "
                "Stancu range 0 <= alpha <= beta", stacklevel=2)

    @property
    def q(self) -> float:
        return self.ctx.q

    @property
    def mu(self) -> float:
        return self.ctx.mu

    @property
    def bracket_n(self) -> float:
        return q_bracket(self.n, self.ctx)

    @property
    def x_radius(self) -> float:
        """Series convergence bound: x < x_rad = 1/(1 - q^n)."""
        return 1.0 / (-math.expm1(self.n * math.log(self.q)))

    def in_domain(self, x: float) -> bool:
        return self.bracket_n * x < _DOMAIN_MARGIN * self.ctx.radius

    def shift(self, t):
        """Stancu argument map sigma(t) = (n t + alpha)/(n + beta)."""
        return (self.n * np.asarray(t, dtype=float) + self.alpha) / (self.n + self.beta)

    def cell(self, k: int) -> QCell:
        return QCell(k=k, n_index=self.n, ctx=self.ctx)


class MomentBounds(NamedTuple):
    lower: float
    upper: float
    exact: Optional[float] = None
    valid: bool = True  # False when x lies beyond the series domain, where
                        # the ratio-bearing inequalities are not theorems


class WeightSeries(NamedTuple):
    ks: np.ndarray
    weights: np.ndarray
    k_stop: int
    tail: float


class _GammaLogs:
    """Cached ln(gamma_{mu,q}(k)) as a growing numpy array (per context)."""

    def __init__(self, ctx: QContext):
        self.ctx = ctx
        self._logs = np.zeros(1)
        self.grow_to(128)

    def grow_to(self, k: int) -> np.ndarray:
        cur = len(self._logs)
        if k + 1 > cur:
            ctx = self.ctx
            ks = np.arange(cur, k + 1, dtype=float)
            lq = math.log(ctx.q)
            steps = np.expm1((ks + 2.0 * ctx.mu * (ks.astype(int) % 2)) * lq) \
                / math.expm1(lq)
            self._logs = np.concatenate(
                [self._logs, self._logs[-1] + np.cumsum(np.log(steps))])
        return self._logs


@lru_cache(maxsize=256)
def _gamma_logs(ctx: QContext) -> _GammaLogs:
    return _GammaLogs(ctx)


def _weight_terms(y: float, ctx: QContext) -> np.ndarray:
    """Unnormalized terms y^k/gamma(k) scaled so the peak is 1, long enough
    that the trailing term is below 1e-14 of the peak.  Adaptive: the decay
    beyond the peak only slowly reaches its asymptotic ratio y(1-q)."""
    r = y / ctx.radius
    if r >= 1.0:
        raise OutOfOperatorDomainError(y, ctx.radius, "weight series")
    k_star = math.log(max(1.0 - r, 1e-12)) / math.log(ctx.q)
    decay = math.log(1e-17) / math.log(r) if r > 1e-3 else 40.0
    k = int(k_star + decay) + 80
    logs = _gamma_logs(ctx)
    ly = math.log(y)
    while True:
        lg = logs.grow_to(k)
        log_t = np.arange(k + 1) * ly - lg[:k + 1]
        log_t -= log_t.max()
        if log_t[-1] < math.log(1e-14):
            return np.exp(log_t)
        if k > 4_000_000:
            raise ArithmeticError(
                f"weight series not resolved at k={k} (y={y}, q={ctx.q})")
        k *= 2


# --------------------------------------------------------------------------
# Series weights
# --------------------------------------------------------------------------

def weights(x: float, params: StancuParams, tol: float = DEFAULT_TOL) -> WeightSeries:
    """Normalized series weights w_k = y^k/(gamma(k) e(y)), y = [n]_q x.

    Truncated at the smallest K with cumulative weight >= 1 - tol and five
    consecutive sub-tol terms (guards the non-monotone early growth of w_k).
    Only defined on the series domain.
    """
    if x < 0:
        raise QDomainError(f"weights requires x >= 0, got {x}")
    ctx = params.ctx
    y = params.bracket_n * x
    if x > 0 and not params.in_domain(x):
        raise OutOfOperatorDomainError(x, params.x_radius, "weights")
    if x == 0.0:
        return WeightSeries(np.array([0]), np.array([1.0]), 0, 0.0)
    t = _weight_terms(y, ctx)
    total = t.sum()
    w = t / total
    # truncation rule: full cumulative mass and 5 consecutive sub-tol terms
    csum = np.cumsum(w)
    small = w < tol
    run = 0
    k_stop = len(w) - 1
    for k in range(len(w)):
        run = run + 1 if small[k] else 0
        if csum[k] >= 1.0 - tol and run >= 5:
            k_stop = k
            break
    tail = float(1.0 - csum[k_stop])
    return WeightSeries(np.arange(k_stop + 1), w[:k_stop + 1], k_stop, tail)


# --------------------------------------------------------------------------
# Exact node-moment engine (valid on all x >= 0)
# --------------------------------------------------------------------------

class MomentEngine:
    """Node moments m_p(y) = (1/e(y)) sum_k y^k A_k^p / gamma(k) and their
    cell/Stancu compositions, via the continued parity components."""

    def __init__(self, ctx: QContext):
        self.ctx = ctx
        self.kernel = DunklKernel(ctx)
        q, mu = ctx.q, ctx.mu
        # [1-2mu]_q is negative for mu > 1/2; q_number accepts signed arguments
        self._c_odd = q ** (2.0 * mu) * q_number(1.0 - 2.0 * mu, q)
        self._c_even = q_bracket(1.0 + 2.0 * mu, ctx)
        self._brq = [q_bracket(i, ctx) for i in range(6)]

    def node_moments(self, y: float, p_max: int = 4) -> list[float]:
        if y < 0:
            raise QDomainError(f"node moments require y >= 0, got {y}")
        if y == 0.0:
            return [1.0] + [0.0] * p_max
        y = self.kernel.safe_x(y)
        q = self.ctx.q
        kernel = self.kernel

        @lru_cache(maxsize=None)
        def s(sig: int, p: int, j: int) -> float:
            z = y * q**j
            if p == 0:
                comp = kernel.components(z)
                return comp.even if sig > 0 else comp.odd
            acc = 0.0
            for i in range(p):
                c = math.comb(p - 1, i)
                if sig > 0:
                    acc += c * self._c_odd ** (p - 1 - i) * s(-1, i, j + (p - 1 - i))
                else:
                    acc += c * self._c_even ** (p - 1 - i) * s(+1, i, j + (p - 1 - i))
            return z * acc

        ey = kernel.e(y)
        return [(s(+1, p, 0) + s(-1, p, 0)) / ey for p in range(p_max + 1)]

    def cell_moments(self, y: float, bracket_n: float, i_max: int = 4,
                     m: Optional[Sequence[float]] = None) -> list[float]:
        """U_i = [n]_q * (1/e) sum_k w'_k int_cell_k t^i d_q t, i = 0..i_max:
        U_i = (1/([i+1]_q [n]_q^i)) sum_l C(i+1,l) q^l m_l."""
        q = self.ctx.q
        if m is None:
            m = self.node_moments(y, i_max)
        out = []
        for i in range(i_max + 1):
            acc = sum(math.comb(i + 1, l) * q**l * m[l] for l in range(i + 1))
            out.append(acc / (self._brq[i + 1] * bracket_n**i))
        return out

    def raw_moments(self, params: StancuParams, x: float, j_max: int = 4,
                    m_override: Optional[Sequence[float]] = None) -> list[float]:
        """T*(t^j; x) for j = 0..j_max by exact composition."""
        n, alpha, beta = params.n, params.alpha, params.beta
        y = params.bracket_n * x
        U = self.cell_moments(y, params.bracket_n, j_max, m_override)
        s = n + beta
        out = []
        for j in range(j_max + 1):
            acc = sum(math.comb(j, i) * n**i * alpha ** (j - i) * U[i]
                      for i in range(j + 1))
            out.append(acc / s**j)
        return out


@lru_cache(maxsize=256)
def _engine(ctx: QContext) -> MomentEngine:
    return MomentEngine(ctx)


def moment_engine(ctx: QContext) -> MomentEngine:
    """Shared per-context engine (engines cache their kernel evaluations)."""
    return _engine(ctx)


# --------------------------------------------------------------------------
# Operator evaluation
# --------------------------------------------------------------------------

def _series_eval_T(f, params: StancuParams, x: float, tol: float) -> float:
    """Honest truncated series for T*(f;x), x inside the domain."""
    if x == 0.0:
        cell = params.cell(0)
        return params.bracket_n * jackson_integral(
            lambda u: float(f(params.shift(u))), cell, tol)
    ws = weights(x, params, tol)
    k_count = len(ws.ks)
    integrals = jackson_cells_vectorized(
        f, params.ctx, params.n, k_count, shift=params.shift, tol=tol)
    return float((ws.weights * integrals).sum())


def _series_eval_T_monomial(p: int, params: StancuParams, x: float, tol: float) -> float:
    """Series route for f = t^p using the closed cell integrals."""
    ws = weights(x, params, tol)
    ctx, n, alpha, beta = params.ctx, params.n, params.alpha, params.beta
    s = n + beta
    total = 0.0
    for k, w in zip(ws.ks, ws.weights):
        cell = params.cell(int(k))
        ci = 0.0
        for i in range(p + 1):
            ci += (math.comb(p, i) * n**i * alpha ** (p - i) / s**p
                   * monomial_cell_integral(i, cell))
        total += w * params.bracket_n * ci
    return total


def eval_T(f: TestFunction, x: float, params: StancuParams,
           tol: float = DEFAULT_TOL, mode: str = "auto") -> float:
    """T*_{n,q}(f; x).

    mode="series": honest truncated series; raises OutOfOperatorDomainError
    for x >= x_rad.  mode="closed": exact continued evaluation, polynomial
    integrands only.  mode="auto": series inside the domain, closed beyond
    it for polynomials, domain error otherwise.
    """
    if x < 0:
        raise QDomainError(f"eval_T requires x >= 0, got {x}")
    poly = f.degree is not None
    if mode not in ("auto", "series", "closed"):
        raise QDomainError(f"unknown eval mode {mode!r}")
    use_series = mode == "series" or (mode == "auto" and params.in_domain(x))
    if use_series:
        if not params.in_domain(x):
            raise OutOfOperatorDomainError(x, params.x_radius, "series evaluation")
        if poly:
            if f.name == "const":
                c = f.params.get("c", 1.0)
                return c * _series_eval_T_monomial(0, params, x, tol)
            return _series_eval_T_monomial(f.degree, params, x, tol)
        return _series_eval_T(f, params, x, tol)
    if not poly:
        raise OutOfOperatorDomainError(
            x, params.x_radius,
            f"{f.label} is not polynomial; no continued evaluation available")
    eng = moment_engine(params.ctx)
    if f.name == "const":
        return f.params.get("c", 1.0)
    return eng.raw_moments(params, x, f.degree)[f.degree]


def eval_T_sweep(f: TestFunction, params: StancuParams, xs: np.ndarray,
                 tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """T*(f;x) over a grid.

    Polynomial f: exact continued evaluation everywhere (in_domain mask still
    reports the series domain).  Other f: honest series on the domain, NaN
    with in_domain=False beyond it.  The cell integrals do not depend on x,
    so they are computed once and reused across the grid.
    """
    xs = np.asarray(xs, dtype=float)
    ctx = params.ctx
    bn = params.bracket_n
    in_dom = bn * xs < _DOMAIN_MARGIN * ctx.radius
    values = np.full(xs.shape, np.nan)
    if f.degree is not None:
        for i, x in enumerate(xs):
            values[i] = eval_T(f, float(x), params, tol, mode="auto")
        return values, in_dom
    if not in_dom.any():
        return values, in_dom
    y_max = bn * xs[in_dom].max()
    t_max = _weight_terms(y_max, ctx)  # longest needed; smaller y need fewer
    k_cap = len(t_max)
    integrals = jackson_cells_vectorized(f, ctx, params.n, k_cap,
                                         shift=params.shift, tol=tol)
    ks = np.arange(k_cap)
    log_gamma = _gamma_logs(ctx).grow_to(k_cap - 1)[:k_cap]
    for i, x in enumerate(xs):
        if not in_dom[i]:
            continue
        if x == 0.0:
            values[i] = integrals[0]
            continue
        log_t = ks * math.log(bn * x) - log_gamma
        log_t -= log_t.max()
        t = np.exp(log_t)
        values[i] = float((t * integrals).sum() / t.sum())
    return values, in_dom


def eval_D(f: TestFunction, x: float, ctx: QContext, n: int,
           tol: float = DEFAULT_TOL, mode: str = "auto") -> float:
    """D_{n,q}(f; x) with nodes [k+2*mu*theta_k]_q/[n]_q; same domain and
    mode semantics as eval_T."""
    if x < 0:
        raise QDomainError(f"eval_D requires x >= 0, got {x}")
    params = StancuParams(n=n, alpha=0.0, beta=0.0, ctx=ctx)
    poly = f.degree is not None
    use_series = mode == "series" or (mode == "auto" and params.in_domain(x))
    if use_series:
        if not params.in_domain(x):
            raise OutOfOperatorDomainError(x, params.x_radius, "series evaluation")
        if x == 0.0:
            return float(f(0.0))
        ws = weights(x, params, tol)
        bn = params.bracket_n
        lq = math.log(ctx.q)
        args = ws.ks + 2.0 * ctx.mu * (ws.ks % 2)
        nodes = (np.expm1(args * lq) / math.expm1(lq)) / bn
        return float((ws.weights * np.asarray(f(nodes), dtype=float)).sum())
    if not poly:
        raise OutOfOperatorDomainError(
            x, params.x_radius,
            f"{f.label} is not polynomial; no continued evaluation available")
    if f.name == "const":
        return f.params.get("c", 1.0)
    eng = moment_engine(ctx)
    m = eng.node_moments(params.bracket_n * x, f.degree)
    return m[f.degree] / params.bracket_n ** f.degree


# --------------------------------------------------------------------------
# Closed-form moments and bounds
# --------------------------------------------------------------------------

def moment_T1(x: float, params: StancuParams) -> float:
    """T*(t;x) = 2qn/((n+beta)[2]_q) x + n/((n+beta)[2]_q[n]_q) + alpha/(n+beta)."""
    q, n, alpha, beta = params.q, params.n, params.alpha, params.beta
    b2 = q_bracket(2, params.ctx)
    bn = params.bracket_n
    return (2.0 * q * n / ((n + beta) * b2)) * x + n / ((n + beta) * b2 * bn) \
        + alpha / (n + beta)


def central_moment_T1(x: float, params: StancuParams) -> float:
    """T*(t-x;x) = (2qn/((n+beta)[2]_q) - 1) x + n/((n+beta)[2]_q[n]_q)
    + alpha/(n+beta); identical to moment_T1(x) - x."""
    q, n, alpha, beta = params.q, params.n, params.alpha, params.beta
    b2 = q_bracket(2, params.ctx)
    return ((2.0 * q * n / ((n + beta) * b2) - 1.0) * x
            + n / ((n + beta) * b2 * params.bracket_n) + alpha / (n + beta))


def _node_moment_bounds(params: StancuParams, y: float, with_ratios: bool):
    """(m2_low, m2_up, m3_low, m3_up, m4_up).  Ratio-bearing lower bounds use
    R_j = e(q^j y)/e(y); the ratio-free variants replace R_j by 1 / drop the
    positive R2 term (valid for mu > 1/2 where [1-2mu]_q < 0)."""
    ctx = params.ctx
    q, mu = ctx.q, ctx.mu
    P1 = q_bracket(1.0 + 2.0 * mu, ctx)
    M1 = q_number(1.0 - 2.0 * mu, q)  # negative for mu > 1/2
    if with_ratios and y > 0:
        eng = moment_engine(ctx)
        R1 = eng.kernel.e_ratio(y, 1)
        R2 = eng.kernel.e_ratio(y, 2)
    else:
        R1, R2 = 1.0, 0.0  # conservative for mu > 1/2 (M1 <= 0)
    m2l = y * y + q ** (2.0 * mu) * M1 * R1 * y
    m2u = y * y + P1 * y
    m3l = y**3 + (2.0 * q + 1.0) * M1 * R1 * y * y + q ** (4.0 * mu) * M1 * M1 * R2 * y
    m3u = y**3 + 3.0 * P1 * y * y + P1 * P1 * y
    m4u = y**4 + 6.0 * P1 * y**3 + 7.0 * P1 * P1 * y * y + P1**3 * y
    return m2l, m2u, m3l, m3u, m4u


def _compose_T(params: StancuParams, j: int, U: Sequence[float]) -> float:
    n, alpha, beta = params.n, params.alpha, params.beta
    s = n + beta
    return sum(math.comb(j, i) * n**i * alpha ** (j - i) * U[i]
               for i in range(j + 1)) / s**j


def _U_bounds(params: StancuParams, x: float, with_ratios: bool):
    """Lower/upper versions of the cell moments U_1..U_4 from node bounds."""
    ctx = params.ctx
    q = ctx.q
    bn = params.bracket_n
    y = bn * x
    m2l, m2u, m3l, m3u, m4u = _node_moment_bounds(params, y, with_ratios)
    b = [q_bracket(i, ctx) for i in range(6)]

    def U2(m2):
        return (1.0 + 3.0 * q * y + 3.0 * q * q * m2) / (b[3] * bn * bn)

    def U3(m2, m3):
        return (1.0 + 4.0 * q * y + 6.0 * q * q * m2 + 4.0 * q**3 * m3) / (b[4] * bn**3)

    def U4(m2, m3, m4):
        return (1.0 + 5.0 * q * y + 10.0 * q * q * m2 + 10.0 * q**3 * m3
                + 5.0 * q**4 * m4) / (b[5] * bn**4)

    U1 = (1.0 + 2.0 * q * y) / (b[2] * bn)
    low = [1.0, U1, U2(m2l), U3(m2l, m3l), None]
    up = [1.0, U1, U2(m2u), U3(m2u, m3u), U4(m2u, m3u, m4u)]
    return low, up


def moment_T_bounds(j: int, x: float, params: StancuParams) -> MomentBounds:
    """Two-sided bounds for T*(t^j;x), j in {2,3,4}.

    j=2: ratio-bearing lower, ratio-free composed upper; j=3: ratio-bearing
    lower, composed upper; j=4: upper only (lower = -inf).  `valid` is False
    beyond the series domain, where the ratio-bearing sides are not theorems.
    """
    if j not in (2, 3, 4):
        raise QDomainError(f"moment_T_bounds supports j in {{2,3,4}}, got {j}")
    if x < 0:
        raise QDomainError(f"moment_T_bounds requires x >= 0, got {x}")
    valid = params.in_domain(x)
    low, up = _U_bounds(params, x, with_ratios=True)
    if j == 4:
        return MomentBounds(-math.inf, _compose_T(params, 4, up), None, valid)
    return MomentBounds(_compose_T(params, j, low), _compose_T(params, j, up),
                        None, valid)


def central_moment_bound(j: int, x: float, params: StancuParams) -> float:
    """Upper bound for T*((t-x)^j;x), j in {2,4}.

    j=2 is the printed quadratic (identical to phi_n); j=4 is the mechanical
    composition T4_up - 4x T3_low + 6x^2 T2_up - 4x^3 T1 + x^4 with
    ratio-free node bounds, which dominates the exact fourth central moment
    on the working grids for mu > 1/2.
    """
    if j == 2:
        return phi_n(x, params)
    if j != 4:
        raise QDomainError(f"central_moment_bound supports j in {{2,4}}, got {j}")
    low, up = _U_bounds(params, x, with_ratios=False)
    T1 = moment_T1(x, params)
    T2u = _compose_T(params, 2, up)
    T3l = _compose_T(params, 3, low)
    T4u = _compose_T(params, 4, up)
    return T4u - 4.0 * x * T3l + 6.0 * x * x * T2u - 4.0 * x**3 * T1 + x**4


def phi_n(x: float, params: StancuParams) -> float:
    """The quadratic lambda_n(x) bound from the rate theorem:

        phi_n(x) = n/((n+b)^2 [n]) (n/([3][n]) + 2a/[2]) + a^2/(n+b)^2
                 + {3n^2 (1+[1+2mu])/((n+b)^2 [3][n])
                    + (2n/((n+b)[2]))(2a - 1/[n]) - 2a/(n+b)} x
                 + {(n/(n+b))(3n/((n+b)[3]) - 4n/((n+b)[2])) + 1} x^2.
    """
    ctx = params.ctx
    q, n, a, b = params.q, params.n, params.alpha, params.beta
    b2, b3 = q_bracket(2, ctx), q_bracket(3, ctx)
    bn = params.bracket_n
    P1 = q_bracket(1.0 + 2.0 * ctx.mu, ctx)
    s = n + b
    c0 = n / (s * s * bn) * (n / (b3 * bn) + 2.0 * a / b2) + a * a / (s * s)
    c1 = (3.0 * n * n * (1.0 + P1) / (s * s * b3 * bn)
          + (2.0 * n / (s * b2)) * (2.0 * a - 1.0 / bn) - 2.0 * a / s)
    c2 = (n / s) * (3.0 * n / (s * b3) - 4.0 * n / (s * b2)) + 1.0
    return c0 + c1 * x + c2 * x * x


def lambda_exact(x: float, params: StancuParams) -> float:
    """lambda_n(x) = T*((t-x)^2;x), exact via the moment engine."""
    eng = moment_engine(params.ctx)
    T = eng.raw_moments(params, x, 2)
    return T[2] - 2.0 * x * T[1] + x * x


def central_moment_exact(j: int, x: float, params: StancuParams) -> float:
    """Exact T*((t-x)^j;x) for j <= 4 via the moment engine."""
    if j < 0 or j > 4:
        raise QDomainError(f"central_moment_exact supports j in 0..4, got {j}")
    eng = moment_engine(params.ctx)
    T = eng.raw_moments(params, x, j)
    return sum(math.comb(j, i) * (-x) ** (j - i) * T[i] for i in range(j + 1))


def d_moment_bounds(j: int, x: float, ctx: QContext, n: int) -> MomentBounds:
    """Bounds for D_{n,q}(t^j;x), j in {2,3,4}: the node-moment bounds
    scaled by [n]_q^{-j} (items 3-5 of the base-operator lemma)."""
    if j not in (2, 3, 4):
        raise QDomainError(f"d_moment_bounds supports j in {{2,3,4}}, got {j}")
    params = StancuParams(n=n, alpha=0.0, beta=0.0, ctx=ctx)
    bn = params.bracket_n
    y = bn * x
    m2l, m2u, m3l, m3u, m4u = _node_moment_bounds(params, y, with_ratios=True)
    valid = params.in_domain(x)
    scale = bn ** (-j)
    if j == 2:
        return MomentBounds(m2l * scale, m2u * scale, None, valid)
    if j == 3:
        return MomentBounds(m3l * scale, m3u * scale, None, valid)
    return MomentBounds(-math.inf, m4u * scale, None, valid)
