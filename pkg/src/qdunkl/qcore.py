"""q-calculus primitives.

The building blocks used everywhere else: the q-bracket [x]_q = (1-q^x)/(1-q)
(accepted for real x >= 0, not just integers, because the Dunkl machinery
needs [k + 2*mu*theta_k]_q with non-integer 2*mu), q-factorials, q-binomial
coefficients, q-Pochhammer symbols, and the two classical q-exponentials

    e(z) = sum z^k/[k]_q!            (radius |z| < 1/(1-q))
    E(z) = sum q^(k(k-1)/2) z^k/[k]_q!   (entire; product form
                                          prod_j (1+(1-q) q^j z))

satisfying e(z)*E(-z) = 1.  All routines are pure, double precision, and are
stable as q -> 1 (brackets go through expm1, never through 1-q^x directly).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import QDomainError

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class QContext:
    """Parameter bundle (q, mu) shared by every series evaluation.

    Requires 0 < q < 1 strictly (the q -> 1 classical limit is reached only
    through dedicated limit helpers, never stored) and mu > -1/2, which keeps
    the Dunkl coefficients gamma_{mu,q}(k) positive.  The operators'
    inequalities are stated for mu > 1/2; `mu_warning` flags contexts below
    that threshold.
    """

    q: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise QDomainError(f"q must lie strictly in (0,1), got q={self.q}")
        if not (self.mu > -0.5):
            raise QDomainError(f"mu must exceed -1/2, got mu={self.mu}")
        if self.mu_warning:
            warnings.warn(
                f"mu={self.mu} <= 1/2: operator inequalities are stated for "
                "mu > 1/2; results below that threshold are exploratory",
                stacklevel=2,
            )

    @property
    def mu_warning(self) -> bool:
        return self.mu <= 0.5

    @property
    def radius(self) -> float:
        """Convergence radius 1/(1-q) of e(z) and of e_{mu,q}(z)."""
        return 1.0 / (1.0 - self.q)


def q_bracket(x: float, ctx: QContext) -> float:
    """[x]_q = (1 - q^x)/(1 - q) for real x >= 0.

    Computed as expm1(x ln q)/expm1(ln q), which stays accurate when q is
    close to 1 (Korovkin sweeps push q_n -> 1).  Monotone increasing in x,
    [0]_q = 0, and for integer x equals 1 + q + ... + q^(x-1).
    """
    if x < 0:
        raise QDomainError(f"q_bracket requires x >= 0, got x={x}")
    if x == 0:
        return 0.0
    lq = math.log(ctx.q)
    return math.expm1(x * lq) / math.expm1(lq)


def q_number(x: float, q: float) -> float:
    """[x]_q without a QContext; same formula, used in hot loops."""
    if x == 0:
        return 0.0
    lq = math.log(q)
    return math.expm1(x * lq) / math.expm1(lq)


def q_factorial(n: int, ctx: QContext) -> float:
    """[n]_q! = [n]_q [n-1]_q ... [1]_q, with [0]_q! = 1."""
    if n < 0 or n != int(n):
        raise QDomainError(f"q_factorial requires a nonnegative integer, got {n}")
    out = 1.0
    for j in range(1, int(n) + 1):
        out *= q_bracket(j, ctx)
    return out


def q_binomial(n: int, k: int, ctx: QContext) -> float:
    """Gaussian binomial [n choose k]_q = [n]_q!/([k]_q! [n-k]_q!).

    Symmetric in k <-> n-k; computed as a product of bracket ratios rather
    than a ratio of factorials to avoid overflow for larger n.
    """
    if k < 0 or n < 0:
        raise QDomainError("q_binomial requires nonnegative integers")
    if k > n:
        raise QDomainError(f"q_binomial requires k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    out = 1.0
    for j in range(1, k + 1):
        out *= q_bracket(n - k + j, ctx) / q_bracket(j, ctx)
    return out


def q_pochhammer(x: float, n, ctx: QContext, tol: float = DEFAULT_TOL) -> float:
    """(x; q)_n = prod_{j=0}^{n-1} (1 - q^j x); n may be math.inf.

    The infinite product truncates once |q^J x| < tol and folds the analytic
    tail estimate prod_{j>=J}(1-q^j x) ~ exp(-q^J x/(1-q)) into the result.
    """
    q = ctx.q
    if n is math.inf:
        out = 1.0
        term = float(x)
        j = 0
        while abs(term) >= tol:
            out *= 1.0 - term
            if out == 0.0:
                return 0.0
            term *= q
            j += 1
            if j > 100000:  # q very near 1 with large x; tail handled below
                break
        return out * math.exp(-term / (1.0 - q))
    if n < 0 or n != int(n):
        raise QDomainError(f"q_pochhammer requires n a nonnegative integer or inf, got {n}")
    out = 1.0
    for j in range(int(n)):
        out *= 1.0 - (q**j) * x
    return out


def q_exp_small(z: float, ctx: QContext, tol: float = DEFAULT_TOL) -> float:
    """Classical small q-exponential e(z) = sum z^k/[k]_q!.

    Defined only on |z| < 1/(1-q); outside, the terms do not tend to zero and
    the call is a domain error.  Stops at the first k where the term is below
    tol relative to the partial sum and the term ratio is already below 1, so
    the geometric tail bound applies.
    """
    if abs(z) >= ctx.radius:
        raise QDomainError(
            f"q_exp_small requires |z| < 1/(1-q) = {ctx.radius:.6g}, got z={z}")
    s = 0.0
    term = 1.0
    k = 0
    while True:
        s += term
        k += 1
        ratio = z / q_bracket(k, ctx)
        term *= ratio
        if abs(term) < tol * abs(s) and abs(ratio) < 1.0:
            break
        if k > 10_000_000:
            raise QDomainError("q_exp_small failed to converge")
    return s + term / (1.0 - abs(z) / ctx.radius)  # geometric tail estimate


def q_exp_big(z: float, ctx: QContext, tol: float = DEFAULT_TOL) -> float:
    """Big q-exponential E(z) = sum q^(k(k-1)/2) z^k/[k]_q!, entire in z.

    Evaluated through the product form prod_j (1 + (1-q) q^j z), which is
    exact at the zeros z = -q^(-j)/(1-q); for |z| <= 10 the series form is
    cross-checked against the product within 1e-10 relative.
    """
    q = ctx.q
    prod = 1.0
    factor = (1.0 - q) * z
    j = 0
    while abs(factor) >= 1e-17:
        prod *= 1.0 + factor
        if prod == 0.0:
            break
        factor *= q
        j += 1
        if j > 100000:
            break
    if prod != 0.0:
        prod *= math.exp(factor / (1.0 - q))  # tail of sum(log(1+...))
    if abs(z) <= 10.0:
        s = 0.0
        term = 1.0
        k = 0
        while True:
            s += term
            k += 1
            term *= (q ** (k - 1)) * z / q_bracket(k, ctx)
            if abs(term) < tol * max(abs(s), 1e-300) and k > 4:
                break
        if abs(s - prod) > 1e-10 * max(abs(s), abs(prod), 1.0):
            raise ArithmeticError(
                f"q_exp_big series/product cross-check failed at z={z}: "
                f"series={s!r}, product={prod!r}")
    return prod
