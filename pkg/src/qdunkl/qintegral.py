"""Jackson q-integration and the operator's cell integrals.

The q-integral used throughout is the Thomae-Jackson integral

    int_0^a f(t) d_q t = (1-q) a sum_{j>=0} q^j f(a q^j),

with the [a,b] version the formal difference of two zero-based integrals.
The Kantorovich cells are

    cell_k = [ q [k+2*mu*theta_k]_q / [n]_q ,  [k+1+2*mu*theta_k]_q / [n]_q ],

whose width is exactly 1/[n]_q because [a+1]_q = q [a]_q + 1.  For monomials
t^p (p <= 4) the cell integral has the closed binomial form

    int_cell t^p d_q t = (1/([p+1]_q [n]_q^{p+1})) sum_{l=0}^{p}
                         C(p+1, l) q^l A^l,      A = [k+2*mu*theta_k]_q,

which follows from (U^{p+1} - L^{p+1})/[p+1]_q with U = (1+qA)/[n]_q and
L = qA/[n]_q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dunkl import theta
from .errors import QDomainError
from .qcore import DEFAULT_TOL, QContext, q_bracket

MAX_MONOMIAL_POWER = 4


@dataclass(frozen=True)
class QCell:
    """Integration cell number k of the operator with index n."""

    k: int
    n_index: int
    ctx: QContext

    def __post_init__(self):
        if self.k < 0:
            raise QDomainError(f"cell index must be nonnegative, got {self.k}")
        if self.n_index < 1:
            raise QDomainError(f"operator index must be >= 1, got {self.n_index}")

    @property
    def bracket_n(self) -> float:
        return q_bracket(self.n_index, self.ctx)

    @property
    def node_bracket(self) -> float:
        """A = [k + 2*mu*theta_k]_q."""
        return q_bracket(self.k + 2.0 * self.ctx.mu * theta(self.k), self.ctx)

    @property
    def lower(self) -> float:
        return self.ctx.q * self.node_bracket / self.bracket_n

    @property
    def upper(self) -> float:
        return (1.0 + self.ctx.q * self.node_bracket) / self.bracket_n

    @property
    def width(self) -> float:
        """Always 1/[n]_q."""
        return self.upper - self.lower


def jackson_integral_zero(f: Callable[[float], float], a: float, ctx: QContext,
                          tol: float = DEFAULT_TOL) -> float:
    """int_0^a f d_q t by the truncated Jackson sum.

    Truncates once the geometric weight (1-q) a q^j falls below tol relative
    to scale, using the largest recent |f| sample as the magnitude estimate
    (f is continuous at 0 for every test function used here).
    """
    if a < 0:
        raise QDomainError(f"jackson_integral_zero requires a >= 0, got {a}")
    if a == 0.0:
        return 0.0
    q = ctx.q
    s = 0.0
    w = (1.0 - q) * a
    recent = 1.0
    j = 0
    fv_hist = []
    while True:
        fv = f(a * q**j)
        fv_hist.append(abs(fv))
        if len(fv_hist) > 3:
            fv_hist.pop(0)
        recent = max(max(fv_hist), 1e-30)
        s += w * fv
        w *= q
        j += 1
        # remaining mass sum_{i>=j} (1-q) a q^i = a q^j
        if a * (q**j) * recent < tol * (1.0 + abs(s)):
            break
        if j > 10_000_000:
            raise ArithmeticError("jackson_integral_zero failed to truncate")
    return s


def jackson_integral(f: Callable[[float], float], cell: QCell,
                     tol: float = DEFAULT_TOL) -> float:
    """int over the cell as int_0^upper - int_0^lower.

    A formal difference: it can be negative for positive f in general
    q-calculus, but over the operator's cells with nondecreasing f it is the
    quantity the moment formulas integrate.
    """
    return (jackson_integral_zero(f, cell.upper, cell.ctx, tol)
            - jackson_integral_zero(f, cell.lower, cell.ctx, tol))


def monomial_cell_integral(p: int, cell: QCell) -> float:
    """Closed form of int_cell t^p d_q t for p in {0, ..., 4}."""
    if p < 0 or p > MAX_MONOMIAL_POWER or p != int(p):
        raise QDomainError(
            f"monomial_cell_integral supports p in 0..{MAX_MONOMIAL_POWER}, got {p}")
    p = int(p)
    ctx = cell.ctx
    q = ctx.q
    A = cell.node_bracket
    acc = 0.0
    for l in range(p + 1):
        acc += math.comb(p + 1, l) * (q * A) ** l
    return acc / (q_bracket(p + 1, ctx) * cell.bracket_n ** (p + 1))


# --------------------------------------------------------------------------
# Vectorized kernels used by the operator series evaluator
# --------------------------------------------------------------------------

def cell_bounds_arrays(ctx: QContext, n_index: int, k_max: int):
    """(A, lower, upper) for cells k = 0..k_max-1 as numpy arrays."""
    q, mu = ctx.q, ctx.mu
    ks = np.arange(k_max)
    lq = math.log(q)
    args = ks + 2.0 * mu * (ks % 2)
    A = np.expm1(args * lq) / math.expm1(lq)
    bn = q_bracket(n_index, ctx)
    lower = q * A / bn
    upper = (1.0 + q * A) / bn
    return A, lower, upper


def jackson_cells_vectorized(f, ctx: QContext, n_index: int, k_max: int,
                             shift=None, tol: float = DEFAULT_TOL,
                             chunk: int = 256) -> np.ndarray:
    """[n]_q * int_cell_k f(shift(t)) d_q t for k = 0..k_max-1.

    f must accept numpy arrays.  The Jackson depth J is chosen so the
    neglected geometric mass is below tol relative; all cells share it.
    Cells are processed in chunks to bound the (cells x J) working set.
    """
    q = ctx.q
    _, lower, upper = cell_bounds_arrays(ctx, n_index, k_max)
    bn = q_bracket(n_index, ctx)
    J = max(8, int(math.log(tol * 1e-2) / math.log(q)) + 1)
    qj = q ** np.arange(J)

    def zero_based(a_vec):
        out = np.empty(len(a_vec))
        for i in range(0, len(a_vec), chunk):
            a = a_vec[i:i + chunk]
            pts = a[:, None] * qj[None, :]
            vals = f(shift(pts)) if shift is not None else f(pts)
            out[i:i + chunk] = (1.0 - q) * a * (vals * qj[None, :]).sum(axis=1)
        return out

    return bn * (zero_based(upper) - zero_based(lower))
