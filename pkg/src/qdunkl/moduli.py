"""Grid estimation of the moduli of continuity.

All three moduli are suprema over continua; here they are estimated over
uniform grids.  Grid suprema understate the true value, so theorem checks
that place a modulus on the large side of a bound use a 10x finer grid than
the operator sweep (keeping the check conservative in the right direction).

    omega(f, delta)    = sup_{|y-x| <= delta} |f(y) - f(x)|
    omega2(f, sqrt(d)) = sup_{0 < h < sqrt(d)} sup_x |f(x+2h)-2f(x+h)+f(x)|
    Omega(f, delta)    = sup_{x, |h| <= delta} |f(x+h)-f(x)| /
                         ((1+h^2)(1+x^2))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QDomainError


@dataclass(frozen=True)
class DomainGrid:
    """Uniform grid on [0, x_max] with `points` nodes."""

    x_max: float
    points: int = 201

    def __post_init__(self):
        if self.x_max <= 0:
            raise QDomainError(f"x_max must be positive, got {self.x_max}")
        if self.points < 2:
            raise QDomainError(f"grid needs at least 2 points, got {self.points}")

    @property
    def h(self) -> float:
        return self.x_max / (self.points - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.points)

    def refined(self, factor: int = 10) -> "DomainGrid":
        return DomainGrid(self.x_max, (self.points - 1) * factor + 1)


def modulus(f, delta: float, grid: DomainGrid) -> float:
    """omega(f, delta) over grid pairs; f must be evaluable on
    [0, x_max + delta]."""
    if delta <= 0:
        raise QDomainError(f"modulus requires delta > 0, got {delta}")
    h = grid.h
    n_ext = grid.points + int(math.ceil(delta / h)) + 1
    xs = np.arange(n_ext) * h
    fx = np.asarray(f(xs), dtype=float)
    d_max = int(delta / h + 1e-12)
    best = 0.0
    base = grid.points
    for d in range(1, d_max + 1):
        diffs = np.abs(fx[d:d + base] - fx[:base])
        m = float(diffs.max())
        if m > best:
            best = m
    return best


def modulus2(f, delta_sqrt: float, grid: DomainGrid) -> float:
    """Second-order modulus omega2(f, delta_sqrt): sup over grid x and grid
    steps 0 < h < delta_sqrt of |f(x+2h) - 2f(x+h) + f(x)|."""
    if delta_sqrt <= 0:
        raise QDomainError(f"modulus2 requires delta_sqrt > 0, got {delta_sqrt}")
    h = grid.h
    n_ext = grid.points + 2 * (int(math.ceil(delta_sqrt / h)) + 1)
    xs = np.arange(n_ext) * h
    fx = np.asarray(f(xs), dtype=float)
    d_max = int(delta_sqrt / h + 1e-12)
    best = 0.0
    base = grid.points
    for d in range(1, d_max + 1):
        second = np.abs(fx[2 * d:2 * d + base] - 2.0 * fx[d:d + base] + fx[:base])
        m = float(second.max())
        if m > best:
            best = m
    return best


def weighted_modulus(f, delta: float, grid: DomainGrid) -> float:
    """Omega(f, delta) for f in the weighted class |f| <= M_f (1+x^2);
    probes with x+h < 0 are clamped out (h runs over [-delta, delta])."""
    if delta <= 0:
        raise QDomainError(f"weighted_modulus requires delta > 0, got {delta}")
    h = grid.h
    n_ext = grid.points + int(math.ceil(delta / h)) + 1
    xs = np.arange(n_ext) * h
    fx = np.asarray(f(xs), dtype=float)
    base = grid.points
    x_base = xs[:base]
    wx = 1.0 + x_base * x_base
    d_max = int(delta / h + 1e-12)
    best = 0.0
    for d in range(1, d_max + 1):
        step = d * h
        wh = 1.0 + step * step
        # forward probe x+h
        fwd = np.abs(fx[d:d + base] - fx[:base]) / (wh * wx)
        m = float(fwd.max())
        if m > best:
            best = m
        # backward probe x-h, clamped to x-h >= 0
        if d < base:
            bwd = np.abs(fx[:base - d] - fx[d:base]) / (wh * wx[d:])
            m = float(bwd.max())
            if m > best:
                best = m
    return best


class Modulus2Table:
    """Precomputed omega2 lookups on one grid.

    omega2(f, s) on a grid is the running max of per-offset second-difference
    maxima, so one O(d_max * N) pass serves every later query in O(1).
    """

    def __init__(self, f, grid: DomainGrid, s_max: float):
        self.grid = grid
        h = grid.h
        d_max = max(1, int(s_max / h + 1e-12))
        n_ext = grid.points + 2 * (d_max + 1)
        xs = np.arange(n_ext) * h
        fx = np.asarray(f(xs), dtype=float)
        base = grid.points
        per_offset = np.empty(d_max + 1)
        per_offset[0] = 0.0
        for d in range(1, d_max + 1):
            per_offset[d] = np.abs(
                fx[2 * d:2 * d + base] - 2.0 * fx[d:d + base] + fx[:base]).max()
        self._cummax = np.maximum.accumulate(per_offset)

    def __call__(self, delta_sqrt: float) -> float:
        if delta_sqrt <= 0:
            raise QDomainError(f"omega2 requires delta_sqrt > 0, got {delta_sqrt}")
        d = int(delta_sqrt / self.grid.h + 1e-12)
        d = min(d, len(self._cummax) - 1)
        return float(self._cummax[d])


def lipschitz_estimate(f, nu: float, grid: DomainGrid) -> float:
    """Empirical lower bound for the Hoelder constant M in
    |f(a)-f(b)| <= M |a-b|^nu, over all grid pairs."""
    if not (0.0 < nu <= 1.0):
        raise QDomainError(f"lipschitz_estimate requires nu in (0,1], got {nu}")
    xs = grid.xs
    fx = np.asarray(f(xs), dtype=float)
    best = 0.0
    n = len(xs)
    for d in range(1, n):
        ratios = np.abs(fx[d:] - fx[:-d]) / (d * grid.h) ** nu
        m = float(ratios.max())
        if m > best:
            best = m
    return best
