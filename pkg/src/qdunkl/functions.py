"""The closed family of test functions driven through the operators.

Each TestFunction carries the analytic metadata the rate theorems need:
boundedness, uniform continuity, a certified Lipschitz/Hoelder pair
(nu, M), sup-norm bounds on the first two derivatives when they exist, and
the weighted-class constant M_f with |f(x)| <= M_f (1 + x^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class TestFunction:
    name: str
    fn: Callable
    params: dict = field(default_factory=dict)
    degree: Optional[int] = None          # set for polynomial members
    is_bounded: bool = True
    is_uniformly_continuous: bool = True
    is_nondecreasing: bool = False
    lipschitz: Optional[tuple] = None     # (nu, M): |f(a)-f(b)| <= M|a-b|^nu
    deriv_bounds: Optional[tuple] = None  # (sup|f|, sup|f'|, sup|f''|) on [0, inf)
    rho_class_constant: Optional[float] = None  # M_f with |f| <= M_f (1+x^2)

    def __call__(self, t):
        return self.fn(t)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"

    @property
    def cb2_norm(self) -> Optional[float]:
        """||f|| + ||f'|| + ||f''|| when all three sup norms are certified."""
        if self.deriv_bounds is None:
            return None
        return float(sum(self.deriv_bounds))


def constant(c: float = 1.0) -> TestFunction:
    return TestFunction(
        name="const", fn=lambda t: np.full_like(np.asarray(t, dtype=float), c),
        params={"c": c}, degree=0, is_nondecreasing=True,
        lipschitz=(1.0, 0.0), deriv_bounds=(abs(c), 0.0, 0.0),
        rho_class_constant=abs(c))


def monomial(p: int) -> TestFunction:
    if p < 0 or p != int(p):
        raise ConfigError(f"monomial power must be a nonnegative integer, got {p}")
    p = int(p)
    if p == 0:
        return constant(1.0)
    return TestFunction(
        name="monomial", fn=lambda t, p=p: np.asarray(t, dtype=float) ** p,
        params={"p": p}, degree=p,
        is_bounded=False,
        is_uniformly_continuous=(p <= 1),
        is_nondecreasing=True,
        lipschitz=(1.0, 1.0) if p == 1 else None,
        rho_class_constant=1.0 if p <= 2 else None)


def exp_decay(c: float = 1.0) -> TestFunction:
    if c <= 0:
        raise ConfigError(f"exp_decay rate must be positive, got {c}")
    return TestFunction(
        name="exp_decay", fn=lambda t, c=c: np.exp(-c * np.asarray(t, dtype=float)),
        params={"c": c},
        is_nondecreasing=False,
        lipschitz=(1.0, c), deriv_bounds=(1.0, c, c * c),
        rho_class_constant=1.0)


def sine() -> TestFunction:
    return TestFunction(
        name="sine", fn=lambda t: np.sin(np.asarray(t, dtype=float)),
        is_nondecreasing=False,
        lipschitz=(1.0, 1.0), deriv_bounds=(1.0, 1.0, 1.0),
        rho_class_constant=1.0)


def abs_shift(x0: float = 1.0) -> TestFunction:
    return TestFunction(
        name="abs_shift", fn=lambda t, x0=x0: np.abs(np.asarray(t, dtype=float) - x0),
        params={"x0": x0},
        is_bounded=False, is_nondecreasing=False,
        lipschitz=(1.0, 1.0),
        rho_class_constant=max(1.0, abs(x0)))


def holder_cusp(nu: float = 0.5, x0: float = 1.0) -> TestFunction:
    """|t - x0|^nu: Hoelder class Lip_1(nu) with constant exactly 1."""
    if not (0.0 < nu <= 1.0):
        raise ConfigError(f"holder_cusp exponent must lie in (0, 1], got {nu}")
    return TestFunction(
        name="holder_cusp",
        fn=lambda t, nu=nu, x0=x0: np.abs(np.asarray(t, dtype=float) - x0) ** nu,
        params={"nu": nu, "x0": x0},
        is_bounded=False, is_nondecreasing=False,
        lipschitz=(nu, 1.0),
        rho_class_constant=max(1.0, abs(x0)))


_FACTORIES = {
    "const": constant,
    "monomial": monomial,
    "exp_decay": exp_decay,
    "sine": sine,
    "abs_shift": abs_shift,
    "holder_cusp": holder_cusp,
}


def make_function(name: str, **params) -> TestFunction:
    """Build a TestFunction by registry name; unknown names are config errors."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(_FACTORIES))
        raise ConfigError(f"unknown function name {name!r} (known: {known})") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for function {name!r}: {exc}") from None
