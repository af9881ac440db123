"""Closed-form upper and lower bounds on Ie(k, x) and their error metrics.

Upper bound (replaces I1 by the larger I_{1/2} in the integration-by-parts
form and integrates in closed form)::

    Ie < 1 - exp(-x) I0(kx) + sqrt(k/2) [erf(c sqrt x)/c - erf(d sqrt x)/d],
    c = sqrt(1 - k),  d = sqrt(1 + k)

Lower bound (replaces Q1 by the smaller Q_{1/2} in the Marcum identity)::

    Ie > [2 Q(b + a) + 2 Q(b - a) - exp(-x) I0(kx) - 1] / sqrt(1 - k^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .ie import (
    DEFAULT_MAX_TERMS,
    EvalPoint,
    Method,
    _point,
    ab_params,
    applicable_methods,
    evaluate,
    ie_eq1,
)
from .quadrature import integrate_finite
from .specfun import erf, erfc, exp_scaled_i0, ive_half

__all__ = [
    "Bracket",
    "ErrorRecord",
    "upper_bound",
    "lower_bound",
    "bracket",
    "error_record",
    "eps_ar",
    "erf_ratio",
    "upper_bound_quadrature",
    "weak_lower_bound_quadrature",
]

# Below this value of c^2 x the ratio erf(c sqrt x)/c switches to its
# Maclaurin form; the truncation error there is ~ (c^2 x)^3 / 42 ~ 2e-20.
ERF_RATIO_SWITCH = 1e-6

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float
    point: EvalPoint
    lower_valid: bool
    upper_valid: bool


@dataclass(frozen=True)
class ErrorRecord:
    point: EvalPoint
    oracle: float
    lower: float
    upper: float
    eps_ar_lower: float
    eps_ar_upper: float
    method_disagreement: float
    oracle_error: float = 0.0
    routes: tuple = ()


def erf_ratio(c: float, x: float) -> float:
    """erf(c sqrt(x)) / c, continuous through c = 0 where it equals 2 sqrt(x/pi)."""
    u = c * c * x
    if u < ERF_RATIO_SWITCH:
        return _TWO_OVER_SQRT_PI * math.sqrt(x) * (1.0 - u / 3.0 + u * u / 10.0)
    return erf(c * math.sqrt(x)) / c


def upper_bound(p) -> float:
    p = _point(p)
    k, x = p.k, p.x
    if x == 0.0:
        return 0.0
    head = -math.expm1(-x) if k == 0.0 else 1.0 - exp_scaled_i0(k, x)
    if k == 0.0:
        return head
    c = math.sqrt(1.0 - k)
    d = math.sqrt(1.0 + k)
    return head + math.sqrt(k / 2.0) * (erf_ratio(c, x) - erf_ratio(d, x))


def lower_bound(p) -> float:
    p = _point(p)
    if p.k >= 1.0:
        raise DomainError("the lower bound is undefined at k = 1 (1/sqrt(1-k^2) diverges)")
    k, x = p.k, p.x
    if x == 0.0:
        return 0.0
    ab = ab_params(p)
    # 2Q(b-a) - 1 = erf((a-b)/sqrt2) and 2Q(b+a) = erfc((a+b)/sqrt2), since a >= b
    numerator = (
        erf((ab.a - ab.b) * _INV_SQRT2)
        + erfc((ab.a + ab.b) * _INV_SQRT2)
        - exp_scaled_i0(k, x)
    )
    return numerator / p.root


def bracket(p) -> Bracket:
    p = _point(p)
    up = upper_bound(p)
    if p.k < 1.0:
        return Bracket(lower_bound(p), up, p, True, True)
    return Bracket(math.nan, up, p, False, True)


def eps_ar(exact: float, approx: float) -> float:
    """Absolute relative error |exact - approx| / exact."""
    if not exact > 0:
        raise DomainError("relative error needs a positive reference value")
    return abs(exact - approx) / exact


def error_record(p, oracle_tol: float = 1e-12, routes=None,
                 max_terms: int = DEFAULT_MAX_TERMS) -> ErrorRecord:
    """Oracle value, both bounds, their relative errors and route spread.

    ``routes`` selects which evaluation routes enter the disagreement metric
    (default: every applicable route); only converged routes count.
    """
    p = _point(p)
    if not p.x > 0:
        raise DomainError("error_record needs x > 0 so that Ie(k, x) > 0")
    oracle = ie_eq1(p, oracle_tol)
    if not oracle.converged:
        raise ConvergenceError(f"oracle did not converge at k={p.k}, x={p.x}")
    br = bracket(p)
    lower = br.lower if br.lower_valid else math.nan
    eps_lo = eps_ar(oracle.value, lower) if br.lower_valid else math.nan
    eps_up = eps_ar(oracle.value, br.upper)

    wanted = applicable_methods(p) if routes is None else [
        Method.parse(m) if isinstance(m, str) else m for m in routes
    ]
    results = []
    for m in wanted:
        if m not in applicable_methods(p):
            continue
        results.append(oracle if m is Method.EQ1_QUAD else evaluate(p, m, oracle_tol, max_terms))
    values = [r.value for r in results if r.converged]
    if oracle.converged and Method.EQ1_QUAD not in wanted:
        values.append(oracle.value)
    spread = (max(values) - min(values)) / oracle.value if values else 0.0
    return ErrorRecord(p, oracle.value, lower, br.upper, eps_lo, eps_up, spread,
                       oracle.error_estimate, tuple(results))


# ---------------------------------------------------------------------------
# Intermediate inequalities, evaluated by quadrature
# ---------------------------------------------------------------------------


def _half_order_integral(nu: float, k: float, x: float, tol: float):
    def f(t):
        return np.exp(-(1.0 - k) * t) * ive_half(nu, k * t)

    return integrate_finite(f, 0.0, x, min(1e-14, 1e-2 * tol), tol)


def upper_bound_quadrature(p, tol: float = 1e-12):
    """1 - exp(-x) I0(kx) + k * integral_0^x exp(-t) I_{1/2}(kt) dt, numerically.

    Returns (value, error estimate).  Equals :func:`upper_bound` when the
    closed-form integration is right.
    """
    p = _point(p)
    head = 1.0 - exp_scaled_i0(p.k, p.x)
    if p.k == 0.0 or p.x == 0.0:
        return head, 0.0
    res = _half_order_integral(0.5, p.k, p.x, tol)
    return head + p.k * res.value, p.k * res.abs_error_estimate


def weak_lower_bound_quadrature(p, tol: float = 1e-12):
    """1 - exp(-x) I0(kx) + k * integral_0^x exp(-t) I_{3/2}(kt) dt, numerically.

    This weaker lower bound has no closed form; it is only checked, never
    used as a production bound.  Returns (value, error estimate).
    """
    p = _point(p)
    head = 1.0 - exp_scaled_i0(p.k, p.x)
    if p.k == 0.0 or p.x == 0.0:
        return head, 0.0
    res = _half_order_integral(1.5, p.k, p.x, tol)
    return head + p.k * res.value, p.k * res.abs_error_estimate

