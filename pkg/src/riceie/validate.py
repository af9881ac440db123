"""Property suites that check the library against its own oracle.

Each suite returns a :class:`PropertyReport` with a pass/fail flag and the
worst-case margin seen (positive means the property held with room to
spare).  ``run_suites`` bundles them into the QUICK and FULL levels used by
``riceie validate``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bounds import (
    eps_ar,
    lower_bound,
    upper_bound,
    upper_bound_quadrature,
    weak_lower_bound_quadrature,
)
from .ie import (
    EvalPoint,
    Method,
    ab_params,
    applicable_methods,
    evaluate,
    ie_auto,
    ie_eq1,
)
from .marcum import marcum_q1, marcum_q_half, marcum_q_m
from .specfun import bessel_i_half, exp_scaled_i0, ive, ive_half

__all__ = ["PropertyReport", "CALIBRATION", "GRIDS", "run_suites", "SUITES"]

# Ceilings for max_k eps_ar(lower bound) over k in {0.05, ..., 0.95}.
# One-time calibration against the eq1 oracle at tol 1e-14 (and mpmath at
# 30 digits) gave 8.47e-3 at x = 40 and 7.76e-4 at x = 80, both at k = 0.95.
CALIBRATION = {
    "eps_lower_ceiling_x40": 1e-2,
    "eps_lower_ceiling_x80": 1e-3,
    "oracle_tol": 1e-14,
}

# Slack allowed when comparing a bound against the oracle.
BRACKET_SLACK = 1e-10
SERIES_AGREEMENT = 1e-8
ROUTE_AGREEMENT = 1e-9
MARCUM_IDENTITY_TOL = 1e-10
CLOSED_FORM_TOL = 1e-12
MONOTONE_MARGIN = 1e-12
INTEGRAL_FORM_TOL = 1e-10
TIGHTENING_NOISE = 1e-10


def _steps(lo: float, step: float, count: int) -> list[float]:
    return [round(lo + i * step, 10) for i in range(count)]


GRIDS = {
    "k19": _steps(0.05, 0.05, 19),
    "k9": _steps(0.1, 0.1, 9),
    "x9": [0.5, 1.0, 2.0, 5.0, 7.0, 10.0, 20.0, 40.0, 80.0],
    "x50": list(np.geomspace(0.1, 100.0, 50)),
    "x_crossover": list(np.geomspace(0.1, 40.0, 200)),
}


@dataclass
class PropertyReport:
    name: str
    passed: bool
    worst_margin: float
    detail: str = ""
    seconds: float = field(default=0.0, compare=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name:<34} worst margin {self.worst_margin: .3e}  {self.detail}"


def _report(name: str, margins: list[float], detail: str = "") -> PropertyReport:
    worst = min(margins) if margins else math.inf
    return PropertyReport(name, worst > 0, worst, detail)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def bracketing(ks, xs, lower: Callable = lower_bound, upper: Callable = upper_bound,
               oracle_tol: float = 1e-12) -> PropertyReport:
    """lower < Ie < upper up to the declared slack (1e-10 + oracle estimate)."""
    margins = []
    resolved = 0
    for k in ks:
        for x in xs:
            p = EvalPoint(k, x)
            o = ie_eq1(p, oracle_tol)
            if not o.converged:
                margins.append(-math.inf)
                continue
            slack = BRACKET_SLACK + o.error_estimate
            lo, up = lower(p), upper(p)
            margins.append(o.value - lo + slack)
            margins.append(up - o.value + slack)
            if o.value - lo > slack and up - o.value > slack:
                resolved += 1
    n = len(ks) * len(xs)
    return _report("bracketing", margins, f"{n} points, {resolved} strict beyond slack")


def route_agreement(ks, xs, oracle_tol: float = 1e-12) -> PropertyReport:
    """Converged routes agree with the eq1 oracle (series 1e-8, others 1e-9)."""
    margins = []
    skipped = []
    for k in ks:
        for x in xs:
            p = EvalPoint(k, x)
            o = ie_eq1(p, oracle_tol)
            for m in applicable_methods(p):
                if m is Method.EQ1_QUAD:
                    continue
                r = evaluate(p, m, oracle_tol)
                if not r.converged:
                    skipped.append(f"{m.value}@({k},{x})")
                    continue
                tol = SERIES_AGREEMENT if m in (Method.SERIES_EQ3, Method.SERIES_EQ4) else ROUTE_AGREEMENT
                margins.append(tol - abs(r.value - o.value) / o.value)
    detail = f"{len(margins)} comparisons"
    if skipped:
        detail += f", {len(skipped)} non-converged skipped"
    return _report("six-way route agreement", margins, detail)


def marcum_complementarity(ks, xs) -> PropertyReport:
    """Q1(a,b) + Q1(b,a) = 1 + exp(-x) I0(kx) at the Ie parameters."""
    margins = []
    for k in ks:
        for x in xs:
            ab = ab_params(EvalPoint(k, x))
            lhs = marcum_q1(ab.a, ab.b) + marcum_q1(ab.b, ab.a)
            rhs = 1.0 + exp_scaled_i0(k, x)
            margins.append(MARCUM_IDENTITY_TOL - abs(lhs - rhs))
    return _report("marcum complementarity", margins)


def marcum_half_agreement(values=(0.5, 1.0, 2.0, 4.0)) -> PropertyReport:
    """Gaussian closed form of Q_{1/2} vs its quadrature definition."""
    from .marcum import _integrate

    margins = []
    for a in values:
        for b in values:
            q = _integrate(0.5, a, b).value
            margins.append(MARCUM_IDENTITY_TOL - abs(q - marcum_q_half(a, b)))
    return _report("Q_1/2 closed form vs quadrature", margins)


def bessel_order_monotonicity(xs=(0.5, 1.0, 2.0, 5.0, 10.0, 50.0)) -> PropertyReport:
    """I_nu(x) strictly decreasing in nu over {0, 1/2, ..., 3}."""
    orders = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    margins = []
    for x in xs:
        vals = [float(ive(int(nu), x)) if nu == int(nu) else float(ive_half(nu, x)) for nu in orders]
        for lo, hi in zip(vals, vals[1:]):
            # compare in relative terms so that large x (tiny exp(-x) scale) counts
            margins.append((lo - hi) / lo - MONOTONE_MARGIN)
    return _report("I_nu decreasing in nu", margins)


def marcum_order_monotonicity(values=(0.5, 1.0, 2.0, 4.0)) -> PropertyReport:
    """Q_{1/2} < Q_1 < Q_{3/2} on a 4x4 (a, b) grid."""
    margins = []
    for a in values:
        for b in values:
            q_half = marcum_q_half(a, b)
            q1 = marcum_q1(a, b)
            q32 = marcum_q_m(1.5, a, b)
            margins.append(q1 - q_half - MONOTONE_MARGIN)
            margins.append(q32 - q1 - MONOTONE_MARGIN)
    return _report("Q_m increasing in m", margins)


def crossover_count(k: float = 0.5, xs=None, oracle_tol: float = 1e-12):
    """Number of sign changes of eps_upper - eps_lower along ``xs``."""
    xs = GRIDS["x_crossover"] if xs is None else xs
    diffs = []
    for x in xs:
        p = EvalPoint(k, x)
        o = ie_eq1(p, oracle_tol).value
        diffs.append(eps_ar(o, upper_bound(p)) - eps_ar(o, lower_bound(p)))
    signs = [d > 0 for d in diffs]
    changes = sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)
    return changes, diffs


def crossover(k: float = 0.5, xs=None) -> PropertyReport:
    """Upper bound tighter at small x, lower bound at large x, one switch."""
    changes, diffs = crossover_count(k, xs)
    ok = diffs[0] < 0 and diffs[-1] > 0 and changes == 1
    margin = min(-diffs[0], diffs[-1]) if changes == 1 else -abs(changes - 1)
    return PropertyReport("crossover of bound tightness", ok, margin, f"{changes} sign change(s)")


def max_eps_lower(x: float, ks=None, oracle_tol: float | None = None) -> float:
    ks = GRIDS["k19"] if ks is None else ks
    tol = CALIBRATION["oracle_tol"] if oracle_tol is None else oracle_tol
    worst = 0.0
    for k in ks:
        p = EvalPoint(k, x)
        o = ie_eq1(p, tol)
        if not o.converged:
            return math.inf
        worst = max(worst, eps_ar(o.value, lower_bound(p)))
    return worst


def approximation_claim(ks=None) -> PropertyReport:
    """max_k eps_lower shrinks from x=40 to x=80 and stays under the ceilings."""
    e40 = max_eps_lower(40.0, ks)
    e80 = max_eps_lower(80.0, ks)
    margins = [
        e40 - e80,
        CALIBRATION["eps_lower_ceiling_x40"] - e40,
        CALIBRATION["eps_lower_ceiling_x80"] - e80,
    ]
    ok = all(math.isfinite(v) for v in (e40, e80)) and min(margins) > 0
    return PropertyReport("lower bound as approximation", ok, min(margins),
                          f"max eps x=40: {e40:.3e}, x=80: {e80:.3e}")


def intermediate_inequalities(ks, xs) -> PropertyReport:
    """The I_{1/2} integral form of the upper bound equals its closed form;
    the I_{3/2} variant stays below the oracle for x <= 20."""
    margins = []
    for k in ks:
        for x in xs:
            p = EvalPoint(k, x)
            q, _ = upper_bound_quadrature(p)
            margins.append(INTEGRAL_FORM_TOL - abs(q - upper_bound(p)))
            if x <= 20.0:
                o = ie_eq1(p)
                v, err = weak_lower_bound_quadrature(p)
                margins.append(o.value - v + BRACKET_SLACK + err + o.error_estimate)
    return _report("intermediate inequalities", margins)


def closed_forms(xs=(0.1, 1.0, 10.0, 80.0), ks=(0.1, 0.5, 0.9)) -> PropertyReport:
    """Ie(0,x)=1-exp(-x), Ie(k,0)=0 on every route; bounds collapse there."""
    margins = []
    for x in xs:
        exact = -math.expm1(-x)
        p = EvalPoint(0.0, x)
        for m in applicable_methods(p):
            r = evaluate(p, m)
            margins.append(CLOSED_FORM_TOL - abs(r.value - exact) / exact)
        margins.append(CLOSED_FORM_TOL - abs(ie_auto(p).value - exact) / exact)
        margins.append(1e-13 - abs(upper_bound(p) - exact) / exact)
        margins.append(1e-13 - abs(lower_bound(p) - exact) / exact)
    for k in ks:
        p = EvalPoint(k, 0.0)
        for m in applicable_methods(p):
            margins.append(CLOSED_FORM_TOL - abs(evaluate(p, m).value))
        margins.append(1e-15 - abs(upper_bound(p)))
        margins.append(1e-15 - abs(lower_bound(p)))
    return _report("closed forms and collapse", margins)


def limit_at_infinity(ks=None, x: float = 200.0) -> PropertyReport:
    ks = GRIDS["k9"] if ks is None else ks
    margins = []
    for k in ks:
        p = EvalPoint(k, x)
        margins.append(1e-6 - abs(ie_eq1(p).value * p.root - 1.0))
    return _report("limit 1/sqrt(1-k^2) at x=200", margins)


def monotone_in_x(ks=None, xs=None) -> PropertyReport:
    ks = GRIDS["k9"] if ks is None else ks
    xs = sorted(GRIDS["x9"] if xs is None else xs)
    margins = []
    for k in ks:
        vals = [ie_eq1(EvalPoint(k, x)).value for x in xs]
        # Ie saturates at 1/sqrt(1-k^2) to double precision for large x, so
        # strict growth is only visible down to a few ulps.
        margins += [b - a + 4.0 * np.spacing(b) for a, b in zip(vals, vals[1:])]
    return _report("Ie non-decreasing in x", margins)


def monotone_tightening(ks=(0.3, 0.5, 0.7), xs=None) -> PropertyReport:
    """eps_lower non-increasing in x on [10, 100], up to oracle noise."""
    xs = list(np.linspace(10.0, 100.0, 20)) if xs is None else xs
    margins = []
    for k in ks:
        eps = []
        for x in xs:
            p = EvalPoint(k, x)
            eps.append(eps_ar(ie_eq1(p, CALIBRATION["oracle_tol"]).value, lower_bound(p)))
        margins += [a - b + TIGHTENING_NOISE for a, b in zip(eps, eps[1:])]
    return _report("lower bound tightens with x", margins)


def half_order_closed_form(xs=None) -> PropertyReport:
    """I_{1/2} finite sum vs the ascending series (scaled), 1e-12 relative."""
    from .specfun import _log_ive_half_series

    xs = np.geomspace(1e-3, 300.0, 60) if xs is None else xs
    margins = []
    for x in xs:
        closed = bessel_i_half(0, float(x)).log_abs()
        series = _log_ive_half_series(0.5, float(x)) + float(x)
        margins.append(1e-12 - abs(math.expm1(closed - series)))
    return _report("I_1/2 closed form vs series", margins)


SUITES = {
    "bracketing": bracketing,
    "route_agreement": route_agreement,
    "marcum_complementarity": marcum_complementarity,
    "marcum_half_agreement": marcum_half_agreement,
    "bessel_order_monotonicity": bessel_order_monotonicity,
    "marcum_order_monotonicity": marcum_order_monotonicity,
    "crossover": crossover,
    "approximation_claim": approximation_claim,
    "intermediate_inequalities": intermediate_inequalities,
    "closed_forms": closed_forms,
}


def _plan(level: str):
    g = GRIDS
    if level == "quick":
        k_small = [0.1, 0.5, 0.9]
        x_small = [0.5, 7.0, 80.0]
        return [
            (bracketing, (k_small, [0.1, 1.0, 10.0, 100.0])),
            (route_agreement, (k_small, x_small)),
            (marcum_complementarity, (k_small, x_small)),
            (marcum_half_agreement, ((1.0, 2.0),)),
            (bessel_order_monotonicity, ()),
            (marcum_order_monotonicity, ((1.0, 2.0),)),
            (crossover, (0.5, list(np.geomspace(0.1, 40.0, 40)))),
            (approximation_claim, ([0.5, 0.9, 0.95],)),
            (intermediate_inequalities, ([0.5], [1.0, 7.0])),
            (closed_forms, ((1.0, 80.0), (0.5,))),
        ]
    if level == "full":
        return [
            (bracketing, (g["k19"], g["x50"])),
            (route_agreement, (g["k9"], g["x9"])),
            (marcum_complementarity, (g["k9"], g["x9"])),
            (marcum_half_agreement, ()),
            (bessel_order_monotonicity, ()),
            (marcum_order_monotonicity, ()),
            (crossover, ()),
            (approximation_claim, ()),
            (intermediate_inequalities, (g["k9"], g["x9"])),
            (closed_forms, ()),
            (limit_at_infinity, ()),
            (monotone_in_x, ()),
            (monotone_tightening, ()),
            (half_order_closed_form, ()),
        ]
    raise ValueError(f"unknown validation level {level!r}")


def run_suites(level: str = "quick", overrides: dict | None = None) -> list[PropertyReport]:
    """Run every suite at ``level``; ``overrides`` maps suite functions to
    keyword arguments (used to inject mutated implementations in tests)."""
    reports = []
    for fn, args in _plan(level):
        kwargs = (overrides or {}).get(fn.__name__, {})
        start = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.seconds = time.perf_counter() - start
        reports.append(rep)
    return reports
