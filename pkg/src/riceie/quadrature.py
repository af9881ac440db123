"""Adaptive Gauss-Kronrod (7/15) quadrature.

Integrands are called with a numpy array of nodes and must return an array of
the same shape.  Panels are refined globally: the panel with the largest
error estimate is bisected until the summed estimate meets the tolerance or
the panel budget is exhausted.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError

__all__ = [
    "QuadratureResult",
    "integrate_finite",
    "integrate_semi_infinite",
    "DEFAULT_ABS_TOL",
    "DEFAULT_REL_TOL",
    "MAX_PANELS",
]

DEFAULT_ABS_TOL = 1e-14
DEFAULT_REL_TOL = 1e-12
MAX_PANELS = 2000

Integrand = Callable[[np.ndarray], np.ndarray]

# Kronrod abscissae on [0, 1); even indices 1, 3, 5 are the Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point node set on [-1, 1] and the matching weight vectors.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GWEIGHTS[_i] = _w
    _GWEIGHTS[14 - _i] = _w
_GWEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps
# Roundoff floor per panel, in units of eps * integral of |f|.  QUADPACK uses
# 50, which caps attainable relative accuracy near 1e-14; a 15-term dot
# product incurs at most a few eps, so a smaller factor is still safe.
ROUNDOFF_FACTOR = 4.0


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int
    converged: bool


def _panel(f: Integrand, a: float, b: float) -> tuple[float, float]:
    """Kronrod estimate and QUADPACK-style error estimate on one panel."""
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    fx = np.asarray(f(centre + half * _NODES), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise ValueError(f"integrand is not finite on [{a}, {b}]")
    resk = float(np.dot(_KWEIGHTS, fx))
    resg = float(np.dot(_GWEIGHTS, fx))
    reskh = 0.5 * resk
    resasc = float(np.dot(_KWEIGHTS, np.abs(fx - reskh)))
    resabs = float(np.dot(_KWEIGHTS, np.abs(fx)))
    err = abs((resk - resg) * half)
    resasc *= abs(half)
    resabs *= abs(half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (ROUNDOFF_FACTOR * _EPS):
        err = max(ROUNDOFF_FACTOR * _EPS * resabs, err)
    return resk * half, err


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
    max_panels: int = MAX_PANELS,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` by adaptive bisection.

    A non-finite integrand value raises ``ValueError``.  Failure to meet the
    tolerance within ``max_panels`` panels is reported through
    ``converged=False`` together with the best available value.
    """
    if not (abs_tol > 0 and rel_tol > 0):
        raise ValueError("tolerances must be positive")
    if b < a:
        raise ValueError(f"require a <= b, got a={a}, b={b}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)

    value, err = _panel(f, a, b)
    # heap of (-err, a, b, value, err)
    heap = [(-err, a, b, value, err)]
    panels = 1
    total = value
    total_err = err
    while True:
        target = max(abs_tol, rel_tol * abs(total))
        if total_err <= target:
            converged = True
            break
        if panels >= max_panels:
            converged = False
            break
        _, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # interval cannot be split further in floating point
            heapq.heappush(heap, (0.0, lo, hi, v, e))
            converged = False
            break
        v1, e1 = _panel(f, lo, mid)
        v2, e2 = _panel(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2))
        panels += 1
        total += (v1 + v2) - v
        total_err += (e1 + e2) - e
        if panels % 64 == 0:
            # re-sum to keep rounding from drifting
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(item[4] for item in heap)
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(item[4] for item in heap)
    return QuadratureResult(total, total_err, panels, converged)


def integrate_semi_infinite(
    f: Integrand,
    a: float,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
    initial_width: float = 16.0,
    max_doublings: int = 40,
    max_panels: int = MAX_PANELS,
) -> QuadratureResult:
    """Integrate a decaying ``f`` over ``[a, inf)``.

    The range is covered by windows ``[a, a+w]`` with ``w`` doubling; the
    loop stops once two successive window increments both contribute less
    than ``abs_tol / 10``.
    """
    window_tol = abs_tol / 8.0
    first = integrate_finite(f, a, a + initial_width, window_tol, rel_tol, max_panels)
    pieces = [first.value]
    err = first.abs_error_estimate
    panels = first.subdivisions
    converged = first.converged
    left = a + initial_width
    width = initial_width
    small_in_a_row = 0
    for _ in range(max_doublings):
        right = a + 2.0 * width
        budget = max_panels - panels
        if budget < 1:
            converged = False
            break
        piece = integrate_finite(f, left, right, window_tol, rel_tol, budget)
        pieces.append(piece.value)
        err += piece.abs_error_estimate
        panels += piece.subdivisions
        converged = converged and piece.converged
        if abs(piece.value) < abs_tol / 10.0:
            small_in_a_row += 1
            if small_in_a_row >= 2:
                break
        else:
            small_in_a_row = 0
        left = right
        width *= 2.0
    else:
        converged = False
    value = math.fsum(pieces)
    if converged and err > max(abs_tol, rel_tol * abs(value)):
        converged = False
    return QuadratureResult(value, err, panels, converged)


def require_converged(result: QuadratureResult, what: str) -> QuadratureResult:
    if not result.converged:
        raise ConvergenceError(
            f"{what}: quadrature did not converge "
            f"(estimate {result.abs_error_estimate:.3g} after {result.subdivisions} panels)"
        )
    return result
