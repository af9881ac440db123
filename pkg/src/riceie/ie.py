"""Evaluation routes for the Rice Ie-function.

    Ie(k, x) = integral_0^x exp(-t) I0(k t) dt,   0 <= k <= 1, x >= 0

Every route returns a :class:`MethodResult`; non-convergence is reported in
the result rather than raised, while domain violations raise
:class:`~riceie.errors.DomainError`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .marcum import marcum_q1_quad
from .quadrature import integrate_finite
from .specfun import exp_scaled_i0, ive, log_bessel_i_orders, struve_l_half

__all__ = [
    "Method",
    "EvalPoint",
    "MethodResult",
    "AbParams",
    "ab_params",
    "ie_eq1",
    "ie_eq2",
    "ie_series_eq3",
    "ie_series_eq4",
    "ie_marcum_eq5",
    "ie_marcum_eq6",
    "ie_lemma1",
    "ie_auto",
    "ie_closed_form",
    "series_regime",
    "evaluate",
    "applicable_methods",
    "DEFAULT_TOL",
    "DEFAULT_MAX_TERMS",
]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_TERMS = 200
SERIES_STOP = 1e-15
# Below this x the Marcum identity subtracts two numbers close to 1.
MARCUM_MIN_X = 0.05

_EPS = np.finfo(float).eps
_LOG_HALF_SQRT_PI = math.log(math.sqrt(math.pi) / 2.0)


class Method(str, enum.Enum):
    EQ1_QUAD = "eq1"
    EQ2_QUAD = "eq2"
    SERIES_EQ3 = "eq3"
    SERIES_EQ4 = "eq4"
    MARCUM_EQ5 = "eq5"
    MARCUM_EQ6 = "eq6"
    LEMMA1 = "lemma1"
    CLOSED_FORM = "closed"

    @classmethod
    def parse(cls, tag: str) -> "Method":
        try:
            return cls(tag.lower())
        except ValueError:
            raise DomainError(
                f"unknown method {tag!r}; choose from {', '.join(m.value for m in cls)}"
            ) from None


@dataclass(frozen=True)
class EvalPoint:
    k: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and 0.0 <= self.k <= 1.0):
            raise DomainError(f"k must lie in [0, 1], got {self.k!r}")
        if not (math.isfinite(self.x) and self.x >= 0.0):
            raise DomainError(f"x must be finite and >= 0, got {self.x!r}")

    @property
    def root(self) -> float:
        """sqrt(1 - k^2)."""
        return math.sqrt((1.0 - self.k) * (1.0 + self.k))


@dataclass(frozen=True)
class MethodResult:
    value: float
    method: Method
    error_estimate: float
    terms_or_panels: int
    converged: bool


@dataclass(frozen=True)
class AbParams:
    a: float
    b: float


def _point(p) -> EvalPoint:
    if isinstance(p, EvalPoint):
        return p
    k, x = p
    return EvalPoint(float(k), float(x))


def _require_k_below_one(p: EvalPoint, what: str):
    if p.k >= 1.0:
        raise DomainError(f"{what} is undefined at k = 1 (1/sqrt(1-k^2) diverges)")


def ab_params(p) -> AbParams:
    """Marcum arguments a >= b >= 0 with a^2 + b^2 = 2x and a b = k x."""
    p = _point(p)
    s = p.root
    a = math.sqrt(p.x * (1.0 + s))
    if p.k < 0.1:
        b = p.k * p.x / a if a > 0 else 0.0
    else:
        b = math.sqrt(p.x * (1.0 - s))
    return AbParams(a, b)


def series_regime(p) -> str:
    """Which series is expected to converge faster: ``"eq3"`` or ``"eq4"``.

    Diagnostic only; compares x sqrt(1-k^2) against k x.
    """
    p = _point(p)
    return "eq3" if p.root >= p.k else "eq4"


def ie_closed_form(p) -> MethodResult | None:
    """Exact value on the edges k = 0 or x = 0, otherwise ``None``."""
    p = _point(p)
    if p.x == 0.0:
        return MethodResult(0.0, Method.CLOSED_FORM, 0.0, 0, True)
    if p.k == 0.0:
        return MethodResult(-math.expm1(-p.x), Method.CLOSED_FORM, _EPS, 0, True)
    return None


def _quad_tols(tol: float) -> tuple[float, float]:
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    return min(1e-14, 1e-2 * tol), tol


# ---------------------------------------------------------------------------
# Integral routes
# ---------------------------------------------------------------------------


def ie_eq1(p, tol: float = DEFAULT_TOL) -> MethodResult:
    """Direct quadrature of the defining integral (the reference route)."""
    p = _point(p)
    k = p.k

    def f(t):
        return np.exp(-(1.0 - k) * t) * ive(0, k * t)

    abs_tol, rel_tol = _quad_tols(tol)
    res = integrate_finite(f, 0.0, p.x, abs_tol, rel_tol)
    return MethodResult(res.value, Method.EQ1_QUAD, res.abs_error_estimate, res.subdivisions, res.converged)


def ie_eq2(p, tol: float = DEFAULT_TOL) -> MethodResult:
    """1/sqrt(1-k^2) - (1/pi) integral_0^pi exp(-x(1 - k cos t)) / (1 - k cos t) dt."""
    p = _point(p)
    _require_k_below_one(p, "the trigonometric representation")
    k, x = p.k, p.x

    def f(theta):
        # 1 - k cos(theta), written without cancellation near theta = 0
        w = (1.0 - k) + 2.0 * k * np.sin(0.5 * theta) ** 2
        return np.exp(-x * w) / w

    abs_tol, rel_tol = _quad_tols(tol)
    res = integrate_finite(f, 0.0, math.pi, abs_tol, rel_tol)
    value = 1.0 / p.root - res.value / math.pi
    err = res.abs_error_estimate / math.pi + 2.0 * _EPS / p.root
    return MethodResult(value, Method.EQ2_QUAD, err, res.subdivisions, res.converged)


def ie_lemma1(p, tol: float = DEFAULT_TOL) -> MethodResult:
    """1 - exp(-x) I0(kx) + k * integral_0^x exp(-t) I1(k t) dt.

    Exists to check the integration-by-parts identity numerically.
    """
    p = _point(p)
    k, x = p.k, p.x
    head = 1.0 - exp_scaled_i0(k, x)
    if k == 0.0 or x == 0.0:
        return MethodResult(head, Method.LEMMA1, _EPS, 0, True)

    def f(t):
        return np.exp(-(1.0 - k) * t) * ive(1, k * t)

    abs_tol, rel_tol = _quad_tols(tol)
    res = integrate_finite(f, 0.0, x, abs_tol, rel_tol)
    value = head + k * res.value
    return MethodResult(value, Method.LEMMA1, k * res.abs_error_estimate + _EPS, res.subdivisions, res.converged)


# ---------------------------------------------------------------------------
# Series routes
# ---------------------------------------------------------------------------


def _sum_until_small(log_terms, max_terms: int, initial: float = 0.0):
    """Accumulate exp(log_term) until a term is negligible vs the partial sum.

    ``log_terms`` is an iterator of log-magnitudes of positive terms.
    Returns (value, last_term, terms_used, converged).
    """
    terms = [initial]
    partial = initial
    last = math.inf
    for n, lt in enumerate(log_terms):
        if n >= max_terms:
            return math.fsum(terms), last, n, False
        if lt == -math.inf and partial > 0.0:
            return math.fsum(terms), 0.0, n + 1, True
        t = math.exp(lt) if lt > -745.0 else 0.0
        terms.append(t)
        partial += t
        last = t
        if t <= SERIES_STOP * partial:
            return math.fsum(terms), last, n + 1, True
    return math.fsum(terms), 0.0, len(terms), True


def ie_series_eq3(p, max_terms: int = DEFAULT_MAX_TERMS) -> MethodResult:
    """Series in half-integer modified Struve functions of x sqrt(1-k^2).

    Term n is (x k^2 / (2 sqrt(1-k^2)))^n / n! times
    [L_{n+1/2}(z)/sqrt(1-k^2) + L_{n-1/2}(z)], with overall prefactor
    sqrt(x pi / (2 sqrt(1-k^2))) exp(-x).  Converges fastest when k x is
    small and x sqrt(1-k^2) is large.
    """
    p = _point(p)
    if not (0.0 < p.k < 1.0 and p.x > 0.0):
        raise DomainError("the Struve series requires 0 < k < 1 and x > 0")
    k, x = p.k, p.x
    s = p.root
    log_s = math.log(s)
    z = x * s
    log_r = math.log(x * k * k / (2.0 * s))
    log_pref = 0.5 * math.log(x * math.pi / (2.0 * s)) - x

    def log_terms():
        log_lower = struve_l_half(-0.5, z).log_abs()
        for n in range(max_terms + 1):
            log_upper = struve_l_half(n + 0.5, z).log_abs()
            base = log_pref + n * log_r - math.lgamma(n + 1.0)
            hi = base + log_upper - log_s
            lo = base + log_lower
            m = max(hi, lo)
            yield m + math.log(math.exp(hi - m) + math.exp(lo - m))
            log_lower = log_upper

    value, last, used, converged = _sum_until_small(log_terms(), max_terms)
    err = last + 4.0 * used * _EPS * value
    return MethodResult(value, Method.SERIES_EQ3, err, used, converged)


def ie_series_eq4(p, max_terms: int = DEFAULT_MAX_TERMS) -> MethodResult:
    """Series in integer-order I_{n+1}(k x) with powers of x(1-k^2)/(2k).

    Converges fastest when x sqrt(1-k^2) is small and k x is large; at
    k = 1 only the leading terms survive, giving x exp(-x) [I0(x) + I1(x)].
    """
    p = _point(p)
    if not (0.0 < p.k <= 1.0 and p.x > 0.0):
        raise DomainError("the Bessel series requires 0 < k <= 1 and x > 0")
    k, x = p.k, p.x
    r = x * (1.0 - k) * (1.0 + k) / (2.0 * k)
    log_i = log_bessel_i_orders(max_terms + 1, k * x)
    log_common = math.log(x) - x + _LOG_HALF_SQRT_PI
    head = x * exp_scaled_i0(k, x)

    def log_terms():
        for n in range(max_terms + 1):
            # B-part: r^n I_{n+1} / (k Gamma(n + 3/2))
            lb = log_common + log_i[n + 1] - math.log(k) - math.lgamma(n + 1.5)
            if r == 0.0:
                if n == 0:
                    yield lb
                    continue
                yield -math.inf
                continue
            log_r = math.log(r)
            lb += n * log_r
            # A-part: r^(n+1) I_{n+1} / Gamma(n + 5/2)
            la = log_common + log_i[n + 1] + (n + 1) * log_r - math.lgamma(n + 2.5)
            m = max(la, lb)
            if m == -math.inf:
                yield m
                continue
            yield m + math.log(math.exp(la - m) + math.exp(lb - m))

    value, last, used, converged = _sum_until_small(log_terms(), max_terms, initial=head)
    err = last + 4.0 * used * _EPS * value
    return MethodResult(value, Method.SERIES_EQ4, err, used, converged)


# ---------------------------------------------------------------------------
# Marcum Q routes
# ---------------------------------------------------------------------------


def ie_marcum_eq5(p) -> MethodResult:
    """[2 Q1(a, b) - exp(-x) I0(kx) - 1] / sqrt(1-k^2)."""
    p = _point(p)
    _require_k_below_one(p, "the Marcum representation")
    ab = ab_params(p)
    q = marcum_q1_quad(ab.a, ab.b)
    s = p.root
    value = (2.0 * q.value - exp_scaled_i0(p.k, p.x) - 1.0) / s
    err = (2.0 * q.abs_error_estimate + 4.0 * _EPS) / s
    return MethodResult(value, Method.MARCUM_EQ5, err, q.subdivisions, q.converged)


def ie_marcum_eq6(p) -> MethodResult:
    """[Q1(a, b) - Q1(b, a)] / sqrt(1-k^2)."""
    p = _point(p)
    _require_k_below_one(p, "the Marcum representation")
    ab = ab_params(p)
    q_ab = marcum_q1_quad(ab.a, ab.b)
    q_ba = marcum_q1_quad(ab.b, ab.a)
    s = p.root
    value = (q_ab.value - q_ba.value) / s
    err = (q_ab.abs_error_estimate + q_ba.abs_error_estimate + 2.0 * _EPS) / s
    return MethodResult(
        value, Method.MARCUM_EQ6, err, q_ab.subdivisions + q_ba.subdivisions,
        q_ab.converged and q_ba.converged,
    )


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def ie_auto(p) -> MethodResult:
    """Pick a route: closed forms on the edges, quadrature at k = 1 or tiny x,
    the first Marcum identity elsewhere, falling back to quadrature whenever
    the chosen route reports non-convergence."""
    p = _point(p)
    closed = ie_closed_form(p)
    if closed is not None:
        return closed
    if p.k == 1.0 or p.x < MARCUM_MIN_X:
        return ie_eq1(p)
    res = ie_marcum_eq5(p)
    if res.converged:
        return res
    return ie_eq1(p)


def applicable_methods(p) -> list[Method]:
    """Routes whose domain contains ``p`` (excluding the auto/closed paths)."""
    p = _point(p)
    out = [Method.EQ1_QUAD]
    if p.k < 1.0:
        out.append(Method.EQ2_QUAD)
    if 0.0 < p.k < 1.0 and p.x > 0.0:
        out.append(Method.SERIES_EQ3)
    if p.k > 0.0 and p.x > 0.0:
        out.append(Method.SERIES_EQ4)
    if p.k < 1.0:
        out += [Method.MARCUM_EQ5, Method.MARCUM_EQ6]
    out.append(Method.LEMMA1)
    return out


def evaluate(p, method: Method | str | None = None, tol: float = DEFAULT_TOL,
             max_terms: int = DEFAULT_MAX_TERMS) -> MethodResult:
    """Evaluate Ie at ``p`` with a named route, or automatically if ``None``."""
    p = _point(p)
    if method is None:
        return ie_auto(p)
    if isinstance(method, str) and not isinstance(method, Method):
        method = Method.parse(method)
    if method is Method.EQ1_QUAD:
        return ie_eq1(p, tol)
    if method is Method.EQ2_QUAD:
        return ie_eq2(p, tol)
    if method is Method.SERIES_EQ3:
        return ie_series_eq3(p, max_terms)
    if method is Method.SERIES_EQ4:
        return ie_series_eq4(p, max_terms)
    if method is Method.MARCUM_EQ5:
        return ie_marcum_eq5(p)
    if method is Method.MARCUM_EQ6:
        return ie_marcum_eq6(p)
    if method is Method.LEMMA1:
        return ie_lemma1(p, tol)
    if method is Method.CLOSED_FORM:
        res = ie_closed_form(p)
        if res is None:
            raise DomainError("closed form exists only for k = 0 or x = 0")
        return res
    raise DomainError(f"unknown method {method!r}")
