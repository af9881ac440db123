"""Special functions with exponentially scaled variants.

Everything here is evaluated so that large-argument products such as
``exp(-x) * I0(k x)`` never pass through an overflowing intermediate.  Bessel
and Struve values are returned either as plain scaled floats (``ive`` and
``ive_half``, vectorised for quadrature integrands) or as :class:`ScaledValue`
objects that carry a separate natural-log exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ScaledValue",
    "ln_gamma",
    "erf",
    "erfc",
    "gaussian_q",
    "bessel_i_scaled",
    "bessel_i_half",
    "struve_l_half",
    "ive",
    "ive_half",
    "log_bessel_i_orders",
    "exp_scaled_i0",
]

# Below this argument the integer-order Bessel function is summed from its
# ascending series; above it, backward ratio recurrence with the
# exp(x) = I0 + 2*sum(In) normalisation is used.
SERIES_CUTOFF = 30.0

_SQRT2 = math.sqrt(2.0)
_LN_SQRT_2_OVER_PI = 0.5 * math.log(2.0 / math.pi)
_LN_SQRT_PI = 0.5 * math.log(math.pi)


@dataclass(frozen=True)
class ScaledValue:
    """A real number stored as ``mantissa * exp(log_scale)``."""

    mantissa: float
    log_scale: float = 0.0

    @classmethod
    def from_real(cls, value: float) -> "ScaledValue":
        return cls(float(value), 0.0).normalized()

    @classmethod
    def from_log(cls, log_abs: float, sign: float = 1.0) -> "ScaledValue":
        """Build ``sign * exp(log_abs)`` without evaluating the exponential."""
        if log_abs == -math.inf:
            return cls(0.0, 0.0)
        shift = round(log_abs)
        return cls(math.copysign(math.exp(log_abs - shift), sign), float(shift))

    def normalized(self) -> "ScaledValue":
        """Return an equal value whose mantissa has magnitude in [1/e, e)."""
        m = self.mantissa
        if m == 0.0:
            return ScaledValue(0.0, 0.0)
        if not math.isfinite(m):
            raise ValueError(f"cannot normalise non-finite mantissa {m!r}")
        shift = float(round(math.log(abs(m)) + self.log_scale))
        step = self.log_scale - shift
        if abs(step) < 1400.0:
            # rescale the mantissa directly (a few ulps instead of |log| ulps);
            # two half-steps keep each factor a normal double
            half = 0.5 * step
            return ScaledValue(m * math.exp(half) * math.exp(step - half), shift)
        return ScaledValue.from_log(math.log(abs(m)) + self.log_scale, m)

    def to_real(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        try:
            if abs(self.log_scale) < 700.0:
                return self.mantissa * math.exp(self.log_scale)
            half = 0.5 * self.log_scale
            return self.mantissa * math.exp(half) * math.exp(self.log_scale - half)
        except OverflowError:
            return math.copysign(math.inf, self.mantissa)

    def log_abs(self) -> float:
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.log_scale

    def scale_by_exp(self, shift: float) -> "ScaledValue":
        """Multiply by ``exp(shift)`` exactly in the exponent."""
        return ScaledValue(self.mantissa, self.log_scale + shift)

    def __mul__(self, other: "ScaledValue | float") -> "ScaledValue":
        if isinstance(other, ScaledValue):
            return ScaledValue(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
        return ScaledValue(self.mantissa * float(other), self.log_scale)

    __rmul__ = __mul__

    def __float__(self) -> float:
        return self.to_real()


# ---------------------------------------------------------------------------
# Gamma, erf, Gaussian Q
# ---------------------------------------------------------------------------


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def erf(x: float) -> float:
    return math.erf(x)


def erfc(x: float) -> float:
    return math.erfc(x)


def gaussian_q(x: float) -> float:
    """Standard normal tail probability ``P(Z > x)``."""
    return 0.5 * math.erfc(x / _SQRT2)


# ---------------------------------------------------------------------------
# Integer-order modified Bessel function of the first kind
# ---------------------------------------------------------------------------


def _ive_series(n: int, x: np.ndarray) -> np.ndarray:
    """exp(-x) I_n(x) from the ascending series; intended for x <= ~30."""
    out = np.zeros_like(x)
    pos = x > 0
    if n == 0:
        out[~pos] = 1.0
    if not pos.any():
        return out
    xp = x[pos]
    term = np.exp(n * np.log(xp / 2.0) - math.lgamma(n + 1) - xp)
    total = term.copy()
    q = (xp / 2.0) ** 2
    for m in range(1, 400):
        term = term * q / (m * (m + n))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    out[pos] = total
    return out


def _start_order(n: int, x: float) -> int:
    # I_j/I_0 ~ exp(-j^2 / 2x): j = sqrt(80 x) leaves a tail below exp(-40).
    return n + 40 + int(math.sqrt(80.0 * x))


def _backward_ratios(x: np.ndarray, top: int) -> np.ndarray:
    """ratios[j] = I_{j+1}(x)/I_j(x) for j = 0..top-1, by backward recurrence."""
    ratios = np.empty((top,) + x.shape)
    r = np.zeros_like(x)
    for j in range(top, 0, -1):
        r = 1.0 / (2.0 * j / x + r)
        ratios[j - 1] = r
    return ratios


def _ive_ratio(n: int, x: np.ndarray) -> np.ndarray:
    """exp(-x) I_n(x) for x > 0 via ratios and the Neumann normalisation."""
    top = _start_order(n, float(np.max(x)))
    ratios = _backward_ratios(x, top)
    prod = np.ones_like(x)
    tail = np.zeros_like(x)
    pn = np.ones_like(x) if n == 0 else None
    for j in range(1, top + 1):
        prod = prod * ratios[j - 1]
        tail += prod
        if j == n:
            pn = prod.copy()
    i0 = 1.0 / (1.0 + 2.0 * tail)
    return pn * i0


def ive(n: int, x) -> np.ndarray:
    """Vectorised ``exp(-x) * I_n(x)`` for integer ``n >= 0`` and ``x >= 0``."""
    if n < 0 or int(n) != n:
        raise DomainError(f"order must be a nonnegative integer, got {n!r}")
    n = int(n)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise DomainError("ive requires x >= 0")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_CUTOFF
    if small.any():
        out[small] = _ive_series(n, flat[small])
    if (~small).any():
        out[~small] = _ive_ratio(n, flat[~small])
    return out.reshape(xa.shape) if xa.ndim else out[0]


def bessel_i_scaled(n: int, x: float) -> ScaledValue:
    """``exp(-x) I_n(x)`` as a :class:`ScaledValue` with zero exponent.

    The scaled quantity is bounded by 1 for every x >= 0, so no exponent is
    needed; multiply by ``exp(x)`` via :meth:`ScaledValue.scale_by_exp` to
    recover ``I_n(x)`` itself.
    """
    if x < 0:
        raise DomainError(f"bessel_i_scaled requires x >= 0, got {x!r}")
    return ScaledValue(float(ive(n, float(x))), 0.0)


def exp_scaled_i0(k: float, x: float) -> float:
    """``exp(-x) I0(k x)`` for ``0 <= k <= 1``, finite for any x."""
    return math.exp(-(1.0 - k) * x) * float(ive(0, k * x))


def log_bessel_i_orders(nmax: int, x: float) -> np.ndarray:
    """``log I_n(x)`` for n = 0..nmax at a single point ``x >= 0``.

    Orders far above x are tiny but remain representable in log form, which
    is what series built from ``I_{n+1}(kx)`` with growing n require.
    """
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x!r}")
    out = np.full(nmax + 1, -math.inf)
    if x == 0:
        out[0] = 0.0
        return out
    top = _start_order(nmax, x)
    ratios = _backward_ratios(np.array([x]), top)[:, 0]
    out[0] = math.log(float(ive(0, x))) + x
    with np.errstate(divide="ignore"):
        out[1:] = out[0] + np.cumsum(np.log(ratios[:nmax]))
    return out


# ---------------------------------------------------------------------------
# Half-integer orders
# ---------------------------------------------------------------------------


def _check_half_order(nu: float) -> int:
    twice = 2.0 * nu
    if twice != round(twice) or int(round(twice)) % 2 == 0 or nu < -0.5:
        raise DomainError(f"order must be one of -1/2, 1/2, 3/2, ...; got {nu!r}")
    return int(round(twice))


def _log_ive_half_series(nu: float, x: float) -> float:
    """log(exp(-x) I_nu(x)) from the ascending series, positive terms only."""
    log_t0 = nu * math.log(x / 2.0) - math.lgamma(nu + 1.0)
    q = (x / 2.0) ** 2
    term = total = 1.0
    offset = 0.0
    for m in range(1, 5000):
        term *= q / (m * (m + nu))
        total += term
        if term > 1e200:
            term *= 1e-200
            total *= 1e-200
            offset += 200.0 * math.log(10.0)
        if term <= 1e-17 * total and m > q / (m + nu):
            break
    return log_t0 + offset + math.log(total) - x


def _ive_half_closed(n: int, x: np.ndarray) -> np.ndarray:
    """exp(-x) I_{n+1/2}(x) from the finite exponential sum, n >= 0."""
    e2 = np.exp(-2.0 * x)
    total = np.zeros_like(x)
    for j in range(n + 1):
        coef = math.factorial(n + j) / (math.factorial(j) * math.factorial(n - j))
        bracket = (-1.0) ** j + (-1.0) ** (n + 1) * e2
        if j == 0 and n % 2 == 0:
            # 1 - exp(-2x) without cancellation
            bracket = -np.expm1(-2.0 * x)
        total += coef * bracket / (2.0 * x) ** j
    return total / np.sqrt(2.0 * math.pi * x)


def _closed_form_ok(n: int, x):
    # Alternating terms in the finite sum cancel badly unless x is large
    # relative to n^2.
    return x >= max(1.0, float(n * n))


def ive_half(nu: float, x) -> np.ndarray:
    """Vectorised ``exp(-x) I_nu(x)`` for nu in {-1/2, 1/2, 3/2, ...}, x > 0."""
    _check_half_order(nu)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("half-order Bessel requires x > 0")
    flat = np.atleast_1d(xa).ravel()
    if nu == -0.5:
        out = (1.0 + np.exp(-2.0 * flat)) / np.sqrt(2.0 * math.pi * flat)
    else:
        n = int(nu - 0.5)
        out = np.empty_like(flat)
        closed = _closed_form_ok(n, flat)
        if closed.any():
            out[closed] = _ive_half_closed(n, flat[closed])
        for i in np.flatnonzero(~closed):
            out[i] = math.exp(_log_ive_half_series(nu, float(flat[i])))
    return out.reshape(xa.shape) if xa.ndim else out[0]


def bessel_i_half(n: int, x: float) -> ScaledValue:
    """``I_{n+1/2}(x)`` for integer ``n >= 0`` and ``x > 0``.

    Uses the finite exponential sum where it is numerically benign and the
    ascending series otherwise.  The result is returned with exponent ``x``
    so that ``mantissa = exp(-x) I_{n+1/2}(x)``.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"half-order index must be a nonnegative integer, got {n!r}")
    if not x > 0:
        raise DomainError(f"bessel_i_half requires x > 0, got {x!r}")
    nu = n + 0.5
    if _closed_form_ok(int(n), x):
        return ScaledValue(float(_ive_half_closed(int(n), np.array([x]))[0]), float(x))
    return ScaledValue.from_log(_log_ive_half_series(nu, x) + x)


# ---------------------------------------------------------------------------
# Modified Struve function, half-integer orders
# ---------------------------------------------------------------------------


def _log_struve_series(nu: float, x: float) -> float:
    """log L_nu(x) from its ascending series (all terms positive)."""
    log_t0 = (nu + 1.0) * math.log(x / 2.0) - math.lgamma(1.5) - math.lgamma(nu + 1.5)
    q = (x / 2.0) ** 2
    term = total = 1.0
    offset = 0.0
    for m in range(5000):
        term *= q / ((m + 1.5) * (m + nu + 1.5))
        total += term
        if term > 1e200:
            term *= 1e-200
            total *= 1e-200
            offset += 200.0 * math.log(10.0)
        if term <= 1e-17 * total and q < (m + 1.5) * (m + nu + 1.5):
            break
    return log_t0 + offset + math.log(total)


def struve_l_half(half_order: float, x: float) -> ScaledValue:
    """Modified Struve function ``L_nu(x)`` for nu in {-1/2, 1/2, 3/2, ...}.

    The two lowest orders use their hyperbolic closed forms, written so that
    neither loses digits for small x; higher orders sum the ascending series
    in log space.
    """
    _check_half_order(half_order)
    if not x > 0:
        raise DomainError(f"struve_l_half requires x > 0, got {x!r}")
    pref = _LN_SQRT_2_OVER_PI - 0.5 * math.log(x)
    if half_order == -0.5:
        # sqrt(2/(pi x)) sinh x
        return ScaledValue.from_log(pref + x + math.log(-math.expm1(-2.0 * x) / 2.0))
    if half_order == 0.5:
        # sqrt(2/(pi x)) (cosh x - 1) = sqrt(2/(pi x)) 2 sinh^2(x/2)
        log_sinh_half = x / 2.0 + math.log(-math.expm1(-x) / 2.0)
        return ScaledValue.from_log(pref + math.log(2.0) + 2.0 * log_sinh_half)
    return ScaledValue.from_log(_log_struve_series(half_order, x))
