"""Scalar special-function kernels for the normal and gamma laws.

Every public kernel returns a :class:`SpecValue`, a float-like pair of the
value and an estimated absolute error.  The error estimates are engineering
targets checked against quadrature and arbitrary-precision oracles in the test
suite; outside the validated envelope they are widened and ``in_envelope`` is
cleared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erfc, erfcx, zeta

from .errors import DomainError

SQRT_2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
EULER_GAMMA = 0.57721566490153286061

MACHEP = 2.220446049250313e-16
FPMIN = 1e-300
OVERFLOW_GUARD = 1e300
MAXLOG = 709.782712893384

NORMAL_REL_TOL = 1e-13
NORMAL_MILLS_REL_TOL = 1e-12
INCGAMMA_REL_TOL = 1e-12
GAMMA_MILLS_REL_TOL = 1e-10
# widening applied to abs_error_bound outside the validated envelope
OUT_OF_ENVELOPE_FACTOR = 1e3

NORMAL_ENVELOPE = 37.0  # Phi-bar(37.5) is already below the smallest normal double
ALPHA_ENVELOPE = 50.0
X_ENVELOPE = 500.0

_MAX_ITER = 10_000

# lgamma(1 + a) = -gamma*a + sum_{k>=2} (-1)^k zeta(k) a^k / k, |a| < 1
_LGAMMA1P_COEFFS = tuple((-1.0) ** k * float(zeta(k)) / k for k in range(2, 80))


@dataclass(frozen=True)
class SpecValue:
    value: float
    abs_error_bound: float
    in_envelope: bool = True

    def __post_init__(self):
        if not self.abs_error_bound >= 0.0:
            raise ValueError("abs_error_bound must be nonnegative")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class ShapeParam:
    """Gamma shape parameter; must be a finite positive real."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and a > 0.0):
            raise DomainError(f"shape parameter must be positive and finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    def __float__(self):
        return self.alpha


def as_alpha(alpha) -> float:
    if isinstance(alpha, ShapeParam):
        return alpha.alpha
    return ShapeParam(alpha).alpha


def _finite(x, name="x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def _spec(value, rel_tol, in_envelope) -> SpecValue:
    bound = rel_tol * abs(value)
    if not in_envelope:
        bound *= OUT_OF_ENVELOPE_FACTOR
    return SpecValue(value, bound, in_envelope)


# ---------------------------------------------------------------------------
# normal law
# ---------------------------------------------------------------------------

def exp_neg_half_square(x: float) -> float:
    """exp(-x**2/2) without the rounding error of forming x**2 directly.

    x is split into a part with few significant bits, whose square is exact,
    and a small remainder.
    """
    x = abs(x)
    hi = math.floor(x * 64.0) / 64.0
    lo = x - hi
    return math.exp(-0.5 * hi * hi) * math.exp(-(hi * lo + 0.5 * lo * lo))


def normal_pdf(x: float) -> float:
    return exp_neg_half_square(_finite(x)) / SQRT_2PI


def normal_survival(x: float) -> SpecValue:
    """Upper tail of the standard normal law, 1 - Phi(x).

    For x > 0 this is erfcx(x/sqrt 2) * exp(-x^2/2) / 2, which keeps full
    relative precision deep into the tail.
    """
    x = _finite(x)
    if x > 0.0:
        value = 0.5 * float(erfcx(x / SQRT_2)) * exp_neg_half_square(x)
    else:
        value = 0.5 * float(erfc(x / SQRT_2))
    return _spec(value, NORMAL_REL_TOL, abs(x) <= NORMAL_ENVELOPE)


def normal_mills(x: float) -> SpecValue:
    """Mills ratio of the standard normal law, sqrt(pi/2) * erfcx(x/sqrt 2)."""
    x = _finite(x)
    value = SQRT_HALF_PI * float(erfcx(x / SQRT_2))
    return _spec(value, NORMAL_MILLS_REL_TOL, 0.0 <= x <= 40.0)


# ---------------------------------------------------------------------------
# incomplete gamma
# ---------------------------------------------------------------------------

def _lgamma1p(a: float) -> float:
    """log Gamma(1 + a), accurate to relative precision for small a."""
    if abs(a) >= 0.5:
        return math.lgamma(1.0 + a)
    total = 0.0
    power = a
    for c in _LGAMMA1P_COEFFS:
        power *= a
        term = c * power
        total += term
        if abs(term) <= MACHEP * abs(total):
            break
    return total - EULER_GAMMA * a


def _lower_series_sum(a: float, x: float) -> float:
    """sum_n x^n / ((a+1)...(a+n)); gamma(a, x) = x^a e^-x / a * sum."""
    term = 1.0
    total = 1.0
    for n in range(1, _MAX_ITER):
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * MACHEP:
            return total
    raise ArithmeticError(f"incomplete gamma series failed to converge (a={a}, x={x})")


def _upper_cf(a: float, x: float) -> float:
    """Continued fraction h with Gamma(a, x) = x^a e^-x h (modified Lentz)."""
    b = x + 1.0 - a
    c = 1.0 / FPMIN
    d = 1.0 / b if b != 0.0 else 1.0 / FPMIN
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < FPMIN:
            d = FPMIN
        c = b + an / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < MACHEP:
            return h
    raise ArithmeticError(f"incomplete gamma continued fraction failed to converge (a={a}, x={x})")


def _upper_small_a(a: float, x: float) -> float:
    """Gamma(a, x) for a < 1 and x < a + 1.

    Gamma(a) - x^a/a is formed as (expm1(lgamma(1+a)) - expm1(a log x)) / a so
    the near-cancellation of the two O(1/a) terms happens analytically.
    """
    head = (math.expm1(_lgamma1p(a)) - math.expm1(a * math.log(x))) / a
    term = 1.0
    total = 0.0
    for n in range(1, _MAX_ITER):
        term *= -x / n
        piece = term / (a + n)
        total += piece
        if abs(piece) < MACHEP * max(abs(total), MACHEP):
            break
    return head - x ** a * total


def _upper_gamma(a: float, x: float) -> float:
    if x == 0.0:
        return math.gamma(a)
    if a == 1.0:
        return math.exp(-x)
    if x >= a + 1.0:
        return math.exp(a * math.log(x) - x) * _upper_cf(a, x)
    if a < 1.0:
        return _upper_small_a(a, x)
    lower_ratio = math.exp(a * math.log(x) - x - math.lgamma(a + 1.0)) * _lower_series_sum(a, x)
    return math.exp(math.lgamma(a) + math.log1p(-lower_ratio))


def _check_gamma_args(alpha, x, strict):
    a = as_alpha(alpha)
    x = _finite(x)
    if x < 0.0 or (strict and x == 0.0):
        raise DomainError(f"x must be {'positive' if strict else 'nonnegative'}, got {x!r}")
    return a, x


def upper_incomplete_gamma(alpha, x: float) -> SpecValue:
    """Gamma(alpha, x) = integral of t^(alpha-1) e^-t over (x, inf).

    Series below x = alpha + 1, continued fraction above.
    """
    a, x = _check_gamma_args(alpha, x, strict=False)
    value = _upper_gamma(a, x)
    return _spec(value, INCGAMMA_REL_TOL, a <= ALPHA_ENVELOPE and x <= X_ENVELOPE)


def lower_incomplete_gamma(alpha, x: float) -> SpecValue:
    """gamma(alpha, x) = integral of t^(alpha-1) e^-t over (0, x)."""
    a, x = _check_gamma_args(alpha, x, strict=False)
    if x == 0.0:
        value = 0.0
    elif x < a + 1.0:
        value = math.exp(a * math.log(x) - x) * _lower_series_sum(a, x) / a
    else:
        value = math.gamma(a) - _upper_gamma(a, x)
    return _spec(value, INCGAMMA_REL_TOL, a <= ALPHA_ENVELOPE and x <= X_ENVELOPE)


def gamma_pdf(alpha, x: float) -> float:
    a, x = _check_gamma_args(alpha, x, strict=True)
    return math.exp((a - 1.0) * math.log(x) - x - math.lgamma(a))


def gamma_mills(alpha, x: float) -> SpecValue:
    """Mills ratio Gamma(alpha, x) x^(1-alpha) e^x of the gamma law.

    Above x = alpha + 1 this is x times the continued fraction, so no
    exponential is formed at all; below it the product is taken directly
    unless an intermediate would exceed 1e300, in which case the logarithms
    are summed instead.
    """
    a, x = _check_gamma_args(alpha, x, strict=True)
    in_envelope = a <= ALPHA_ENVELOPE and x <= X_ENVELOPE
    if a == 1.0:
        return SpecValue(1.0, 0.0, in_envelope)
    if x >= a + 1.0:
        value = x * _upper_cf(a, x)
    else:
        upper = _upper_gamma(a, x)
        log_power = (1.0 - a) * math.log(x)
        if abs(log_power) + x < math.log(OVERFLOW_GUARD) and upper < OVERFLOW_GUARD:
            value = upper * x ** (1.0 - a) * math.exp(x)
        else:
            log_value = math.log(upper) + log_power + x
            if log_value > MAXLOG:
                # beyond double range (large alpha, tiny x)
                return SpecValue(math.inf, math.inf, False)
            value = math.exp(log_value)
    return _spec(value, GAMMA_MILLS_REL_TOL, in_envelope)
