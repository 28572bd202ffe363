"""Semi-infinite adaptive quadrature and integral representations of Mills ratios.

The integrals here are deliberately independent of :mod:`millsconvex.specfun`:
they are the oracles the closed-form kernels are checked against.

The half line (lower, inf) is mapped onto (0, 1) by

    t = lower + w**2,   w = v / (1 - v),

and the result is integrated with adaptive 15-point Gauss-Kronrod panels.  The
square absorbs integrable ``(t - lower)**-0.5`` endpoint singularities, so the
Stieltjes-type integrand needs no special casing.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, QuadratureAccuracyError
from .specfun import SQRT_2PI, as_alpha

DEFAULT_TARGET_ABS_ERR = 1e-11
DEFAULT_TARGET_REL_ERR = 1e-13
MAX_PANELS = 2 ** 15

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
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

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self):
        return float(self.value)


class Representation(str, Enum):
    LAPLACE_NORMAL = "laplace_normal"
    CAUCHY_NORMAL = "cauchy_normal"
    STIELTJES_H = "stieltjes_h"
    GAMMA_SHIFT = "gamma_shift"
    GAMMA_SCALED = "gamma_scaled"


def _vectorize(integrand):
    probe = np.array([0.5, 1.5])
    try:
        out = np.asarray(integrand(probe), dtype=float)
        if out.shape == probe.shape:
            return integrand
    except (TypeError, ValueError):
        pass

    def looped(t):
        return np.array([float(integrand(float(ti))) for ti in t])

    return looped


def _gk15(g, a, b):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fv = g(center + half * NODES)
    kronrod = half * float(KRONROD_WEIGHTS @ fv)
    gauss = half * float(GAUSS_WEIGHTS @ fv)
    absolute = abs(half) * float(KRONROD_WEIGHTS @ np.abs(fv))
    return kronrod, abs(kronrod - gauss), absolute


def integrate_semi_infinite(integrand, lower: float, target_abs_err: float = DEFAULT_TARGET_ABS_ERR,
                            *, target_rel_err: float = DEFAULT_TARGET_REL_ERR, breakpoints=(),
                            max_panels: int = MAX_PANELS) -> QuadratureResult:
    """Integrate ``integrand`` over (lower, inf).

    ``integrand`` should accept a numpy array; scalar-only callables are looped
    over.  Convergence is declared once the summed panel error estimates fall
    below ``max(target_abs_err, target_rel_err * |value|)``.  ``breakpoints``
    are abscissae in the original variable where the initial panels are split
    (features narrower than the unit scale of the map).

    Raises :class:`QuadratureAccuracyError` if ``max_panels`` panels are not
    enough; the exception carries the best estimate.
    """
    lower = float(lower)
    if not math.isfinite(lower):
        raise DomainError("lower limit must be finite")
    if not target_abs_err > 0.0:
        raise DomainError("target_abs_err must be positive")
    f = _vectorize(integrand)

    def g(v):
        # nodes of very thin panels next to v = 1 can round onto the point at
        # infinity, where an integrable integrand contributes nothing
        at_inf = v >= 1.0
        v = np.where(at_inf, 0.5, v)
        w = v / (1.0 - v)
        with np.errstate(over="ignore", under="ignore"):
            vals = np.asarray(f(lower + w * w), dtype=float) * (2.0 * w / (1.0 - v) ** 2)
        vals = np.where(at_inf, 0.0, vals)
        if not np.all(np.isfinite(vals)):
            bad = float((lower + w * w)[~np.isfinite(vals)][0])
            raise DomainError(f"integrand is not finite at t={bad!r}")
        return vals

    cuts = [0.0]
    for t in sorted(float(b) for b in breakpoints):
        if t > lower:
            w = math.sqrt(t - lower)
            v = w / (1.0 + w)
            if cuts[-1] < v < 1.0:
                cuts.append(v)
    cuts.append(1.0)

    evaluations = 0
    heap = []
    settled_value = []
    settled_error = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, err, absval = _gk15(g, a, b)
        evaluations += 15
        heapq.heappush(heap, (-err, a, b, val, absval))

    def totals():
        value = math.fsum([item[3] for item in heap] + settled_value)
        error = math.fsum([-item[0] for item in heap] + settled_error)
        return value, error

    value, error = totals()
    while error > max(target_abs_err, target_rel_err * abs(value)) and heap:
        if len(heap) + len(settled_value) >= max_panels:
            best = QuadratureResult(value, error, evaluations)
            raise QuadratureAccuracyError(
                f"panel budget {max_panels} exhausted; estimate {value!r} +/- {error!r}", best)
        neg_err, a, b, val, absval = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            v2, e2, abs2 = _gk15(g, lo, hi)
            evaluations += 15
            if e2 <= 50.0 * _EPS * abs2 or hi - lo <= 4.0 * _EPS * max(abs(lo), abs(hi)):
                # at the rounding floor; further bisection cannot help
                settled_value.append(v2)
                settled_error.append(max(e2, 50.0 * _EPS * abs2))
            else:
                heapq.heappush(heap, (-e2, lo, hi, v2, abs2))
        value, error = totals()
    return QuadratureResult(value, error, evaluations)


# ---------------------------------------------------------------------------
# integral representations
# ---------------------------------------------------------------------------

def _scaled(result: QuadratureResult, factor: float) -> QuadratureResult:
    return QuadratureResult(factor * result.value, abs(factor) * result.abs_error_estimate,
                            result.evaluations)


def _positive(x, allow_zero=False) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0 or (x == 0.0 and not allow_zero):
        raise DomainError(f"x must be {'nonnegative' if allow_zero else 'positive'}, got {x!r}")
    return x


def mills_reference(rep, alpha=None, x: float = 1.0,
                    target_abs_err: float = DEFAULT_TARGET_ABS_ERR) -> QuadratureResult:
    """Evaluate a Mills ratio from one of its integral representations.

    ``laplace_normal`` and ``cauchy_normal`` give the standard normal Mills
    ratio, ``stieltjes_h`` gives m(sqrt x)/sqrt x for the normal law, and the
    two gamma tags give the gamma Mills ratio with shape ``alpha``.
    """
    rep = Representation(rep)
    needs_alpha = rep in (Representation.GAMMA_SHIFT, Representation.GAMMA_SCALED)
    if needs_alpha and alpha is None:
        raise TypeError(f"representation {rep.value} requires alpha")
    if not needs_alpha and alpha is not None:
        raise TypeError(f"representation {rep.value} takes no alpha")
    x = _positive(x, allow_zero=rep is Representation.LAPLACE_NORMAL)

    if rep is Representation.LAPLACE_NORMAL:
        bps = (10.0 / x,) if x > 0.0 else ()
        return integrate_semi_infinite(lambda t: np.exp(-x * t - 0.5 * t * t), 0.0,
                                       target_abs_err, breakpoints=bps)

    if rep is Representation.CAUCHY_NORMAL:
        def cauchy(t):
            return x / (x * x + t * t) * np.exp(-0.5 * t * t)

        res = integrate_semi_infinite(cauchy, 0.0, target_abs_err * SQRT_2PI / 2.0,
                                      breakpoints=(x, 10.0 * x))
        return _scaled(res, 2.0 / SQRT_2PI)

    if rep is Representation.STIELTJES_H:
        def stieltjes(s):
            return np.exp(-0.5 * s) / (np.sqrt(s) * (x + s))

        res = integrate_semi_infinite(stieltjes, 0.0, target_abs_err * SQRT_2PI,
                                      breakpoints=(x,))
        return _scaled(res, 1.0 / SQRT_2PI)

    a = as_alpha(alpha)
    if rep is Representation.GAMMA_SHIFT:
        def shift(u):
            return x * np.exp((a - 1.0) * np.log(u) + (1.0 - u) * x)

        return integrate_semi_infinite(shift, 1.0, target_abs_err,
                                       breakpoints=(1.0 + 10.0 / x,))

    def scaled(u):
        return np.exp((a - 1.0) * np.log1p(u / x) - u)

    return integrate_semi_infinite(scaled, 0.0, target_abs_err, breakpoints=(x,))


def gamma_x2mprime_reference(alpha, x: float, order: int = 0,
                             target_abs_err: float = DEFAULT_TARGET_ABS_ERR) -> QuadratureResult:
    """x^2 m'(x) (order 0) or its derivative (order 1) for the gamma Mills ratio."""
    a = as_alpha(alpha)
    x = _positive(x)
    if order == 0:
        def integrand(u):
            return np.exp((a - 2.0) * np.log1p(u / x) - u) * u

        factor = -(a - 1.0)
    elif order == 1:
        def integrand(u):
            return np.exp((a - 3.0) * np.log1p(u / x) - u) * (u / x) ** 2

        factor = (a - 1.0) * (a - 2.0)
    else:
        raise DomainError(f"order must be 0 or 1, got {order!r}")
    res = integrate_semi_infinite(integrand, 0.0, target_abs_err, breakpoints=(x,))
    return _scaled(res, factor)


def gamma_msecond_reference(alpha, x: float,
                            target_abs_err: float = DEFAULT_TARGET_ABS_ERR) -> QuadratureResult:
    """Second derivative m''(x) of the gamma Mills ratio; its sign is sign(alpha - 1)."""
    a = as_alpha(alpha)
    x = _positive(x)

    def integrand(u):
        return (1.0 - u) ** 2 * np.exp((a - 2.0) * np.log(u) + (1.0 - u) * x)

    res = integrate_semi_infinite(integrand, 1.0, target_abs_err, breakpoints=(1.0 + 10.0 / x,))
    return _scaled(res, a - 1.0)
