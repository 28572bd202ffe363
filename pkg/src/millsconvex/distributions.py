"""Distributions on (0, inf) described by density, survival, score and Mills ratio.

A :class:`DistributionModel` bundles the scalar maps the reciprocal-convexity
conditions consume: the density f, the survival function, the logarithmic
derivative omega = f'/f, its derivative, and the Mills ratio m = survival / f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from . import specfun
from .errors import DomainError, ModelConstructionError
from .quadrature import integrate_semi_infinite

Scalar = Callable[[float], float]

DEFAULT_SUPPORT = (1e-3, 1e3)
CONSISTENCY_TOL = 1e-4
CONSISTENCY_POINTS = 200
TAIL_LOG_FLOOR = math.log(1e-290)
ZERO_SEARCH_POINTS = 2000
ZERO_XTOL = 1e-12
CUSTOM_TARGET_ABS_ERR = 1e-11
CUSTOM_TARGET_REL_ERR = 1e-13


@dataclass(frozen=True)
class DistributionModel:
    id: str
    density: Scalar
    survival: Scalar
    omega: Scalar
    omega_prime: Scalar
    mills: Scalar
    omega_zeros: tuple = ()
    params: dict = field(default_factory=dict, compare=False)

    @property
    def alpha(self):
        return self.params.get("alpha")

    def mills_prime(self, x: float) -> float:
        """m'(x) from the first-order equation m' = -omega m - 1."""
        return -self.omega(x) * self.mills(x) - 1.0


def _positive(x) -> float:
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"x must be positive and finite, got {x!r}")
    return x


def make_gamma(alpha) -> DistributionModel:
    a = specfun.as_alpha(alpha)
    gamma_a = math.gamma(a)

    def survival(x):
        return specfun.upper_incomplete_gamma(a, _positive(x)).value / gamma_a

    def omega(x):
        return (a - 1.0) / _positive(x) - 1.0

    def omega_prime(x):
        x = _positive(x)
        return -(a - 1.0) / (x * x)

    return DistributionModel(
        id=f"gamma({a:g})",
        density=lambda x: specfun.gamma_pdf(a, x),
        survival=survival,
        omega=omega,
        omega_prime=omega_prime,
        mills=lambda x: specfun.gamma_mills(a, x).value,
        omega_zeros=(a - 1.0,) if a > 1.0 else (),
        params={"alpha": a},
    )


def _normal_omega_prime(x):
    _positive(x)
    return -1.0


def make_normal_halfline() -> DistributionModel:
    """Standard normal law on x > 0, left unnormalized.

    omega and m do not see the normalizing constant, so phi and the normal
    survival function are used as they are.
    """
    return DistributionModel(
        id="normal-halfline",
        density=lambda x: specfun.normal_pdf(_positive(x)),
        survival=lambda x: specfun.normal_survival(_positive(x)).value,
        omega=lambda x: -_positive(x),
        omega_prime=_normal_omega_prime,
        mills=lambda x: specfun.normal_mills(_positive(x)).value,
    )


def find_sign_changes(fn: Scalar, grid) -> list:
    """Roots of ``fn`` bracketed by sign changes between consecutive grid points."""
    values = [fn(float(x)) for x in grid]
    roots = []
    for i in range(len(values) - 1):
        lo, hi = values[i], values[i + 1]
        if lo == 0.0:
            roots.append(float(grid[i]))
        elif lo * hi < 0.0:
            roots.append(float(bisect(fn, float(grid[i]), float(grid[i + 1]), xtol=ZERO_XTOL)))
    if values and values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def _central_difference(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def make_custom(omega_fn: Scalar, omega_prime_fn: Scalar, density_fn: Scalar | None = None,
                support_hint=DEFAULT_SUPPORT, *, log_density_fn: Scalar | None = None,
                id: str = "custom") -> DistributionModel:
    """Build a model from a user-supplied density and its score function.

    Either ``density_fn`` or ``log_density_fn`` must be given; the log form
    avoids underflow in the tail.  The survival function and Mills ratio are
    computed by quadrature on demand and cached per abscissa.  ``support_hint``
    is the (lo, hi) range sampled for the consistency check and for locating
    zeros of omega.
    """
    if density_fn is None and log_density_fn is None:
        raise ModelConstructionError("either density_fn or log_density_fn is required")
    if log_density_fn is None:
        def log_density_fn(x):
            fx = density_fn(x)
            return math.log(fx) if fx != 0.0 else -math.inf
    if density_fn is None:
        def density_fn(x):
            return math.exp(log_density_fn(x))
    lo, hi = (float(v) for v in support_hint)
    if not 0.0 < lo < hi:
        raise ModelConstructionError(f"support_hint must satisfy 0 < lo < hi, got {support_hint!r}")

    worst_x, worst_err = None, 0.0
    for x in np.geomspace(lo, hi, CONSISTENCY_POINTS):
        x = float(x)
        try:
            log_fx = log_density_fn(x)
            fd = _central_difference(log_density_fn, x, 1e-5 * x)
        except (ValueError, OverflowError):
            log_fx = math.nan
        if log_fx < TAIL_LOG_FLOOR:
            continue  # density underflows to subnormals in the tail
        if not math.isfinite(log_fx):
            raise ModelConstructionError(f"density is not positive at x={x!r}", x)
        om = omega_fn(x)
        err = abs(fd - om) / max(1.0, abs(om))
        if err > worst_err:
            worst_x, worst_err = x, err
    if worst_err > CONSISTENCY_TOL:
        raise ModelConstructionError(
            f"omega is inconsistent with the density: relative mismatch {worst_err:.3g} "
            f"at x={worst_x!r}", worst_x, worst_err)

    def feature_scale(x):
        om = abs(omega_fn(x))
        return min(x, 1.0 / om) if om > 0.0 else x

    def density_vec(t):
        return np.array([density_fn(float(ti)) for ti in np.atleast_1d(t)])

    @lru_cache(maxsize=8192)
    def survival(x):
        x = _positive(x)
        s = feature_scale(x)
        # tail values can be far below the absolute target; scale it by f(x) s
        target = min(CUSTOM_TARGET_ABS_ERR, CUSTOM_TARGET_REL_ERR * density_fn(x) * s) or CUSTOM_TARGET_ABS_ERR
        return integrate_semi_infinite(density_vec, x, target,
                                       target_rel_err=CUSTOM_TARGET_REL_ERR,
                                       breakpoints=(x + s, x + 10.0 * s)).value

    @lru_cache(maxsize=8192)
    def mills(x):
        x = _positive(x)
        log_fx = log_density_fn(x)
        s = feature_scale(x)

        def ratio(t):
            return np.array([math.exp(log_density_fn(x + float(ti)) - log_fx)
                             for ti in np.atleast_1d(t)])

        return integrate_semi_infinite(ratio, 0.0, CUSTOM_TARGET_ABS_ERR,
                                       target_rel_err=CUSTOM_TARGET_REL_ERR,
                                       breakpoints=(s, 10.0 * s)).value

    zeros = tuple(find_sign_changes(omega_fn, np.geomspace(lo, hi, ZERO_SEARCH_POINTS)))
    return DistributionModel(
        id=id,
        density=lambda x: density_fn(_positive(x)),
        survival=survival,
        omega=lambda x: omega_fn(_positive(x)),
        omega_prime=lambda x: omega_prime_fn(_positive(x)),
        mills=mills,
        omega_zeros=zeros,
        params={"support_hint": (lo, hi)},
    )


@dataclass(frozen=True)
class PolynomialScore:
    """Score function omega(x) = inverse / x + sum_k coeffs[k] x^k.

    The density is exp of the antiderivative, which is available in closed
    form, so models built from it need no numerical differentiation.
    """

    inverse: float = 0.0
    coeffs: tuple = ()

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        while coeffs and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "inverse", float(self.inverse))
        if not coeffs or coeffs[-1] >= 0.0:
            raise ModelConstructionError(
                "score must have a polynomial part with negative leading coefficient "
                "for the density to be integrable at infinity")
        if self.inverse <= -1.0:
            raise ModelConstructionError("coefficient of 1/x must exceed -1 for integrability at 0")

    def omega(self, x):
        return self.inverse / x + sum(c * x ** k for k, c in enumerate(self.coeffs))

    def omega_prime(self, x):
        return -self.inverse / (x * x) + sum(k * c * x ** (k - 1)
                                             for k, c in enumerate(self.coeffs) if k)

    def log_density(self, x):
        return self.inverse * math.log(x) + sum(c * x ** (k + 1) / (k + 1)
                                                for k, c in enumerate(self.coeffs))


def make_from_score(score: PolynomialScore, support_hint=DEFAULT_SUPPORT,
                    id: str = "custom") -> DistributionModel:
    return make_custom(score.omega, score.omega_prime, None, support_hint,
                       log_density_fn=score.log_density, id=id)
