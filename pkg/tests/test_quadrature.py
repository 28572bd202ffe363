import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from millsconvex import specfun
from millsconvex.errors import DomainError, QuadratureAccuracyError
from millsconvex.quadrature import (Representation, gamma_msecond_reference,
                                    gamma_x2mprime_reference, integrate_semi_infinite,
                                    mills_reference)

GRID = np.geomspace(1e-2, 50, 50)
GAMMA_ALPHAS = (0.5, 1.0, 1.5, 2.0, 3.0)


def test_exponential_integral():
    res = integrate_semi_infinite(lambda t: np.exp(-t), 0.0)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.abs_error_estimate <= 1e-11
    assert res.evaluations > 0


def test_gaussian_integral():
    res = integrate_semi_infinite(lambda t: np.exp(-0.5 * t * t), 0.0)
    assert res.value == pytest.approx(math.sqrt(math.pi / 2), abs=1e-11)


def test_inverse_sqrt_endpoint_singularity():
    res = integrate_semi_infinite(lambda s: s ** -0.5 * np.exp(-0.5 * s), 0.0)
    assert res.value == pytest.approx(math.sqrt(2 * math.pi), abs=1e-10)
    assert res.value == pytest.approx(2.5066282746, abs=1e-10)


def test_scalar_integrand_is_accepted():
    res = integrate_semi_infinite(lambda t: math.exp(-2.0 * t), 1.0)
    assert res.value == pytest.approx(0.5 * math.exp(-2.0), abs=1e-12)


def test_budget_exhaustion_raises_with_estimate():
    # 1/(1+t) is not integrable; the estimate never settles
    with pytest.raises(QuadratureAccuracyError) as info:
        integrate_semi_infinite(lambda t: 1.0 / (1.0 + t), 0.0, max_panels=64)
    assert info.value.best is not None
    assert info.value.best.value > 0


def test_non_finite_integrand_is_domain_error():
    with pytest.raises(DomainError):
        integrate_semi_infinite(lambda t: np.where(t > 1, np.nan, 1.0) * np.exp(-t), 0.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(-5.0, 5.0))
def test_shifted_exponential_property(rate, lower):
    res = integrate_semi_infinite(lambda t: np.exp(-rate * (t - lower)), lower)
    assert res.value == pytest.approx(1.0 / rate, rel=1e-10)


@pytest.mark.parametrize("x", [0.0, 0.3, 2.0, 17.0])
def test_laplace_normal_against_scipy(x):
    oracle, _ = integrate.quad(lambda t: math.exp(-x * t - 0.5 * t * t), 0, np.inf,
                               epsabs=1e-14, epsrel=1e-13)
    assert mills_reference(Representation.LAPLACE_NORMAL, x=x).value == pytest.approx(oracle, rel=1e-10)


def test_laplace_at_zero_is_half_root_pi_over_two():
    val = mills_reference(Representation.LAPLACE_NORMAL, x=0.0).value
    assert val == pytest.approx(math.sqrt(math.pi / 2), abs=1e-11)


def test_gamma_scaled_alpha_two_at_one():
    assert mills_reference(Representation.GAMMA_SCALED, 2.0, 1.0).value == pytest.approx(2.0, abs=1e-11)


def test_stieltjes_h_at_one():
    assert mills_reference(Representation.STIELTJES_H, x=1.0).value == pytest.approx(0.6556795424, abs=1e-10)


def test_representation_alpha_rules():
    with pytest.raises(TypeError):
        mills_reference(Representation.GAMMA_SHIFT, None, 1.0)
    with pytest.raises(TypeError):
        mills_reference(Representation.CAUCHY_NORMAL, 2.0, 1.0)
    with pytest.raises(DomainError):
        mills_reference(Representation.CAUCHY_NORMAL, x=0.0)


@pytest.mark.parametrize("x", GRID)
def test_normal_representations_agree(x):
    lap = mills_reference(Representation.LAPLACE_NORMAL, x=x).value
    cau = mills_reference(Representation.CAUCHY_NORMAL, x=x).value
    ker = specfun.normal_mills(x).value
    assert lap == pytest.approx(cau, rel=1e-8)
    assert lap == pytest.approx(ker, rel=1e-8)
    assert cau == pytest.approx(ker, rel=1e-8)


@pytest.mark.parametrize("alpha", GAMMA_ALPHAS)
@pytest.mark.parametrize("x", GRID[::7])
def test_gamma_representations_agree(alpha, x):
    shift = mills_reference(Representation.GAMMA_SHIFT, alpha, x).value
    scaled = mills_reference(Representation.GAMMA_SCALED, alpha, x).value
    ker = specfun.gamma_mills(alpha, x).value
    assert shift == pytest.approx(ker, rel=1e-8)
    assert scaled == pytest.approx(ker, rel=1e-8)


@pytest.mark.parametrize("x", np.geomspace(1e-2, 50, 30))
def test_stieltjes_matches_normal_kernel(x):
    r = math.sqrt(x)
    assert mills_reference(Representation.STIELTJES_H, x=x).value == pytest.approx(
        specfun.normal_mills(r).value / r, rel=1e-7)


def test_gamma_shift_large_x_refines_near_one():
    x = 400.0
    assert mills_reference(Representation.GAMMA_SHIFT, 3.0, x).value == pytest.approx(
        specfun.gamma_mills(3.0, x).value, rel=1e-10)


@pytest.mark.parametrize("x", [0.1, 1.0, 7.0])
def test_x2mprime_reference_trivial_zeros(x):
    assert gamma_x2mprime_reference(1.0, x, 0).value == 0.0
    assert gamma_x2mprime_reference(2.0, x, 1).value == 0.0


def test_x2mprime_reference_order_one_sign_for_alpha_three():
    val = gamma_x2mprime_reference(3.0, 1.0, 1).value
    assert val > 0
    # m(x; 3) = 1 + 2/x + 2/x^2 gives [x^2 m']' = 4/x^2
    assert val == pytest.approx(4.0, rel=1e-10)


@pytest.mark.parametrize("alpha", GAMMA_ALPHAS)
@pytest.mark.parametrize("x", [0.05, 0.5, 3.0, 20.0])
def test_x2mprime_reference_matches_central_difference(alpha, x):
    h = 1e-4 * x
    fd = (specfun.gamma_mills(alpha, x + h).value - specfun.gamma_mills(alpha, x - h).value) / (2 * h)
    ref = gamma_x2mprime_reference(alpha, x, 0).value
    assert ref == pytest.approx(x * x * fd, abs=1e-5, rel=1e-5)


def test_msecond_reference_examples():
    assert gamma_msecond_reference(1.0, 2.0).value == 0.0
    assert gamma_msecond_reference(2.0, 1.0).value == pytest.approx(2.0, rel=1e-10)
    assert gamma_msecond_reference(0.5, 1.0).value < 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0.05, 30.0))
def test_msecond_sign_follows_alpha(alpha, x):
    val = gamma_msecond_reference(alpha, x).value
    assert math.copysign(1.0, val) == math.copysign(1.0, alpha - 1.0) or val == 0.0
