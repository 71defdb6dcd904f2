"""Oracle quadrature: exact integrals with endpoint singularities."""

import math

import pytest

from hardymono.errors import DomainError, QuadratureError
from hardymono import quadrature


def test_integral_of_x():
    val, err = quadrature.integrate(quadrature.Integrand(lambda x: x, 1.0, 0))
    assert abs(val - 0.5) < 1e-10
    assert err < 1e-8


def test_integral_of_log_squared():
    val, _ = quadrature.integrate(
        quadrature.Integrand(lambda x: math.log(x) ** 2, 0.0, 2))
    assert abs(val - 2.0) < 1e-9


def test_integral_of_negative_power():
    # integral_0^1 x^(-0.4) dx = 1/0.6 = 5/3; integrable endpoint blowup.
    val, _ = quadrature.integrate(
        quadrature.Integrand(lambda x: x ** -0.4, -0.4, 0))
    assert abs(val - 5.0 / 3.0) < 1e-9


def test_integral_complex_exponent():
    # integral x^(i) dx = 1/(1+i)
    val, _ = quadrature.integrate(
        quadrature.Integrand(lambda x: x ** 1j, 0.0, 0))
    assert abs(val - 1.0 / (1.0 + 1j)) < 1e-9


def test_prefix_integral():
    # integral_0^b x^2 dx = b^3/3
    b = 0.37
    val, _ = quadrature.integrate_prefix(
        quadrature.Integrand(lambda x: x * x, 2.0, 0), b)
    assert abs(val - b ** 3 / 3.0) < 1e-10


def test_prefix_endpoint_validation():
    with pytest.raises(DomainError):
        quadrature.integrate_prefix(
            quadrature.Integrand(lambda x: x, 1.0, 0), 1.5)


def test_non_integrable_power_rejected():
    with pytest.raises(DomainError):
        quadrature.Integrand(lambda x: 1.0 / x, -1.0, 0)


def test_adaptive_simpson_polynomial_is_near_exact():
    val, err = quadrature.adaptive_simpson(lambda t: t ** 3 - t, 0.0, 2.0)
    assert abs(val - (4.0 - 2.0)) < 1e-12
    assert err < 1e-12


def test_log_power_times_power_closed_form():
    # integral_0^1 x^p (log x)^k dx = (-1)^k k! / (p+1)^(k+1)
    for p, k in ((0.5, 1), (2.0, 3), (-0.3, 2)):
        want = (-1.0) ** k * math.factorial(k) / (p + 1.0) ** (k + 1)
        val, _ = quadrature.integrate(
            quadrature.Integrand(lambda x, p=p, k=k: x ** p * math.log(x) ** k,
                                 p, k))
        assert abs(val - want) < 1e-9 * max(1.0, abs(want))
