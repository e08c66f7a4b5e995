import numpy as np
import pytest
import scipy.integrate
from numpy.testing import assert_allclose

from arcwave.errors import InvalidArgument
from arcwave.quadrature import clenshaw_curtis, gauss_chebyshev, gauss_legendre, integrate_weighted


def test_gauss_chebyshev_first_kind():
    x, w = gauss_chebyshev(16)
    assert_allclose(w.sum(), np.pi, rtol=1e-14)
    # int t^2 / w = pi / 2
    assert_allclose(np.sum(w * x ** 2), np.pi / 2, rtol=1e-14)


def test_gauss_chebyshev_second_kind():
    x, w = gauss_chebyshev(16, kind=2)
    # int w = pi / 2, int t^2 w = pi / 8
    assert_allclose(w.sum(), np.pi / 2, rtol=1e-14)
    assert_allclose(np.sum(w * x ** 2), np.pi / 8, rtol=1e-14)


def test_rules_are_read_only():
    x, w = gauss_chebyshev(8)
    with pytest.raises(ValueError):
        w[0] = 1


def test_clenshaw_curtis():
    x, w = clenshaw_curtis(32)
    assert_allclose(np.sum(w * np.exp(x)), np.e - 1 / np.e, rtol=1e-14)
    expected = scipy.integrate.quad(lambda t: np.cos(3 * t) / (2 + t), -1, 1)[0]
    assert_allclose(np.sum(w * np.cos(3 * x) / (2 + x)), expected, rtol=1e-12)


def test_gauss_legendre_interval():
    x, w = gauss_legendre(10, 0.0, 2.0)
    assert_allclose(np.sum(w * x ** 3), 4.0, rtol=1e-14)


def test_integrate_weighted():
    assert_allclose(integrate_weighted(np.cos), np.pi * 0.7651976865579666, rtol=1e-13)


def test_invalid():
    with pytest.raises(InvalidArgument):
        gauss_chebyshev(0)
    with pytest.raises(InvalidArgument):
        gauss_chebyshev(4, kind=3)
    with pytest.raises(InvalidArgument):
        clenshaw_curtis(0)
