"""
Quadrature rules on [-1,1].

Potentials and linear functionals integrate densities whose 1/w endpoint behaviour is absorbed by
the Gauss-Chebyshev measure, so most callers want :func:`gauss_chebyshev`. Clenshaw-Curtis is used
for plain-measure integrals, Gauss-Legendre for the averaged tangent near the diagonal.
"""
import functools

import numpy as np
import scipy.fft
from numpy.polynomial import legendre

from .errors import InvalidArgument


@functools.lru_cache(maxsize=64)
def _gaussChebyshev(n, kind):
    k = np.arange(n)
    if kind == 1:
        x = np.cos((2 * k + 1) * np.pi / (2 * n))
        w = np.full(n, np.pi / n)
    else:
        theta = (k + 1) * np.pi / (n + 1)
        x = np.cos(theta)
        w = np.pi / (n + 1) * np.sin(theta) ** 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_chebyshev(n, kind=1):
    """
    Nodes and weights of the n-point Gauss-Chebyshev rule. The first kind integrates
    ``int g(t) / w(t) dt`` and the second kind ``int g(t) w(t) dt``, both exactly for
    polynomials of degree 2n-1::

        x, w = gauss_chebyshev(16)
        w.sum()  # pi

    The returned arrays are read-only and shared between calls.
    """
    if n < 1:
        raise InvalidArgument("Need at least one quadrature node")
    if kind not in (1, 2):
        raise InvalidArgument("Gauss-Chebyshev kind must be 1 or 2")
    return _gaussChebyshev(int(n), kind)


@functools.lru_cache(maxsize=64)
def _clenshawCurtis(n):
    if n == 1:
        return np.array([1.0, -1.0]), np.array([1.0, 1.0])
    # Waldvogel's construction of the weights through one inverse FFT
    odd = np.arange(1, n, 2)
    l = len(odd)
    m = n - l
    v0 = np.concatenate([2 / odd / (odd - 2), 1 / odd[-1:], np.zeros(m)])
    v2 = -v0[:-1] - v0[-1:0:-1]
    g0 = -np.ones(n)
    g0[l] += n
    g0[m] += n
    g = g0 / (n * n - 1 + (n % 2))
    w = scipy.fft.ifft(v2 + g).real
    w = np.concatenate([w, w[:1]])
    x = np.cos(np.arange(n + 1) * np.pi / n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def clenshaw_curtis(n):
    """
    Nodes ``cos(k pi / n)``, k = 0..n, and weights of the Clenshaw-Curtis rule for ``int g(t) dt``.
    """
    if n < 1:
        raise InvalidArgument("Clenshaw-Curtis needs n >= 1")
    return _clenshawCurtis(int(n))


@functools.lru_cache(maxsize=16)
def _gaussLegendre(n):
    x, w = legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a=-1.0, b=1.0):
    """
    n-point Gauss-Legendre rule mapped to [a, b].
    """
    if n < 1:
        raise InvalidArgument("Need at least one quadrature node")
    x, w = _gaussLegendre(int(n))
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def integrate_weighted(g, n=64):
    """
    ``int g(t) / w(t) dt`` for a vectorized callable ``g``, by first-kind Gauss-Chebyshev.
    """
    x, w = gauss_chebyshev(n)
    return np.tensordot(g(x), w, axes=([-1], [0]))
