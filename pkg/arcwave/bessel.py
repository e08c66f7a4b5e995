"""
Bessel and Hankel functions of orders 0 and 1 for complex arguments.

Small arguments (``|z| <= SERIES_SWITCH``) use the ascending series with the ``log(z/2)`` term kept
separate, large arguments the Hankel asymptotic expansion truncated at its smallest term. For
``hankel1`` in the upper half plane the switch moves in to ``|z| + Im(z)/3 <= SERIES_SWITCH``, since
the series for J and Y cancel there. The kernel splits build on the same series tables, so the
logarithmic parts they strip off match the ones evaluated here exactly.

All functions accept scalars or arrays and return complex arrays of the same shape::

    from arcwave import bessel
    bessel.hankel1(0, 1.0)  # 0.7651976866 + 0.0882569642j
"""
import numpy as np

from .errors import InvalidArgument

#: Euler's constant
EULER_GAMMA = 0.57721566490153286060651209008240243

#: Radius below which the ascending series are summed
SERIES_SWITCH = 12.0

#: Number of series terms; the terms at ``|z| = SERIES_SWITCH`` are below 1e-20 after this many
SERIES_TERMS = 60

_k = np.arange(SERIES_TERMS + 2)

#: Harmonic numbers H_k, with H_0 = 0
HARMONIC = np.concatenate([[0.0], np.cumsum(1.0 / _k[1:])])


def _prepare(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise InvalidArgument("Bessel functions of the second kind are singular at 0")
    return z


def _seriesJ(z):
    # returns J0, J1 and the two sums that Y0, Y1 need beyond their log terms
    w = (z / 2) ** 2
    t0 = np.ones_like(z)
    t1 = np.ones_like(z)
    j0 = t0.copy()
    j1 = t1.copy()
    h0 = np.zeros_like(z)
    h1 = HARMONIC[0] + HARMONIC[1] + np.zeros_like(z)
    for k in range(1, SERIES_TERMS):
        t0 = t0 * (-w) / (k * k)
        t1 = t1 * (-w) / (k * (k + 1))
        j0 = j0 + t0
        j1 = j1 + t1
        h0 = h0 + HARMONIC[k] * t0
        h1 = h1 + (HARMONIC[k] + HARMONIC[k + 1]) * t1
    half = z / 2
    return j0, half * j1, h0, half * h1


def _smallArgs(z):
    j0, j1, h0, h1 = _seriesJ(z)
    logterm = np.log(z / 2) + EULER_GAMMA
    y0 = 2 / np.pi * (logterm * j0 - h0)
    y1 = -2 / (np.pi * z) + 2 / np.pi * logterm * j1 - h1 / np.pi
    return j0, j1, y0, y1


def _asymptoticSum(nu, z, sign):
    # sum_k (sign i)^k a_k(nu) / z^k, stopped before the terms start growing
    mu = 4.0 * nu * nu
    total = np.ones_like(z)
    term = np.ones_like(z)
    last = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 2 * SERIES_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z) * (sign * 1j)
        mag = np.abs(term)
        active &= mag < last
        if not active.any():
            break
        total = np.where(active, total + term, total)
        last = np.where(active, mag, last)
    return total


def _largeArgs(nu, z):
    phase = z - nu * np.pi / 2 - np.pi / 4
    amp = np.sqrt(2 / (np.pi * z))
    h1 = amp * np.exp(1j * phase) * _asymptoticSum(nu, z, 1)
    h2 = amp * np.exp(-1j * phase) * _asymptoticSum(nu, z, -1)
    return h1, h2


def _evaluate(z, nu, which):
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= SERIES_SWITCH
    if which == "h":
        # J and Y grow like e^{Im z} where H decays, so their sum loses about 2 Im z in the exponent
        small &= np.abs(z) + np.maximum(z.imag, 0) / 3 <= SERIES_SWITCH
    if small.any():
        j0, j1, y0, y1 = _smallArgs(z[small])
        j, y = (j0, y0) if nu == 0 else (j1, y1)
        out[small] = {"j": j, "y": y, "h": j + 1j * y}[which]
    if (~small).any():
        h1, h2 = _largeArgs(nu, z[~small])
        out[~small] = {"j": (h1 + h2) / 2, "y": (h1 - h2) / 2j, "h": h1}[which]
    return out


def besselj0(z):
    return _evaluate(z, 0, "j")


def besselj1(z):
    return _evaluate(z, 1, "j")


def bessely0(z):
    return _evaluate(_prepare(z), 0, "y")


def bessely1(z):
    return _evaluate(_prepare(z), 1, "y")


def hankel1(order, z):
    """
    The Hankel function of the first kind ``J_n + i Y_n`` for n = 0 or 1.
    """
    if order not in (0, 1):
        raise InvalidArgument("Only Hankel functions of order 0 and 1 are implemented")
    return _evaluate(_prepare(z), order, "h")
