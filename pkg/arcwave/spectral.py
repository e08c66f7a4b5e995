"""
Chebyshev and Fourier machinery on the reference interval (-1,1).

Densities live in four orthonormal Chebyshev families. With ``w(t) = sqrt(1-t^2)``,
``T̂_0 = 1/sqrt(pi)``, ``T̂_n = sqrt(2/pi) T_n`` and ``Û_n = sqrt(2/pi) U_n``:

=========  ==================================  =============================
basis      expansion                            coefficient
=========  ==================================  =============================
TW         ``u = sum c_n T̂_n / w``             ``c_n = int u T̂_n dt``
T_plain    ``u = sum c_n T̂_n``                 ``c_n = int u T̂_n / w dt``
WU         ``u = sum c_n w Û_n``               ``c_n = int u Û_n dt``
U_plain    ``u = sum c_n Û_n``                 ``c_n = int u Û_n w dt``
=========  ==================================  =============================

TW carries the T^s scale, T_plain the W^s scale, WU the U^s scale and U_plain the Y^s scale.
The Sobolev norm of a density is ``sum (1+n^2)^s |c_n|^2`` in every family.

All functions here are pure and can be called from several threads at once.
"""
import logging

import numpy as np
import scipy.fft

from .errors import InvalidArgument

_log = logging.getLogger("arcwave.spectral")

#: The recognized basis tags
BASES = ("TW", "WU", "T_plain", "U_plain")

#: Which node family :func:`analyze` samples on, per basis
NODE_KIND = {"TW": 1, "T_plain": 1, "WU": 2, "U_plain": 2}

_SQRT_PI = np.sqrt(np.pi)
_SQRT_2_PI = np.sqrt(2.0 / np.pi)


def _checkBasis(basis):
    if basis not in BASES:
        raise InvalidArgument("Unknown basis tag %r, expected one of %s" % (basis, BASES))


class SpectralDensity:
    """
    Coefficient vector of a scalar or 2-vector valued density in one of the four bases.
    The coefficients are stored with shape ``(components, N+1)``::

        d = SpectralDensity([1, 0, 0], "TW")
        d.N  # 2
        d.components  # 1

    Args:
        coeffs: a sequence of N+1 complex numbers, or a ``(components, N+1)`` array.
        basis: one of ``"TW"``, ``"WU"``, ``"T_plain"``, ``"U_plain"``.
    """

    def __init__(self, coeffs, basis):
        _checkBasis(basis)
        coeffs = np.array(coeffs, dtype=complex, ndmin=2)
        if coeffs.ndim != 2 or coeffs.shape[1] == 0:
            raise InvalidArgument("Density coefficients must be a non-empty (components, N+1) array")
        if coeffs.shape[0] not in (1, 2):
            raise InvalidArgument("Densities have 1 or 2 components, got %d" % coeffs.shape[0])
        if not np.all(np.isfinite(coeffs)):
            raise InvalidArgument("Density coefficients contain NaN or Inf")
        self.coeffs = coeffs
        self.basis = basis

    @property
    def N(self):
        return self.coeffs.shape[1] - 1

    @property
    def components(self):
        return self.coeffs.shape[0]

    def scalar(self):
        """
        The coefficient vector of a single-component density.
        """
        if self.components != 1:
            raise InvalidArgument("Density has %d components" % self.components)
        return self.coeffs[0]

    def truncated(self, N):
        """
        Returns the density cut (or zero-padded) to N+1 coefficients per component.
        """
        out = np.zeros((self.components, N + 1), dtype=complex)
        n = min(N + 1, self.coeffs.shape[1])
        out[:, :n] = self.coeffs[:, :n]
        return SpectralDensity(out, self.basis)

    def __add__(self, other):
        if self.basis != other.basis:
            raise InvalidArgument("Cannot add densities in %s and %s" % (self.basis, other.basis))
        N = max(self.N, other.N)
        return SpectralDensity(
            self.truncated(N).coeffs + other.truncated(N).coeffs, self.basis
        )

    def __mul__(self, scalar):
        return SpectralDensity(self.coeffs * scalar, self.basis)

    __rmul__ = __mul__

    def toDict(self):
        return {
            "basis": self.basis,
            "coeffs": [[[c.real, c.imag] for c in comp] for comp in self.coeffs],
        }

    @staticmethod
    def fromDict(d):
        coeffs = np.array(d["coeffs"], dtype=float)
        return SpectralDensity(coeffs[..., 0] + 1j * coeffs[..., 1], d["basis"])

    def __repr__(self):
        return "SpectralDensity(basis=%s, N=%d, components=%d)" % (
            self.basis,
            self.N,
            self.components,
        )


class PeriodicFunctionSamples:
    """
    Samples of a 2π-periodic function on the uniform grid ``theta_k = -pi + 2 pi k / L``.
    The length must be a power of two, at least 4.
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=complex)
        L = values.shape[-1]
        if L < 4 or L & (L - 1):
            raise InvalidArgument("Periodic samples need a power-of-two length >= 4, got %d" % L)
        self.values = values

    @property
    def theta(self):
        return uniform_theta_grid(self.values.shape[-1])

    def __len__(self):
        return self.values.shape[-1]


class SobolevNorm:
    """
    The value of a Chebyshev-scale Sobolev norm of order :attr:`s`. Behaves like a float.
    """

    def __init__(self, s, value):
        self.s = s
        self.value = float(value)

    def __float__(self):
        return self.value

    def __repr__(self):
        return "SobolevNorm(s=%g, value=%.16g)" % (self.s, self.value)


def orthonormal_scaling(N):
    """
    Scale factors ``s_n`` with ``T̂_n = s_n T_n``: ``1/sqrt(pi)`` for n=0, ``sqrt(2/pi)`` after.
    """
    s = np.full(N + 1, _SQRT_2_PI)
    s[0] = 1.0 / _SQRT_PI
    return s


def to_classical(density):
    """
    Converts orthonormal coefficients to classical ones, i.e. to the coefficients of
    ``T_n/w``, ``T_n``, ``w U_n`` or ``U_n`` respectively.
    """
    if density.basis in ("TW", "T_plain"):
        scale = orthonormal_scaling(density.N)
    else:
        scale = np.full(density.N + 1, _SQRT_2_PI)
    return density.coeffs * scale


def from_classical(coeffs, basis):
    """
    Inverse of :func:`to_classical`.
    """
    _checkBasis(basis)
    coeffs = np.array(coeffs, dtype=complex, ndmin=2)
    N = coeffs.shape[1] - 1
    if basis in ("TW", "T_plain"):
        scale = orthonormal_scaling(N)
    else:
        scale = np.full(N + 1, _SQRT_2_PI)
    return SpectralDensity(coeffs / scale, basis)


def chebyshev_nodes(n, kind=1):
    """
    First-kind nodes ``cos((2k+1) pi / 2n)`` or second-kind interior nodes ``cos((k+1) pi / (n+1))``,
    k = 0..n-1, in decreasing order.
    """
    if n < 1:
        raise InvalidArgument("Need at least one node")
    k = np.arange(n)
    if kind == 1:
        return np.cos((2 * k + 1) * np.pi / (2 * n))
    if kind == 2:
        return np.cos((k + 1) * np.pi / (n + 1))
    raise InvalidArgument("Chebyshev node kind must be 1 or 2")


def nodes_for(basis, n):
    """
    The nodes :func:`analyze` expects for ``n`` coefficients in ``basis``.
    """
    _checkBasis(basis)
    return chebyshev_nodes(n, NODE_KIND[basis])


def weight(t):
    """
    The Chebyshev weight ``w(t) = sqrt(1 - t^2)``.
    """
    t = np.asarray(t)
    return np.sqrt(1.0 - t * t)


def _realTransform(fn, x, **kwargs):
    # scipy's trigonometric transforms are real; complex data goes through twice
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return fn(x.real, **kwargs) + 1j * fn(x.imag, **kwargs)
    return fn(x, **kwargs)


def dct_coefficients(samples):
    """
    Classical Chebyshev coefficients ``a_n`` of the polynomial interpolating ``samples`` at the
    first-kind nodes, along the last axis.
    """
    samples = np.asarray(samples)
    K = samples.shape[-1]
    a = _realTransform(scipy.fft.dct, samples, type=2, axis=-1) / K
    a[..., 0] /= 2
    return a


def _checkValues(values):
    values = np.array(values, dtype=complex, ndmin=1)
    if values.size == 0 or values.shape[-1] == 0:
        raise InvalidArgument("Cannot analyze an empty sample set")
    if values.ndim > 2:
        raise InvalidArgument("Values must have shape (K,) or (components, K)")
    return values


def analyze(values, basis):
    """
    Computes orthonormal coefficients from samples at the nodes returned by :func:`nodes_for`.
    The number of coefficients equals the number of nodes, and the result is exact for
    expansions of matching degree::

        t = nodes_for("T_plain", 8)
        d = analyze(np.ones(8), "T_plain")
        d.coeffs[0, 0]  # sqrt(pi)

    Args:
        values: samples of the function ``u`` (not of ``w u``), shape ``(K,)`` or ``(components, K)``.
        basis: the basis tag of the result.
    """
    _checkBasis(basis)
    values = _checkValues(values)
    K = values.shape[-1]
    t = nodes_for(basis, K)
    if basis in ("TW", "T_plain"):
        g = values * weight(t) if basis == "TW" else values
        coeffs = dct_coefficients(g) / orthonormal_scaling(K - 1)
    else:
        # sin(theta_k) U_n(t_k) = sin((n+1) theta_k), so both second-kind families reduce to a DST-I
        f = values if basis == "WU" else values * weight(t)
        coeffs = _realTransform(scipy.fft.dst, f, type=1, axis=-1) / (K + 1) / _SQRT_2_PI
    return SpectralDensity(coeffs, basis)


def naive_analyze(values, basis):
    """
    The O(N^2) reference for :func:`analyze`, by explicit discrete orthogonality sums.
    Kept as the test oracle of the transform path.
    """
    _checkBasis(basis)
    values = _checkValues(values)
    K = values.shape[-1]
    if basis in ("TW", "T_plain"):
        theta = (2 * np.arange(K) + 1) * np.pi / (2 * K)
        g = values * np.sin(theta) if basis == "TW" else values
        n = np.arange(K)
        T = np.cos(np.outer(theta, n))
        a = (2.0 / K) * g @ T
        a[..., 0] /= 2
        return SpectralDensity(a / orthonormal_scaling(K - 1), basis)
    theta = (np.arange(K) + 1) * np.pi / (K + 1)
    f = values if basis == "WU" else values * np.sin(theta)
    S = np.sin(np.outer(theta, np.arange(1, K + 1)))
    return SpectralDensity((2.0 / (K + 1)) * f @ S / _SQRT_2_PI, basis)


def _clenshaw(coeffs, t, kind):
    # sum_n c_n P_n(t) for P = T (kind 1) or U (kind 2); coeffs (C, n), t (P,)
    b1 = np.zeros(coeffs.shape[:-1] + t.shape, dtype=complex)
    b2 = np.zeros_like(b1)
    for n in range(coeffs.shape[-1] - 1, 0, -1):
        b1, b2 = coeffs[..., n, None] + 2 * t * b1 - b2, b1
    if kind == 1:
        return coeffs[..., 0, None] + t * b1 - b2
    return coeffs[..., 0, None] + 2 * t * b1 - b2


def synthesize(density, points):
    """
    Evaluates the expansion at the given points. Returns shape ``(P,)`` for scalar densities and
    ``(2, P)`` for two-component ones. TW densities are infinite at ±1.
    """
    points = np.array(points, ndmin=1)
    if np.any(np.abs(points.real) > 1) or np.any(points.imag != 0):
        raise InvalidArgument("Synthesis points must lie in [-1,1]")
    t = points.real.astype(float)
    classical = to_classical(density)
    if density.basis in ("TW", "T_plain"):
        out = _clenshaw(classical, t, 1)
        if density.basis == "TW":
            with np.errstate(divide="ignore"):
                out = out / weight(t)
    else:
        out = _clenshaw(classical, t, 2)
        if density.basis == "WU":
            out = out * weight(t)
    return out[0] if density.components == 1 else out


def uniform_theta_grid(L):
    """
    The grid ``theta_k = -pi + 2 pi k / L``, k = 0..L-1.
    """
    return -np.pi + 2 * np.pi * np.arange(L) / L


def _signSin(L):
    # sign(sin theta_k) with exact zeros at theta = -pi and theta = 0
    k = np.arange(L)
    s = np.sign(np.sin(uniform_theta_grid(L)))
    s[k % (L // 2) == 0] = 0
    return s


def lift(u_samples, which):
    """
    Lifts samples of ``u`` taken at ``t = cos(theta_k)`` (see :func:`uniform_theta_grid`) to a
    periodic function:

    * ``N``: ``u(cos θ)|sin θ|``
    * ``Nhat``: ``u(cos θ)``
    * ``Z``: ``u(cos θ)|sin θ| sign(sin θ)``
    * ``Zhat``: ``u(cos θ) sign(sin θ)``

    with ``sign(0) = 0``.
    """
    u = np.asarray(u_samples, dtype=complex)
    L = u.shape[-1]
    if L < 4 or L & (L - 1):
        raise InvalidArgument("Lifting needs a power-of-two sample count >= 4, got %d" % L)
    sign = _signSin(L)
    abssin = np.abs(np.sin(uniform_theta_grid(L)))
    abssin[sign == 0] = 0
    if which == "N":
        return PeriodicFunctionSamples(u * abssin)
    if which == "Nhat":
        return PeriodicFunctionSamples(u)
    if which == "Z":
        return PeriodicFunctionSamples(u * abssin * sign)
    if which == "Zhat":
        return PeriodicFunctionSamples(u * sign)
    raise InvalidArgument("Unknown lifting %r, expected N, Nhat, Z or Zhat" % (which,))


def lift_density(density, which, L=256):
    """
    Synthesizes a scalar density on the θ-grid and lifts it. TW densities should use ``N``
    (the weight cancels), WU densities ``Z``.
    """
    theta = uniform_theta_grid(L)
    t = np.clip(np.cos(theta), -1, 1)
    classical = to_classical(density)[0]
    sin = np.sin(theta)
    if density.basis in ("TW", "T_plain"):
        core = _clenshaw(classical[None], t, 1)[0]
        u = core if density.basis == "T_plain" else None
    else:
        core = _clenshaw(classical[None], t, 2)[0]
        u = core if density.basis == "U_plain" else None
    if u is None:
        # weighted families: lift w u or u / w directly, avoiding 0 * inf at the poles
        if density.basis == "TW" and which == "N":
            return PeriodicFunctionSamples(core)
        if density.basis == "WU" and which == "Z":
            out = core * sin * np.abs(sin)
            out[_signSin(L) == 0] = 0
            return PeriodicFunctionSamples(out)
        raise InvalidArgument("Lifting %s of a %s density is not bounded" % (which, density.basis))
    return lift(u, which)


def sobolev_norm(density, s):
    """
    ``sqrt(sum_n (1+n^2)^s |c_n|^2)`` summed over components. The basis tag selects the scale
    (TW: T^s, T_plain: W^s, WU: U^s, U_plain: Y^s); the formula is the same for all four.
    """
    n = np.arange(density.N + 1)
    weights = (1.0 + n * n) ** s
    return SobolevNorm(s, np.sqrt(np.sum(weights * np.abs(density.coeffs) ** 2)))


def lifted_norm(samples, s):
    """
    Periodic H^s norm ``sqrt(sum (1+n^2)^s |ũ_n|^2)`` with ``ũ_n`` the coefficients against
    ``e^{inθ}/sqrt(2π)``, truncated at the Nyquist index.
    """
    if not isinstance(samples, PeriodicFunctionSamples):
        samples = PeriodicFunctionSamples(samples)
    L = len(samples)
    coeffs = np.sqrt(2 * np.pi) / L * scipy.fft.fft(samples.values)
    n = scipy.fft.fftfreq(L, 1.0 / L)
    return float(np.sqrt(np.sum((1.0 + n * n) ** s * np.abs(coeffs) ** 2)))


def derivative_matrix(N):
    """
    The (N+2)×(N+1) matrix of d/dt from WU to TW coefficients: ``(w Û_n)' = -(n+1) T̂_{n+1} / w``.
    """
    D = np.zeros((N + 2, N + 1))
    n = np.arange(N + 1)
    D[n + 1, n] = -(n + 1)
    return D


def conversion_matrix(N):
    """
    The (N+3)×(N+1) matrix rewriting WU coefficients as TW coefficients (the inclusion U^s ⊂ T^s),
    from ``w Û_n = (T̂_n - T̂_{n+2}) / (2w)`` with ``sqrt(2)`` in place of 1 for n = 0.
    """
    C = np.zeros((N + 3, N + 1))
    n = np.arange(N + 1)
    C[n, n] = 0.5
    C[0, 0] = 1 / np.sqrt(2)
    C[n + 2, n] = -0.5
    return C


def derivative(density):
    """
    Differentiates a density. WU maps to TW (U^s → T^{s-1}) with one extra coefficient;
    T_plain maps to U_plain (W^s → Y^{s-1}), using ``T̂_n' = n Û_{n-1}``.
    """
    if density.basis == "WU":
        return SpectralDensity(density.coeffs @ derivative_matrix(density.N).T, "TW")
    if density.basis == "T_plain":
        n = np.arange(1, density.N + 1)
        out = density.coeffs[:, 1:] * n
        if out.shape[1] == 0:
            out = np.zeros((density.components, 1), dtype=complex)
        return SpectralDensity(out, "U_plain")
    raise InvalidArgument("derivative is defined on WU and T_plain densities, not %s" % density.basis)


def antiderivative(density):
    """
    Inverse of :func:`derivative` on WU: takes a TW density with vanishing zeroth coefficient
    (zero mean, so the primitive vanishes at both ends) and returns its WU primitive.
    """
    if density.basis != "TW":
        raise InvalidArgument("antiderivative expects a TW density")
    if np.any(np.abs(density.coeffs[:, 0]) > 1e-14 * max(1.0, np.abs(density.coeffs).max())):
        raise InvalidArgument("antiderivative needs a zero-mean TW density (c_0 = 0)")
    n = np.arange(1, density.N + 1)
    out = -density.coeffs[:, 1:] / n
    if out.shape[1] == 0:
        out = np.zeros((density.components, 1), dtype=complex)
    return SpectralDensity(out, "WU")


def include_w_in_y(density):
    """
    Re-expands a T_plain density (W^s) in the U_plain family (Y^s), via
    ``T̂_0 = Û_0/sqrt(2)``, ``T̂_1 = Û_1/2`` and ``T̂_n = (Û_n - Û_{n-2})/2``.
    """
    if density.basis != "T_plain":
        raise InvalidArgument("include_w_in_y expects a T_plain density")
    c = density.coeffs
    d = c / 2
    d[:, 0] = c[:, 0] / np.sqrt(2)
    d[:, :-2] -= c[:, 2:] / 2
    return SpectralDensity(d, "U_plain")


def include_u_in_t(density):
    """
    Re-expands a WU density (U^s) in the TW family (T^s); the result has two more coefficients.
    """
    if density.basis != "WU":
        raise InvalidArgument("include_u_in_t expects a WU density")
    return SpectralDensity(density.coeffs @ conversion_matrix(density.N).T, "TW")


def biperiodic_sobolev_norm(g, s1, s2):
    """
    Fourier-side norm ``sqrt(sum (1+n^2)^s1 (1+l^2)^s2 |g̃_{n,l}|^2)`` of a bi-periodic function
    sampled on the uniform ``theta x phi`` grid, with ``g̃`` taken against
    ``ê_n(θ) ê_l(φ)``, ``ê_n = e^{inθ}/sqrt(2π)``. Only nonnegative orders are supported.
    """
    if s1 < 0 or s2 < 0:
        raise InvalidArgument("Bi-periodic norms are only defined here for s1, s2 >= 0")
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2:
        raise InvalidArgument("Expected a 2D sample grid")
    L1, L2 = g.shape
    for L in (L1, L2):
        if L < 4 or L & (L - 1):
            raise InvalidArgument("Grid sizes must be powers of two >= 4")
    coeffs = 2 * np.pi / (L1 * L2) * scipy.fft.fft2(g)
    n = scipy.fft.fftfreq(L1, 1.0 / L1)
    l = scipy.fft.fftfreq(L2, 1.0 / L2)
    weights = np.outer((1.0 + n * n) ** s1, (1.0 + l * l) ** s2)
    return float(np.sqrt(np.sum(weights * np.abs(coeffs) ** 2)))


#: Coefficients this far below both neighbours count as vanishing by symmetry
DIP = 1e-3


def decay_rate(coeffs, start=4, tail=1e-13):
    """
    Fits ``|c_n| ~ C rho^-n`` by least squares on ``log |c_n|`` and returns ``(rho, residual)``, the
    residual being the RMS misfit in log space. Coefficients below ``tail * max|c|`` are dropped, and
    so are coefficients below :data:`DIP` times both neighbours, so that sequences with vanishing odd
    or even terms fit on the surviving parity. The fit uses the terms from ``start`` on, and falls
    back to the head only when fewer than two survive there. Fewer than two usable coefficients give
    ``rho = inf``, which is what an exactly polynomial (or constant) sequence should report.
    """
    c = np.abs(np.asarray(coeffs))
    if c.ndim > 1:
        c = c.max(axis=tuple(range(c.ndim - 1)))
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise InvalidArgument("decay_rate needs a finite, non-empty coefficient sequence")
    big = c.max()
    if big == 0:
        return np.inf, 0.0
    keep = c > tail * big
    n_tail = np.nonzero(keep)[0][-1] + 1
    neighbours = np.minimum(np.append(np.inf, c[:-1]), np.append(c[1:], np.inf))
    keep &= c >= DIP * neighbours
    if np.count_nonzero(keep[start:n_tail]) < 2:
        # too few terms past the head to fit on
        start = 1
    n = np.nonzero(keep[start:n_tail])[0] + start
    if n.size < 2:
        return np.inf, 0.0
    y = np.log(c[n])
    slope, intercept = np.polyfit(n, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * n + intercept)) ** 2)))
    if slope >= 0:
        _log.warning("Coefficients do not decay (log-slope %.3g over %d terms)", slope, n.size)
    return float(np.exp(-slope)), residual
