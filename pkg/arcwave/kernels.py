"""
Fundamental solutions and their logarithmic splits.

Every kernel is written as ``G = F1(d^2) log(d^2) + F2(d^2)`` with ``F1``, ``F2`` entire functions of
the squared distance ``z = d^2``. Because the split is exact at series level, the kernels keep working
for complexified arcs, where ``z`` is complex and only the principal logarithm of the smooth part
``Q`` is ever taken.

On a :class:`~arcwave.geometry.PairGeometry` a kernel is sampled as :class:`KernelSamples`: a smooth
part plus the smooth coefficient of ``log|t-tau|``. The operators module turns both into Galerkin
matrices::

    split = HelmholtzParams(1.0).split()
    samples = split.sample(PairGeometry.on_grid(arc, arc, t))
"""
import logging

import numpy as np

from . import bessel
from .errors import InvalidArgument, SingularityError
from .geometry import PairGeometry

_log = logging.getLogger("arcwave.kernels")

#: Number of power-series terms kept for the entire parts
SERIES_ORDER = 60

#: Largest ``|k^2 z|`` summed by power series; beyond it the Bessel functions are used directly
SERIES_RADIUS = bessel.SERIES_SWITCH ** 2

#: The rotation ``A = [[0,-1],[1,0]]``
ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


class KernelSamples:
    """
    A kernel sampled as ``regular + logcoef * log|t - tau|``. Arrays have the pair-geometry shape,
    prefixed by ``(2,)`` for vectors or ``(2, 2)`` for matrices.
    """

    def __init__(self, regular, logcoef):
        self.regular = np.asarray(regular, dtype=complex)
        self.logcoef = np.broadcast_to(np.asarray(logcoef, dtype=complex), self.regular.shape)

    def __add__(self, other):
        return KernelSamples(self.regular + other.regular, self.logcoef + other.logcoef)

    def __sub__(self, other):
        return KernelSamples(self.regular - other.regular, self.logcoef - other.logcoef)

    def __mul__(self, factor):
        return KernelSamples(self.regular * factor, self.logcoef * factor)

    __rmul__ = __mul__

    def outer(self, u, v):
        """
        Scalar samples times the dyad ``u v^T``.
        """
        uv = np.einsum("i...,j...->ij...", u, v)
        return KernelSamples(self.regular * uv, self.logcoef * uv)

    def times_identity(self):
        eye = np.eye(2).reshape((2, 2) + (1,) * self.regular.ndim)
        return KernelSamples(self.regular * eye, self.logcoef * eye)

    def conjugated(self, A):
        """
        Matrix samples ``A K A``.
        """
        return KernelSamples(
            np.einsum("ij,jk...,kl->il...", A, self.regular, A),
            np.einsum("ij,jk...,kl->il...", A, self.logcoef, A),
        )

    def evaluate(self, t, tau):
        """
        The kernel value itself, off the diagonal.
        """
        with np.errstate(divide="ignore"):
            log = np.log(np.abs(t - tau))
        return self.regular + np.where(self.logcoef == 0, 0, self.logcoef * log)


def _horner(coeffs, z):
    out = np.zeros_like(z) + coeffs[-1]
    for c in coeffs[-2::-1]:
        out = out * z + c
    return out


class KernelSplit:
    """
    Base class of the scalar splits. Subclasses provide ``F1``, ``F2``, their derivatives ``dF1``,
    ``dF2``, the quotients ``quotient(z) = (F1(z) - F1(0)) / z`` and
    ``dquotient(z) = (F1'(z) - F1'(0)) / z``, and :attr:`F1_at_zero`.
    """

    F1_at_zero = None
    params = None

    def green(self, z):
        """
        ``F1(z) log z + F2(z)`` with the principal logarithm.
        """
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0):
            raise SingularityError("The fundamental solution is singular at d = 0")
        return self.F1(z) * np.log(z) + self.F2(z)

    def phi(self, geom):
        """
        Samples of the scalar kernel on a pair geometry.
        """
        f1 = self.F1(geom.d2)
        return KernelSamples(f1 * geom.log_regular + self.F2(geom.d2), geom.log_factor * f1)

    def dphi(self, geom):
        """
        Samples of ``dG/dz = F1' log z + F1 / z + F2'``. Singular like ``1/z`` on the diagonal, so only
        meaningful for cross pairs or multiplied by ``z``.
        """
        z = geom.d2
        d1 = self.dF1(z)
        return KernelSamples(d1 * geom.log_regular + self.F1(z) / z + self.dF2(z), geom.log_factor * d1)

    def sample(self, geom):
        return self.phi(geom)


class HelmholtzParams:
    """
    Helmholtz equation ``-Δu - kappa^2 u = 0`` with wavenumber ``kappa > 0``.
    """

    kind = "helmholtz"
    components = 1

    def __init__(self, kappa):
        kappa = float(kappa)
        if not kappa > 0:
            raise InvalidArgument("The wavenumber must be positive, got %r" % kappa)
        self.kappa = kappa

    def split(self):
        return helmholtz_split(self)

    def toDict(self):
        return {"kind": self.kind, "kappa": self.kappa}

    def __repr__(self):
        return "HelmholtzParams(kappa=%g)" % self.kappa


class LaplaceParams:
    """
    The Laplace limit ``G = -(1/4 pi) log d^2``. Only used to check the assembly against closed forms;
    there is no Laplace solver path.
    """

    kind = "laplace"
    components = 1

    def split(self):
        return LaplaceSplit()

    def toDict(self):
        return {"kind": self.kind}

    def __repr__(self):
        return "LaplaceParams()"


class ElasticParams:
    """
    Time-harmonic Navier equation with Lamé parameters ``alpha`` (λ) and ``beta`` (μ), frequency
    ``omega`` and unit density. The pressure and shear wavenumbers are
    ``k_p^2 = omega^2 / (alpha + 2 beta)`` and ``k_s^2 = omega^2 / beta``.
    """

    kind = "elastic"
    components = 2

    def __init__(self, alpha, beta, omega):
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.omega = float(omega)
        if not (self.alpha > 0 and self.alpha + self.beta > 0):
            raise InvalidArgument("Lamé parameters need alpha > 0 and alpha + beta > 0")
        if not (self.beta > 0 and self.omega > 0):
            raise InvalidArgument("Real wavenumbers need beta > 0 and omega > 0")
        self.kp2 = self.omega ** 2 / (self.alpha + 2 * self.beta)
        self.ks2 = self.omega ** 2 / self.beta
        self.kp = np.sqrt(self.kp2)
        self.ks = np.sqrt(self.ks2)

    def split(self):
        return elastic_split(self)

    def toDict(self):
        return {"kind": self.kind, "alpha": self.alpha, "beta": self.beta, "omega": self.omega}

    def __repr__(self):
        return "ElasticParams(alpha=%g, beta=%g, omega=%g)" % (self.alpha, self.beta, self.omega)


def params_from_dict(d):
    """
    Builds Helmholtz or elastic parameters from their config block.
    """
    kind = d.get("kind")
    try:
        if kind == "helmholtz":
            return HelmholtzParams(d["kappa"])
        if kind == "elastic":
            return ElasticParams(d["alpha"], d["beta"], d["omega"])
    except KeyError as e:
        raise InvalidArgument("Missing pde parameter %s" % e)
    raise InvalidArgument("Unknown pde kind %r, expected helmholtz or elastic" % (kind,))


class LaplaceSplit(KernelSplit):
    """
    ``F1 = -1/(4 pi)``, ``F2 = 0``.
    """

    F1_at_zero = -1 / (4 * np.pi)
    params = LaplaceParams()

    def F1(self, z):
        return np.full(np.shape(z), self.F1_at_zero, dtype=complex)

    def F2(self, z):
        return np.zeros(np.shape(z), dtype=complex)

    dF1 = dF2 = quotient = dquotient = F2


class HelmholtzSplit(KernelSplit):
    """
    The split of ``(i/4) H0(kappa d)``:

    * ``F1(z) = -(1/4 pi) J0(kappa sqrt z)``,
    * ``F2(z) = (i/4 - (log(kappa/2) + gamma)/(2 pi)) J0(kappa sqrt z)
      + (1/2 pi) sum_k H_k (-kappa^2 z/4)^k / (k!)^2``,

    both as power series in ``z`` for ``|kappa^2 z| <= SERIES_RADIUS`` and through the Bessel
    functions beyond.
    """

    def __init__(self, params):
        self.params = params
        self.kappa = kappa = params.kappa
        k = np.arange(SERIES_ORDER)
        j0 = np.ones(SERIES_ORDER)
        for n in range(1, SERIES_ORDER):
            j0[n] = j0[n - 1] * (-kappa * kappa / 4) / (n * n)
        self._a = -j0 / (4 * np.pi)
        const = 0.25j - (np.log(kappa / 2) + bessel.EULER_GAMMA) / (2 * np.pi)
        self._b = const * j0 + bessel.HARMONIC[:SERIES_ORDER] * j0 / (2 * np.pi)
        self._da = (k * self._a)[1:]
        self._db = (k * self._b)[1:]
        self.F1_at_zero = self._a[0]
        self.dF1_at_zero = self._da[0]

    def _split(self, z):
        z = np.asarray(z, dtype=complex)
        small = np.abs(self.kappa ** 2 * z) <= SERIES_RADIUS
        return z, small

    def _direct(self, z):
        d = np.sqrt(z)
        kd = self.kappa * d
        j0 = bessel.besselj0(kd)
        j1 = bessel.besselj1(kd)
        h0 = bessel.hankel1(0, kd)
        h1 = bessel.hankel1(1, kd)
        return d, j0, j1, h0, h1

    def _eval(self, z, series, large):
        z, small = self._split(z)
        out = np.empty(z.shape, dtype=complex)
        if small.any():
            out[small] = _horner(series, z[small])
        if (~small).any():
            out[~small] = large(z[~small])
        return out

    def F1(self, z):
        return self._eval(z, self._a, lambda z: -bessel.besselj0(self.kappa * np.sqrt(z)) / (4 * np.pi))

    def F2(self, z):
        def large(z):
            d, j0, j1, h0, h1 = self._direct(z)
            return 0.25j * h0 + j0 * np.log(z) / (4 * np.pi)

        return self._eval(z, self._b, large)

    def dF1(self, z):
        def large(z):
            d, j0, j1, h0, h1 = self._direct(z)
            return self.kappa * j1 / (8 * np.pi * d)

        return self._eval(z, self._da, large)

    def dF2(self, z):
        def large(z):
            d, j0, j1, h0, h1 = self._direct(z)
            dG = -1j * self.kappa * h1 / (8 * d)
            f1 = -j0 / (4 * np.pi)
            df1 = self.kappa * j1 / (8 * np.pi * d)
            return dG - df1 * np.log(z) - f1 / z

        return self._eval(z, self._db, large)

    def quotient(self, z):
        return self._eval(z, self._a[1:], lambda z: (self.F1(z) - self.F1_at_zero) / z)

    def dquotient(self, z):
        return self._eval(z, self._da[1:], lambda z: (self.dF1(z) - self.dF1_at_zero) / z)

    def __repr__(self):
        return "HelmholtzSplit(kappa=%g)" % self.kappa


class ElasticSplit:
    """
    The split ``G = (log d^2) J + R`` of the elastic fundamental solution with
    ``J = J1 I + J2 D`` and ``R = R1 I + R2 D``, built from the Helmholtz splits at the pressure and
    shear wavenumbers. ``J2(0) = 0``, so ``F1_at_zero = J1(0) I``.
    """

    def __init__(self, params):
        self.params = params
        self.pressure = HelmholtzSplit(HelmholtzParams(params.kp))
        self.shear = HelmholtzSplit(HelmholtzParams(params.ks))
        self.mu = params.beta
        self.w2 = params.omega ** 2
        self.F1_at_zero = self.J1(0.0) * np.eye(2)

    def J1(self, z):
        s, p = self.shear, self.pressure
        return s.F1(z) / self.mu + 2 / self.w2 * (s.dF1(z) - p.dF1(z))

    def J2(self, z):
        s, p = self.shear, self.pressure
        prm = self.params
        return (prm.kp2 * p.F1(z) - prm.ks2 * s.F1(z) - 4 * (s.dF1(z) - p.dF1(z))) / self.w2

    def R1(self, z):
        s, p = self.shear, self.pressure
        return s.F2(z) / self.mu + 2 / self.w2 * (s.quotient(z) - p.quotient(z) + s.dF2(z) - p.dF2(z))

    def R2(self, z):
        s, p = self.shear, self.pressure
        prm = self.params
        inner = s.quotient(z) - p.quotient(z) + s.dF2(z) - p.dF2(z)
        return (prm.kp2 * p.F2(z) - prm.ks2 * s.F2(z) - 4 * inner) / self.w2

    def J1_quotient(self, z):
        """
        ``(J1(z) - J1(0)) / z``.
        """
        s, p = self.shear, self.pressure
        return s.quotient(z) / self.mu + 2 / self.w2 * (s.dquotient(z) - p.dquotient(z))

    def J2_quotient(self, z):
        """
        ``J2(z) / z``.
        """
        s, p = self.shear, self.pressure
        prm = self.params
        return (
            prm.kp2 * p.quotient(z) - prm.ks2 * s.quotient(z) - 4 * (s.dquotient(z) - p.dquotient(z))
        ) / self.w2

    def F1(self, z, D):
        return _scalarMatrix(self.J1(z), self.J2(z), D)

    def F2(self, z, D):
        return _scalarMatrix(self.R1(z), self.R2(z), D)

    def green(self, z, D):
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0):
            raise SingularityError("The fundamental solution is singular at d = 0")
        return self.F1(z, D) * np.log(z) + self.F2(z, D)

    def sample(self, geom):
        """
        Matrix kernel samples on a pair geometry.
        """
        z, L, D = geom.d2, geom.log_regular, geom.dmatrix
        j1, j2 = self.J1(z), self.J2(z)
        regular = _scalarMatrix(j1 * L + self.R1(z), j2 * L + self.R2(z), D)
        return KernelSamples(regular, geom.log_factor * _scalarMatrix(j1, j2, D))

    def __repr__(self):
        return "ElasticSplit(%r)" % self.params


def _scalarMatrix(s1, s2, D):
    eye = np.eye(2).reshape((2, 2) + (1,) * np.ndim(s1))
    return s1 * eye + s2 * D


def helmholtz_split(params):
    return HelmholtzSplit(params)


def elastic_split(params):
    return ElasticSplit(params)


def _points(x, y):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    diff = x - y
    z = diff[0] * diff[0] + diff[1] * diff[1]
    if np.any(z == 0):
        raise SingularityError("The fundamental solution is singular at x = y")
    return diff, z


def helmholtz_green(params, x, y):
    """
    ``(i/4) H0(kappa |x - y|)`` for points of shape ``(2,)`` or ``(2, P)``.
    """
    diff, z = _points(x, y)
    return 0.25j * bessel.hankel1(0, params.kappa * np.sqrt(z))


def helmholtz_green_gradient(params, x, y):
    """
    ``grad_x`` of :func:`helmholtz_green`.
    """
    diff, z = _points(x, y)
    d = np.sqrt(z)
    return -0.25j * params.kappa * bessel.hankel1(1, params.kappa * d) * diff / d


def _radialDerivatives(k, z):
    # Phi = (i/4) H0(k sqrt z) and its first three z-derivatives, from 4 z f'' + 4 f' + k^2 f = 0
    d = np.sqrt(z)
    f = 0.25j * bessel.hankel1(0, k * d)
    f1 = -0.125j * k * bessel.hankel1(1, k * d) / d
    f2 = -(k * k * f + 4 * f1) / (4 * z)
    f3 = -(8 * f2 + k * k * f1) / (4 * z)
    return f, f1, f2, f3


def elastic_green(params, x, y):
    """
    ``G = G1(d) I + G2(d) D(x - y)`` with

    * ``G1 = Phi_s / mu + 2 (Phi_s' - Phi_p') / omega^2``,
    * ``G2 = (k_p^2 Phi_p - k_s^2 Phi_s - 4 (Phi_s' - Phi_p')) / omega^2``,

    where ``Phi_k = (i/4) H0(k d)`` and ``'`` is the derivative in ``z = d^2``. Returns shape
    ``(2, 2)`` or ``(2, 2, P)``.
    """
    diff, z = _points(x, y)
    ps, ps1, _, _ = _radialDerivatives(params.ks, z)
    pp, pp1, _, _ = _radialDerivatives(params.kp, z)
    w2 = params.omega ** 2
    g1 = ps / params.beta + 2 * (ps1 - pp1) / w2
    g2 = (params.kp2 * pp - params.ks2 * ps - 4 * (ps1 - pp1)) / w2
    D = np.einsum("i...,j...->ij...", diff, diff) / z
    return _scalarMatrix(g1, g2, D)


def elastic_double_layer_kernel(params, x, y, normal):
    """
    The traction of the elastic fundamental solution taken at ``y`` with the (unnormalized) normal
    ``normal``: ``K[i, k] = (T_y G(x, y)[i, :])_k``, so that the double layer of a density ``phi`` is
    ``sum_k K[i, k] phi_k``.
    """
    diff, z = _points(x, y)
    normal = np.asarray(normal, dtype=complex)
    mu, lam, w2 = params.beta, params.alpha, params.omega ** 2
    s, s1, s2, s3 = _radialDerivatives(params.ks, z)
    p, p1, p2, p3 = _radialDerivatives(params.kp, z)
    # d_j G_ik = a1 r_j delta_ik + a2 r_i r_j r_k + a3 (delta_ij r_k + delta_jk r_i)
    a1 = 2 * s1 / mu + 4 * (s2 - p2) / w2
    a2 = 8 * (s3 - p3) / w2
    a3 = 4 * (s2 - p2) / w2
    rn = diff[0] * normal[0] + diff[1] * normal[1]
    eye = np.eye(2).reshape((2, 2) + (1,) * np.ndim(z))
    rnT = np.einsum("i...,j...->ij...", diff, normal)
    nrT = np.einsum("i...,j...->ij...", normal, diff)
    rrT = np.einsum("i...,j...->ij...", diff, diff)
    return -(
        (lam * (a1 + a2 * z + 3 * a3) + 2 * mu * a3) * rnT
        + mu * (a1 + a3) * (rn * eye + nrT)
        + 2 * mu * a2 * rn * rrT
    )


def traction(params, grad_u, normal):
    """
    ``lambda (div u) n + mu (grad u + grad u^T) n`` for a displacement gradient
    ``grad_u[i, j] = d_j u_i`` of shape ``(2, 2, ...)``.
    """
    normal = np.asarray(normal)
    div = grad_u[0, 0] + grad_u[1, 1]
    sym = grad_u + np.swapaxes(grad_u, 0, 1)
    return params.alpha * div * normal + params.beta * np.einsum("ij...,j...->i...", sym, normal)


def d_matrix(r, p, t, tau):
    """
    ``(r(t) - p(tau))(r(t) - p(tau))^T / d^2``, continued on the self diagonal by
    ``r' r'^T / (r' . r')``. Shape ``(2, 2) + shape(t)``.
    """
    return PairGeometry(r, p, t, tau).dmatrix


def kernel_self_split(r, split, t, tau):
    """
    The smooth part ``G_R = log(Q) F1(d^2) + F2(d^2)`` and the Taylor factor
    ``f_S2 = (F1(d^2) - F1(0)) / (t - tau)^2`` of the self-interaction kernel, so that
    ``G = G_R + 2 log|t-tau| F1(0) + 2 (t-tau)^2 log|t-tau| f_S2``.

    Raises:
        :class:`~arcwave.errors.BranchCutError`: ``Re Q <= 0``.
    """
    return self_split_samples(split, PairGeometry(r, r, t, tau, same=True))


def self_split_samples(split, geom):
    """
    :func:`kernel_self_split` on an existing self-pair geometry.
    """
    z, L = geom.d2, geom.log_regular
    if isinstance(split, ElasticSplit):
        D = geom.dmatrix
        regular = _scalarMatrix(split.J1(z) * L + split.R1(z), split.J2(z) * L + split.R2(z), D)
        taylor = _scalarMatrix(split.J1_quotient(z) * geom.Q, split.J2_quotient(z) * geom.Q, D)
        return regular, taylor
    return split.F1(z) * L + split.F2(z), split.quotient(z) * geom.Q


def maue_tilde_helmholtz(params, r_i, r_j, t, tau):
    """
    ``G~ = -kappa^2 (r_i'(t) . r_j'(tau)) G(r_i(t), r_j(tau))``, the weakly singular part of the
    hypersingular operator. Off-diagonal values only for self pairs.
    """
    geom = PairGeometry(r_i, r_j, t, tau)
    return maue_helmholtz_samples(params.split(), geom).evaluate(geom.t, geom.tau)


def maue_helmholtz_samples(split, geom):
    if split.params.kind == "laplace":
        return KernelSamples(np.zeros(geom.shape), 0)
    ab = geom.a[0] * geom.b[0] + geom.a[1] * geom.b[1]
    return split.phi(geom) * (-split.params.kappa ** 2 * ab)


def elastic_maue_samples(split, geom):
    """
    Samples of the four kernels of the elastic hypersingular weak form
    ``<W phi, theta> = int int theta^T G1 phi + theta'^T G2 phi' + theta^T G3 phi' + theta'^T G4 phi``,
    with ``a = r_i'(t)``, ``b = r_j'(tau)``, ``n_a = (a_2, -a_1)``, ``n_b`` likewise and
    ``g = grad_x (Phi_s - Phi_p)``:

    * ``G1 = -[omega^2 Phi_p n_a n_b^T + omega^2 Phi_s a b^T + 2 mu k_p^2 Phi_p (b a^T - a b^T)]``
    * ``G2 = 4 mu^2 A G A + 4 mu Phi_s I``
    * ``G3 = 4 mu (a . g) I - 2 mu a g^T``
    * ``G4 = 2 mu g b^T``
    """
    prm = split.params
    mu, w2 = prm.beta, prm.omega ** 2
    s, p = split.shear, split.pressure
    phi_s = s.phi(geom)
    phi_p = p.phi(geom)
    z = geom.d2
    dd = s.dF1(z) - p.dF1(z)
    dpsi = KernelSamples(
        dd * geom.log_regular + s.quotient(z) - p.quotient(z) + s.dF2(z) - p.dF2(z),
        geom.log_factor * dd,
    )
    g = KernelSamples(2 * geom.diff * dpsi.regular, 2 * geom.diff * dpsi.logcoef)
    a, b = geom.a, geom.b
    G1 = (
        phi_p.outer(geom.normal_a, geom.normal_b) * w2
        + phi_s.outer(a, b) * w2
        + (phi_p.outer(b, a) - phi_p.outer(a, b)) * (2 * mu * prm.kp2)
    ) * -1
    G2 = split.sample(geom).conjugated(ROTATION) * (4 * mu * mu) + phi_s.times_identity() * (4 * mu)
    ag = KernelSamples(a[0] * g.regular[0] + a[1] * g.regular[1], a[0] * g.logcoef[0] + a[1] * g.logcoef[1])
    G3 = ag.times_identity() * (4 * mu) - _vectorOuter(a, g, left=True) * (2 * mu)
    G4 = _vectorOuter(b, g, left=False) * (2 * mu)
    return G1, G2, G3, G4


def _vectorOuter(u, g, left):
    # u g^T when left, g u^T otherwise, for vector samples g
    spec = "i...,j...->ij..."
    if left:
        return KernelSamples(np.einsum(spec, u, g.regular), np.einsum(spec, u, g.logcoef))
    return KernelSamples(np.einsum(spec, g.regular, u), np.einsum(spec, g.logcoef, u))


def maue_kernels_elastic(params, r_i, r_j, t, tau):
    """
    Point values of the four elastic weak-form kernels (see :func:`elastic_maue_samples`) off the
    diagonal. Each has shape ``(2, 2) + shape(t)``.
    """
    geom = PairGeometry(r_i, r_j, t, tau)
    return tuple(k.evaluate(geom.t, geom.tau) for k in elastic_maue_samples(params.split(), geom))
