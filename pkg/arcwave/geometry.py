"""
Arc parametrizations, affine-parametric arc families and the explicit admissibility radii.

An :class:`Arc` stores the classical Chebyshev coefficients of its two coordinate functions, which
may be complex: a complexified arc is just an arc with complex coefficients, and every function in
the package accepts one. Distances use the bilinear dot product (no conjugation), so they stay
holomorphic in the arc::

    r = Arc.line((-1, 0), (1, 0))
    squared_distance(r, r, 0.2, -0.1)  # 0.09
"""
import logging

import numpy as np
from numpy.polynomial import chebyshev

from .errors import BranchCutError, DegenerateGeometry, InvalidArgument
from .quadrature import gauss_legendre
from .spectral import chebyshev_nodes, dct_coefficients

_log = logging.getLogger("arcwave.geometry")

#: Grid resolution in t used by inf/sup estimates
DEFAULT_GRID = 512

#: Safety factor applied to the explicit radii when a family is checked
SAFETY = 0.9

#: Below this |t - tau| the chord ratio is taken from the averaged tangent
DIAGONAL_BAND = 0.05


def _checkT(t):
    t = np.asarray(t)
    if np.iscomplexobj(t) or np.any(np.abs(t) > 1):
        raise InvalidArgument("Arc parameters must lie in [-1,1]")
    return t.astype(float)


class Arc:
    """
    One open arc ``r(t) = (x(t), y(t))``, ``t`` in [-1,1], given by classical Chebyshev coefficients.

    Args:
        x_coeffs, y_coeffs: coefficient sequences (real or complex) of ``x(t) = sum a_n T_n(t)``.
        m (int, optional): smoothness index of the arc's Hölder class, at least 1.
        alpha (float, optional): Hölder exponent in [0,1].
    """

    def __init__(self, x_coeffs, y_coeffs, m=4, alpha=0.0):
        x = np.array(x_coeffs, dtype=complex, ndmin=1)
        y = np.array(y_coeffs, dtype=complex, ndmin=1)
        if x.ndim != 1 or y.ndim != 1 or x.size == 0 or y.size == 0:
            raise InvalidArgument("Arc coefficients must be non-empty sequences")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidArgument("Arc coefficients contain NaN or Inf")
        if int(m) < 1 or not 0 <= alpha <= 1:
            raise InvalidArgument("Arc smoothness needs m >= 1 and alpha in [0,1]")
        n = max(x.size, y.size)
        self.coeffs = np.zeros((2, n), dtype=complex)
        self.coeffs[0, : x.size] = x
        self.coeffs[1, : y.size] = y
        self.m = int(m)
        self.alpha = float(alpha)

    @property
    def x_coeffs(self):
        return self.coeffs[0]

    @property
    def y_coeffs(self):
        return self.coeffs[1]

    @property
    def degree(self):
        return self.coeffs.shape[1] - 1

    @property
    def is_real(self):
        return not np.any(self.coeffs.imag)

    @staticmethod
    def line(a, b, **kwargs):
        """
        The straight arc from ``a`` (t=-1) to ``b`` (t=1).
        """
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        mid, half = (a + b) / 2, (b - a) / 2
        return Arc([mid[0], half[0]], [mid[1], half[1]], **kwargs)

    @staticmethod
    def from_function(f, degree=32, **kwargs):
        """
        Interpolates a vectorized ``f(t) -> (x, y)`` at first-kind Chebyshev nodes. Trailing
        coefficients below 1e-15 of the largest one are dropped::

            arc = Arc.from_function(lambda t: (np.cos(np.pi * t / 4), np.sin(np.pi * t / 4)))
        """
        t = chebyshev_nodes(degree + 1)
        values = np.asarray(f(t), dtype=complex)
        coeffs = dct_coefficients(values)
        big = np.abs(coeffs).max()
        keep = np.nonzero(np.abs(coeffs).max(axis=0) > 1e-15 * big)[0]
        n = keep[-1] + 1 if keep.size else 1
        return Arc(coeffs[0, :n], coeffs[1, :n], **kwargs)

    def __call__(self, t):
        return eval_arc(self, t)

    def derivative(self, order=1):
        """
        The arc whose coordinates are the ``order``-th derivatives of this one's.
        """
        if order == 0:
            return self
        c = chebyshev.chebder(self.coeffs, m=order, axis=1) if self.degree >= order else np.zeros((2, 1))
        return Arc(c[0], c[1], self.m, self.alpha)

    def __add__(self, other):
        n = max(self.coeffs.shape[1], other.coeffs.shape[1])
        out = np.zeros((2, n), dtype=complex)
        out[:, : self.coeffs.shape[1]] += self.coeffs
        out[:, : other.coeffs.shape[1]] += other.coeffs
        return Arc(out[0], out[1], self.m, self.alpha)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, scalar):
        c = self.coeffs * scalar
        return Arc(c[0], c[1], self.m, self.alpha)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Arc):
            return NotImplemented
        n = max(self.coeffs.shape[1], other.coeffs.shape[1])
        a = np.zeros((2, n), dtype=complex)
        b = np.zeros((2, n), dtype=complex)
        a[:, : self.coeffs.shape[1]] = self.coeffs
        b[:, : other.coeffs.shape[1]] = other.coeffs
        return bool(np.all(a == b)) and (self.m, self.alpha) == (other.m, other.alpha)

    __hash__ = None

    def toDict(self):
        return {
            "x_coeffs": [[c.real, c.imag] for c in self.coeffs[0]],
            "y_coeffs": [[c.real, c.imag] for c in self.coeffs[1]],
            "m": self.m,
            "alpha": self.alpha,
        }

    @staticmethod
    def fromDict(d):
        try:
            x = np.array(d["x_coeffs"], dtype=float)
            y = np.array(d["y_coeffs"], dtype=float)
            return Arc(
                x[:, 0] + 1j * x[:, 1],
                y[:, 0] + 1j * y[:, 1],
                d.get("m", 4),
                d.get("alpha", 0.0),
            )
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise InvalidArgument("Malformed arc description: %s" % e)

    def __repr__(self):
        return "Arc(degree=%d, real=%s, m=%d, alpha=%g)" % (
            self.degree,
            self.is_real,
            self.m,
            self.alpha,
        )


def eval_arc(arc, t):
    """
    ``r(t)`` as an array of shape ``(2,) + shape(t)``.
    """
    t = _checkT(t)
    return chebyshev.chebval(t, arc.coeffs.T)


def eval_tangent(arc, t):
    """
    ``r'(t)`` as an array of shape ``(2,) + shape(t)``.
    """
    t = _checkT(t)
    if arc.degree == 0:
        return np.zeros((2,) + t.shape, dtype=complex)
    return chebyshev.chebval(t, chebyshev.chebder(arc.coeffs, axis=1).T)


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def squared_distance(r, p, t, tau):
    """
    ``(r(t) - p(tau)) . (r(t) - p(tau))`` in the bilinear sense.
    """
    diff = eval_arc(r, t) - eval_arc(p, tau)
    return _dot(diff, diff)


def divided_difference(arc, t, tau):
    """
    ``(r(t) - r(tau)) / (t - tau)``, continued by ``r'(t)`` on the diagonal. Close to the diagonal
    the averaged tangent ``int_0^1 r'(tau + s (t - tau)) ds`` is used, by a Gauss-Legendre rule that
    is exact for the polynomial coordinates.
    """
    t, tau = np.broadcast_arrays(_checkT(t), _checkT(tau))
    h = t - tau
    out = np.empty((2,) + t.shape, dtype=complex)
    near = np.abs(h) < DIAGONAL_BAND
    far = ~near
    if far.any():
        out[:, far] = (eval_arc(arc, t[far]) - eval_arc(arc, tau[far])) / h[far]
    if near.any():
        s, w = gauss_legendre(max(8, arc.degree // 2 + 2), 0.0, 1.0)
        pts = tau[near][None, :] + s[:, None] * h[near][None, :]
        tangents = eval_tangent(arc, pts)
        out[:, near] = np.tensordot(tangents, w, axes=([1], [0]))
    return out


def q_function(r, t, tau):
    """
    The regularized chord ratio ``Q(t,tau) = d^2(t,tau) / (t-tau)^2`` with ``Q(t,t) = r'(t).r'(t)``.
    """
    delta = divided_difference(r, t, tau)
    return _dot(delta, delta)


class PairGeometry:
    """
    Everything the kernels need about an arc pair on a set of parameter points ``(t, tau)``.

    For a self pair the squared distance is carried as ``(t-tau)^2 Q`` and
    ``log d^2 = log Q + 2 log|t-tau|``; :attr:`log_regular` holds the smooth part (``log Q``) and
    :attr:`log_factor` the multiple of ``log|t-tau|`` (2). For a cross pair ``log_regular = log d^2``
    and ``log_factor = 0``.

    Raises:
        :class:`DegenerateGeometry`: real arcs touching, or a vanishing chord ratio.
        :class:`BranchCutError`: complexified arcs with ``Re Q <= 0`` or ``Re d^2 <= 0``.
    """

    def __init__(self, r, p, t, tau, same=None):
        t, tau = np.broadcast_arrays(_checkT(t), _checkT(tau))
        self.same = (r is p) if same is None else same
        self.t = t
        self.tau = tau
        self.a = eval_tangent(r, t)
        self.b = eval_tangent(p, tau)
        real = r.is_real and p.is_real
        if self.same:
            self.delta = divided_difference(r, t, tau)
            self.Q = _dot(self.delta, self.delta)
            if real and np.any(self.Q.real <= 0):
                raise DegenerateGeometry("Arc has a vanishing tangent or self-intersection")
            if np.any(self.Q.real <= 0):
                raise BranchCutError("Re Q <= 0: the complexified arc left the admissible tube")
            self.diff = (t - tau) * self.delta
            self.d2 = (t - tau) ** 2 * self.Q
            self.log_regular = np.log(self.Q)
            self.log_factor = 2.0
            dyad = np.einsum("i...,j...->ij...", self.delta, self.delta)
            self.dmatrix = dyad / self.Q
        else:
            self.diff = eval_arc(r, t) - eval_arc(p, tau)
            self.d2 = _dot(self.diff, self.diff)
            if real and np.any(self.d2.real < 1e-24):
                raise DegenerateGeometry("Arcs touch (distance below 1e-12)")
            if np.any(self.d2.real <= 0):
                raise BranchCutError("Re d^2 <= 0: the complexified arcs left the admissible tube")
            self.log_regular = np.log(self.d2)
            self.log_factor = 0.0
            self.dmatrix = np.einsum("i...,j...->ij...", self.diff, self.diff) / self.d2
        self.normal_a = np.stack([self.a[1], -self.a[0]])
        self.normal_b = np.stack([self.b[1], -self.b[0]])

    @property
    def shape(self):
        return self.t.shape

    @staticmethod
    def on_grid(r, p, t, tau=None, same=None):
        """
        Pair geometry on the tensor grid ``t x tau`` (rows follow ``t``).
        """
        tau = t if tau is None else tau
        T, TAU = np.meshgrid(t, tau, indexing="ij")
        return PairGeometry(r, p, T, TAU, same)


def unit_normal(arc, t):
    """
    ``n = (r'_2, -r'_1) / |r'|`` for a real arc.
    """
    a = eval_tangent(arc, t)
    return np.stack([a[1], -a[0]]) / np.sqrt(_dot(a, a))


def _grid(n):
    return np.linspace(-1.0, 1.0, n)


def _norms(v):
    return np.sqrt(np.abs(v[0]) ** 2 + np.abs(v[1]) ** 2)


def tangent_bounds(arcs, grid=DEFAULT_GRID):
    """
    Grid inf and sup of ``|r'(t)|`` over a set of arcs.
    """
    t = _grid(grid)
    norms = np.concatenate([_norms(eval_tangent(a, t)) for a in arcs])
    return norms.min(), norms.max()


def sup_norm(arc, grid=DEFAULT_GRID):
    return _norms(eval_arc(arc, _grid(grid))).max()


def min_separation(r, p, grid=DEFAULT_GRID):
    """
    Grid minimum of ``|r(t) - p(tau)|`` over all parameter pairs.
    """
    t = _grid(grid)
    x = eval_arc(r, t)
    y = eval_arc(p, t)
    d2 = np.abs(x[0][:, None] - y[0][None, :]) ** 2 + np.abs(x[1][:, None] - y[1][None, :]) ** 2
    return float(np.sqrt(d2.min()))


def check_arc(arc, grid=DEFAULT_GRID):
    """
    Grid checks on a real arc: the tangent does not vanish and the chord ratio stays positive
    (injectivity on the grid).

    Raises:
        :class:`DegenerateGeometry`: if either check fails.
    """
    if not arc.is_real:
        return
    lo, hi = tangent_bounds([arc], grid)
    if lo <= 1e-12 * max(hi, 1.0):
        raise DegenerateGeometry("Arc tangent vanishes on the grid (min |r'| = %g)" % lo)
    t = _grid(min(grid, 256))
    Q = q_function(arc, *np.meshgrid(t, t, indexing="ij"))
    if Q.real.min() <= 1e-12 * hi * hi:
        raise DegenerateGeometry("Arc is not injective on the grid")


def _radius(inf, sup):
    return np.sqrt(inf * inf + sup * sup) - sup


def delta_self(K_samples, grid=DEFAULT_GRID):
    """
    The explicit self-interaction radius ``sqrt(I^2 + S^2) - S`` with ``I``, ``S`` the grid inf and
    sup of ``|r'|`` over the sample set::

        delta_self([Arc.line((-1, 0), (1, 0))])  # sqrt(2) - 1
    """
    arcs = list(K_samples)
    if not arcs:
        raise InvalidArgument("delta_self needs at least one arc")
    inf, sup = tangent_bounds(arcs, grid)
    if inf <= 1e-12 * max(sup, 1.0):
        raise DegenerateGeometry("Vanishing tangent in the sample set")
    return float(_radius(inf, sup))


def delta_cross(K1_samples, K2_samples, grid=DEFAULT_GRID):
    """
    The explicit cross-interaction radii ``delta_1 = delta_2 = (sqrt(I^2 + S^2) - S) / 2`` with ``I``
    the grid inf of the distance between the two sets and ``S`` the sum of their sup norms.
    """
    K1, K2 = list(K1_samples), list(K2_samples)
    if not K1 or not K2:
        raise InvalidArgument("delta_cross needs two non-empty sample sets")
    inf = np.inf
    for i, r in enumerate(K1):
        for j, p in enumerate(K2):
            d = min_separation(r, p, grid)
            if d < 1e-12:
                raise DegenerateGeometry("Arcs touch", pair=(i, j))
            inf = min(inf, d)
    sup = max(sup_norm(r, grid) for r in K1) + max(sup_norm(p, grid) for p in K2)
    delta = float(_radius(inf, sup) / 2)
    return delta, delta


def c_norm(arc, grid=DEFAULT_GRID):
    """
    Grid surrogate of the Hölder norm ``|r|_{C^{m,alpha}}``: sup norms of the derivatives up to order
    ``m`` plus a Hölder quotient of the ``m``-th derivative over a few scales. An estimate, not a bound.
    """
    t = _grid(grid)
    total = 0.0
    for k in range(arc.m + 1):
        total += _norms(eval_arc(arc.derivative(k), t)).max()
    if arc.alpha > 0:
        top = arc.derivative(arc.m)
        quotient = 0.0
        for h in (2.0 ** -8, 2.0 ** -6, 2.0 ** -4, 2.0 ** -2):
            s = t[t <= 1 - h]
            jump = _norms(eval_arc(top, s + h) - eval_arc(top, s)).max()
            quotient = max(quotient, jump / h ** arc.alpha)
        total += quotient
    return float(total)


class AdmissibilityReport:
    """
    Outcome of :func:`check_family`. The radii already include the safety factor.
    """

    def __init__(self, delta_self, delta_cross, zeta, eta, conditions):
        #: per-arc radii
        self.delta_self = list(delta_self)
        #: dict ``(i, j) -> radius`` for i < j
        self.delta_cross = dict(delta_cross)
        self.zeta = float(zeta)
        self.eta = float(eta)
        #: dict condition name -> bool
        self.conditions = dict(conditions)

    @property
    def passed(self):
        return all(self.conditions.values())

    def toDict(self):
        return {
            "delta_self": self.delta_self,
            "delta_cross": [[i, j, d] for (i, j), d in sorted(self.delta_cross.items())],
            "zeta": self.zeta,
            "eta": self.eta,
            "conditions": self.conditions,
            "pass": self.passed,
        }

    def __repr__(self):
        return "AdmissibilityReport(pass=%s, zeta=%g, eta=%g)" % (self.passed, self.zeta, self.eta)


class ParametricArcFamily:
    """
    Affine-parametric arcs ``r_{j,y} = r0_j + sum_n y_{j + n M} r^n_j`` with ``|y| <= 1``.

    Args:
        nominal: the M nominal arcs.
        perturbations: one list of perturbation arcs per nominal arc (lists may differ in length).
        p (float): summability exponent in (0,1).
        b (optional): per-arc sequences of norm estimates; computed with :func:`c_norm` if omitted.
    """

    def __init__(self, nominal, perturbations, p=0.5, b=None):
        self.nominal = list(nominal)
        if not self.nominal:
            raise InvalidArgument("A family needs at least one arc")
        self.perturbations = [list(ps) for ps in perturbations]
        if len(self.perturbations) != len(self.nominal):
            raise InvalidArgument("Need one perturbation list per nominal arc")
        if not 0 < p < 1:
            raise InvalidArgument("The summability exponent p must lie in (0,1)")
        self.p = float(p)
        if b is None:
            b = [[c_norm(r) for r in ps] for ps in self.perturbations]
        self.b = [np.asarray(bj, dtype=float) for bj in b]
        if [len(bj) for bj in self.b] != [len(ps) for ps in self.perturbations]:
            raise InvalidArgument("b must have one entry per perturbation")

    @property
    def M(self):
        return len(self.nominal)

    @property
    def n_parameters(self):
        """
        Length of the interleaved parameter vector covering every stored perturbation.
        """
        most = max((len(ps) for ps in self.perturbations), default=0)
        return most * self.M

    def parameter_index(self, arc, n):
        return arc + n * self.M

    def parameter_weights(self):
        """
        The ``b`` value belonging to each entry of the interleaved parameter vector (0 where an arc
        has fewer perturbations).
        """
        out = np.zeros(self.n_parameters)
        for j, bj in enumerate(self.b):
            for n, value in enumerate(bj):
                out[self.parameter_index(j, n)] = value
        return out

    def toDict(self):
        return {
            "arcs": [a.toDict() for a in self.nominal],
            "perturbations": [[a.toDict() for a in ps] for ps in self.perturbations],
            "p": self.p,
            "b": [list(map(float, bj)) for bj in self.b],
        }

    @staticmethod
    def fromDict(d):
        try:
            return ParametricArcFamily(
                [Arc.fromDict(a) for a in d["arcs"]],
                [[Arc.fromDict(a) for a in ps] for ps in d["perturbations"]],
                d.get("p", 0.5),
                d.get("b"),
            )
        except (KeyError, TypeError) as e:
            raise InvalidArgument("Malformed family description: %s" % e)


def materialize(family, y):
    """
    The arcs at parameter ``y``. Arc ``j`` uses the entries ``y[j], y[j+M], y[j+2M], ...``; missing
    entries count as zero and entries beyond the stored perturbations are ignored.
    """
    y = np.array(y, ndmin=1)
    if y.size and np.any(np.abs(y) > 1):
        raise InvalidArgument("Parameters must satisfy |y_n| <= 1")
    arcs = []
    for j, (r0, ps) in enumerate(zip(family.nominal, family.perturbations)):
        arc = r0
        for n, rn in enumerate(ps):
            k = family.parameter_index(j, n)
            if k < y.size and y[k] != 0:
                arc = arc + rn * y[k]
        arcs.append(arc)
    return arcs


def _perturbationBounds(family, grid):
    t = _grid(grid)
    tangent, size = [], []
    for ps in family.perturbations:
        if ps:
            tangent.append(np.sum([_norms(eval_tangent(r, t)) for r in ps], axis=0).max())
            size.append(float(np.sum([_norms(eval_arc(r, t)).max() for r in ps])))
        else:
            tangent.append(0.0)
            size.append(0.0)
    return tangent, size


def check_family(family, grid=DEFAULT_GRID):
    """
    Checks a family against the admissibility assumptions and computes radii valid for every arc it
    can produce:

    * ``zeta = max_j sup_t sum_n |(r^n_j)'(t)| / inf_t |(r0_j)'(t)|``, must be below 1;
    * ``eta = max_{i!=j} sum_n (|r^n_i|_inf + |r^n_j|_inf) / dist(r0_i, r0_j)``, must be below 1;
    * the ``b`` sequences must be finite and nonnegative;
    * the self and cross radii, evaluated on worst-case bounds of the tangent norms and distances
      over the family and multiplied by :data:`SAFETY`, must be positive.
    """
    tangent, size = _perturbationBounds(family, grid)
    t = _grid(grid)
    zeta = 0.0
    deltas = []
    for j, r0 in enumerate(family.nominal):
        norms = _norms(eval_tangent(r0, t))
        lo, hi = norms.min(), norms.max()
        zeta = max(zeta, tangent[j] / lo if lo > 0 else np.inf)
        inf, sup = lo - tangent[j], hi + tangent[j]
        deltas.append(SAFETY * float(_radius(inf, sup)) if inf > 0 else 0.0)
    eta = 0.0
    cross = {}
    for i in range(family.M):
        for j in range(i + 1, family.M):
            sep = min_separation(family.nominal[i], family.nominal[j], grid)
            worst = size[i] + size[j]
            eta = max(eta, worst / sep if sep > 0 else np.inf)
            inf = sep - worst
            sup = sup_norm(family.nominal[i], grid) + size[i] + sup_norm(family.nominal[j], grid) + size[j]
            cross[(i, j)] = SAFETY * float(_radius(inf, sup) / 2) if inf > 0 else 0.0
    conditions = {
        "summability": all(np.all(np.isfinite(bj)) and np.all(bj >= 0) for bj in family.b),
        "tangent": bool(zeta < 1),
        "separation": bool(eta < 1),
        "delta_self": all(d > 0 for d in deltas),
        "delta_cross": all(d > 0 for d in cross.values()),
    }
    report = AdmissibilityReport(deltas, cross, zeta, eta, conditions)
    _log.debug("Checked family of %d arcs: %s", family.M, report)
    return report


class TubeReport:
    """
    Minima found by :func:`verify_tube_positivity`. ``min_re_d2`` is ``inf`` when no cross pair was
    checked.
    """

    def __init__(self, min_re_Q, min_re_Qinv, min_re_d2, n_samples, delta):
        self.min_re_Q = float(min_re_Q)
        self.min_re_Qinv = float(min_re_Qinv)
        self.min_re_d2 = float(min_re_d2)
        self.n_samples = n_samples
        self.delta = delta

    @property
    def passed(self):
        return self.min_re_Q > 0 and self.min_re_Qinv > 0 and self.min_re_d2 > 0

    def toDict(self):
        return {
            "min_re_Q": self.min_re_Q,
            "min_re_Qinv": self.min_re_Qinv,
            "min_re_d2": self.min_re_d2 if np.isfinite(self.min_re_d2) else None,
            "n_samples": self.n_samples,
            "pass": self.passed,
        }

    def __repr__(self):
        return "TubeReport(pass=%s, min Re Q=%.3g, min Re 1/Q=%.3g, min Re d2=%.3g)" % (
            self.passed,
            self.min_re_Q,
            self.min_re_Qinv,
            self.min_re_d2,
        )


def random_perturbation(arc, radius, rng, grid=DEFAULT_GRID):
    """
    A complex perturbation of ``arc``'s coefficient shape: Gaussian coefficients normalized to unit
    :func:`c_norm` and scaled by ``radius * u`` with ``u`` uniform in (0,1).
    """
    shape = arc.coeffs.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    direction = Arc(c[0], c[1], arc.m, arc.alpha)
    scale = radius * rng.uniform() / c_norm(direction, grid)
    return direction * scale


def tube_samples(K_samples, delta, n_complex_samples, seed=0, grid=DEFAULT_GRID):
    """
    Yields ``n_complex_samples + 1`` perturbed copies of the arc list, the first one unperturbed.
    ``delta`` is a single radius or one radius per arc. The sequence depends only on the seed.
    """
    arcs = list(K_samples)
    radii = np.broadcast_to(np.asarray(delta, dtype=float), (len(arcs),))
    rng = np.random.default_rng(seed)
    yield arcs
    for _ in range(n_complex_samples):
        yield [a + random_perturbation(a, d, rng, grid) for a, d in zip(arcs, radii)]


def verify_tube_positivity(K_samples, delta, n_complex_samples, seed=0, grid=DEFAULT_GRID, cross=False):
    """
    Samples complex perturbations of size below ``delta`` around each arc and records the minima of
    ``Re Q`` and ``Re 1/Q`` over the ``(t, tau)`` grid and, with ``cross=True``, of ``Re d^2`` between
    distinct arcs of the list. The unperturbed arcs are always included.
    """
    t = _grid(grid)
    T, TAU = np.meshgrid(t, t, indexing="ij")
    minQ = minQinv = mind2 = np.inf
    count = 0
    for arcs in tube_samples(K_samples, delta, n_complex_samples, seed, grid):
        for arc in arcs:
            Q = q_function(arc, T, TAU)
            minQ = min(minQ, Q.real.min())
            with np.errstate(divide="ignore", invalid="ignore"):
                minQinv = min(minQinv, np.nan_to_num((1 / Q).real, nan=-np.inf).min())
        if cross:
            for i in range(len(arcs)):
                for j in range(i + 1, len(arcs)):
                    mind2 = min(mind2, squared_distance(arcs[i], arcs[j], T, TAU).real.min())
        count += 1
    report = TubeReport(minQ, minQinv, mind2, count - 1, delta)
    _log.debug("Tube positivity at delta=%s: %s", delta, report)
    return report
