"""
End-to-end scattering solves on open arcs.

The scattered field is sought as a single layer ``u = sum_j SL_j lambda_j`` (Dirichlet) or a double
layer ``u = sum_j DL_j mu_j`` (Neumann). The Dirichlet data are ``-u_inc`` on the arcs, so the total
field vanishes there; the Neumann data are ``n~ . grad u_inc`` (Helmholtz) or the traction
``T_n~ u_inc`` (elasticity), with the unnormalized normal ``n~ = (r_2', -r_1')``::

    arc = Arc.line((-1, 0), (1, 0))
    params = HelmholtzParams(1.0)
    solution = solve_scattering([arc], params, PlaneWave(params, (0, 1)), "dirichlet", N=32)
    eval_potential([arc], solution, (0.0, 2.0))
"""
import logging

import numpy as np
import scipy.optimize

from . import bessel
from .errors import DegenerateGeometry, InvalidArgument, NearSingularEvaluation
from .geometry import check_arc, delta_cross, eval_arc, eval_tangent
from .kernels import (
    elastic_double_layer_kernel,
    elastic_green,
    helmholtz_green,
    helmholtz_green_gradient,
    params_from_dict,
    traction,
)
from .operators import assemble_system, solve_system
from .quadrature import gauss_chebyshev
from .spectral import SpectralDensity, analyze, decay_rate, nodes_for

_log = logging.getLogger("arcwave.solver")

#: Potentials are refused closer than this to an arc
REFUSAL_DISTANCE = 1e-6

#: Bounds on the number of quadrature nodes used by potential evaluation
MIN_QUADRATURE = 512
MAX_QUADRATURE = 16384

#: Points per chunk in potential evaluation
CHUNK = 256

SCHEMA_VERSION = 1


def _points(x):
    x = np.asarray(x)
    if x.shape[0] != 2:
        raise InvalidArgument("Points must have shape (2,) or (2, P)")
    return x.reshape(2, -1), x.ndim == 1


def _rotate(d):
    return np.array([-d[1], d[0]])


class IncidentField:
    """
    Base class of incident fields. Subclasses implement :meth:`value` (shape ``(P,)`` for Helmholtz,
    ``(2, P)`` for elasticity) and :meth:`gradient` (``(2, P)`` or ``(2, 2, P)`` with
    ``grad[i, j] = d_j u_i``).
    """

    kind = None

    def __init__(self, params):
        self.params = params

    @property
    def components(self):
        return self.params.components

    def value(self, x):
        raise NotImplementedError()

    def gradient(self, x):
        raise NotImplementedError()


class PlaneWave(IncidentField):
    """
    ``e^{i kappa x.d}`` for Helmholtz; ``d e^{i k_p x.d}`` (``polarization="p"``) or
    ``d_perp e^{i k_s x.d}`` (``"s"``) for elasticity. ``direction`` must be a unit vector.
    """

    kind = "plane-wave"

    def __init__(self, params, direction, polarization="p"):
        super().__init__(params)
        d = np.asarray(direction, dtype=float)
        if d.shape != (2,) or abs(np.hypot(*d) - 1) > 1e-12:
            raise InvalidArgument("Plane-wave direction must be a unit 2-vector, got %s" % (direction,))
        if polarization not in ("p", "s"):
            raise InvalidArgument("Polarization must be 'p' or 's'")
        self.direction = d
        self.polarization = polarization

    def _wave(self, x):
        if self.params.kind == "elastic":
            if self.polarization == "p":
                k, amp = self.params.kp, self.direction
            else:
                k, amp = self.params.ks, _rotate(self.direction)
        else:
            k, amp = self.params.kappa, None
        return k, amp, np.exp(1j * k * (self.direction @ x))

    def value(self, x):
        x, single = _points(x)
        k, amp, e = self._wave(x)
        out = e if amp is None else amp[:, None] * e
        return out[..., 0] if single else out

    def gradient(self, x):
        x, single = _points(x)
        k, amp, e = self._wave(x)
        d = self.direction
        if amp is None:
            out = 1j * k * d[:, None] * e
        else:
            out = 1j * k * np.einsum("i,j,p->ijp", amp, d, e)
        return out[..., 0] if single else out

    def toDict(self):
        d = {"kind": self.kind, "direction": list(self.direction)}
        if self.params.kind == "elastic":
            d["polarization"] = self.polarization
        return d


class PointSource(IncidentField):
    """
    The fundamental solution ``G(x, x0)`` (Helmholtz) or ``G(x, x0) q`` (elasticity, Dirichlet only).
    """

    kind = "point-source"

    def __init__(self, params, source, polarization=(1.0, 0.0)):
        super().__init__(params)
        self.source = np.asarray(source, dtype=float)
        if self.source.shape != (2,):
            raise InvalidArgument("Point source location must be a 2-vector")
        self.polarization = np.asarray(polarization, dtype=complex)

    def value(self, x):
        x, single = _points(x)
        y = self.source[:, None]
        if self.params.kind == "elastic":
            out = np.einsum("ijp,j->ip", elastic_green(self.params, x, y), self.polarization)
        else:
            out = helmholtz_green(self.params, x, y)
        return out[..., 0] if single else out

    def gradient(self, x):
        if self.params.kind == "elastic":
            raise InvalidArgument("The elastic point source only provides Dirichlet data")
        x, single = _points(x)
        out = helmholtz_green_gradient(self.params, x, self.source[:, None])
        return out[..., 0] if single else out

    def toDict(self):
        d = {"kind": self.kind, "source": list(self.source)}
        if self.params.kind == "elastic":
            d["polarization"] = [float(v.real) for v in self.polarization]
        return d


def incident_from_dict(d, params):
    kind = d.get("kind")
    try:
        if kind == "plane-wave":
            return PlaneWave(params, d["direction"], d.get("polarization", "p"))
        if kind == "point-source":
            return PointSource(params, d["source"], d.get("polarization", (1.0, 0.0)))
    except KeyError as e:
        raise InvalidArgument("Missing incident field parameter %s" % e)
    raise InvalidArgument("Unknown incident kind %r" % (kind,))


def distance_to_arc(arc, x, samples=1025):
    """
    Distance from each point of ``x`` (shape ``(2, P)``) to a real arc: a sampled minimum, refined by
    a bounded scalar minimization near the arc.
    """
    x, single = _points(np.asarray(x, dtype=float))
    t = np.linspace(-1.0, 1.0, samples)
    r = eval_arc(arc, t).real
    d2 = (x[0][:, None] - r[0][None, :]) ** 2 + (x[1][:, None] - r[1][None, :]) ** 2
    k = d2.argmin(axis=1)
    out = np.sqrt(d2[np.arange(x.shape[1]), k])
    h = t[1] - t[0]
    for p in np.nonzero(out < 0.1)[0]:
        lo, hi = max(-1.0, t[k[p]] - h), min(1.0, t[k[p]] + h)

        def dist2(s):
            y = eval_arc(arc, s).real
            return (x[0, p] - y[0]) ** 2 + (x[1, p] - y[1]) ** 2

        res = scipy.optimize.minimize_scalar(dist2, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        out[p] = min(out[p], np.sqrt(max(res.fun, 0.0)))
    return out[0] if single else out


def _checkSources(arcs, incident):
    if isinstance(incident, PointSource):
        for j, arc in enumerate(arcs):
            if distance_to_arc(arc, incident.source) < REFUSAL_DISTANCE:
                raise InvalidArgument("Point source lies on arc %d" % j)


def build_rhs(arcs, incident, problem, N):
    """
    Right-hand sides, one density per arc: W-scale coefficients of ``-u_inc`` for Dirichlet,
    Y-scale coefficients of the normal derivative or traction for Neumann.
    """
    _checkSources(arcs, incident)
    K = max(2 * (N + 1), 64)
    out = []
    for arc in arcs:
        if problem == "dirichlet":
            x = eval_arc(arc, nodes_for("T_plain", K))
            values = -np.atleast_2d(incident.value(x))
            density = analyze(values, "T_plain")
        elif problem == "neumann":
            t = nodes_for("U_plain", K)
            x = eval_arc(arc, t)
            a = eval_tangent(arc, t)
            normal = np.stack([a[1], -a[0]])
            grad = incident.gradient(x)
            if incident.params.kind == "elastic":
                values = traction(incident.params, grad, normal)
            else:
                values = (normal[0] * grad[0] + normal[1] * grad[1])[None]
            density = analyze(values, "U_plain")
        else:
            raise InvalidArgument("Unknown problem %r" % (problem,))
        out.append(density.truncated(N))
    return out


class ScatteringSolution:
    """
    Densities of a solved problem with the diagnostics of the solve: ``condition``, ``smin``,
    ``residual``, the fitted coefficient decay ``rho`` and its ``fit_residual``.
    """

    def __init__(self, densities, problem, params, diagnostics=None):
        self.densities = list(densities)
        self.problem = problem
        self.params = params
        self.diagnostics = dict(diagnostics or {})

    @property
    def N(self):
        return self.densities[0].N

    def toDict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "problem": self.problem,
            "pde": self.params.toDict(),
            "N": self.N,
            "densities": [d.toDict() for d in self.densities],
            "diagnostics": {k: (None if not np.isfinite(v) else v) for k, v in sorted(self.diagnostics.items())},
        }

    @staticmethod
    def fromDict(d):
        diagnostics = {k: (np.inf if v is None else v) for k, v in d.get("diagnostics", {}).items()}
        return ScatteringSolution(
            [SpectralDensity.fromDict(x) for x in d["densities"]],
            d["problem"],
            params_from_dict(d["pde"]),
            diagnostics,
        )

    def __repr__(self):
        return "ScatteringSolution(M=%d, N=%d, problem=%s, %r)" % (
            len(self.densities),
            self.N,
            self.problem,
            self.params,
        )


def check_geometry(arcs):
    """
    Admissibility gate for a solve: every real arc passes :func:`~arcwave.geometry.check_arc` and
    every pair of arcs is separated.
    """
    for arc in arcs:
        check_arc(arc)
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            try:
                delta_cross([arcs[i]], [arcs[j]])
            except DegenerateGeometry as e:
                raise DegenerateGeometry("Arcs %d and %d touch" % (i, j), pair=(i, j)) from e


def solve_scattering(arcs, params, incident, problem, N, executor=None, check=True):
    """
    Assembles and solves the block system for the given incident field and records the decay of the
    density coefficients.
    """
    arcs = list(arcs)
    if check and all(a.is_real for a in arcs):
        check_geometry(arcs)
    system = assemble_system(arcs, params, problem, N, executor=executor)
    rhs = build_rhs(arcs, incident, problem, N)
    densities, diagnostics = solve_system(system, rhs)
    coeffs = np.concatenate([d.coeffs for d in densities], axis=0)
    diagnostics["rho"], diagnostics["fit_residual"] = decay_rate(coeffs)
    _log.debug("Solved %s problem on %d arcs: %s", problem, len(arcs), diagnostics)
    return ScatteringSolution(densities, problem, params, diagnostics)


def _quadrature(density, K):
    # nodes and weights absorbing the endpoint weight of the density's basis
    return gauss_chebyshev(K, 1 if density.basis == "TW" else 2)


def _densityValues(density, t):
    # the density without its endpoint weight: sum c T̂_n (TW) or sum c Û_n (WU)
    theta = np.arccos(t)
    n = np.arange(density.N + 1)
    if density.basis == "TW":
        scale = np.full(n.size, np.sqrt(2 / np.pi))
        scale[0] = 1 / np.sqrt(np.pi)
        return (density.coeffs * scale) @ np.cos(np.outer(n, theta))
    if density.basis == "WU":
        basis = np.sin(np.outer(n + 1, theta)) / np.sin(theta)
        return (density.coeffs * np.sqrt(2 / np.pi)) @ basis
    raise InvalidArgument("Potentials need TW or WU densities, not %s" % density.basis)


def _layerKernel(params, problem, x, y, normal):
    # kernel (P, K) or (2, 2, P, K) for points x (2, P) and sources y (2, K)
    X = x[:, :, None]
    Y = y[:, None, :]
    if problem == "dirichlet":
        if params.kind == "elastic":
            return elastic_green(params, X, Y)
        return helmholtz_green(params, X, Y)
    Nrm = normal[:, None, :]
    if params.kind == "elastic":
        return elastic_double_layer_kernel(params, X, Y, Nrm)
    diff = X - Y
    d = np.sqrt(diff[0] ** 2 + diff[1] ** 2)
    rn = diff[0] * Nrm[0] + diff[1] * Nrm[1]
    return 0.25j * params.kappa * rn * bessel.hankel1(1, params.kappa * d) / d


def _nodeCount(N, dist):
    K = max(MIN_QUADRATURE, 8 * (N + 1), int(np.ceil(4 / dist)))
    return min(K, MAX_QUADRATURE)


def eval_potential(arcs, solution, x):
    """
    The scattered field at ``x`` (shape ``(2,)`` or ``(2, P)``), by Gauss-Chebyshev quadrature whose
    node count grows as the points approach the arcs.

    Raises:
        :class:`~arcwave.errors.NearSingularEvaluation`: a point is within 1e-6 of an arc.
    """
    x, single = _points(np.asarray(x, dtype=float))
    if len(arcs) != len(solution.densities):
        raise InvalidArgument("Need one density per arc")
    comps = solution.densities[0].components
    out = np.zeros((comps, x.shape[1]), dtype=complex)
    dist = np.min([distance_to_arc(arc, x) for arc in arcs], axis=0)
    if np.any(dist < REFUSAL_DISTANCE):
        raise NearSingularEvaluation("Point within %g of an arc (distance %.3g)" % (REFUSAL_DISTANCE, dist.min()))
    for start in range(0, x.shape[1], CHUNK):
        chunk = slice(start, start + CHUNK)
        K = _nodeCount(solution.N, dist[chunk].min())
        for arc, density in zip(arcs, solution.densities):
            t, w = _quadrature(density, K)
            y = eval_arc(arc, t)
            a = eval_tangent(arc, t)
            normal = np.stack([a[1], -a[0]])
            kernel = _layerKernel(solution.params, solution.problem, x[:, chunk], y, normal)
            u = _densityValues(density, t) * w
            if comps == 1:
                out[0, chunk] += kernel @ u[0]
            else:
                out[:, chunk] += np.einsum("ijpk,jk->ip", kernel, u)
    out = out[0] if comps == 1 else out
    return out[..., 0] if single else out


def field_grid(arcs, solution, box, resolution):
    """
    The field on a ``resolution = (nx, ny)`` grid over ``box = (xmin, xmax, ymin, ymax)``. Returns
    ``(X, Y, U)`` with ``U`` of shape ``(ny, nx)`` or ``(2, ny, nx)``; points within the refusal
    distance of an arc are NaN.
    """
    xmin, xmax, ymin, ymax = box
    nx, ny = resolution
    X, Y = np.meshgrid(np.linspace(xmin, xmax, nx), np.linspace(ymin, ymax, ny))
    pts = np.stack([X.ravel(), Y.ravel()])
    dist = np.min([distance_to_arc(arc, pts) for arc in arcs], axis=0)
    ok = dist >= REFUSAL_DISTANCE
    comps = solution.densities[0].components
    U = np.full((comps, pts.shape[1]), complex(np.nan, np.nan))
    if ok.any():
        U[:, ok] = np.reshape(eval_potential(arcs, solution, pts[:, ok]), (comps, -1))
    U = U.reshape((comps, ny, nx))
    return X, Y, (U[0] if comps == 1 else U)


def far_field(arcs, solution, xhat):
    """
    The Helmholtz far-field pattern in the unit direction(s) ``xhat``, with the convention
    ``u(x) ~ e^{i kappa |x|} / sqrt(|x|) u_inf(x/|x|)``.
    """
    params = solution.params
    if params.kind != "helmholtz":
        raise InvalidArgument("Far-field patterns are only implemented for Helmholtz problems")
    xhat, single = _points(np.asarray(xhat, dtype=float))
    kappa = params.kappa
    total = np.zeros(xhat.shape[1], dtype=complex)
    for arc, density in zip(arcs, solution.densities):
        K = max(MIN_QUADRATURE, 8 * (density.N + 1))
        t, w = _quadrature(density, K)
        y = eval_arc(arc, t)
        phase = np.exp(-1j * kappa * (xhat.T @ y))
        if solution.problem == "neumann":
            a = eval_tangent(arc, t)
            normal = np.stack([a[1], -a[0]])
            phase = phase * (-1j * kappa) * (xhat.T @ normal)
        total += phase @ (_densityValues(density, t)[0] * w)
    out = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * kappa) * total
    return out[0] if single else out


def linear_functional(arcs, solution, probe, x=None, K=None):
    """
    ``sum_j int probe(x, r_j(t)) u_j(t) dt``. ``probe(x, y)`` receives the quadrature points ``y`` of
    shape ``(2, K)`` and returns a scalar kernel ``(K,)``, a row ``(components, K)`` contracted with the
    density, or a matrix ``(c, components, K)``.
    """
    total = 0
    for arc, density in zip(arcs, solution.densities):
        n = K or max(MIN_QUADRATURE, 8 * (density.N + 1))
        t, w = _quadrature(density, n)
        y = eval_arc(arc, t)
        u = _densityValues(density, t) * w
        kernel = np.asarray(probe(x, y), dtype=complex)
        if kernel.ndim == 1:
            value = u @ kernel
            value = value[0] if density.components == 1 else value
        elif kernel.ndim == 2:
            value = np.sum(kernel * u)
        else:
            value = np.einsum("ijk,jk->i", kernel, u)
        total = total + value
    return total


class Functional:
    """
    Base class of the scalar observables used by parameter sweeps. Calling one on
    ``(arcs, solution)`` returns a complex number.
    """

    kind = None

    def __call__(self, arcs, solution):
        raise NotImplementedError()

    def toDict(self):
        return {"kind": self.kind}


class FarFieldFunctional(Functional):
    kind = "far-field"

    def __init__(self, direction=(0.0, 1.0)):
        self.direction = np.asarray(direction, dtype=float)

    def __call__(self, arcs, solution):
        return complex(far_field(arcs, solution, self.direction))

    def toDict(self):
        return {"kind": self.kind, "direction": list(self.direction)}


class PotentialFunctional(Functional):
    """
    The field at a fixed point (component ``component`` for elasticity).
    """

    kind = "potential"

    def __init__(self, point, component=0):
        self.point = np.asarray(point, dtype=float)
        self.component = component

    def __call__(self, arcs, solution):
        value = eval_potential(arcs, solution, self.point)
        return complex(value if np.ndim(value) == 0 else value[self.component])

    def toDict(self):
        return {"kind": self.kind, "point": list(self.point), "component": self.component}


class MomentFunctional(Functional):
    """
    ``sum_j int u_j`` (first component for elasticity): ``sqrt(pi) c_0`` for TW densities,
    ``sqrt(pi/2) c_0`` for WU ones.
    """

    kind = "moment"

    def __call__(self, arcs, solution):
        total = 0j
        for density in solution.densities:
            scale = np.sqrt(np.pi) if density.basis == "TW" else np.sqrt(np.pi / 2)
            total += scale * density.coeffs[0, 0]
        return total


def functional_from_dict(d):
    kind = (d or {}).get("kind", "far-field")
    if kind == "far-field":
        return FarFieldFunctional(d.get("direction", (0.0, 1.0)) if d else (0.0, 1.0))
    if kind == "potential":
        if "point" not in d:
            raise InvalidArgument("The potential functional needs a point")
        return PotentialFunctional(d["point"], d.get("component", 0))
    if kind == "moment":
        return MomentFunctional()
    raise InvalidArgument("Unknown functional %r" % (kind,))
