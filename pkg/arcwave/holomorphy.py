"""
Numerical evidence for the parametric holomorphy of the scattering densities.

Three kinds of checks are offered:

* parameter sweeps: a scalar functional of the solution is sampled at Chebyshev nodes along one
  parameter of an affine arc family, and the geometric decay of its Chebyshev coefficients gives the
  radius ``rho`` of a Bernstein ellipse it extends to;
* Fréchet checks: complex-step against central-difference derivatives along arc perturbations, and
  complex linearity ``DF[iv] = i DF[v]``;
* tube checks: operator norms and positivity of the chord ratio over random complex perturbations.

Sweeps are split into independent node jobs (:func:`sweep_jobs`) and a fit (:func:`fit_sweep`), so
that the nodes can run on a worker pool::

    result = sweep_parameter(family, params, incident, "dirichlet", FarFieldFunctional(), 0, 33)
    result.rho
"""
import logging

import numpy as np
import scipy.linalg

from .errors import ArcwaveError, DegenerateGeometry, InvalidArgument, SolverError
from .geometry import (
    DEFAULT_GRID,
    SAFETY,
    check_family,
    delta_self,
    eval_tangent,
    materialize,
    tube_samples,
    verify_tube_positivity,
)
from .operators import assemble_V_self, assemble_W_block
from .solver import solve_scattering
from .spectral import chebyshev_nodes, dct_coefficients, decay_rate

_log = logging.getLogger("arcwave.holomorphy")

#: Largest log-space fit residual accepted by a certificate
FIT_TOLERANCE = 0.1

SCHEMA_VERSION = 1


class SweepResult:
    """
    Functional values along one parameter at Chebyshev nodes, their Chebyshev coefficients and the
    fitted decay rate ``rho`` (``inf`` when the values are constant to working precision).
    """

    def __init__(self, index, nodes, values, coeffs, rho, residual):
        self.index = index
        self.nodes = np.asarray(nodes)
        self.values = np.asarray(values, dtype=complex)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.rho = rho
        self.residual = residual

    @property
    def n_nodes(self):
        return self.nodes.size

    def toDict(self):
        return {
            "index": self.index,
            "n_nodes": self.n_nodes,
            "rho_hat": None if np.isinf(self.rho) else self.rho,
            "residual": self.residual,
        }

    def __repr__(self):
        return "SweepResult(index=%d, nodes=%d, rho=%.4g, residual=%.3g)" % (
            self.index,
            self.n_nodes,
            self.rho,
            self.residual,
        )


def evaluate_functional(arcs, params, incident, problem, functional, N):
    """
    Solves on the given arcs (real or complexified) and returns the functional value.
    """
    solution = solve_scattering(arcs, params, incident, problem, N, check=False)
    return functional(arcs, solution)


def _parameterVector(family, index, value):
    y = np.zeros(family.n_parameters)
    y[index] = value
    return y


def sweep_jobs(family, params, incident, problem, functional, param_index, n_nodes, N=48):
    """
    The node evaluations of a sweep as a list of zero-argument callables, in node order. The other
    parameters are held at 0.
    """
    if not 0 <= param_index < family.n_parameters:
        raise InvalidArgument("Parameter index %d outside 0..%d" % (param_index, family.n_parameters - 1))
    nodes = chebyshev_nodes(n_nodes)

    def job(y):
        arcs = materialize(family, _parameterVector(family, param_index, y))
        return evaluate_functional(arcs, params, incident, problem, functional, N)

    return [(lambda y=y: job(y)) for y in nodes]


def fit_sweep(param_index, values):
    """
    Fits the values of a sweep, taken at :func:`~arcwave.spectral.chebyshev_nodes` in order.
    """
    values = np.asarray(values, dtype=complex)
    coeffs = dct_coefficients(values)
    rho, residual = decay_rate(coeffs)
    result = SweepResult(param_index, chebyshev_nodes(values.size), values, coeffs, rho, residual)
    _log.debug("Fitted %s", result)
    return result


def _runJobs(jobs, executor):
    if executor is None:
        outcomes = []
        for k, job in enumerate(jobs):
            try:
                outcomes.append(job())
            except ArcwaveError as e:
                raise SolverError("Sweep node %d failed: %s" % (k, e), node=k) from e
        return outcomes
    futures = [executor.submit(job) for job in jobs]
    outcomes = []
    for k, f in enumerate(futures):
        try:
            outcomes.append(f.result())
        except ArcwaveError as e:
            raise SolverError("Sweep node %d failed: %s" % (k, e), node=k) from e
    return outcomes


def require_admissible(family):
    report = check_family(family)
    if not report.passed:
        failed = [name for name, ok in report.conditions.items() if not ok]
        raise DegenerateGeometry("Family fails admissibility: %s" % ", ".join(failed))
    return report


def sweep_parameter(family, params, incident, problem, functional, param_index, n_nodes, N=48, executor=None):
    """
    Samples ``y -> functional(solution at y e_index)`` at ``n_nodes`` Chebyshev nodes and fits the
    decay of its Chebyshev coefficients.

    Raises:
        :class:`~arcwave.errors.DegenerateGeometry`: the family fails :func:`~arcwave.geometry.check_family`.
        :class:`~arcwave.errors.SolverError`: a node solve failed; :attr:`node` holds its index.
    """
    require_admissible(family)
    jobs = sweep_jobs(family, params, incident, problem, functional, param_index, n_nodes, N)
    return fit_sweep(param_index, _runJobs(jobs, executor))


class DerivativeCheck:
    """
    Complex-step and central-difference derivative estimates per step size, and their relative gaps.
    """

    def __init__(self, steps, complex_step, central):
        self.steps = np.asarray(steps, dtype=float)
        self.complex_step = np.asarray(complex_step, dtype=complex)
        self.central = np.asarray(central, dtype=complex)
        scale = np.maximum(np.abs(self.complex_step), 1e-300)
        self.gaps = np.where(
            self.complex_step == self.central, 0.0, np.abs(self.complex_step - self.central) / scale
        )

    @property
    def max_gap(self):
        return float(self.gaps.max())

    def toDict(self):
        return {
            "steps": self.steps.tolist(),
            "complex_step": [[v.real, v.imag] for v in self.complex_step],
            "central": [[v.real, v.imag] for v in self.central],
            "gaps": self.gaps.tolist(),
        }

    def __repr__(self):
        return "DerivativeCheck(steps=%s, max_gap=%.3g)" % (self.steps.tolist(), self.max_gap)


def _directions(family, direction):
    direction = list(direction) if isinstance(direction, (list, tuple)) else [direction]
    if len(direction) != family.M:
        raise InvalidArgument("Need one direction arc per family arc")
    return direction


def _checkDirection(family, direction):
    t = np.linspace(-1, 1, 256)
    size = max(np.abs(eval_tangent(v, t)).max() for v in direction)
    radius = SAFETY * delta_self(family.nominal)
    if size > radius:
        raise InvalidArgument("Direction tangent norm %.3g exceeds the tube radius %.3g" % (size, radius))


def _shifted(arcs, direction, step):
    return [a + v * step for a, v in zip(arcs, direction)]


def complex_derivative(F, h):
    """
    ``(F(ih) - F(-ih)) / (2ih)`` for a callable of one complex shift.
    """
    return (F(1j * h) - F(-1j * h)) / (2j * h)


def complex_step_check(family, params, incident, problem, functional, direction, steps, N=48):
    """
    Derivative of the functional at the family's nominal arcs along ``direction`` (one perturbation
    arc per nominal arc), by the symmetric complex step and by central differences, for each step in
    the strictly decreasing sequence ``steps``.

    Raises:
        :class:`~arcwave.errors.BranchCutError`: a complexified arc left the admissible tube.
    """
    steps = np.asarray(steps, dtype=float)
    if steps.size == 0 or np.any(steps <= 0) or np.any(np.diff(steps) >= 0):
        raise InvalidArgument("Steps must be positive and strictly decreasing")
    direction = _directions(family, direction)
    _checkDirection(family, direction)
    nominal = family.nominal

    def F(shift):
        arcs = _shifted(nominal, direction, shift)
        return evaluate_functional(arcs, params, incident, problem, functional, N)

    cs, cd = [], []
    for h in steps:
        cs.append(complex_derivative(F, h))
        cd.append((F(h) - F(-h)) / (2 * h))
    check = DerivativeCheck(steps, cs, cd)
    _log.debug("Complex-step check: %s", check)
    return check


def cauchy_riemann_check(family, params, incident, problem, functional, direction, h=1e-5, N=48):
    """
    Central differences along ``v`` and ``i v``; returns ``(DF[v], DF[iv], gap)`` with
    ``gap = |DF[iv] - i DF[v]| / |DF[v]|``.

    Raises:
        :class:`~arcwave.errors.InvalidArgument`: the direction is larger than the tube radius.
    """
    direction = _directions(family, direction)
    _checkDirection(family, direction)
    nominal = family.nominal

    def F(shift):
        arcs = _shifted(nominal, direction, shift)
        return evaluate_functional(arcs, params, incident, problem, functional, N)

    dv = (F(h) - F(-h)) / (2 * h)
    div = (F(1j * h) - F(-1j * h)) / (2 * h)
    gap = abs(div - 1j * dv) / max(abs(dv), 1e-300) if div != 1j * dv else 0.0
    return dv, div, gap


def admissible_polyradius(b, epsilon, rho):
    """
    Whether ``sum_j (rho_j - 1) b_j <= epsilon`` (with a relative slack of 1e-12). Entries with
    ``b_j = 0`` do not contribute.

    Raises:
        :class:`~arcwave.errors.InvalidArgument`: some ``rho_j <= 1`` where ``b_j > 0``.
    """
    b = np.asarray(b, dtype=float)
    rho = np.broadcast_to(np.asarray(rho, dtype=float), b.shape)
    active = b > 0
    if np.any(rho[active] <= 1):
        raise InvalidArgument("Polyradii must exceed 1 wherever b_j > 0")
    total = np.sum((rho[active] - 1) * b[active])
    return bool(total <= epsilon + 1e-12 * max(1.0, epsilon))


def energy_scaling(N, problem, components=1):
    """
    Diagonal scaling into the energy norms: ``(1+n^2)^{1/4}`` for Dirichlet (T^{-1/2} to W^{1/2}) and
    ``(1+n^2)^{-1/4}`` for Neumann (U^{1/2} to Y^{-1/2}).
    """
    n = np.arange(N + 1)
    power = 0.25 if problem == "dirichlet" else -0.25
    return np.tile((1.0 + n * n) ** power, components)


def _operatorNorms(arcs, params, problem, N):
    split = params.split()
    norms = []
    for arc in arcs:
        if problem == "dirichlet":
            block = assemble_V_self(arc, split, N)
        else:
            block = assemble_W_block(arc, arc, params, N, same=True)
        S = energy_scaling(N, problem, block.components)
        norms.append(scipy.linalg.svdvals(S[:, None] * block.matrix * S[None, :])[0])
    return norms


def tube_operator_bound(K_samples, delta, params, N, n_samples, seed=0, problem="dirichlet"):
    """
    Largest energy-scaled operator norm of the self blocks over ``n_samples`` random complex
    perturbations of size below ``delta`` (the unperturbed arcs included).

    Raises:
        :class:`~arcwave.errors.BranchCutError`: a sample left the admissible tube.
    """
    best = 0.0
    for arcs in tube_samples(K_samples, delta, n_samples, seed):
        best = max(best, max(_operatorNorms(arcs, params, problem, N)))
    _log.debug("Tube operator bound at delta=%s over %d samples: %.6g", delta, n_samples, best)
    return float(best)


def largest_passing_delta(
    K_samples, factors=(0.25, 0.5, 0.75, 1.0), n_samples=50, seed=0, check=None, grid=DEFAULT_GRID
):
    """
    Scans ``factor * SAFETY * delta_self(K)`` and returns the largest radius at which tube positivity
    holds (and the optional ``check(delta) -> bool`` passes), together with the per-radius outcomes.
    Returns ``0.0`` if none passes.
    """
    arcs = list(K_samples)
    top = SAFETY * delta_self(arcs, grid)
    best = 0.0
    outcomes = []
    for factor in sorted(factors):
        delta = factor * top
        report = verify_tube_positivity(arcs, delta, n_samples, seed, grid, cross=len(arcs) > 1)
        passed = report.passed and (check is None or bool(check(delta)))
        outcomes.append({"delta": delta, "pass": passed})
        if passed:
            best = delta
    return best, outcomes


def certificate_report(family, sweeps, epsilon_scan, N, n_nodes, seed=None):
    """
    Assembles the certificate from finished sweeps: per-index pass flags (``rho > 1`` and fit
    residual below :data:`FIT_TOLERANCE`), the requirement that ``rho`` does not decrease as ``b``
    decreases, and for each ``epsilon`` whether the fitted radii reach the admissible polyradius that splits
    ``epsilon`` evenly over the active indices (reported capped by the fitted radii).
    """
    from . import __version__

    weights = family.parameter_weights()
    indices = [s.index for s in sweeps]
    b = np.array([weights[k] for k in indices])
    rho = np.array([s.rho for s in sweeps])
    flags = [bool(s.rho > 1 and s.residual < FIT_TOLERANCE) for s in sweeps]
    order = np.argsort(-b, kind="stable")
    ranked = rho[order]
    # written as a product so that infinite rates compare as equal
    monotone = bool(np.all(ranked[1:] >= ranked[:-1] * (1 - 1e-9)))
    scan = []
    active = b > 0
    for eps in epsilon_scan:
        # even split of epsilon over the active indices
        required = np.ones_like(b)
        if active.any():
            required[active] = 1 + eps / (active.sum() * b[active])
        covered = bool(np.all(rho[active] >= required[active] * (1 - 1e-9)))
        scan.append(
            {
                "epsilon": float(eps),
                "rho_admissible": covered and admissible_polyradius(b, eps, required),
                "polyradius": np.minimum(rho, required).tolist(),
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "indices": indices,
        "b": b.tolist(),
        "rho_hat": [None if np.isinf(v) else float(v) for v in rho],
        "residuals": [float(s.residual) for s in sweeps],
        "pass_flags": flags,
        "monotone": monotone,
        "epsilon_scan": scan,
        "pass": bool(all(flags) and monotone),
        "provenance": {"arcwave": __version__, "N": N, "nodes": n_nodes, "seed": seed},
    }


def bpe_certificate(
    family, params, incident, problem, functional, indices, epsilon_scan, n_nodes=33, N=48, executor=None, seed=None
):
    """
    Runs one sweep per parameter index and returns the certificate dict (see
    :func:`certificate_report`). A failing certificate is returned, not raised; its ``"pass"`` entry
    is ``False``.

    Raises:
        :class:`~arcwave.errors.DegenerateGeometry`: the family fails admissibility, before any sweep.
    """
    require_admissible(family)
    sweeps = [
        sweep_parameter(family, params, incident, problem, functional, k, n_nodes, N, executor) for k in indices
    ]
    report = certificate_report(family, sweeps, epsilon_scan, N, n_nodes, seed)
    _log.info("Certificate over indices %s: pass=%s", indices, report["pass"])
    return report
