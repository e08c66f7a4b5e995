"""
Self-checks of the numerical core against independent oracles: closed forms, adaptive quadrature
and transform identities. Each check is a zero-argument callable returning a :class:`Check`, so the
CLI can run a suite on its worker pool::

    for name, check in SUITES["kernels"]:
        print(check())
"""
import logging

import numpy as np

from .errors import InvalidArgument
from .geometry import Arc, delta_cross, delta_self, eval_arc, verify_tube_positivity
from .kernels import (
    ElasticParams,
    HelmholtzParams,
    LaplaceParams,
    LaplaceSplit,
    elastic_green,
    elastic_split,
    helmholtz_green,
    helmholtz_split,
    maue_tilde_helmholtz,
)
from .operators import (
    apply_operator_quadrature,
    assemble_log,
    assemble_logsq,
    assemble_smooth,
    assemble_V_cross,
    assemble_V_self,
    assemble_W_block,
)
from .quadrature import gauss_chebyshev
from .spectral import (
    BASES,
    SpectralDensity,
    analyze,
    derivative_matrix,
    naive_analyze,
    nodes_for,
    orthonormal_scaling,
    synthesize,
)

_log = logging.getLogger("arcwave.verify")


class Check:
    """
    One verification outcome: the measured error against its tolerance.
    """

    def __init__(self, name, error, tolerance):
        self.name = name
        self.error = float(error)
        self.tolerance = float(tolerance)

    @property
    def passed(self):
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)

    def toDict(self):
        return {"name": self.name, "error": self.error, "tolerance": self.tolerance, "pass": self.passed}

    def __repr__(self):
        return "Check(%s, error=%.3g, tol=%.1g, %s)" % (
            self.name,
            self.error,
            self.tolerance,
            "pass" if self.passed else "FAIL",
        )


def _relative(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


STRAIGHT = Arc.line((-1, 0), (1, 0))
QUARTER = Arc.from_function(lambda t: (np.cos(np.pi * (t + 1) / 4), np.sin(np.pi * (t + 1) / 4)))
TILTED = Arc.line((-1, -1), (0.5, -0.4))


# --- kernels -------------------------------------------------------------------------------------


def helmholtz_reconstruction(kappa):
    def check():
        split = helmholtz_split(HelmholtzParams(kappa))
        d = np.logspace(-3, np.log10(2), 200)
        x = np.stack([d, np.zeros_like(d)])
        direct = helmholtz_green(split.params, x, np.zeros((2, 1)))
        return Check("helmholtz split, kappa=%g" % kappa, _relative(split.green(d * d), direct), 1e-10)

    return check


def elastic_reconstruction(omega, alpha=2.0, beta=1.0):
    def check():
        params = ElasticParams(alpha, beta, omega)
        split = elastic_split(params)
        d = np.logspace(-3, np.log10(2), 200)
        x = np.stack([d, np.zeros_like(d)])
        D = np.zeros((2, 2, d.size))
        D[0, 0] = 1
        direct = elastic_green(params, x, np.zeros((2, 1)))
        split_value = split.green(d * d, D)
        scale = np.abs(direct).max(axis=(0, 1))
        error = np.max(np.abs(split_value - direct).max(axis=(0, 1)) / scale)
        return Check("elastic split, omega=%g" % omega, error, 1e-10)

    return check


def elastic_log_coefficients(alpha=2.0, beta=1.0, omega=1.0):
    def check():
        split = elastic_split(ElasticParams(alpha, beta, omega))
        lam, mu = alpha, beta
        J1_0 = -(lam + 3 * mu) / (8 * np.pi * mu * (lam + 2 * mu))
        error = max(abs(split.J2(0.0)), abs(split.J1(0.0) - J1_0))
        return Check("elastic J1(0), J2(0)", error, 1e-12)

    return check


# --- operators -----------------------------------------------------------------------------------


def log_diagonalization(n_max=8):
    def check():
        t = np.array([-0.9, -0.37, 0.11, 0.52, 0.88])
        s = orthonormal_scaling(n_max)
        error = 0.0
        for n in range(n_max + 1):
            e = np.zeros(n_max + 1)
            e[n] = 1
            value = apply_operator_quadrature(
                lambda x, y: np.log(np.abs(x - y)), SpectralDensity(e, "TW"), t, epsabs=1e-14
            )
            lam = -np.pi * np.log(2.0) if n == 0 else -np.pi / n
            expected = lam * s[n] * np.cos(n * np.arccos(t))
            error = max(error, np.max(np.abs(value - expected)))
        return Check("log kernel eigenvalues", error, 1e-10)

    return check


def laplace_V_diagonal(N=8):
    def check():
        M = assemble_V_self(STRAIGHT, LaplaceSplit(), N).matrix
        expected = np.diag(np.concatenate([[np.log(2.0) / 2], 1 / (2 * np.arange(1.0, N + 1))]))
        return Check("Laplace V on a straight arc", np.abs(M - expected).max(), 1e-12)

    return check


def laplace_W_diagonal(N=7):
    def check():
        M = assemble_W_block(STRAIGHT, STRAIGHT, LaplaceParams(), N, same=True).matrix
        expected = np.diag((np.arange(N + 1) + 1) / 2)
        return Check("Laplace W on a straight arc", np.abs(M - expected).max() / expected.max(), 1e-8)

    return check


def manufactured_dirichlet(N=8):
    def check():
        V = assemble_V_self(STRAIGHT, LaplaceSplit(), N).matrix
        rhs = analyze(np.ones(N + 1), "T_plain").coeffs[0]
        c = np.linalg.solve(V, rhs)
        expected = np.zeros(N + 1)
        # lambda = (2 / log 2) / w, and 1/w = sqrt(pi) T̂_0 / w
        expected[0] = 2 * np.sqrt(np.pi) / np.log(2.0)
        return Check("manufactured Dirichlet solution", np.abs(c - expected).max(), 1e-9)

    return check


def _testFunctions(basis, N, n_test):
    # quadrature points and the test functions T̂_m / w (TW) or w Û_m (WU) times the weights
    if basis == "TW":
        t, w = gauss_chebyshev(n_test)
        B = orthonormal_scaling(N)[:, None] * np.cos(np.outer(np.arange(N + 1), np.arccos(t)))
    else:
        t, w = gauss_chebyshev(n_test, 2)
        theta = np.arccos(t)
        B = np.sqrt(2 / np.pi) * np.sin(np.outer(np.arange(1, N + 2), theta)) / np.sin(theta)
    return t, B * w


def quadrature_galerkin(kernel, N, basis="TW", components=1, n_test=24):
    """
    The Galerkin matrix of ``u -> int K(t,tau) u(tau) dtau`` built without the kernel expansions:
    the operator is applied to each basis density by adaptive quadrature
    (:func:`~arcwave.operators.apply_operator_quadrature`) and projected on the test functions by
    ``n_test``-point Gauss-Chebyshev integration in ``t``.
    """
    t, B = _testFunctions(basis, N, n_test)
    size = components * (N + 1)
    Q = np.zeros((size, size), dtype=complex)
    for k in range(size):
        e = np.zeros(size)
        e[k] = 1
        values = apply_operator_quadrature(kernel, SpectralDensity(e.reshape(components, -1), basis), t)
        Q[:, k] = (np.reshape(values, (components, -1)) @ B.T).reshape(-1)
    return Q


def _onArcs(r, p, green):
    # K(t, tau) = green(r(t), p(tau)) for a scalar t and an array of tau
    return lambda t, tau: green(eval_arc(r, np.full_like(tau, t)), eval_arc(p, tau))


def _vSelfCase(N, n_test):
    params = HelmholtzParams(1.0)
    kernel = _onArcs(QUARTER, QUARTER, lambda x, y: helmholtz_green(params, x, y))
    return assemble_V_self(QUARTER, params.split(), N).matrix, quadrature_galerkin(kernel, N, n_test=n_test)


def _vCrossCase(N, n_test):
    params = HelmholtzParams(3.0)
    kernel = _onArcs(QUARTER, TILTED, lambda x, y: helmholtz_green(params, x, y))
    M = assemble_V_cross(QUARTER, TILTED, params.split(), N).matrix
    return M, quadrature_galerkin(kernel, N, n_test=n_test)


def _vElasticCase(N, n_test):
    params = ElasticParams(2.0, 1.0, 1.0)
    kernel = _onArcs(QUARTER, QUARTER, lambda x, y: elastic_green(params, x, y))
    M = assemble_V_self(QUARTER, params.split(), N).matrix
    return M, quadrature_galerkin(kernel, N, components=2, n_test=n_test)


def _wCase(N, n_test):
    # <W phi, theta> = int int G phi' theta' + G~ phi theta, with phi' and theta' TW densities
    params = HelmholtzParams(1.0)
    green = _onArcs(QUARTER, QUARTER, lambda x, y: helmholtz_green(params, x, y))

    def tilde(t, tau):
        return maue_tilde_helmholtz(params, QUARTER, QUARTER, np.full_like(tau, t), tau)

    D = derivative_matrix(N)
    Q = D.T @ quadrature_galerkin(green, N + 1, n_test=n_test) @ D
    Q += quadrature_galerkin(tilde, N, "WU", n_test=n_test)
    return assemble_W_block(QUARTER, QUARTER, params, N, same=True).matrix, Q


def _smoothFactor(t, tau):
    return np.exp(0.5j * t * tau) * np.cos(t - 2 * tau)


def _pathCase(assemble, factor, basis):
    def case(N, n_test):
        kernel = lambda t, tau: factor(t, tau) * _smoothFactor(t, tau)
        M = assemble(_smoothFactor, N, basis).matrix
        return M, quadrature_galerkin(kernel, N, basis, n_test=n_test)

    return case


CONSISTENCY_CASES = {
    "V_self": _vSelfCase,
    "V_cross": _vCrossCase,
    "V_elastic": _vElasticCase,
    "W": _wCase,
    "smooth": _pathCase(assemble_smooth, lambda t, tau: 1.0, "TW"),
    "log": _pathCase(assemble_log, lambda t, tau: np.log(np.abs(t - tau)), "TW"),
    "log_WU": _pathCase(assemble_log, lambda t, tau: np.log(np.abs(t - tau)), "WU"),
    "logsq": _pathCase(assemble_logsq, lambda t, tau: np.log(np.abs(t - tau)) * (t - tau) ** 2, "TW"),
}


def galerkin_consistency(case="V_self", N=6, n_test=24, n_densities=20, seed=0):
    """
    An assembled block against :func:`quadrature_galerkin` of the continuous operator, applied to
    ``n_densities`` random densities with decaying coefficients. Cases: the Helmholtz V self block on
    a quarter circle, the V cross block between it and a tilted segment, the elastic V self block,
    the Helmholtz W block, and the smooth, log (TW and WU) and log-square paths.
    """
    if case not in CONSISTENCY_CASES:
        raise InvalidArgument("Unknown consistency case %r" % (case,))

    def check():
        M, Q = CONSISTENCY_CASES[case](N, n_test)
        rng = np.random.default_rng(seed)
        shape = (M.shape[1], n_densities)
        n = np.tile(np.arange(N + 1), M.shape[1] // (N + 1))
        C = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / (1.0 + n[:, None]) ** 2
        error = np.linalg.norm(M @ C - Q @ C) / np.linalg.norm(Q @ C)
        return Check("Galerkin consistency, %s" % case, error, 1e-7)

    return check


# --- geometry ------------------------------------------------------------------------------------


def straight_delta_self():
    def check():
        return Check("delta_self of a straight arc", abs(delta_self([STRAIGHT]) - (np.sqrt(2) - 1)), 1e-14)

    return check


def parallel_delta_cross():
    def check():
        upper = Arc.line((-1, 2), (1, 2))
        S = 1 + np.sqrt(5)
        expected = (np.sqrt(4 + S * S) - S) / 2
        d1, d2 = delta_cross([STRAIGHT], [upper])
        return Check("delta_cross of parallel arcs", max(abs(d1 - expected), abs(d2 - expected)), 1e-12)

    return check


def tube_positivity(n_samples=200, grid=64):
    def check():
        lower = Arc.line((-1, -2), (1, -2))
        arcs = [lower, QUARTER]
        delta = 0.9 * min(delta_self([a]) for a in arcs)
        delta = min(delta, 0.9 * delta_cross([lower], [QUARTER])[0])
        report = verify_tube_positivity(arcs, delta, n_samples, seed=0, grid=grid, cross=True)
        worst = min(report.min_re_Q, report.min_re_Qinv, report.min_re_d2)
        # reported as an error that passes when the minimum is positive
        return Check("tube positivity", 0.0 if worst > 0 else 1.0 - worst, 0.0)

    return check


# --- spectral ------------------------------------------------------------------------------------


def transform_agreement(n=33):
    def check():
        error = 0.0
        for basis in BASES:
            t = nodes_for(basis, n)
            values = np.exp(t) * np.cos(3 * t) + 1j * t ** 2
            error = max(error, np.abs(analyze(values, basis).coeffs - naive_analyze(values, basis).coeffs).max())
        return Check("DCT against the O(N^2) transform", error, 1e-12)

    return check


def reconstruction(n=40):
    def check():
        probe = np.linspace(-0.95, 0.95, 17)
        error = 0.0
        for basis in BASES:
            # u such that the weighted expansion is exp(t)
            if basis == "TW":
                f = lambda t: np.exp(t) / np.sqrt(1 - t * t)
            elif basis == "WU":
                f = lambda t: np.exp(t) * np.sqrt(1 - t * t)
            else:
                f = np.exp
            density = analyze(f(nodes_for(basis, n)), basis)
            error = max(error, _relative(synthesize(density, probe), f(probe)))
        return Check("analyze/synthesize reconstruction", error, 1e-12)

    return check


SUITES = {
    "kernels": [
        ("helmholtz_0.5", helmholtz_reconstruction(0.5)),
        ("helmholtz_1", helmholtz_reconstruction(1.0)),
        ("helmholtz_5", helmholtz_reconstruction(5.0)),
        ("elastic_1", elastic_reconstruction(1.0)),
        ("elastic_3", elastic_reconstruction(3.0)),
        ("elastic_zero", elastic_log_coefficients()),
    ],
    "operators": [
        ("log_moments", log_diagonalization()),
        ("laplace_V", laplace_V_diagonal()),
        ("laplace_W", laplace_W_diagonal()),
        ("manufactured", manufactured_dirichlet()),
        *[("consistency_" + case, galerkin_consistency(case)) for case in CONSISTENCY_CASES],
    ],
    "geometry": [
        ("delta_self", straight_delta_self()),
        ("delta_cross", parallel_delta_cross()),
        ("tube", tube_positivity()),
    ],
    "spectral": [
        ("transforms", transform_agreement()),
        ("reconstruction", reconstruction()),
    ],
}


def suite_checks(suite):
    """
    The ``(name, check)`` pairs of a suite, or of all suites for ``"all"``.
    """
    if suite == "all":
        return [item for name in SUITES for item in SUITES[name]]
    return list(SUITES[suite])
