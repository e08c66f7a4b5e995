"""
Galerkin discretization of the boundary integral operators.

Three canonical integral operators are discretized from 2D Chebyshev expansions of their smooth
kernels ``f(t, tau)``:

* the smooth path ``int f(t,tau) u(tau) dtau``,
* the log path ``int log|t-tau| f(t,tau) u(tau) dtau``, through the exact moments
  ``int log|t-tau| T_n(tau) / w(tau) dtau = -pi log 2`` (n=0) and ``-(pi/n) T_n(t)`` (n>=1),
* the log-square path ``int log|t-tau| (t-tau)^2 f(t,tau) u(tau) dtau``, by multiplying the expansion
  of ``f`` by ``(t-tau)^2`` and reusing the log path.

All matrices pair the TW coefficients of the density against the test functions ``T̂_m / w``, so the
rows are W-scale (``T_plain``) coefficients, or, after the WU conversions used by the hypersingular
blocks, Y-scale (``U_plain``) coefficients.

Elastic blocks are 2x2 blocks of scalar blocks: row and column index ``component * (N+1) + n``.
"""
import functools
import logging
import warnings

import numpy as np
import scipy.integrate
import scipy.linalg
from numpy.polynomial import chebyshev

from .errors import (
    DegenerateGeometry,
    InvalidArgument,
    InvalidKernel,
    NearSingularWarning,
    NonUniqueness,
)
from .geometry import PairGeometry
from .kernels import (
    ElasticSplit,
    elastic_maue_samples,
    maue_helmholtz_samples,
    self_split_samples,
)
from .spectral import (
    SpectralDensity,
    chebyshev_nodes,
    conversion_matrix,
    dct_coefficients,
    decay_rate,
    derivative_matrix,
    orthonormal_scaling,
)

_log = logging.getLogger("arcwave.operators")

#: Relative size below which kernel expansion coefficients are dropped
TRUNCATION = 1e-14

#: Condition estimate above which a NearSingularWarning is issued
CONDITION_WARNING = 1e12

#: Range basis of each domain basis
RANGE_BASIS = {"TW": "T_plain", "WU": "U_plain"}

#: Domain basis per problem type
PROBLEM_BASIS = {"dirichlet": "TW", "neumann": "WU"}

PDE_TAGS = {"laplace": 0, "helmholtz": 1, "elastic": 2}
PROBLEM_TAGS = {"dirichlet": 0, "neumann": 1}

ARCW_MAGIC = b"ARCW"
ARCW_VERSION = 1


def condition4_ok(m, alpha, s):
    """
    Whether a ``C^{m,alpha}`` arc supports the Sobolev order ``s``: ``s + 5/2 < m + alpha`` when
    ``s > -1/2`` and ``3/2 - s < m + alpha`` otherwise.
    """
    if s > -0.5:
        return s + 2.5 < m + alpha
    return 1.5 - s < m + alpha


def default_order(problem):
    """
    The energy-scale Sobolev order used for diagnostics: -1/2 for Dirichlet, +1/2 for Neumann.
    """
    return -0.5 if problem == "dirichlet" else 0.5


def _checkProblem(problem):
    if problem not in PROBLEM_BASIS:
        raise InvalidArgument("Unknown problem %r, expected dirichlet or neumann" % (problem,))


class OperatorBlock:
    """
    One Galerkin block: ``matrix`` maps domain coefficients (flattened component-major) to range
    coefficients.
    """

    def __init__(self, matrix, domain_basis, range_basis, arc_pair=(0, 0), components=1):
        matrix = np.asarray(matrix, dtype=complex)
        if not np.all(np.isfinite(matrix)):
            raise InvalidKernel("Operator block %s contains NaN or Inf" % (arc_pair,))
        self.matrix = matrix
        self.domain_basis = domain_basis
        self.range_basis = range_basis
        self.arc_pair = tuple(arc_pair)
        self.components = components

    @property
    def N(self):
        return self.matrix.shape[1] // self.components - 1

    def apply(self, density):
        """
        The block's action on a density in its domain basis.
        """
        if density.basis != self.domain_basis:
            raise InvalidArgument("Block expects %s densities, got %s" % (self.domain_basis, density.basis))
        c = density.truncated(self.N).coeffs.reshape(-1)
        out = self.matrix @ c
        return SpectralDensity(out.reshape(self.components, -1), self.range_basis)

    def decay(self):
        """
        Fitted geometric decay ``(rho, residual)`` of the trailing row norms.
        """
        rows = np.linalg.norm(self.matrix.reshape(self.components, -1, self.matrix.shape[1]), axis=(0, 2))
        return decay_rate(rows)

    def __repr__(self):
        return "OperatorBlock(%s -> %s, pair=%s, shape=%s)" % (
            self.domain_basis,
            self.range_basis,
            self.arc_pair,
            self.matrix.shape,
        )


# --- kernel expansions ---------------------------------------------------------------------------


def _coefficients2d(values):
    # classical Chebyshev coefficients F[..., k, l] of samples on the first-kind tensor grid
    values = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise InvalidKernel("Kernel samples contain NaN or Inf")
    a = dct_coefficients(values)
    return np.swapaxes(dct_coefficients(np.swapaxes(a, -1, -2)), -1, -2)


def _trim(F):
    big = np.abs(F).max() if F.size else 0.0
    if big == 0:
        return np.zeros(F.shape[:-2] + (1, 1), dtype=complex)
    mask = np.abs(F) > TRUNCATION * big
    lead = tuple(range(F.ndim - 2))
    rows = np.nonzero(mask.any(axis=lead + (F.ndim - 1,)))[0]
    cols = np.nonzero(mask.any(axis=lead + (F.ndim - 2,)))[0]
    return F[..., : rows[-1] + 1, : cols[-1] + 1]


def _grid(n, oversample):
    return chebyshev_nodes(max(2, int(oversample * n)))


def kernel_coefficients(f, n, oversample=2):
    """
    Trimmed 2D Chebyshev coefficients of a vectorized kernel ``f(t, tau)``, sampled on a tensor grid
    of ``oversample * n`` first-kind nodes.
    """
    t = _grid(n, oversample)
    T, TAU = np.meshgrid(t, t, indexing="ij")
    return _trim(_coefficients2d(f(T, TAU)))


def _pad(F, n):
    out = np.zeros(F.shape[:-2] + (n, n), dtype=complex)
    a, b = min(n, F.shape[-2]), min(n, F.shape[-1])
    out[..., :a, :b] = F[..., :a, :b]
    return out


def _momentScaling(n):
    # int T̂_m T_k / w dt = sigma_m delta_mk
    sigma = np.full(n, np.sqrt(np.pi / 2))
    sigma[0] = np.sqrt(np.pi)
    return sigma


def smooth_matrix(F, n):
    """
    Galerkin matrix of the smooth path from 2D coefficients ``F``.
    """
    sigma = _momentScaling(n)
    return sigma[:, None] * _pad(F, n) * sigma[None, :]


def log_eigenvalues(n):
    """
    ``-pi log 2, -pi, -pi/2, ..., -pi/(n-1)``: the log kernel acting on ``T_j / w``.
    """
    lam = np.empty(n)
    lam[0] = -np.pi * np.log(2.0)
    lam[1:] = -np.pi / np.arange(1, n)
    return lam


def log_matrix(F, n):
    """
    Galerkin matrix of the log path from the 2D coefficients ``F`` of the smooth factor.
    """
    Kr, Kc = F.shape
    J = n + Kr + Kc
    theta = (2 * np.arange(J) + 1) * np.pi / (2 * J)
    Fv = np.cos(np.outer(theta, np.arange(Kr))) @ F
    top = Kc + n - 1
    Cj = log_eigenvalues(top) * np.cos(np.outer(theta, np.arange(top)))
    cols = np.arange(n)
    R = np.zeros((J, n), dtype=complex)
    # T_l T_n = (T_{l+n} + T_{|l-n|}) / 2
    for l in range(Kc):
        R += Fv[:, l, None] * (Cj[:, l + cols] + Cj[:, np.abs(l - cols)])
    Tm = np.cos(np.outer(theta, cols))
    classical = (np.pi / (2 * J)) * (Tm.T @ R)
    s = orthonormal_scaling(n - 1)
    return s[:, None] * classical * s[None, :]


@functools.lru_cache(maxsize=32)
def log_moments(n):
    """
    The log path of ``f = 1``, i.e. ``diag(s_m^2 pi_m Lambda_m)`` in orthonormal scaling. Read-only.
    """
    M = log_matrix(np.ones((1, 1), dtype=complex), n)
    M.setflags(write=False)
    return M


@functools.lru_cache(maxsize=64)
def _timesT(a):
    # (a+1) x a matrix of multiplication by t on classical coefficients
    X = np.zeros((a + 1, a))
    for k in range(a):
        e = np.zeros(k + 1)
        e[k] = 1
        X[: k + 2, k] = chebyshev.chebmulx(e)
    return X


def times_square(F):
    """
    Coefficients of ``(t - tau)^2 f`` from those of ``f``, along the last two axes.
    """
    a, b = F.shape[-2:]
    Xa, Xb = _timesT(a), _timesT(b)
    X2a, X2b = _timesT(a + 1) @ Xa, _timesT(b + 1) @ Xb
    out = np.zeros(F.shape[:-2] + (a + 2, b + 2), dtype=complex)
    out[..., :, :b] += X2a @ F
    out[..., : a + 1, : b + 1] -= 2 * (Xa @ F @ Xb.T)
    out[..., :a, :] += F @ X2b.T
    return out


def logsq_matrix(F, n):
    return log_matrix(times_square(F), n)


def _blocks(F, n, path):
    # applies a scalar path to every component of (c, d, k, l) coefficients
    c, d = F.shape[:2]
    out = np.zeros((c * n, d * n), dtype=complex)
    for i in range(c):
        for j in range(d):
            out[i * n : (i + 1) * n, j * n : (j + 1) * n] = path(_trim(F[i, j]), n)
    return out


def _asMatrixKernel(values):
    values = np.asarray(values, dtype=complex)
    return values if values.ndim == 4 else values[None, None]


def samples_matrix(samples, n):
    """
    Galerkin matrix of :class:`~arcwave.kernels.KernelSamples` (smooth part plus log part).
    """
    regular = _asMatrixKernel(samples.regular)
    out = _blocks(_coefficients2d(regular), n, smooth_matrix)
    logcoef = _asMatrixKernel(samples.logcoef)
    if np.any(logcoef != 0):
        out += _blocks(_coefficients2d(logcoef), n, log_matrix)
    return out


def _checkN(N):
    if int(N) != N or N < 0:
        raise InvalidArgument("N must be a nonnegative integer, got %r" % (N,))
    return int(N)


def _wuSandwich(M, N, components=1):
    # C^T M C for an (N+3)-coefficient TW matrix
    C = np.kron(np.eye(components), conversion_matrix(N))
    return C.T @ M @ C


def _restrict(M, n, rows, cols, components):
    M = M.reshape(components, n, components, n)
    return M[:, :rows, :, :cols].reshape(components * rows, components * cols)


# --- the canonical operators ---------------------------------------------------------------------


def _canonical(f, N, basis, path, oversample):
    N = _checkN(N)
    if basis not in RANGE_BASIS:
        raise InvalidArgument("Domain basis must be TW or WU, got %r" % (basis,))
    n = N + 1 if basis == "TW" else N + 3
    F = kernel_coefficients(f, n, oversample)
    M = path(F, n)
    if basis == "WU":
        M = _wuSandwich(M, N)
    return OperatorBlock(M, basis, RANGE_BASIS[basis])


def assemble_smooth(f, N, basis="TW", oversample=2):
    """
    Galerkin block of ``(R_f u)(t) = int f(t,tau) u(tau) dtau`` for a vectorized kernel ``f``::

        block = assemble_smooth(lambda t, tau: t * tau, N=8)
    """
    return _canonical(f, N, basis, smooth_matrix, oversample)


def assemble_log(f, N, basis="TW", oversample=2):
    """
    Galerkin block of ``int log|t-tau| f(t,tau) u(tau) dtau``.
    """
    return _canonical(f, N, basis, log_matrix, oversample)


def assemble_logsq(f, N, basis="TW", oversample=2):
    """
    Galerkin block of ``int log|t-tau| (t-tau)^2 f(t,tau) u(tau) dtau``.
    """
    return _canonical(f, N, basis, logsq_matrix, oversample)


def _selfGeometry(arc, n, oversample):
    t = _grid(n, oversample)
    return PairGeometry.on_grid(arc, arc, t, same=True)


def _vSelfMatrix(geom, split, n):
    regular, taylor = self_split_samples(split, geom)
    regular = _asMatrixKernel(regular)
    taylor = _asMatrixKernel(taylor)
    components = regular.shape[0]
    F1_0 = np.broadcast_to(np.asarray(split.F1_at_zero, dtype=complex), (components, components))
    out = _blocks(_coefficients2d(regular), n, smooth_matrix)
    out += 2 * np.kron(F1_0, log_moments(n))
    out += 2 * _blocks(_coefficients2d(taylor), n, logsq_matrix)
    return out


def assemble_V_self(arc, split, N, oversample=2):
    """
    The weakly singular self block, from the split ``G = G_R + 2 F1(0) log|t-tau|
    + 2 (t-tau)^2 log|t-tau| f_S2``: the smooth path on ``G_R``, the precomputed log moments scaled
    by ``2 F1(0)`` and the log-square path on ``f_S2``. TW domain, W-scale range.
    """
    N = _checkN(N)
    n = N + 1
    matrix = _vSelfMatrix(_selfGeometry(arc, n, oversample), split, n)
    components = 2 if isinstance(split, ElasticSplit) else 1
    _log.debug("Assembled V self block, N=%d, components=%d", N, components)
    return OperatorBlock(matrix, "TW", "T_plain", components=components)


def _crossGeometry(arc_i, arc_j, n, oversample):
    t = _grid(n, oversample)
    return PairGeometry.on_grid(arc_i, arc_j, t, same=False)


def assemble_V_cross(arc_i, arc_j, kernel, N, oversample=2):
    """
    The weakly singular block between two disjoint arcs: the smooth path on
    ``G(r_i(t), r_j(tau))``. ``kernel`` is a split (see :mod:`arcwave.kernels`).

    Raises:
        :class:`~arcwave.errors.DegenerateGeometry`: the arcs touch.
    """
    N = _checkN(N)
    n = N + 1
    matrix = samples_matrix(kernel.sample(_crossGeometry(arc_i, arc_j, n, oversample)), n)
    components = 2 if isinstance(kernel, ElasticSplit) else 1
    return OperatorBlock(matrix, "TW", "T_plain", components=components)


def _wHelmholtz(geom, split, N, same):
    n = N + 3
    if same:
        V = _vSelfMatrix(geom, split, n)
    else:
        V = samples_matrix(split.sample(geom), n)
    M = samples_matrix(maue_helmholtz_samples(split, geom), n)
    D = derivative_matrix(N)
    return D.T @ V[: N + 2, : N + 2] @ D + _wuSandwich(M, N)


def _wElastic(geom, split, N):
    n = N + 3
    G1, G2, G3, G4 = (samples_matrix(k, n) for k in elastic_maue_samples(split, geom))
    D = np.kron(np.eye(2), derivative_matrix(N))
    C = np.kron(np.eye(2), conversion_matrix(N))
    M2 = _restrict(G2, n, N + 2, N + 2, 2)
    M3 = _restrict(G3, n, N + 3, N + 2, 2)
    M4 = _restrict(G4, n, N + 2, N + 3, 2)
    return C.T @ G1 @ C + D.T @ M2 @ D + C.T @ M3 @ D + D.T @ M4 @ C


def assemble_W_block(arc_i, arc_j, params, N, same=None, oversample=2):
    """
    The hypersingular block in its Maue form, WU domain and Y-scale range. For Helmholtz
    ``<W phi, theta> = int int G phi' theta' + G~ phi theta`` with ``G~ = -kappa^2 (a.b) G``, i.e.
    ``D^T V D + C^T M C`` with ``D`` the WU derivative and ``C`` the WU to TW conversion. For
    elasticity the four-kernel weak form of :func:`~arcwave.kernels.elastic_maue_samples`.
    """
    N = _checkN(N)
    same = (arc_i is arc_j) if same is None else same
    split = params.split()
    n = N + 3
    if same:
        geom = _selfGeometry(arc_i, n, oversample)
    else:
        geom = _crossGeometry(arc_i, arc_j, n, oversample)
    if params.kind == "elastic":
        matrix, components = _wElastic(geom, split, N), 2
    else:
        matrix, components = _wHelmholtz(geom, split, N, same), 1
    return OperatorBlock(matrix, "WU", "U_plain", components=components)


# --- block systems -------------------------------------------------------------------------------


class BlockSystem:
    """
    The ``M x M`` block Galerkin system of a problem on ``M`` arcs.
    """

    def __init__(self, blocks, pde, problem, N, params=None):
        _checkProblem(problem)
        self.blocks = [list(row) for row in blocks]
        self.pde = pde
        self.problem = problem
        self.N = N
        self.params = params
        if any(len(row) != len(self.blocks) for row in self.blocks):
            raise InvalidArgument("A block system needs a square block layout")
        basis = PROBLEM_BASIS[problem]
        for row in self.blocks:
            for b in row:
                if b.domain_basis != basis or b.N != N:
                    raise InvalidArgument("Block %s does not match the system (%s, N=%d)" % (b, basis, N))

    @property
    def M(self):
        return len(self.blocks)

    @property
    def components(self):
        return self.blocks[0][0].components

    @property
    def domain_basis(self):
        return PROBLEM_BASIS[self.problem]

    @property
    def range_basis(self):
        return RANGE_BASIS[self.domain_basis]

    def matrix(self):
        return np.block([[b.matrix for b in row] for row in self.blocks])

    def __repr__(self):
        return "BlockSystem(M=%d, N=%d, pde=%s, problem=%s)" % (self.M, self.N, self.pde, self.problem)


def _assembleBlock(arcs, params, split, problem, N, i, j, oversample):
    try:
        if problem == "neumann":
            block = assemble_W_block(arcs[i], arcs[j], params, N, same=(i == j), oversample=oversample)
        elif i == j:
            block = assemble_V_self(arcs[i], split, N, oversample)
        else:
            block = assemble_V_cross(arcs[i], arcs[j], split, N, oversample)
    except DegenerateGeometry as e:
        raise type(e)("Block (%d, %d): %s" % (i, j, e), pair=(i, j)) from e
    block.arc_pair = (i, j)
    return block


def assemble_system(arcs, params, problem, N, s=None, executor=None, oversample=2):
    """
    Assembles the full block system: V blocks for Dirichlet, W blocks for Neumann. Each arc's
    smoothness must support the diagnostic order ``s`` (default :func:`default_order`).

    Args:
        executor: optional :class:`concurrent.futures.Executor`; blocks are then assembled in
            parallel. The result does not depend on scheduling.
    """
    _checkProblem(problem)
    N = _checkN(N)
    arcs = list(arcs)
    if not arcs:
        raise InvalidArgument("Need at least one arc")
    s = default_order(problem) if s is None else s
    for k, arc in enumerate(arcs):
        if not condition4_ok(arc.m, arc.alpha, s):
            raise InvalidArgument(
                "Arc %d (m=%d, alpha=%g) does not support Sobolev order s=%g" % (k, arc.m, arc.alpha, s)
            )
    split = params.split()
    M = len(arcs)
    pairs = [(i, j) for i in range(M) for j in range(M)]

    def build(pair):
        return _assembleBlock(arcs, params, split, problem, N, pair[0], pair[1], oversample)

    built = list(executor.map(build, pairs)) if executor is not None else [build(p) for p in pairs]
    blocks = [built[i * M : (i + 1) * M] for i in range(M)]
    _log.debug("Assembled %s system on %d arcs, N=%d", problem, M, N)
    return BlockSystem(blocks, params.kind, problem, N, params)


def solve_system(system, rhs):
    """
    Solves the block system by dense LU with partial pivoting. Returns the densities (one per arc,
    domain basis) and a diagnostics dict with the condition number, smallest singular value and
    relative residual.

    Raises:
        :class:`~arcwave.errors.NonUniqueness`: the matrix is singular to working precision.
    """
    rhs = list(rhs)
    if len(rhs) != system.M:
        raise InvalidArgument("Need one right-hand side per arc (%d), got %d" % (system.M, len(rhs)))
    for r in rhs:
        if r.basis != system.range_basis:
            raise InvalidArgument("Right-hand sides must be %s densities, got %s" % (system.range_basis, r.basis))
    A = system.matrix()
    b = np.concatenate([r.truncated(system.N).coeffs.reshape(-1) for r in rhs])
    sv = scipy.linalg.svdvals(A)
    smax, smin = sv[0], sv[-1]
    cond = np.inf if smin == 0 else smax / smin
    if smin == 0 or cond > 1 / np.finfo(float).eps:
        raise NonUniqueness("Galerkin matrix is singular (condition number %.3g)" % cond)
    if cond > CONDITION_WARNING:
        _log.warning("Ill-conditioned system, condition number %.3g", cond)
        warnings.warn("Condition number %.3g exceeds %.0e" % (cond, CONDITION_WARNING), NearSingularWarning)
    x = scipy.linalg.lu_solve(scipy.linalg.lu_factor(A), b)
    bnorm = np.linalg.norm(b)
    residual = np.linalg.norm(A @ x - b) / bnorm if bnorm > 0 else np.linalg.norm(A @ x)
    _log.debug("Solved system of size %d, cond=%.3g, residual=%.3g", A.shape[0], cond, residual)
    per = system.components * (system.N + 1)
    densities = [
        SpectralDensity(x[k * per : (k + 1) * per].reshape(system.components, -1), system.domain_basis)
        for k in range(system.M)
    ]
    diagnostics = {"condition": float(cond), "smin": float(smin), "residual": float(residual)}
    return densities, diagnostics


# --- direct quadrature ---------------------------------------------------------------------------


def _densityOnCircle(density, phi):
    # u(cos phi) * sin(phi) for TW/WU densities, as the integrand in phi of int u dtau
    c = density.coeffs
    n = np.arange(density.N + 1)
    if density.basis == "TW":
        return np.cos(np.outer(phi, n)) @ (c * orthonormal_scaling(density.N)).T
    if density.basis == "WU":
        return (np.sin(np.outer(phi, n + 1)) * np.sin(phi)[:, None]) @ (c * np.sqrt(2 / np.pi)).T
    raise InvalidArgument("Direct quadrature supports TW and WU densities, not %s" % density.basis)


def apply_operator_quadrature(kernel, density, t, epsabs=1e-13, limit=200):
    """
    Evaluates ``int K(t, tau) u(tau) dtau`` at the points ``t`` by adaptive quadrature in
    ``tau = cos(phi)``, splitting at the singular point. ``kernel(t, tau)`` returns a scalar or a
    ``(2, 2)`` matrix per point. Slow; meant for consistency checks of the assembled blocks.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    comps = density.components
    out = np.zeros((comps, t.size), dtype=complex)
    for p, tp in enumerate(t):
        split = [float(np.arccos(np.clip(tp, -1, 1)))]

        def integrand(phi, row, part):
            phi_arr = np.atleast_1d(phi)
            K = np.asarray(kernel(tp, np.cos(phi_arr)), dtype=complex)
            K = K.reshape((comps, comps, -1)) if comps == 2 else K.reshape((1, 1, -1))
            u = _densityOnCircle(density, phi_arr).T
            value = np.einsum("jk,jk->k", K[row], u)[0]
            return value.real if part == 0 else value.imag

        for row in range(comps):
            re = scipy.integrate.quad(integrand, 0, np.pi, args=(row, 0), points=split, epsabs=epsabs, limit=limit)[0]
            im = scipy.integrate.quad(integrand, 0, np.pi, args=(row, 1), points=split, epsabs=epsabs, limit=limit)[0]
            out[row, p] = re + 1j * im
    return out[0] if comps == 1 else out


# --- binary dump ---------------------------------------------------------------------------------


def save_system(system, path):
    """
    Writes the ``ARCW`` dump: magic, then little-endian u32 version, M, N, pde tag, components and
    problem tag, then the blocks row-major as complex128 in ``(i, j)`` order.
    """
    header = np.array(
        [
            ARCW_VERSION,
            system.M,
            system.N,
            PDE_TAGS[system.pde],
            system.components,
            PROBLEM_TAGS[system.problem],
        ],
        dtype="<u4",
    )
    with open(path, "wb") as f:
        f.write(ARCW_MAGIC)
        f.write(header.tobytes())
        for row in system.blocks:
            for b in row:
                f.write(np.ascontiguousarray(b.matrix, dtype="<c16").tobytes())
    _log.debug("Wrote %s to %s", system, path)


def load_system(path):
    """
    Reads a :func:`save_system` dump back into a :class:`BlockSystem` (without kernel parameters).
    """
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != ARCW_MAGIC:
        raise InvalidArgument("%s is not an ARCW dump" % path)
    header = np.frombuffer(data, dtype="<u4", count=6, offset=4)
    version, M, N, pde, components, problem = (int(v) for v in header)
    if version != ARCW_VERSION:
        raise InvalidArgument("Unsupported ARCW version %d" % version)
    try:
        pde = {v: k for k, v in PDE_TAGS.items()}[pde]
        problem = {v: k for k, v in PROBLEM_TAGS.items()}[problem]
    except KeyError:
        raise InvalidArgument("Unknown pde or problem tag in %s" % path)
    size = components * (N + 1)
    body = np.frombuffer(data, dtype="<c16", offset=28)
    if body.size != M * M * size * size:
        raise InvalidArgument("Truncated ARCW dump %s" % path)
    body = body.reshape(M, M, size, size)
    basis = PROBLEM_BASIS[problem]
    blocks = [
        [OperatorBlock(body[i, j].copy(), basis, RANGE_BASIS[basis], (i, j), components) for j in range(M)]
        for i in range(M)
    ]
    return BlockSystem(blocks, pde, problem, N)
