import concurrent.futures

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from arcwave.errors import DegenerateGeometry, InvalidArgument
from arcwave.geometry import SAFETY, Arc, ParametricArcFamily, delta_self, eval_tangent
from arcwave.holomorphy import (
    SweepResult,
    admissible_polyradius,
    bpe_certificate,
    cauchy_riemann_check,
    certificate_report,
    complex_step_check,
    energy_scaling,
    largest_passing_delta,
    sweep_parameter,
    tube_operator_bound,
)
from arcwave.kernels import HelmholtzParams
from arcwave.operators import assemble_V_self
from arcwave.solver import FarFieldFunctional, PlaneWave
from arcwave.verify import QUARTER

FLAT = Arc.line((-1, 0), (1, 0))
KAPPA = HelmholtzParams(1.0)
INCIDENT = PlaneWave(KAPPA, (0, 1))
FAR = FarFieldFunctional((0, 1))
N = 16


def _bump(n, scale):
    # y(t) = scale * (1 - t^2) T_n(t)
    c = np.zeros(n + 1)
    c[n] = 1
    return Arc([0], np.polynomial.chebyshev.chebmul(c, [0.5, 0, -0.5]) * scale)


def _family(*scales, b=None):
    return ParametricArcFamily([FLAT], [[_bump(n, s) for n, s in enumerate(scales)]], b=None if b is None else [b])


def test_admissible_polyradius_examples():
    assert admissible_polyradius([1, 0, 0], 0.5, [1.4, 1.4, 1.4])
    assert not admissible_polyradius([1, 1], 0.5, [1.3, 1.3])
    # inactive entries may carry any radius
    assert admissible_polyradius([1, 0], 0.5, [1.2, 0.5])


def test_admissible_polyradius_boundary():
    eps = 0.3
    b = 2.0 ** -np.arange(6)
    # rho_j - 1 = c 2^{j/2}, with c chosen so that the sum is exactly eps
    c = eps / np.sum(b * 2.0 ** (np.arange(6) * 0.5))
    rho = 1 + c * 2.0 ** (np.arange(6) * 0.5)
    assert admissible_polyradius(b, eps, rho)
    assert not admissible_polyradius(b, eps * (1 - 1e-6), rho)


def test_admissible_polyradius_rejects_small_radii():
    with pytest.raises(InvalidArgument):
        admissible_polyradius([1, 1], 0.5, [1.0, 1.2])


def test_constant_family():
    family = ParametricArcFamily([FLAT], [[Arc([0], [0])]])
    result = sweep_parameter(family, KAPPA, INCIDENT, "dirichlet", FAR, 0, 7, N=N)
    assert result.rho == np.inf
    assert result.n_nodes == 7
    assert_allclose(result.values, result.values[0], rtol=1e-14)
    assert result.toDict()["rho_hat"] is None


@pytest.mark.timeout(300)
def test_sweep_decays_geometrically():
    family = _family(0.1)
    coarse = sweep_parameter(family, KAPPA, INCIDENT, "dirichlet", FAR, 0, 17, N=N)
    assert coarse.rho > 1
    assert coarse.residual < 0.1
    with concurrent.futures.ThreadPoolExecutor(4) as pool:
        fine = sweep_parameter(family, KAPPA, INCIDENT, "dirichlet", FAR, 0, 33, N=N, executor=pool)
    assert_allclose(fine.rho, coarse.rho, rtol=0.05)


def test_sweep_rejects_bad_index():
    with pytest.raises(InvalidArgument):
        sweep_parameter(_family(0.1), KAPPA, INCIDENT, "dirichlet", FAR, 3, 5, N=N)


def test_tangent_gate_before_sweep():
    family = _family(2.0, 0.0)
    calls = []

    class Counting(FarFieldFunctional):
        def __call__(self, arcs, solution):
            calls.append(1)
            return super().__call__(arcs, solution)

    with pytest.raises(DegenerateGeometry):
        bpe_certificate(family, KAPPA, INCIDENT, "dirichlet", Counting((0, 1)), [0], [0.1], n_nodes=5, N=N)
    assert calls == []


def test_zero_direction():
    check = complex_step_check(_family(0.05), KAPPA, INCIDENT, "dirichlet", FAR, [Arc([0], [0])], [1e-2, 1e-4], N=N)
    assert np.all(check.complex_step == 0)
    assert np.all(check.central == 0)
    assert check.max_gap == 0


def test_complex_step_agrees_with_central():
    v = _bump(0, 0.05)
    check = complex_step_check(_family(0.05), KAPPA, INCIDENT, "dirichlet", FAR, [v], [1e-2, 1e-4], N=N)
    assert check.gaps[-1] <= 1e-5
    assert abs(check.complex_step[0]) > 0
    # the complex step is stable across step sizes
    assert_allclose(check.complex_step[0], check.complex_step[1], rtol=1e-3)
    assert len(check.toDict()["gaps"]) == 2


def test_linearity():
    v = _bump(0, 0.05)
    family = _family(0.05)
    one = complex_step_check(family, KAPPA, INCIDENT, "dirichlet", FAR, [v], [1e-5], N=N)
    two = complex_step_check(family, KAPPA, INCIDENT, "dirichlet", FAR, [v * 2], [1e-5], N=N)
    assert_allclose(two.complex_step[0], 2 * one.complex_step[0], rtol=1e-8)


def test_cauchy_riemann():
    v = _bump(0, 0.05)
    dv, div, gap = cauchy_riemann_check(_family(0.05), KAPPA, INCIDENT, "dirichlet", FAR, [v], h=1e-5, N=N)
    assert abs(dv) > 0
    assert gap < 1e-7
    assert_allclose(div, 1j * dv, rtol=1e-7)


def _randomDirection(rng, radius):
    # a cubic perturbation whose tangent is half the tube radius
    v = Arc(rng.standard_normal(4), rng.standard_normal(4))
    size = np.abs(eval_tangent(v, np.linspace(-1, 1, 256))).max()
    return v * (0.5 * radius / size)


@pytest.mark.timeout(300)
def test_random_directions():
    family = ParametricArcFamily([QUARTER], [[Arc([0], [0])]])
    radius = SAFETY * delta_self([QUARTER])
    rng = np.random.default_rng(7)
    for _ in range(5):
        v = [_randomDirection(rng, radius)]
        check = complex_step_check(family, KAPPA, INCIDENT, "neumann", FAR, v, [1e-4], N=48)
        assert check.max_gap <= 1e-5, check
        dv, div, gap = cauchy_riemann_check(family, KAPPA, INCIDENT, "neumann", FAR, v, h=1e-4, N=48)
        assert abs(dv) > 0
        assert gap <= 1e-7


def test_complex_step_errors():
    family = _family(0.05)
    v = [_bump(0, 0.05)]
    with pytest.raises(InvalidArgument):
        complex_step_check(family, KAPPA, INCIDENT, "dirichlet", FAR, v, [1e-4, 1e-2], N=N)
    with pytest.raises(InvalidArgument):
        complex_step_check(family, KAPPA, INCIDENT, "dirichlet", FAR, v, [], N=N)
    with pytest.raises(InvalidArgument):
        complex_step_check(family, KAPPA, INCIDENT, "dirichlet", FAR, [_bump(0, 1.0)], [1e-4], N=N)
    with pytest.raises(InvalidArgument):
        complex_step_check(family, KAPPA, INCIDENT, "dirichlet", FAR, v * 2, [1e-4], N=N)
    with pytest.raises(InvalidArgument):
        cauchy_riemann_check(family, KAPPA, INCIDENT, "dirichlet", FAR, [_bump(0, 1.0)], N=N)


def _sweep(index, rho, residual=1e-3):
    return SweepResult(index, [0.0], [0.0], [0.0], rho, residual)


def test_certificate_report():
    family = _family(0.1, 0.05, 0.025, b=[0.1, 0.05, 0.025])
    report = certificate_report(family, [_sweep(0, 3.0), _sweep(1, 5.0), _sweep(2, np.inf)], [0.01, 10.0], 16, 9)
    assert report["pass"]
    assert report["monotone"]
    assert report["indices"] == [0, 1, 2]
    assert report["rho_hat"] == [3.0, 5.0, None]
    assert report["pass_flags"] == [True, True, True]
    assert report["provenance"]["N"] == 16
    small, large = report["epsilon_scan"]
    # a small epsilon only asks for radii close to 1
    assert small["rho_admissible"]
    assert not large["rho_admissible"]
    assert all(np.isfinite(large["polyradius"]))


def test_certificate_report_failures():
    family = _family(0.1, 0.05, b=[0.1, 0.05])
    decreasing = certificate_report(family, [_sweep(0, 5.0), _sweep(1, 3.0)], [0.1], 16, 9)
    assert not decreasing["monotone"]
    assert not decreasing["pass"]
    flat = certificate_report(family, [_sweep(0, 0.9), _sweep(1, 3.0, residual=0.5)], [0.1], 16, 9)
    assert flat["pass_flags"] == [False, False]
    assert not flat["pass"]


@pytest.mark.timeout(900)
def test_bump_family_certificate():
    # b_j = 0.1 * 2^-j over three bumps of the flat arc
    family = _family(0.1, 0.05, 0.025, b=[0.1, 0.05, 0.025])
    with concurrent.futures.ThreadPoolExecutor(4) as pool:
        report = bpe_certificate(
            family, KAPPA, INCIDENT, "dirichlet", FAR, [0, 1, 2], [0.1], n_nodes=33, N=48, executor=pool
        )
    assert all(r < 0.1 for r in report["residuals"]), report["residuals"]
    rho = report["rho_hat"]
    assert None not in rho
    assert all(r > 1 for r in rho)
    assert rho == sorted(rho)
    assert report["pass_flags"] == [True, True, True]
    assert report["monotone"]
    assert report["pass"]


def test_energy_scaling():
    assert_allclose(energy_scaling(2, "dirichlet"), [1, 2 ** 0.25, 5 ** 0.25])
    assert_allclose(energy_scaling(1, "neumann", components=2), [1, 2 ** -0.25, 1, 2 ** -0.25])


def test_tube_operator_bound():
    block = assemble_V_self(FLAT, KAPPA.split(), 8)
    S = energy_scaling(8, "dirichlet")
    real = scipy.linalg.svdvals(S[:, None] * block.matrix * S[None, :])[0]
    assert_allclose(tube_operator_bound([FLAT], 0.0, KAPPA, 8, 3), real, rtol=1e-12)
    delta = 0.5 * SAFETY * (np.sqrt(2) - 1)
    bound = tube_operator_bound([FLAT], delta, KAPPA, 8, 5, seed=1)
    assert real <= bound < 3 * real


@pytest.mark.timeout(300)
def test_tube_operator_bound_in_delta():
    top = SAFETY * (np.sqrt(2) - 1)
    bounds = [tube_operator_bound([FLAT], f * top, KAPPA, 8, 20) for f in (0, 0.25, 0.5, 0.75, 1.0)]
    assert all(b <= c for b, c in zip(bounds, bounds[1:])), bounds
    # more samples barely move the bound
    doubled = tube_operator_bound([FLAT], 0.5 * top, KAPPA, 8, 40)
    assert bounds[2] <= doubled < 1.2 * bounds[2]


def test_largest_passing_delta():
    top = SAFETY * (np.sqrt(2) - 1)
    passes = lambda delta: delta < 0.6 * top
    best, outcomes = largest_passing_delta([FLAT], factors=(1.0, 0.25, 0.5), n_samples=10, check=passes)
    assert [o["delta"] for o in outcomes] == pytest.approx([0.25 * top, 0.5 * top, top])
    assert [o["pass"] for o in outcomes] == [True, True, False]
    assert best == pytest.approx(0.5 * top)
