import numpy as np
import pytest
from numpy.testing import assert_allclose

from arcwave.errors import DegenerateGeometry, InvalidArgument, NearSingularEvaluation
from arcwave.geometry import Arc
from arcwave.kernels import ElasticParams, HelmholtzParams, traction
from arcwave.solver import (
    FarFieldFunctional,
    MomentFunctional,
    PlaneWave,
    PointSource,
    PotentialFunctional,
    ScatteringSolution,
    eval_potential,
    far_field,
    field_grid,
    functional_from_dict,
    incident_from_dict,
    solve_scattering,
)

FLAT = Arc.line((-1, 0), (1, 0))
CIRCULAR = Arc.from_function(lambda t: (np.cos(np.pi * (t + 1) / 4), np.sin(np.pi * (t + 1) / 4)))
KAPPA = HelmholtzParams(1.0)


@pytest.fixture(scope="module")
def dirichlet_flat():
    return solve_scattering([FLAT], KAPPA, PlaneWave(KAPPA, (0, 1)), "dirichlet", 32)


@pytest.mark.timeout(120)
@pytest.mark.parametrize("problem", ["dirichlet", "neumann"])
def test_self_convergence(problem):
    incident = PlaneWave(KAPPA, (np.cos(0.3), np.sin(0.3)))
    coarse = solve_scattering([CIRCULAR], KAPPA, incident, problem, 48)
    fine = solve_scattering([CIRCULAR], KAPPA, incident, problem, 96)
    shared = fine.densities[0].coeffs[:, :49]
    assert np.max(np.abs(coarse.densities[0].coeffs - shared)) < 1e-8
    assert coarse.diagnostics["rho"] > 1.2
    assert coarse.densities[0].basis == ("TW" if problem == "dirichlet" else "WU")


def test_diagnostics(dirichlet_flat):
    d = dirichlet_flat.diagnostics
    assert set(d) >= {"condition", "smin", "residual", "rho", "fit_residual"}
    assert d["residual"] < 1e-12
    assert np.isfinite(d["condition"])


def test_boundary_condition(dirichlet_flat):
    # the total field vanishes on the arc; the single layer is continuous across it
    x = np.array([0.1, 1e-3])
    u = eval_potential([FLAT], dirichlet_flat, x)
    assert abs(u + PlaneWave(KAPPA, (0, 1)).value(x)) < 1e-2


def _heights(residual):
    # residual at 0.05 and 0.02 above the arc
    return [residual(np.array([0.1, y])) for y in (0.05, 0.02)]


def _gradient(arcs, solution, x, h=1e-4):
    # grad[..., j] = d_j u, by central differences
    u = lambda p: eval_potential(arcs, solution, p)
    steps = (np.array([h, 0.0]), np.array([0.0, h]))
    return np.stack([(u(x + e) - u(x - e)) / (2 * h) for e in steps], axis=-1)


@pytest.mark.timeout(120)
def test_neumann_boundary_condition():
    # the normal derivative of the total field vanishes on the arc
    incident = PlaneWave(KAPPA, (np.cos(0.7), np.sin(0.7)))
    solution = solve_scattering([FLAT], KAPPA, incident, "neumann", 32)
    residual = lambda x: abs(_gradient([FLAT], solution, x)[1] + incident.gradient(x)[1])
    far, near = _heights(residual)
    assert near < 0.6 * far
    assert near < 0.1 * abs(incident.gradient(np.array([0.1, 0.0]))[1])


@pytest.mark.timeout(300)
def test_elastic_dirichlet_boundary_condition():
    params = ElasticParams(2.0, 1.0, 1.0)
    incident = PlaneWave(params, (np.cos(0.7), np.sin(0.7)), "p")
    solution = solve_scattering([FLAT], params, incident, "dirichlet", 32)
    residual = lambda x: np.linalg.norm(eval_potential([FLAT], solution, x) + incident.value(x))
    far, near = _heights(residual)
    assert near < 0.6 * far
    assert near < 0.1 * np.linalg.norm(incident.value(np.array([0.1, 0.0])))


@pytest.mark.timeout(300)
def test_elastic_traction_condition():
    params = ElasticParams(2.0, 1.0, 1.0)
    incident = PlaneWave(params, (np.cos(0.7), np.sin(0.7)), "s")
    solution = solve_scattering([FLAT], params, incident, "neumann", 32)
    normal = np.array([0.0, 1.0])

    def residual(x):
        grad = _gradient([FLAT], solution, x) + incident.gradient(x)
        return np.linalg.norm(traction(params, grad, normal))

    far, near = _heights(residual)
    assert near < 0.6 * far
    assert near < 0.1 * np.linalg.norm(traction(params, incident.gradient(np.array([0.1, 0.0])), normal))


def test_helmholtz_residual(dirichlet_flat):
    h = 1e-3
    for x in ([0.3, 0.5], [-1.2, -0.6], [1.6, 0.2]):
        x = np.array(x)
        u = lambda p: eval_potential([FLAT], dirichlet_flat, p)
        lap = (u(x + [h, 0]) + u(x - [h, 0]) + u(x + [0, h]) + u(x - [0, h]) - 4 * u(x)) / (h * h)
        assert abs(-lap - u(x)) < 1e-4 * abs(u(x))


def test_far_field_asymptotics(dirichlet_flat):
    xhat = np.array([np.cos(1.1), np.sin(1.1)])
    R = 2000.0
    u = eval_potential([FLAT], dirichlet_flat, R * xhat)
    expected = np.exp(1j * R) / np.sqrt(R) * far_field([FLAT], dirichlet_flat, xhat)
    assert_allclose(u, expected, rtol=1e-2)


def test_far_field_symmetry(dirichlet_flat):
    a = far_field([FLAT], dirichlet_flat, np.array([[np.cos(0.4), -np.cos(0.4)], [np.sin(0.4), np.sin(0.4)]]))
    assert_allclose(a[0], a[1], rtol=1e-9)


def test_reciprocity():
    a, b = np.array([-0.5, 0.4]), np.array([0.9, -0.7])
    ua = solve_scattering([CIRCULAR], KAPPA, PointSource(KAPPA, a), "dirichlet", 32)
    ub = solve_scattering([CIRCULAR], KAPPA, PointSource(KAPPA, b), "dirichlet", 32)
    assert_allclose(eval_potential([CIRCULAR], ua, b), eval_potential([CIRCULAR], ub, a), rtol=1e-6)


def test_near_singular(dirichlet_flat):
    with pytest.raises(NearSingularEvaluation):
        eval_potential([FLAT], dirichlet_flat, np.array([0.2, 0.0]))
    with pytest.raises(InvalidArgument):
        solve_scattering([FLAT], KAPPA, PointSource(KAPPA, (0.5, 0.0)), "dirichlet", 8)


def test_field_grid(dirichlet_flat):
    X, Y, U = field_grid([FLAT], dirichlet_flat, (-2, 2, -1, 1), (5, 3))
    assert X.shape == Y.shape == U.shape == (3, 5)
    # the middle row lies on the arc for |x| <= 1
    assert np.all(np.isnan(U[1, 1:4]))
    assert np.all(np.isfinite(U[0]))
    assert_allclose(U[0, 1], eval_potential([FLAT], dirichlet_flat, np.array([-1.0, -1.0])))


def test_touching_arcs():
    kinked = Arc.line((1, 0), (2, 1))
    with pytest.raises(DegenerateGeometry) as info:
        solve_scattering([FLAT, kinked], KAPPA, PlaneWave(KAPPA, (0, 1)), "dirichlet", 8)
    assert info.value.pair == (0, 1)


def test_two_arcs():
    upper = Arc.line((-1, 2), (1, 2))
    solution = solve_scattering([FLAT, upper], KAPPA, PlaneWave(KAPPA, (0, 1)), "neumann", 24)
    assert len(solution.densities) == 2
    assert solution.diagnostics["residual"] < 1e-10


@pytest.mark.timeout(120)
@pytest.mark.parametrize("problem,polarization", [("dirichlet", "p"), ("neumann", "s")])
def test_elastic(problem, polarization):
    params = ElasticParams(2.0, 1.0, 1.0)
    incident = PlaneWave(params, (0, 1), polarization)
    solution = solve_scattering([FLAT], params, incident, problem, 16)
    assert solution.densities[0].components == 2
    assert solution.diagnostics["residual"] < 1e-10
    u = eval_potential([FLAT], solution, np.array([0.2, 0.7]))
    assert u.shape == (2,)
    assert np.all(np.isfinite(u))


def test_solution_dict(dirichlet_flat):
    again = ScatteringSolution.fromDict(dirichlet_flat.toDict())
    assert_allclose(again.densities[0].coeffs, dirichlet_flat.densities[0].coeffs)
    assert again.problem == "dirichlet"
    assert again.params.kappa == 1.0


def test_functionals(dirichlet_flat):
    assert_allclose(
        FarFieldFunctional((0, 1))([FLAT], dirichlet_flat), far_field([FLAT], dirichlet_flat, np.array([0.0, 1.0]))
    )
    moment = MomentFunctional()([FLAT], dirichlet_flat)
    assert_allclose(moment, np.sqrt(np.pi) * dirichlet_flat.densities[0].coeffs[0, 0])
    point = PotentialFunctional((0.3, 0.5))([FLAT], dirichlet_flat)
    assert_allclose(point, eval_potential([FLAT], dirichlet_flat, np.array([0.3, 0.5])))
    assert functional_from_dict({"kind": "moment"}).kind == "moment"
    with pytest.raises(InvalidArgument):
        functional_from_dict({"kind": "potential"})


def test_incident_from_dict():
    wave = incident_from_dict({"kind": "plane-wave", "direction": [0, 1]}, KAPPA)
    assert_allclose(wave.value(np.array([0.0, 0.5])), np.exp(0.5j))
    with pytest.raises(InvalidArgument):
        incident_from_dict({"kind": "plane-wave", "direction": [1, 1]}, KAPPA)
    with pytest.raises(InvalidArgument):
        incident_from_dict({"kind": "laser"}, KAPPA)
