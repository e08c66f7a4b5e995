import numpy as np
import pytest
from numpy.testing import assert_allclose

from arcwave.errors import DegenerateGeometry, InvalidArgument
from arcwave.geometry import (
    Arc,
    ParametricArcFamily,
    check_family,
    delta_cross,
    delta_self,
    eval_arc,
    eval_tangent,
    materialize,
    min_separation,
    q_function,
    squared_distance,
    tube_samples,
    verify_tube_positivity,
)

FLAT = Arc.line((-1, 0), (1, 0))
QUARTER = Arc.from_function(lambda t: (np.cos(np.pi * (t + 1) / 4), np.sin(np.pi * (t + 1) / 4)))


def _bump(n, scale):
    # y(t) = scale * (1 - t^2) T_n(t), vanishing at the tips
    c = np.zeros(n + 3)
    c[n] = 1
    y = np.polynomial.chebyshev.chebmul(c, [0.5, 0, -0.5])
    return Arc([0], y * scale)


def test_line_endpoints():
    arc = Arc.line((1, 2), (3, 6))
    assert_allclose(eval_arc(arc, [-1, 1]).real, [[1, 3], [2, 6]])
    assert_allclose(eval_tangent(arc, [0.3]).real[:, 0], [1, 2])


def test_from_function_trims():
    arc = Arc.from_function(lambda t: (t, t * t))
    assert arc.degree == 2
    assert arc.is_real


def test_arc_arithmetic_and_dict():
    arc = QUARTER + FLAT * 0.5
    assert_allclose(eval_arc(arc, [0.2]), eval_arc(QUARTER, [0.2]) + 0.5 * eval_arc(FLAT, [0.2]))
    assert Arc.fromDict(arc.toDict()) == arc
    with pytest.raises(InvalidArgument):
        Arc.fromDict({"x_coeffs": [[0, 0]]})
    with pytest.raises(InvalidArgument):
        Arc([np.nan], [0])


def test_q_function_diagonal():
    t = np.linspace(-0.9, 0.9, 7)
    a = eval_tangent(QUARTER, t)
    assert_allclose(q_function(QUARTER, t, t), a[0] ** 2 + a[1] ** 2, rtol=1e-12)
    # Q(t, tau) = d^2 / (t - tau)^2 off the diagonal
    tau = t + 1e-6
    Q = q_function(QUARTER, t, tau)
    assert_allclose(Q, a[0] ** 2 + a[1] ** 2, rtol=1e-5)
    d2 = squared_distance(QUARTER, QUARTER, np.array([0.1]), np.array([0.7]))
    assert_allclose(q_function(QUARTER, np.array([0.1]), np.array([0.7])), d2 / 0.36, rtol=1e-12)


def test_delta_self_examples():
    assert_allclose(delta_self([FLAT]), np.sqrt(2) - 1, atol=1e-14)
    assert_allclose(delta_self([FLAT * 2]), 2 * (np.sqrt(2) - 1), atol=1e-14)
    assert_allclose(delta_self([FLAT, FLAT * 2]), np.sqrt(5) - 2, atol=1e-14)


def test_delta_self_degenerate():
    with pytest.raises(DegenerateGeometry):
        delta_self([Arc([0, 0], [1, 0])])
    with pytest.raises(InvalidArgument):
        delta_self([])


def test_delta_cross_examples():
    upper = Arc.line((-1, 1), (1, 1))
    S = 1 + np.sqrt(2)
    expected = (np.sqrt(1 + S * S) - S) / 2
    d1, d2 = delta_cross([FLAT], [upper])
    assert_allclose([d1, d2], expected, atol=1e-14)

    far = Arc.line((-1, 10), (1, 10))
    assert delta_cross([FLAT], [far])[0] > d1


def test_delta_cross_facing_endpoints():
    shifted = Arc.line((2, 0), (4, 0))
    assert_allclose(min_separation(FLAT, shifted), 1.0, atol=1e-14)


def test_touching_arcs():
    kinked = Arc.line((1, 0), (2, 1))
    with pytest.raises(DegenerateGeometry) as info:
        delta_cross([FLAT], [kinked])
    assert info.value.pair == (0, 0)


def test_family_parameters():
    family = ParametricArcFamily([FLAT, QUARTER], [[_bump(0, 0.1), _bump(1, 0.05)], [_bump(0, 0.01)]])
    assert family.M == 2
    assert family.n_parameters == 4
    weights = family.parameter_weights()
    assert weights[3] == 0
    assert np.all(weights[:3] > 0)
    arcs = materialize(family, [0.5, 0, -1, 1])
    assert arcs[0] == FLAT + _bump(0, 0.1) * 0.5 + _bump(1, 0.05) * -1
    assert arcs[1] == QUARTER
    with pytest.raises(InvalidArgument):
        materialize(family, [2.0])
    again = ParametricArcFamily.fromDict(family.toDict())
    assert_allclose(again.parameter_weights(), weights)


def test_family_validation():
    with pytest.raises(InvalidArgument):
        ParametricArcFamily([], [])
    with pytest.raises(InvalidArgument):
        ParametricArcFamily([FLAT], [[]], p=1.5)
    with pytest.raises(InvalidArgument):
        ParametricArcFamily([FLAT], [[FLAT]], b=[[1, 2]])


def test_check_family_passes():
    family = ParametricArcFamily([FLAT], [[_bump(n, 0.1 * 2.0 ** -n) for n in range(3)]])
    report = check_family(family)
    assert report.passed
    assert 0 < report.zeta < 1
    assert 0 < report.delta_self[0] < 0.9 * (np.sqrt(2) - 1)
    assert report.toDict()["pass"]


def test_check_family_tangent_gate():
    # perturbation tangents larger than the nominal tangent
    family = ParametricArcFamily([FLAT], [[_bump(1, 2.0)]])
    report = check_family(family)
    assert not report.passed
    assert not report.conditions["tangent"]
    assert report.zeta > 1


def test_check_family_separation_gate():
    upper = Arc.line((-1, 0.1), (1, 0.1))
    family = ParametricArcFamily([FLAT, upper], [[Arc([0], [0.2])], []])
    report = check_family(family)
    assert not report.conditions["separation"]
    assert report.delta_cross[(0, 1)] == 0


def test_tube_samples_reproducible():
    a = [s[0].coeffs for s in tube_samples([QUARTER], 0.1, 5, seed=7)]
    b = [s[0].coeffs for s in tube_samples([QUARTER], 0.1, 5, seed=7)]
    assert len(a) == 6
    assert_allclose(a[0], QUARTER.coeffs)
    for x, y in zip(a, b):
        assert_allclose(x, y)


@pytest.mark.timeout(120)
def test_tube_positivity():
    lower = Arc.line((-1, -2), (1, -2))
    arcs = [lower, QUARTER]
    delta = 0.9 * min(delta_self([a]) for a in arcs)
    delta = min(delta, 0.9 * delta_cross([lower], [QUARTER])[0])
    report = verify_tube_positivity(arcs, delta, 200, seed=0, grid=64, cross=True)
    assert report.passed
    assert report.n_samples == 200
