import numpy as np
import pytest
from numpy.testing import assert_allclose

from arcwave.errors import InvalidArgument, SingularityError
from arcwave.geometry import Arc, PairGeometry, eval_arc
from arcwave.kernels import (
    SERIES_RADIUS,
    ElasticParams,
    HelmholtzParams,
    LaplaceParams,
    LaplaceSplit,
    elastic_double_layer_kernel,
    elastic_green,
    elastic_split,
    helmholtz_green,
    helmholtz_green_gradient,
    helmholtz_split,
    params_from_dict,
    traction,
)
from arcwave.verify import elastic_reconstruction, helmholtz_reconstruction

QUARTER = Arc.from_function(lambda t: (np.cos(np.pi * (t + 1) / 4), np.sin(np.pi * (t + 1) / 4)))


@pytest.mark.parametrize("kappa", [0.5, 1.0, 5.0])
def test_helmholtz_reconstruction(kappa):
    check = helmholtz_reconstruction(kappa)()
    assert check.passed, check


@pytest.mark.parametrize("omega", [1.0, 3.0])
def test_elastic_reconstruction(omega):
    check = elastic_reconstruction(omega)()
    assert check.passed, check


def test_helmholtz_value():
    # kappa = 2, z = 0.25 is d = 0.5
    split = helmholtz_split(HelmholtzParams(2.0))
    direct = helmholtz_green(HelmholtzParams(2.0), np.array([0.5, 0.0]), np.zeros(2))
    assert_allclose(split.green(0.25), direct, rtol=1e-11)


def test_laplace_constant():
    # the log coefficient of -(1/4 pi) log d^2, not the -(1/2 pi) of log d
    assert LaplaceSplit.F1_at_zero == -1 / (4 * np.pi)
    assert not np.isclose(LaplaceSplit.F1_at_zero, -1 / (2 * np.pi))
    assert_allclose(helmholtz_split(HelmholtzParams(3.0)).F1_at_zero, -1 / (4 * np.pi), rtol=1e-15)
    assert LaplaceParams().split().F2(np.ones(3)).shape == (3,)


def test_series_switch_continuity():
    kappa = 5.0
    split = helmholtz_split(HelmholtzParams(kappa))
    z0 = SERIES_RADIUS / kappa ** 2
    z = np.array([z0 * (1 - 1e-12), z0 * (1 + 1e-12)])
    for f in (split.F1, split.F2, split.dF1, split.dF2):
        values = f(z)
        assert_allclose(values[0], values[1], rtol=1e-9)


def test_elastic_log_coefficients():
    alpha, beta = 2.0, 1.0
    split = elastic_split(ElasticParams(alpha, beta, 1.0))
    expected = -(alpha + 3 * beta) / (8 * np.pi * beta * (alpha + 2 * beta))
    assert_allclose(split.J1(0.0), expected, rtol=1e-12)
    assert abs(split.J2(0.0)) < 1e-12


def test_elastic_split_value():
    params = ElasticParams(2.0, 1.0, 1.0)
    x = np.array([0.7 * np.cos(0.3), 0.7 * np.sin(0.3)])
    D = np.outer(x, x) / 0.49
    assert_allclose(elastic_split(params).green(0.49, D), elastic_green(params, x, np.zeros(2)), rtol=1e-10)


def test_reciprocity():
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, (2, 10))
    y = rng.uniform(-1, 1, (2, 10))
    params = HelmholtzParams(1.5)
    assert_allclose(helmholtz_green(params, x, y), helmholtz_green(params, y, x), rtol=1e-13)
    elastic = ElasticParams(2.0, 1.0, 2.0)
    G = elastic_green(elastic, x, y)
    assert_allclose(G, np.swapaxes(elastic_green(elastic, y, x), 0, 1), rtol=1e-13)
    assert_allclose(G[0, 1], G[1, 0], rtol=1e-13)


def _laplacian(f, x, h):
    e0, e1 = np.array([h, 0.0]), np.array([0.0, h])
    return (f(x + e0) + f(x - e0) + f(x + e1) + f(x - e1) - 4 * f(x)) / (h * h)


def test_helmholtz_pde_residual():
    kappa = 2.0
    params = HelmholtzParams(kappa)
    G = lambda x: helmholtz_green(params, x, np.zeros(2))
    for x in ([0.5, 0.2], [1.0, -0.7], [-0.3, 1.4]):
        x = np.array(x)
        residual = -_laplacian(G, x, 1e-4) - kappa ** 2 * G(x)
        assert abs(residual) < 1e-4 * abs(G(x))


def test_helmholtz_gradient():
    params = HelmholtzParams(1.3)
    x, y, h = np.array([0.4, 0.9]), np.array([-0.2, 0.1]), 1e-6
    fd = [
        (helmholtz_green(params, x + e, y) - helmholtz_green(params, x - e, y)) / (2 * h)
        for e in (np.array([h, 0.0]), np.array([0.0, h]))
    ]
    assert_allclose(helmholtz_green_gradient(params, x, y), fd, rtol=1e-7)


def test_elastic_navier_residual():
    # mu Δu + (lambda + mu) grad div u + omega^2 u = 0 for each column of G
    params = ElasticParams(2.0, 1.0, 1.0)
    lam, mu = params.alpha, params.beta
    h = 1e-4
    x = np.array([0.6, 0.4])
    G = lambda p: elastic_green(params, p, np.zeros(2))
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    dxx = (G(x + ex) - 2 * G(x) + G(x - ex)) / h ** 2
    dyy = (G(x + ey) - 2 * G(x) + G(x - ey)) / h ** 2
    dxy = (G(x + ex + ey) - G(x + ex - ey) - G(x - ex + ey) + G(x - ex - ey)) / (4 * h * h)
    for k in range(2):
        # grad div of u = G[:, k]
        gd = np.array([dxx[0, k] + dxy[1, k], dxy[0, k] + dyy[1, k]])
        residual = mu * (dxx[:, k] + dyy[:, k]) + (lam + mu) * gd + params.omega ** 2 * G(x)[:, k]
        assert np.max(np.abs(residual)) < 1e-4 * np.abs(G(x)).max()


def test_elastic_double_layer_is_traction():
    params = ElasticParams(2.0, 1.0, 1.5)
    x, y, normal = np.array([0.3, 0.8]), np.array([-0.1, 0.2]), np.array([0.6, -0.8])
    h = 1e-5
    # grad[i][a, b] = d/dy_b of G(x, y)[i, a]
    columns = []
    for e in (np.array([h, 0.0]), np.array([0.0, h])):
        columns.append((elastic_green(params, x, y + e) - elastic_green(params, x, y - e)) / (2 * h))
    dG = np.stack(columns, axis=-1)
    K = elastic_double_layer_kernel(params, x, y, normal)
    for i in range(2):
        expected = traction(params, dG[i], normal)
        assert_allclose(K[i], expected, rtol=1e-6, atol=1e-9)


@pytest.mark.parametrize("params", [HelmholtzParams(1.0), ElasticParams(2.0, 1.0, 1.0)])
def test_self_split_matches_direct(params):
    t = np.linspace(-0.95, 0.95, 9)
    tau = np.concatenate([t[:4] + 0.013, t[4:] - 0.4])
    geom = PairGeometry(QUARTER, QUARTER, t, tau, same=True)
    samples = params.split().sample(geom)
    log = np.log(np.abs(t - tau))
    value = samples.regular + samples.logcoef * log
    x, y = eval_arc(QUARTER, t), eval_arc(QUARTER, tau)
    if params.kind == "helmholtz":
        direct = helmholtz_green(params, x, y)
    else:
        direct = elastic_green(params, x, y)
    assert_allclose(value, direct, rtol=1e-10, atol=1e-13)


def test_singular_point():
    with pytest.raises(SingularityError):
        helmholtz_split(HelmholtzParams(1.0)).green(0.0)
    with pytest.raises(SingularityError):
        helmholtz_green(HelmholtzParams(1.0), np.zeros(2), np.zeros(2))


def test_params_from_dict():
    assert params_from_dict({"kind": "helmholtz", "kappa": 2}).kappa == 2.0
    elastic = params_from_dict({"kind": "elastic", "alpha": 2, "beta": 1, "omega": 1})
    assert_allclose(elastic.kp2, 0.25)
    assert_allclose(elastic.ks2, 1.0)
    for bad in ({"kind": "helmholtz"}, {"kind": "maxwell"}, {"kind": "helmholtz", "kappa": -1}):
        with pytest.raises(InvalidArgument):
            params_from_dict(bad)
