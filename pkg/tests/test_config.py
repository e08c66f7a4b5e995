import json

import numpy as np
import pytest

from arcwave.config import ExperimentConfig, fixture_dir, load_config
from arcwave.errors import ConfigError
from arcwave.geometry import Arc, ParametricArcFamily


def _config(**changes):
    d = {
        "pde": {"kind": "helmholtz", "kappa": 1.0},
        "geometry": {"arcs": [{"line": [[-1, 0], [1, 0]]}]},
        "problem": "dirichlet",
        "incident": {"kind": "plane-wave", "direction": [0, 1]},
        "N": 16,
    }
    d.update(changes)
    return d


def _write(path, d):
    path.write_text(json.dumps(d))
    return str(path)


def test_load_and_round_trip(tmp_path):
    config = load_config(_write(tmp_path / "c.json", _config()))
    assert config.N == 16
    assert config.seed == 0
    assert config.functional().kind == "far-field"
    assert config.arcs() == [Arc.line((-1, 0), (1, 0))]
    assert config.family() is None
    assert ExperimentConfig.fromDict(config.toDict(), config.base_dir) == config
    assert "N=16" in repr(config)


@pytest.mark.parametrize(
    "changes",
    [
        {"N": 4},
        {"N": 1024},
        {"N": "48"},
        {"problem": "robin"},
        {"schema_version": 2},
        {"seed": 0.5},
        {"pde": {"kind": "helmholtz", "kappa": -1}},
        {"incident": {"kind": "laser"}},
        {"functional": {"kind": "potential"}},
        {"geometry": {"arcs": []}},
        {"geometry": {"arcs": [{"line": [[0, 0]]}]}},
        {"outputs": {"field_grid": {"box": [0, 1], "resolution": [4, 4]}}},
    ],
)
def test_invalid(changes):
    with pytest.raises(ConfigError):
        ExperimentConfig(_config(**changes))


def test_missing_blocks():
    d = _config()
    del d["incident"]
    with pytest.raises(ConfigError):
        ExperimentConfig(d)
    with pytest.raises(ConfigError):
        ExperimentConfig([1, 2])


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "nothing.json"))


def test_family_file(tmp_path):
    flat = Arc.line((-1, 0), (1, 0))
    bump = Arc([0], np.polynomial.chebyshev.chebmul([0, 0.1], [0.5, 0, -0.5]))
    family = ParametricArcFamily([flat], [[bump]])
    _write(tmp_path / "family.json", family.toDict())

    config = load_config(_write(tmp_path / "c.json", _config(geometry={"family": "family.json"})))
    assert config.family().n_parameters == 1
    assert config.arcs() == [flat]

    with pytest.raises(ConfigError):
        ExperimentConfig(_config(geometry={"family": "elsewhere.json"}), str(tmp_path))
    both = {"family": "family.json", "arcs": [{"line": [[-1, 0], [1, 0]]}]}
    with pytest.raises(ConfigError):
        ExperimentConfig(_config(geometry=both), str(tmp_path))


def test_fixture_dir(monkeypatch):
    monkeypatch.setenv("ARCWAVE_FIXTURE_DIR", "/tmp/arcwave-fixtures")
    assert fixture_dir() == "/tmp/arcwave-fixtures"
