"""
Experiment configuration. A config is a JSON document::

    {
        "schema_version": 1,
        "pde": {"kind": "helmholtz", "kappa": 1.0},
        "geometry": {"arcs": [{"line": [[-1, 0], [1, 0]]}]},
        "problem": "dirichlet",
        "incident": {"kind": "plane-wave", "direction": [0, 1]},
        "N": 48
    }

``geometry`` holds either inline ``arcs`` (coefficient dicts, or ``{"line": [a, b]}``) or a
``family``: a parametric family inline or the path of a family JSON file, relative to the config
file. Optional blocks are ``functional`` (the sweep observable), ``sweep`` (``indices``, ``nodes``,
``epsilon_scan``), ``outputs`` (``field_grid`` with ``box`` and ``resolution``) and ``seed``.
"""
import logging
import os

from .errors import ArcwaveError, ConfigError
from .geometry import Arc, ParametricArcFamily
from .io import read_json
from .kernels import params_from_dict
from .solver import functional_from_dict, incident_from_dict

_log = logging.getLogger("arcwave.config")

SCHEMA_VERSION = 1
N_RANGE = (8, 512)
PROBLEMS = ("dirichlet", "neumann")

#: Environment variable overriding the regression fixture directory
FIXTURE_ENV = "ARCWAVE_FIXTURE_DIR"


def fixture_dir():
    return os.environ.get(FIXTURE_ENV, "fixtures")


def _arcFromDict(d):
    if "line" in d:
        a, b = d["line"]
        return Arc.line(a, b, m=d.get("m", 4), alpha=d.get("alpha", 0.0))
    return Arc.fromDict(d)


class ExperimentConfig:
    """
    A validated experiment configuration. :func:`toDict` returns the document it was built from
    (with defaults filled in), so ``fromDict(c.toDict())`` reproduces ``c``.

    Args:
        d (dict): the JSON document.
        base_dir (str, optional): directory that relative paths are resolved against.
    """

    def __init__(self, d, base_dir=None):
        if not isinstance(d, dict):
            raise ConfigError("A config must be a JSON object")
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError("Unsupported schema_version %r (expected %d)" % (version, SCHEMA_VERSION))
        self.base_dir = base_dir or "."
        try:
            self.pde = dict(d["pde"])
            self.geometry = dict(d["geometry"])
            self.incident_spec = dict(d["incident"])
        except KeyError as e:
            raise ConfigError("Config is missing the %s block" % e)
        except (TypeError, ValueError):
            raise ConfigError("Config blocks pde, geometry and incident must be objects")
        self.problem = d.get("problem", "dirichlet")
        self.N = d.get("N", 48)
        self.functional_spec = dict(d.get("functional") or {"kind": "far-field"})
        self.sweep = dict(d.get("sweep") or {})
        self.outputs = dict(d.get("outputs") or {})
        self.seed = d.get("seed", 0)
        self._validate()

    def _validate(self):
        if self.problem not in PROBLEMS:
            raise ConfigError("problem must be one of %s, not %r" % ("|".join(PROBLEMS), self.problem))
        if not isinstance(self.N, int) or not N_RANGE[0] <= self.N <= N_RANGE[1]:
            raise ConfigError("N must be an integer in [%d, %d], got %r" % (N_RANGE + (self.N,)))
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        if ("arcs" in self.geometry) == ("family" in self.geometry):
            raise ConfigError("geometry needs exactly one of arcs or family")
        family = self.geometry.get("family")
        if isinstance(family, str) and not os.path.isfile(self.resolve(family)):
            raise ConfigError("Family file %s does not exist" % self.resolve(family))
        grid = self.outputs.get("field_grid")
        if grid is not None and (len(grid.get("box", ())) != 4 or len(grid.get("resolution", ())) != 2):
            raise ConfigError("field_grid needs a box [xmin, xmax, ymin, ymax] and a resolution [nx, ny]")
        # builds everything once so that errors surface at load time
        try:
            params = self.params()
            self.arcs()
            self.incident(params)
            self.functional()
        except ConfigError:
            raise
        except ArcwaveError as e:
            raise ConfigError(str(e))

    def resolve(self, path):
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    def params(self):
        return params_from_dict(self.pde)

    def family(self):
        """
        The parametric family, or ``None`` when the geometry is given as plain arcs.
        """
        family = self.geometry.get("family")
        if family is None:
            return None
        if isinstance(family, str):
            family = read_json(self.resolve(family))
        return ParametricArcFamily.fromDict(family)

    def arcs(self):
        """
        The arcs to solve on: the inline arcs, or the family's nominal arcs.
        """
        if "arcs" in self.geometry:
            try:
                arcs = [_arcFromDict(a) for a in self.geometry["arcs"]]
            except (KeyError, TypeError, ValueError) as e:
                raise ConfigError("Malformed arc in geometry: %s" % e)
            if not arcs:
                raise ConfigError("geometry.arcs is empty")
            return arcs
        return self.family().nominal

    def incident(self, params=None):
        return incident_from_dict(self.incident_spec, params or self.params())

    def functional(self):
        return functional_from_dict(self.functional_spec)

    def toDict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "pde": self.pde,
            "geometry": self.geometry,
            "problem": self.problem,
            "incident": self.incident_spec,
            "N": self.N,
            "functional": self.functional_spec,
            "sweep": self.sweep,
            "outputs": self.outputs,
            "seed": self.seed,
        }

    @staticmethod
    def fromDict(d, base_dir=None):
        return ExperimentConfig(d, base_dir)

    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self.toDict() == other.toDict()

    def __repr__(self):
        return "ExperimentConfig(%s, %s, N=%d)" % (self.pde.get("kind"), self.problem, self.N)


def load_config(path):
    """
    Reads and validates a config file.

    Raises:
        :class:`~arcwave.errors.ConfigError`: the file is missing, is not JSON, or fails validation.
    """
    d = read_json(path)
    config = ExperimentConfig(d, os.path.dirname(os.path.abspath(path)))
    _log.debug("Loaded %s from %s", config, path)
    return config
