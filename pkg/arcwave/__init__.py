from .errors import *
from .spectral import (
    SpectralDensity,
    analyze,
    synthesize,
    sobolev_norm,
    biperiodic_sobolev_norm,
    decay_rate,
)
from .geometry import (
    Arc,
    ParametricArcFamily,
    check_family,
    delta_self,
    delta_cross,
    materialize,
    verify_tube_positivity,
)
from .kernels import ElasticParams, HelmholtzParams, LaplaceParams, elastic_split, helmholtz_split
from .operators import (
    BlockSystem,
    OperatorBlock,
    assemble_system,
    assemble_V_self,
    assemble_V_cross,
    assemble_W_block,
    load_system,
    save_system,
    solve_system,
)
from .solver import (
    PlaneWave,
    PointSource,
    ScatteringSolution,
    FarFieldFunctional,
    MomentFunctional,
    PotentialFunctional,
    eval_potential,
    far_field,
    field_grid,
    linear_functional,
    solve_scattering,
)
from .holomorphy import (
    SweepResult,
    DerivativeCheck,
    admissible_polyradius,
    bpe_certificate,
    cauchy_riemann_check,
    complex_step_check,
    sweep_parameter,
    tube_operator_bound,
)
from .base import ConsumerClosed, JobResult, ThreadedJobProducer
from .subscriptions import *
from .config import ExperimentConfig, load_config


__version__ = "0.1.0"
