"""Simulation and verification of trajectory-length growth through random sparse ReLU networks."""

from .bounds import (
    BoundBase,
    base_discrete,
    base_gaussian,
    base_general,
    base_prior_dense,
    base_uniform,
    bound_length,
)
from .distributions import (
    DistributionSpec,
    discrete,
    gaussian,
    m_constant,
    make_rng,
    mz_constant_A,
    mz_constant_B,
    sample_matrix,
    sample_scalar,
    std_dev,
    uniform,
)
from .experiment import ExperimentConfig, ExperimentResult, run_experiment
from .network import Network, NetworkConfig, active_set, build_network, forward_trace
from .trajectory import Polyline, arc_length, arc_trajectory, growth_profile, line_trajectory

__version__ = "0.1.0"
