"""Univariate heteroscedastic Gaussian mixtures fitted by EM, started from
globally optimal dynamic-programming partitions of the sorted data."""

from .em import SIMULATION_PROFILE, SPECTRA_PROFILE, EmConfig, e_step, m_step, run_em
from .errors import DivergenceError, FormatError, InfeasibleError, InvalidPartitionError
from .methods import Method, fit, initial_partition
from .metrics import attainment, avg_log_d, avg_p, bic, d_criterion
from .model import (
    BlockPartition,
    FitResult,
    MixtureParams,
    WeightedSample,
    blocks_to_params,
    exact_binned_log_likelihood,
    log_likelihood,
    mixture_pdf,
)
from .partition import PartitionTable, brute_force_partition, dp_partition
from .refinit import hierarchical_partition, quantile_partition
from .scoring import PrefixAccumulator, ScoreKind, ScoringSpec, block_score, build_prefix_accumulator
from .simulate import GroupSpec, draw_mixture, overlap, sample_mixture, spacing_from_overlap

__version__ = "0.1.0"


def data_path(name: str = "two_component_demo.csv"):
    """Path of a dataset shipped with the package."""
    from importlib.resources import files

    return files(__name__) / "data" / name
