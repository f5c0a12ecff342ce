"""Integrated information (big Phi) of small binary networks and search over TPMs."""

__version__ = "0.1.0"

from .errors import (
    BudgetError, InfeasibleNetworkError, InsufficientDataError, PhiOptError, RangeError, ShapeError,
    UndefinedRepertoireError,
)
from .mechanism import (
    Concept, MechanismPartition, Mice, build_concept, core_mice, enumerate_partitions, find_mip,
    partitioned_repertoire,
)
from .netmodel import (
    FeasibilityReport, Network, Tpm, derive_cm, first_feasible_state, grid_tpm, index_to_state,
    load_state, load_tpm, reachable_states, sample_tpm, state_index, validate_tpm,
)
from .repertoire import (
    CAUSE, EFFECT, Repertoire, cause_repertoire, effect_repertoire, emd, expand_repertoire,
    members, nodeset, unconstrained_repertoire,
)
from .search import (
    DimensionPrior, EvalRecord, SearchConfig, SearchResult, grid_search, prior_guided_search,
    random_search, rank_likelihood, sample_dimension, update_prior,
)
from .stats import (
    PopulationStats, TestReport, confidence_interval, run_inference_experiment, sample_population,
    welch_t_test,
)
from .system import (
    Constellation, PhiResult, SystemCut, apply_cut, big_phi, build_constellation,
    constellation_distance, enumerate_cuts, phi_of_tpm,
)
