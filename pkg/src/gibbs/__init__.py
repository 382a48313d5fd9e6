"""
gibbs - blocked Gibbs sampler for ε-NormCRM mixtures.

Components:
- ChainConfig / EpsilonPrior: schedule, truncation and random-eps settings
- GibbsState / SweepRecord: sampler state and kept sweeps
- steps: full conditionals of u, allocations, N_na, jumps, locations, eps
- GibbsSampler / run_chain / run_chains: chain drivers
- ChainArchive: kept sweeps and their CSV/YAML layout
"""

from .models import ChainConfig, EpsilonPrior, GibbsState, SweepRecord
from .steps import (
    allocation_logprobs,
    epsilon_log_target,
    epsilon_mh_log_ratio,
    n_nonallocated_pmf,
    relabel,
    resize_nonallocated,
    sample_n_nonallocated,
    step_allocations,
    step_epsilon,
    step_global_params,
    step_jumps,
    step_locations,
    step_n_nonallocated,
    step_u,
)
from .archive import ChainArchive
from .sampler import (
    GibbsSampler,
    initialize_state,
    quantile_groups,
    run_chain,
    run_chains,
    stratification_score,
)

__all__ = [
    # Models
    "ChainConfig",
    "EpsilonPrior",
    "GibbsState",
    "SweepRecord",
    # Steps
    "allocation_logprobs",
    "epsilon_log_target",
    "epsilon_mh_log_ratio",
    "n_nonallocated_pmf",
    "relabel",
    "resize_nonallocated",
    "sample_n_nonallocated",
    "step_allocations",
    "step_epsilon",
    "step_global_params",
    "step_jumps",
    "step_locations",
    "step_n_nonallocated",
    "step_u",
    # Drivers
    "ChainArchive",
    "GibbsSampler",
    "initialize_state",
    "quantile_groups",
    "run_chain",
    "run_chains",
    "stratification_score",
]
