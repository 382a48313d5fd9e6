"""
Full-conditional updates of the blocked Gibbs sampler.

Each step takes the state and an explicit random generator and updates the
state in place; the return value is the updated component.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy import special

from crm_core import (
    Intensity,
    TruncationSpec,
    log_tilted_moment,
    sample_jumps,
    tail_mass,
    tilted_tail_mass,
)
from exceptions import DomainError
from mixture import Dataset, MixtureModel
from .models import EpsilonPrior, GibbsState

logger = logging.getLogger(__name__)

# guard against a zero rate in the u update
U_FLOOR = 1e-300


# ============================================================================
# u
# ============================================================================

def step_u(state: GibbsState, rng: np.random.Generator) -> float:
    """u | rest ~ gamma(shape n, rate T_eps)."""
    total = state.total_mass
    if not total > 0:
        raise DomainError("total_mass", total, "T_eps must be positive")
    state.u = max(float(rng.gamma(state.n, 1.0 / total)), U_FLOOR)
    return state.u


# ============================================================================
# Allocations
# ============================================================================

def allocation_logprobs(
    state: GibbsState, data: Dataset, model: MixtureModel
) -> np.ndarray:
    """Unnormalized log P(c_i = j) = log J_j + log f(y_i; tau_j), shape (n, atoms)."""
    log_kernel = model.kernel_logdensity(data.y, state.locations, data.X, state.global_params)
    return log_kernel + np.log(state.jumps)[None, :]


def relabel(state: GibbsState, atom_of_datum: np.ndarray) -> None:
    """
    Move the atoms carrying data to the front, in order of first use, and
    rewrite allocations as cluster indices. Atoms that lost all members
    become non-allocated.
    """
    used, first = np.unique(atom_of_datum, return_index=True)
    used = used[np.argsort(first)]
    unused = np.setdiff1d(np.arange(state.n_atoms), used, assume_unique=True)
    order = np.concatenate([used, unused])
    new_index = np.empty(state.n_atoms, dtype=np.int64)
    new_index[order] = np.arange(state.n_atoms)
    state.jumps = state.jumps[order]
    state.locations = state.locations[order]
    state.allocations = new_index[atom_of_datum]
    state.k = int(used.size)


def step_allocations(
    state: GibbsState, data: Dataset, model: MixtureModel, rng: np.random.Generator
) -> np.ndarray:
    """
    c_i | rest ~ discrete with P(c_i = j) proportional to J_j f(y_i; tau_j),
    independently over i; computed with a per-row max shift.
    """
    logp = allocation_logprobs(state, data, model)
    row_max = logp.max(axis=1, keepdims=True)
    dead = ~np.isfinite(row_max[:, 0])
    if np.any(dead):
        raise DomainError("allocations", np.flatnonzero(dead).tolist()[:10], "all kernel values vanish")
    probs = np.exp(logp - row_max)
    cum = np.cumsum(probs, axis=1)
    draws = rng.random(state.n) * cum[:, -1]
    atom = np.minimum((cum < draws[:, None]).sum(axis=1), state.n_atoms - 1)
    relabel(state, atom)
    return state.allocations


# ============================================================================
# Number of non-allocated jumps
# ============================================================================

def n_nonallocated_pmf(lam_u: float, k: int, n_max: int) -> np.ndarray:
    """
    P(N_na = m), m = 0..n_max, for the mixture
    Lambda/(Lambda+k) Poisson_1(Lambda) + k/(Lambda+k) Poisson_0(Lambda).
    """
    m = np.arange(n_max + 1, dtype=float)
    with np.errstate(divide="ignore"):
        log_pois = m * np.log(lam_u) - lam_u - special.gammaln(m + 1.0)
    # mixture mass simplifies to e^{-Lambda} Lambda^m (m + k) / (m! (Lambda + k))
    return np.exp(log_pois) * (m + k) / (lam_u + k)


def sample_n_nonallocated(lam_u: float, k: int, rng: np.random.Generator) -> int:
    if rng.random() < lam_u / (lam_u + k):
        return 1 + int(rng.poisson(lam_u))
    return int(rng.poisson(lam_u))


def resize_nonallocated(state: GibbsState, n_na: int) -> None:
    """Set the size of the non-allocated block; new entries are placeholders until redrawn."""
    keep = state.k + min(n_na, state.n_na)
    extra = state.k + n_na - keep
    dim = state.locations.shape[1]
    state.jumps = np.concatenate([state.jumps[:keep], np.full(extra, np.nan)])
    state.locations = np.vstack([state.locations[:keep], np.full((extra, dim), np.nan)])


def step_n_nonallocated(
    state: GibbsState, intensity: Intensity, trunc: TruncationSpec, rng: np.random.Generator
) -> int:
    """N_na | u, k from the shifted-Poisson mixture with Lambda = Lambda_{eps,u}."""
    lam_u = tilted_tail_mass(intensity, trunc, state.u)
    n_na = sample_n_nonallocated(lam_u, state.k, rng)
    resize_nonallocated(state, n_na)
    return n_na


# ============================================================================
# Jumps
# ============================================================================

def step_jumps(
    state: GibbsState, intensity: Intensity, trunc: TruncationSpec, rng: np.random.Generator
) -> np.ndarray:
    """
    Allocated jump i ~ J^{n_i} e^{-u J} rho(J) on (eps, inf); non-allocated
    jumps iid ~ e^{-u J} rho(J) on (eps, inf).
    """
    counts = state.counts
    jumps = np.empty(state.n_atoms)
    for size in np.unique(counts):
        idx = np.flatnonzero(counts == size)
        jumps[idx] = sample_jumps(intensity, trunc.epsilon, state.u, int(size), idx.size, rng)
    if state.n_na:
        jumps[state.k:] = sample_jumps(intensity, trunc.epsilon, state.u, 0, state.n_na, rng)
    state.jumps = jumps
    return jumps


# ============================================================================
# Locations
# ============================================================================

def step_locations(
    state: GibbsState, data: Dataset, model: MixtureModel, rng: np.random.Generator
) -> np.ndarray:
    """
    Allocated location i from prod_{j in C_i} f(y_j; tau) P0(dtau) via the
    model's conjugate draw or its Metropolis-Hastings steps from the current
    location; non-allocated locations iid from P0.
    """
    locations = np.empty_like(state.locations)
    order = np.argsort(state.allocations, kind="stable")
    bounds = np.searchsorted(state.allocations[order], np.arange(state.k + 1))
    for i in range(state.k):
        members = order[bounds[i]:bounds[i + 1]]
        locations[i] = model.sample_allocated_location(
            data.y[members],
            None if data.X is None else data.X[members],
            rng,
            state.global_params,
            current=state.locations[i],
        )
    if state.n_na:
        locations[state.k:] = model.sample_base(rng, state.n_na, state.global_params)
    state.locations = locations
    return locations


def step_global_params(
    state: GibbsState, data: Dataset, model: MixtureModel, rng: np.random.Generator
) -> dict:
    """Model-wide parameters given every datum's location."""
    state.global_params = model.update_global_params(
        data, state.locations[state.allocations], rng, state.global_params
    )
    return state.global_params


# ============================================================================
# Random epsilon
# ============================================================================

def epsilon_log_target(
    intensity: Intensity,
    kappa: float,
    epsilon: float,
    u: float,
    counts: np.ndarray,
    prior: EpsilonPrior,
) -> float:
    """
    log of f_eps(u; n_1..n_k) pi(eps), the full conditional of eps with
    jumps and N_na integrated out.
    """
    log_prior = prior.log_density(epsilon)
    if not math.isfinite(log_prior):
        return -math.inf
    trunc = TruncationSpec(epsilon=epsilon, kappa=kappa)
    lam = tail_mass(intensity, trunc)
    lam_u = tilted_tail_mass(intensity, trunc, u)
    k = counts.size
    n = int(counts.sum())
    total = (n - 1) * math.log(u) - math.lgamma(n) + math.log(k + lam_u) - math.log(lam) + (lam_u - lam)
    sizes, mult = np.unique(counts, return_counts=True)
    for size, m in zip(sizes, mult):
        total += m * log_tilted_moment(intensity, trunc, u, int(size))
    return total + log_prior


def epsilon_log_proposal(epsilon: float, prior: EpsilonPrior) -> float:
    """log q(eps) of the independent log-uniform proposal on the prior support."""
    return -math.log(epsilon) - math.log(math.log(prior.upper / prior.lower))


def epsilon_mh_log_ratio(
    intensity: Intensity,
    kappa: float,
    current: float,
    proposal: float,
    u: float,
    counts: np.ndarray,
    prior: EpsilonPrior,
) -> float:
    """log acceptance ratio of moving eps from current to proposal."""
    return (
        epsilon_log_target(intensity, kappa, proposal, u, counts, prior)
        - epsilon_log_target(intensity, kappa, current, u, counts, prior)
        + epsilon_log_proposal(current, prior)
        - epsilon_log_proposal(proposal, prior)
    )


def step_epsilon(
    state: GibbsState,
    prior: Optional[EpsilonPrior],
    intensity: Intensity,
    kappa: float,
    rng: np.random.Generator,
) -> float:
    """
    One Metropolis-Hastings update of eps with an independent log-uniform
    proposal on (lower, upper). Must be followed by redrawing N_na, the jumps
    and the locations.
    """
    if prior is None or prior.kind == "point":
        return state.epsilon
    proposal = math.exp(rng.uniform(math.log(prior.lower), math.log(prior.upper)))
    counts = state.counts
    log_ratio = epsilon_mh_log_ratio(intensity, kappa, state.epsilon, proposal, state.u, counts, prior)
    if math.log(rng.random()) < log_ratio:
        state.epsilon = proposal
    return state.epsilon
