"""
GibbsSampler - blocked Gibbs sampler for ε-NormCRM mixtures.

This module:
1. Initializes the state from quantile groups of the data
2. Runs sweeps u -> allocations [-> eps] -> N_na -> jumps -> locations
3. Keeps thinned sweeps after burn-in in a ChainArchive
4. Runs several chains on a thread pool with independent seed streams
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np

from crm_core import (
    SAMPLING_STATS,
    BesselIntensity,
    Intensity,
    TruncationSpec,
    sample_jumps,
    tail_mass,
)
from exceptions import ChainError, ModelConfigurationError, NormCRMError
from mixture import Dataset, MixtureModel
from .archive import ChainArchive
from .models import ChainConfig, GibbsState
from .steps import (
    step_allocations,
    step_epsilon,
    step_global_params,
    step_jumps,
    step_locations,
    step_n_nonallocated,
    step_u,
)

logger = logging.getLogger(__name__)


def quantile_groups(y: np.ndarray, k: int) -> np.ndarray:
    """Group index 0..k-1 of each datum by rank of y."""
    ranks = np.empty(y.size, dtype=np.int64)
    ranks[np.argsort(y, kind="stable")] = np.arange(y.size)
    return (ranks * k) // y.size


def stratification_score(data: Dataset) -> np.ndarray:
    """y itself, or y minus its pooled least-squares fit on (1, X)."""
    if data.X is None:
        return data.y
    design = np.column_stack([np.ones(data.n), data.X])
    coef, *_ = np.linalg.lstsq(design, data.y, rcond=None)
    return data.y - design @ coef


def initialize_state(
    data: Dataset,
    model: MixtureModel,
    intensity: Intensity,
    trunc: TruncationSpec,
    rng: np.random.Generator,
) -> GibbsState:
    """
    k = ceil(sqrt(n)) quantile-stratified clusters, prior jumps and
    non-allocated atoms from one prior draw, u = n / T.

    With covariates the strata are quantiles of the pooled least-squares
    residuals, so each initial cluster spans the covariate range.
    """
    k = min(data.n, math.ceil(math.sqrt(data.n)))
    groups = quantile_groups(stratification_score(data), k)
    global_params = model.initial_global_params(rng)

    n_na = int(rng.poisson(tail_mass(intensity, trunc)))
    jumps = sample_jumps(intensity, trunc.epsilon, 0.0, 0, k + n_na, rng)

    allocated = [
        model.sample_allocated_location(
            data.y[groups == i],
            None if data.X is None else data.X[groups == i],
            rng,
            global_params,
        )
        for i in range(k)
    ]
    locations = np.vstack([np.vstack(allocated), model.sample_base(rng, n_na, global_params)])
    state = GibbsState(
        u=data.n / float(jumps.sum()),
        allocations=groups,
        jumps=jumps,
        locations=locations,
        k=k,
        epsilon=trunc.epsilon,
        global_params=global_params,
    )
    state.check_invariants()
    return state


class GibbsSampler:
    """
    One chain of the blocked Gibbs sampler.

    Usage:
        sampler = GibbsSampler(config, data, model)
        archive = sampler.run()
    """

    def __init__(
        self,
        config: ChainConfig,
        data: Dataset,
        model: MixtureModel,
        intensity: Optional[Intensity] = None,
        rng: Optional[np.random.Generator] = None,
        chain_id: int = 0,
    ):
        if not isinstance(model, MixtureModel):
            raise ModelConfigurationError(
                f"{type(model).__name__} has no exact or Metropolis-Hastings location update"
            )
        self.config = config
        self.data = data
        self.model = model.bind(data)
        self.intensity = intensity or config.intensity.build()
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        self.chain_id = chain_id
        self.state: Optional[GibbsState] = None

        if config.epsilon_prior is not None and isinstance(self.intensity, BesselIntensity):
            logger.warning(
                "Random eps with the Bessel intensity re-evaluates series tail masses every sweep",
                extra={"chain": chain_id},
            )

    def truncation(self) -> TruncationSpec:
        eps = self.state.epsilon if self.state is not None else self.config.epsilon
        return TruncationSpec(epsilon=eps, kappa=self.config.kappa)

    def _run_step(self, name: str, fn: Callable[[], object]) -> None:
        try:
            fn()
        except NormCRMError as e:
            raise ChainError(self.state.iteration, name, e, self.state.snapshot()) from e
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
            raise ChainError(self.state.iteration, name, e, self.state.snapshot()) from e

    def sweep(self) -> GibbsState:
        """One full pass over all blocks."""
        state, rng = self.state, self.rng
        state.iteration += 1
        self._run_step("u", lambda: step_u(state, rng))
        self._run_step("allocations", lambda: step_allocations(state, self.data, self.model, rng))
        if self.config.epsilon_prior is not None:
            self._run_step(
                "epsilon",
                lambda: step_epsilon(state, self.config.epsilon_prior, self.intensity, self.config.kappa, rng),
            )
        trunc = self.truncation()
        self._run_step("n_nonallocated", lambda: step_n_nonallocated(state, self.intensity, trunc, rng))
        self._run_step("jumps", lambda: step_jumps(state, self.intensity, trunc, rng))
        self._run_step("locations", lambda: step_locations(state, self.data, self.model, rng))
        self._run_step("global_params", lambda: step_global_params(state, self.data, self.model, rng))
        self._run_step("invariants", state.check_invariants)
        return state

    def run(self) -> ChainArchive:
        """Initialize and run burn-in plus thinned sampling sweeps."""
        cfg = self.config
        started = time.perf_counter()
        logger.info(
            "Chain started",
            extra={
                "chain": self.chain_id,
                "n": self.data.n,
                "intensity": repr(self.intensity),
                "kappa": cfg.kappa,
                "epsilon": cfg.epsilon,
                "sweeps": cfg.n_sweeps,
            },
        )
        self.state = initialize_state(self.data, self.model, self.intensity, self.truncation(), self.rng)
        archive = ChainArchive(
            location_columns=self.model.location_columns,
            n=self.data.n,
            seed=cfg.seed,
            chain_id=self.chain_id,
        )
        for sweep in range(1, cfg.n_sweeps + 1):
            state = self.sweep()
            if cfg.is_kept(sweep):
                archive.append(state.to_record())
            if sweep % cfg.progress_every == 0:
                logger.info(
                    "Chain progress",
                    extra={"chain": self.chain_id, "sweep": sweep, "k": state.k, "n_na": state.n_na},
                )
            logger.debug(f"chain {self.chain_id} sweep {sweep}: k={state.k} u={state.u:.6g} T={state.total_mass:.6g}")

        logger.info(
            "Chain finished",
            extra={
                "chain": self.chain_id,
                "kept": len(archive),
                "seconds": round(time.perf_counter() - started, 3),
                "sampling": SAMPLING_STATS.to_dict(),
            },
        )
        return archive


def run_chain(
    config: ChainConfig,
    data: Dataset,
    model: MixtureModel,
    intensity: Optional[Intensity] = None,
    rng: Optional[np.random.Generator] = None,
    chain_id: int = 0,
) -> ChainArchive:
    """Run one chain; deterministic given config.seed (or the supplied rng)."""
    return GibbsSampler(config, data, model, intensity, rng, chain_id).run()


def run_chains(
    config: ChainConfig,
    data: Dataset,
    model: MixtureModel,
    intensity: Optional[Intensity] = None,
    max_workers: Optional[int] = None,
) -> list[ChainArchive]:
    """
    config.n_chains independent chains with streams spawned from config.seed.

    A single chain uses default_rng(config.seed) directly, so it matches run_chain.
    """
    if config.n_chains == 1:
        return [run_chain(config, data, model, intensity)]
    intensity = intensity or config.intensity.build()
    streams = np.random.SeedSequence(config.seed).spawn(config.n_chains)
    with ThreadPoolExecutor(max_workers=max_workers or config.n_chains) as pool:
        futures = [
            pool.submit(run_chain, config, data, model, intensity, np.random.default_rng(seq), i)
            for i, seq in enumerate(streams)
        ]
        return [f.result() for f in futures]
