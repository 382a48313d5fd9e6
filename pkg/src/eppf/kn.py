"""
Prior law of K_n, the number of distinct values among n draws from P_eps.
"""

import logging
import math
from typing import Callable, Iterator, Literal, Optional

import numpy as np

from config import settings
from crm_core import Intensity, TruncationSpec, sample_prior_jump_sets
from exceptions import DomainError
from .evaluation import eppf_eps
from .models import Composition, KnDistribution

logger = logging.getLogger(__name__)

# Bell numbers grow too fast for enumeration beyond this
EXACT_KN_MAX_N = 12

KnMethod = Literal["auto", "exact", "monte_carlo"]


def integer_partitions(n: int, largest: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """
    Integer partitions of n as non-increasing tuples.

    Examples:
        >>> list(integer_partitions(4))
        [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    """
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def prior_kn_exact(
    n: int,
    eppf: Callable[[Composition], float],
) -> KnDistribution:
    """
    P(K_n = k) = sum over set partitions with k blocks of the eppf, grouped by
    partition type with multiplicity n! / (prod n_j! prod m_r!).
    """
    if not 1 <= n <= EXACT_KN_MAX_N:
        raise DomainError("n", n, f"exact enumeration supports 1 <= n <= {EXACT_KN_MAX_N}")
    probs = np.zeros(n)
    for counts in integer_partitions(n):
        comp = Composition(counts)
        probs[comp.k - 1] += comp.set_partition_count() * eppf(comp)
    total = probs.sum()
    if abs(total - 1.0) > 1e-4:
        logger.warning("Exact K_n law does not sum to one", extra={"n": n, "total": float(total)})
    return KnDistribution(n=n, probs=probs, se=np.zeros(n), method="exact")


def prior_kn_monte_carlo(
    intensity: Intensity,
    trunc: TruncationSpec,
    n: int,
    reps: int,
    rng: np.random.Generator,
) -> KnDistribution:
    """Empirical law of K_n over ``reps`` prior realizations, each sampled n times."""
    counts = np.zeros(n, dtype=np.int64)
    kn = np.empty(reps)
    for r, jumps in enumerate(sample_prior_jump_sets(intensity, trunc, reps, rng)):
        draws = rng.multinomial(n, jumps / jumps.sum())
        k = int(np.count_nonzero(draws))
        counts[k - 1] += 1
        kn[r] = k
    probs = counts / reps
    se = np.sqrt(probs * (1.0 - probs) / reps)
    mean_se = float(kn.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return KnDistribution(n=n, probs=probs, se=se, method="monte_carlo", reps=reps, mean_se=mean_se)


def prior_kn(
    intensity: Intensity,
    trunc: TruncationSpec,
    n: int,
    reps: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    method: KnMethod = "auto",
) -> KnDistribution:
    """
    Prior distribution of K_n under the ε-NormCRM.

    Args:
        intensity: Lévy intensity
        trunc: eps and kappa
        n: Sample size
        reps: Monte Carlo replicates (settings.prior_reps by default)
        rng: Random generator for the Monte Carlo path
        method: "exact" (n <= 12), "monte_carlo", or "auto" (exact when n <= 12)

    Returns:
        KnDistribution with per-entry standard errors
    """
    if n < 1:
        raise DomainError("n", n, "sample size must be >= 1")
    if n == 1:
        return KnDistribution(n=1, probs=np.ones(1), se=np.zeros(1), method="exact")
    if method == "auto":
        method = "exact" if n <= EXACT_KN_MAX_N else "monte_carlo"
    if method == "exact":
        return prior_kn_exact(n, lambda comp: eppf_eps(intensity, trunc, comp))

    reps = reps or settings.prior_reps
    if reps < 1:
        raise DomainError("reps", reps, "must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(settings.default_seed)
    return prior_kn_monte_carlo(intensity, trunc, n, reps, rng)
