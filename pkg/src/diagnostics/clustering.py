"""
Posterior summaries of the random partition: K_n law, co-clustering
probabilities and the Binder-loss point estimate.
"""

import logging
from typing import Sequence, Union

import numpy as np

from exceptions import DomainError
from .models import KnPosterior

logger = logging.getLogger(__name__)

# sweeps per block when accumulating the co-clustering matrix
COCLUSTER_BLOCK = 256


def _allocation_matrix(archive) -> np.ndarray:
    if isinstance(archive, np.ndarray):
        matrix = np.atleast_2d(archive).astype(np.int64)
    elif hasattr(archive, "allocation_matrix"):
        matrix = archive.allocation_matrix()
    else:
        matrix = np.array([s.allocations for s in archive], dtype=np.int64)
    if matrix.size == 0:
        raise DomainError("archive", 0, "archive has no kept sweeps")
    return matrix


def canonical_labels(allocations: np.ndarray) -> np.ndarray:
    """Relabel clusters 0, 1, ... in order of first appearance."""
    _, first, inverse = np.unique(allocations, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[inverse.reshape(-1)]


def one_hot(allocations: np.ndarray) -> np.ndarray:
    labels = canonical_labels(allocations)
    out = np.zeros((labels.size, int(labels.max()) + 1))
    out[np.arange(labels.size), labels] = 1.0
    return out


def kn_posterior(archive) -> KnPosterior:
    """Empirical frequencies of k over the kept sweeps."""
    if hasattr(archive, "k_values"):
        ks = archive.k_values()
    else:
        ks = np.array([s.k for s in archive], dtype=np.int64)
    if ks.size == 0:
        raise DomainError("archive", 0, "archive has no kept sweeps")
    support, counts = np.unique(ks, return_counts=True)
    return KnPosterior(
        support=support.tolist(),
        probs=(counts / ks.size).tolist(),
        sweeps=int(ks.size),
    )


def coclustering_matrix(archive) -> np.ndarray:
    """pi[i, j] = fraction of kept sweeps with c_i = c_j."""
    matrix = _allocation_matrix(archive)
    n = matrix.shape[1]
    acc = np.zeros((n, n))
    for start in range(0, matrix.shape[0], COCLUSTER_BLOCK):
        block = np.hstack([one_hot(row) for row in matrix[start:start + COCLUSTER_BLOCK]])
        acc += block @ block.T
    return acc / matrix.shape[0]


def binder_loss(partition: np.ndarray, pi: np.ndarray, loss_ratio: float = 1.0) -> float:
    """
    Expected Binder loss of ``partition`` given co-clustering probabilities:
    sum over pairs i<j of pi_ij [c_i != c_j] + loss_ratio (1 - pi_ij) [c_i = c_j].
    """
    if not loss_ratio > 0:
        raise DomainError("loss_ratio", loss_ratio, "must be positive")
    n = pi.shape[0]
    onehot = one_hot(np.asarray(partition))
    weight = (1.0 + loss_ratio) * pi - loss_ratio
    same = float(np.sum(onehot * (weight @ onehot)))
    apart = float(pi.sum() - np.trace(pi))
    # diagonal terms of `same` contribute weight_ii = 1 each
    return 0.5 * (apart - (same - n))


def binder_partition(
    archive,
    loss_ratio: float = 1.0,
    pi: Union[np.ndarray, None] = None,
    return_loss: bool = False,
):
    """
    Visited partition minimizing the expected Binder loss.

    Args:
        archive: Kept sweeps, or an (S, n) allocation matrix
        loss_ratio: Cost of wrongly joining a pair relative to wrongly splitting it
        pi: Precomputed co-clustering matrix
        return_loss: Also return the minimal loss

    Returns:
        Canonically labelled allocation vector (and its loss)
    """
    matrix = _allocation_matrix(archive)
    if pi is None:
        pi = coclustering_matrix(matrix)
    candidates = np.unique(np.array([canonical_labels(row) for row in matrix]), axis=0)
    losses = np.array([binder_loss(c, pi, loss_ratio) for c in candidates])
    best = int(np.argmin(losses))
    logger.debug(f"Binder search over {candidates.shape[0]} visited partitions, loss {losses[best]:.6g}")
    if return_loss:
        return candidates[best], float(losses[best])
    return candidates[best]


def rand_index(a: Sequence[int], b: Sequence[int]) -> float:
    """Fraction of pairs on which two partitions agree."""
    a, b = np.asarray(a), np.asarray(b)
    if a.size != b.size:
        raise DomainError("partition", (a.size, b.size), "partitions differ in size")
    if a.size < 2:
        return 1.0
    same_a = a[:, None] == a[None, :]
    same_b = b[:, None] == b[None, :]
    iu = np.triu_indices(a.size, k=1)
    return float(np.mean(same_a[iu] == same_b[iu]))
