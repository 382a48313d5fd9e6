"""
Predictive goodness-of-fit indexes from a chain archive.

SSE and SSAE use, per sweep, the kernel moments of the atom each datum is
allocated to; mean and variance are then averaged over sweeps (the variance
as the full predictive variance E[var] + Var[mean]). CPO is the harmonic
mean of per-sweep conditional densities, evaluated in log space.
"""

import logging
import math
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from exceptions import DomainError
from mixture import Dataset, MixtureModel, sweep_logdensity
from .models import FitReport

logger = logging.getLogger(__name__)


def log_density_matrix(sweeps: Sequence, data: Dataset, model: MixtureModel) -> np.ndarray:
    """(S, n) matrix of log f_s(y_i) = log sum_j P_j f(y_i; tau_j)."""
    return np.array([sweep_logdensity(model, s, data.y, data.X) for s in sweeps])


def allocated_moments(sweeps: Iterable, data: Dataset, model: MixtureModel) -> tuple[np.ndarray, np.ndarray]:
    """
    Per-datum predictive mean and variance from the allocated atoms.

    Returns (mean, var), each of shape (n,).
    """
    rows = np.arange(data.n)
    first = np.zeros(data.n)
    second = np.zeros(data.n)
    count = 0
    for s in sweeps:
        mean, var = model.atom_moments(s.locations[: s.k], data.n, data.X, s.global_params)
        m = mean[rows, s.allocations]
        first += m
        second += var[rows, s.allocations] + m * m
        count += 1
    first /= count
    return first, second / count - first * first


def log_cpo(log_dens: np.ndarray) -> np.ndarray:
    """log CPO_i = log S - logsumexp_s(-log f_s(y_i))."""
    return math.log(log_dens.shape[0]) - special.logsumexp(-log_dens, axis=0)


def waic_terms(log_dens: np.ndarray) -> dict:
    """
    Log pointwise predictive density and the two effective-parameter
    penalties (mean-based and variance-based).
    """
    s = log_dens.shape[0]
    lppd_i = special.logsumexp(log_dens, axis=0) - math.log(s)
    p1_i = 2.0 * (lppd_i - log_dens.mean(axis=0))
    p2_i = log_dens.var(axis=0, ddof=1)
    lppd = float(lppd_i.sum())
    p1 = float(p1_i.sum())
    p2 = float(p2_i.sum())
    return {
        "lppd": lppd,
        "p_waic1": p1,
        "p_waic2": p2,
        "waic1": -2.0 * (lppd - p1),
        "waic2": -2.0 * (lppd - p2),
    }


def predictive_indexes(archive: Sequence, data: Dataset, model: MixtureModel) -> FitReport:
    """
    SSE, SSAE, CPO/LPML and WAIC for the kept sweeps of a chain.

    Args:
        archive: Kept sweeps (a ChainArchive or any sequence of sweep records)
        data: Dataset the chain was run on
        model: Mixture model bound to ``data``

    Returns:
        FitReport with the numeric fields filled in
    """
    sweeps = list(archive)
    if len(sweeps) < 2:
        raise DomainError("archive", len(sweeps), "needs at least 2 kept sweeps")

    log_dens = log_density_matrix(sweeps, data, model)
    if not np.all(np.isfinite(log_dens)):
        bad = np.argwhere(~np.isfinite(log_dens))
        raise DomainError("log_density", bad[:5].tolist(), "conditional density underflows to zero")

    mean, var = allocated_moments(sweeps, data, model)
    resid = data.y - mean
    sse = float(resid @ resid)
    ssae = float(np.sum(np.abs(resid) / np.sqrt(np.maximum(var, np.finfo(float).tiny))))

    lcpo = log_cpo(log_dens)
    cpo = np.exp(lcpo)
    if not np.all(np.isfinite(cpo) & (cpo > 0)):
        logger.warning(f"{int(np.sum(~(cpo > 0)))} CPO values underflow; LPML uses log CPO")
        cpo = np.maximum(cpo, np.finfo(float).tiny)

    w = waic_terms(log_dens)
    report = FitReport(
        n=data.n,
        sweeps=len(sweeps),
        sse=sse,
        ssae=ssae,
        lpml=float(lcpo.sum()),
        waic1=w["waic1"],
        waic2=w["waic2"],
        elpd_waic1=-0.5 * w["waic1"],
        elpd_waic2=-0.5 * w["waic2"],
        p_waic1=w["p_waic1"],
        p_waic2=w["p_waic2"],
        cpo=cpo.tolist(),
    )
    logger.info(
        "Predictive indexes computed",
        extra={"sweeps": report.sweeps, "lpml": report.lpml, "waic2": report.waic2},
    )
    return report
