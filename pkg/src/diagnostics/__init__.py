"""
diagnostics - goodness of fit and posterior partition summaries.

Components:
- predictive_indexes: SSE, SSAE, CPO/LPML, WAIC (two penalties)
- kn_posterior: posterior law of the number of clusters
- coclustering_matrix / binder_partition: Binder-loss point estimate
- fit_report / write_fit_report: everything above for one chain, on disk
"""

from .models import FitReport, KnPosterior
from .indexes import (
    allocated_moments,
    log_cpo,
    log_density_matrix,
    predictive_indexes,
    waic_terms,
)
from .clustering import (
    binder_loss,
    binder_partition,
    canonical_labels,
    coclustering_matrix,
    kn_posterior,
    rand_index,
)
from .report import fit_report, write_fit_report

__all__ = [
    # Models
    "FitReport",
    "KnPosterior",
    # Indexes
    "allocated_moments",
    "log_cpo",
    "log_density_matrix",
    "predictive_indexes",
    "waic_terms",
    # Partition
    "binder_loss",
    "binder_partition",
    "canonical_labels",
    "coclustering_matrix",
    "kn_posterior",
    "rand_index",
    # Report
    "fit_report",
    "write_fit_report",
]
