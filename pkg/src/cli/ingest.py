"""
CSV ingestion into a Dataset.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from exceptions import DataIngestError
from mixture import Dataset

logger = logging.getLogger(__name__)


def ingest_csv(
    path: Union[str, Path],
    response: str,
    covariates: Optional[Sequence[str]] = None,
) -> Dataset:
    """
    Read a comma-separated file with a header row.

    Rows with a missing or non-numeric value in any used column are
    rejected; reported row numbers count data rows from 1.

    Raises:
        DataIngestError: unreadable file, missing column or bad cells
    """
    path = Path(path)
    covariates = list(covariates or [])
    if not path.exists():
        raise DataIngestError(str(path), "file not found")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except Exception as e:
        raise DataIngestError(str(path), f"cannot parse CSV: {e}")

    columns = [response, *covariates]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataIngestError(str(path), f"missing column(s) {missing}")

    raw = frame[columns].apply(lambda col: col.str.strip())
    numeric = raw.apply(pd.to_numeric, errors="coerce")
    empty = (raw == "") | raw.isin(["NA", "NaN", "nan"])
    if empty.any().any():
        rows = (np.flatnonzero(empty.any(axis=1).to_numpy()) + 1).tolist()
        raise DataIngestError(str(path), "missing values", rows)
    bad = numeric.isna() | ~np.isfinite(numeric.fillna(0.0))
    if bad.any().any():
        rows = (np.flatnonzero(bad.any(axis=1).to_numpy()) + 1).tolist()
        cols = [c for c in columns if bad[c].any()]
        raise DataIngestError(str(path), f"non-numeric value in column(s) {cols}", rows)
    if len(numeric) == 0:
        raise DataIngestError(str(path), "no data rows")

    dataset = Dataset(
        y=numeric[response].to_numpy(dtype=float),
        X=numeric[covariates].to_numpy(dtype=float) if covariates else None,
        response=response,
        covariates=tuple(covariates),
    )
    logger.info("Dataset loaded", extra={"path": str(path), "n": dataset.n, "p": dataset.p})
    return dataset
