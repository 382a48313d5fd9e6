"""
ChainArchive - kept sweeps of one chain and their on-disk layout.

Layout of an archive directory:
    chain.csv        one row per kept sweep (iteration, k, u, n_na, total_mass, epsilon, globals)
    atoms.csv        one row per (sweep, atom): allocated flag, jump, weight, location columns
    allocations.csv  one row per kept sweep, one column per datum
    archive.yaml     location columns, n, seed, chain id, sweep count

Reals are written with 17 significant digits so that a read-back archive
reproduces every derived quantity bit for bit.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np
import pandas as pd
import yaml

from exceptions import DataIngestError
from .models import SweepRecord

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
TRACE_COLUMNS = ("iteration", "k", "u", "n_na", "total_mass", "epsilon")


@dataclass
class ChainArchive:
    location_columns: tuple[str, ...]
    n: int
    seed: Optional[int] = None
    chain_id: int = 0
    sweeps: list[SweepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.sweeps)

    def __iter__(self) -> Iterator[SweepRecord]:
        return iter(self.sweeps)

    def __getitem__(self, index: int) -> SweepRecord:
        return self.sweeps[index]

    def append(self, record: SweepRecord) -> None:
        if record.allocations.size != self.n:
            raise ValueError(f"sweep has {record.allocations.size} allocations, archive expects {self.n}")
        self.sweeps.append(record)

    # ------------------------------------------------------------ frames

    def traces_frame(self) -> pd.DataFrame:
        return pd.DataFrame([s.trace_row() for s in self.sweeps])

    def atoms_frame(self) -> pd.DataFrame:
        frames = []
        for s in self.sweeps:
            m = s.jumps.size
            frame = pd.DataFrame(
                {
                    "iteration": np.full(m, s.iteration),
                    "atom": np.arange(m),
                    "allocated": np.arange(m) < s.k,
                    "jump": s.jumps,
                    "weight": s.weights,
                }
            )
            for j, col in enumerate(self.location_columns):
                frame[col] = s.locations[:, j]
            frames.append(frame)
        if not frames:
            return pd.DataFrame(columns=["iteration", "atom", "allocated", "jump", "weight", *self.location_columns])
        return pd.concat(frames, ignore_index=True)

    def allocations_frame(self) -> pd.DataFrame:
        columns = [f"c{i}" for i in range(self.n)]
        rows = np.array([s.allocations for s in self.sweeps], dtype=np.int64).reshape(-1, self.n)
        frame = pd.DataFrame(rows, columns=columns)
        frame.insert(0, "iteration", [s.iteration for s in self.sweeps])
        return frame

    def k_values(self) -> np.ndarray:
        return np.array([s.k for s in self.sweeps], dtype=np.int64)

    def allocation_matrix(self) -> np.ndarray:
        """(sweeps, n) cluster labels."""
        return np.array([s.allocations for s in self.sweeps], dtype=np.int64).reshape(-1, self.n)

    # ------------------------------------------------------------ disk

    def metadata(self) -> dict:
        return {
            "location_columns": list(self.location_columns),
            "n": self.n,
            "seed": self.seed,
            "chain_id": self.chain_id,
            "kept_sweeps": len(self.sweeps),
        }

    def write(self, directory: Union[str, Path]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self.traces_frame().to_csv(directory / "chain.csv", index=False, float_format=FLOAT_FORMAT)
        self.atoms_frame().to_csv(directory / "atoms.csv", index=False, float_format=FLOAT_FORMAT)
        self.allocations_frame().to_csv(directory / "allocations.csv", index=False)
        with open(directory / "archive.yaml", "w", encoding="utf-8") as f:
            yaml.safe_dump(self.metadata(), f, sort_keys=False)
        logger.info(f"Archive written: {directory} ({len(self.sweeps)} sweeps)")
        return directory

    @classmethod
    def read(cls, directory: Union[str, Path]) -> "ChainArchive":
        directory = Path(directory)
        meta_path = directory / "archive.yaml"
        if not meta_path.exists():
            raise DataIngestError(str(meta_path), "archive metadata not found")
        with open(meta_path, encoding="utf-8") as f:
            meta = yaml.safe_load(f) or {}

        location_columns = tuple(meta.get("location_columns", ()))
        n = int(meta["n"])
        traces = pd.read_csv(directory / "chain.csv", float_precision="round_trip")
        atoms = pd.read_csv(directory / "atoms.csv", float_precision="round_trip")
        allocations = pd.read_csv(directory / "allocations.csv", float_precision="round_trip")

        missing = [c for c in (*TRACE_COLUMNS,) if c not in traces.columns]
        if missing:
            raise DataIngestError(str(directory / "chain.csv"), f"missing columns {missing}")
        global_cols = [c for c in traces.columns if c not in TRACE_COLUMNS]
        atoms_by_iter = {int(it): grp.sort_values("atom") for it, grp in atoms.groupby("iteration")}
        alloc_by_iter = allocations.set_index("iteration")

        archive = cls(location_columns=location_columns, n=n, seed=meta.get("seed"), chain_id=int(meta.get("chain_id", 0)))
        for row in traces.itertuples(index=False):
            row = row._asdict()
            iteration = int(row["iteration"])
            grp = atoms_by_iter.get(iteration)
            if grp is None:
                raise DataIngestError(str(directory / "atoms.csv"), f"no atoms for iteration {iteration}")
            archive.append(
                SweepRecord(
                    iteration=iteration,
                    u=float(row["u"]),
                    k=int(row["k"]),
                    epsilon=float(row["epsilon"]),
                    jumps=grp["jump"].to_numpy(dtype=float),
                    weights=grp["weight"].to_numpy(dtype=float),
                    locations=grp[list(location_columns)].to_numpy(dtype=float),
                    allocations=alloc_by_iter.loc[iteration].to_numpy(dtype=np.int64),
                    global_params={c: float(row[c]) for c in global_cols},
                )
            )
        return archive
