"""Reading and writing of run artifacts: series CSVs, JSON documents,
config sidecars, and the optimizer trial log.

Floats are written with repr so every artifact parses back to the exact
binary value; reruns with the same config and seed produce byte-identical
files.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .bayesopt.bounds import COORDS
from .bayesopt.turbo import TrialRecord
from .reservoir import HyperParams

HP_FIELDS = ("n_nodes", "spectral_radius", "connectivity",
             "leaking_rate", "bias", "regularization")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, float) or isinstance(value, np.floating):
        return repr(float(value))
    return str(value)


def write_series_csv(path, columns: dict) -> None:
    """Write named columns (equal-length 1-D arrays) as CSV."""
    names = list(columns)
    arrays = [np.asarray(columns[name]).ravel() for name in names]
    length = arrays[0].shape[0] if arrays else 0
    for name, arr in zip(names, arrays):
        if arr.shape[0] != length:
            raise ValueError(f"column {name!r} has length {arr.shape[0]}, expected {length}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for k in range(length):
            writer.writerow([_fmt(arr[k]) for arr in arrays])


def read_series_csv(path) -> dict:
    """Read a CSV of float columns back into arrays keyed by header name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        rows = list(reader)
    out = {}
    for j, name in enumerate(header):
        out[name] = np.array([float(row[j]) for row in rows], dtype=np.float64)
    return out


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def sidecar_path(path) -> str:
    """Config sidecar next to a CSV/SVG artifact: foo.csv -> foo.json."""
    root, ext = os.path.splitext(str(path))
    if ext == ".json":
        return root + ".meta.json"
    return root + ".json"


def load_hyperparams(path) -> HyperParams:
    doc = read_json(path)
    if "hyperparams" in doc:
        doc = doc["hyperparams"]
    return HyperParams.from_dict(doc)


# -- optimizer trial log -----------------------------------------------------

TRIAL_COLUMNS = (
    ("eval_index", "arm", "length")
    + tuple(f"coord_{name}" for name in COORDS)
    + HP_FIELDS
    + ("score", "wall_ms")
)


@dataclass
class TrialLogWriter:
    """Appends one CSV row per objective evaluation, flushed immediately so
    an interrupted search can be resumed from the file."""

    path: str

    def __post_init__(self):
        self._fh = open(self.path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(TRIAL_COLUMNS)
        self._fh.flush()

    def __call__(self, record: TrialRecord, hps: HyperParams) -> None:
        row = [str(record.eval_index), str(record.arm), repr(float(record.length))]
        row += [repr(float(v)) for v in record.point]
        row += [_fmt(getattr(hps, name)) for name in HP_FIELDS]
        row += [repr(float(record.score)), repr(float(record.wall_ms))]
        self._writer.writerow(row)
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def read_trial_log(path) -> list[TrialRecord]:
    """Parse a trial CSV back into records (for resuming a search)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        records = []
        for row in reader:
            records.append(
                TrialRecord(
                    eval_index=int(row["eval_index"]),
                    arm=int(row["arm"]),
                    length=float(row["length"]),
                    point=np.array([float(row[f"coord_{n}"]) for n in COORDS]),
                    score=float(row["score"]),
                    wall_ms=float(row["wall_ms"]),
                )
            )
    return records
