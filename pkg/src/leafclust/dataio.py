"""File formats: CCD datasets, distance matrices, dendrograms, densities.

Two dataset formats are supported.  Long CSV has a single ``id,value``
header and one row per CCD measurement, rows grouped by id; it needs no
padding even though traces have unequal lengths.  JSON maps each id to its
value array and may carry an optional ``groups`` object with a plant-type
label per id (the key ``groups`` is reserved for that purpose).

All writers are deterministic: identical inputs produce byte-identical
files.  Floats are written with 17 significant digits (CSV) or shortest
round-trip repr (JSON), so values survive a write/read cycle bit-for-bit.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .density import CcdSequence, StepDensity
from .distances import DistanceKind, DistanceMatrix
from .hcluster import Dendrogram, Merge


class DataFormatError(ValueError):
    """Raised when an input file cannot be parsed or violates its schema."""


DATASET_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of CCD traces, optionally tagged with groups."""

    sequences: tuple[CcdSequence, ...]
    groups: dict[str, str] | None = None

    def __post_init__(self):
        seqs = tuple(self.sequences)
        if not seqs:
            raise DataFormatError("dataset is empty")
        ids = [s.id for s in seqs]
        if len(set(ids)) != len(ids):
            raise DataFormatError("duplicate sequence ids in dataset")
        if self.groups is not None:
            unknown = set(self.groups) - set(ids)
            if unknown:
                raise DataFormatError(f"groups refer to unknown ids: {sorted(unknown)}")
        object.__setattr__(self, "sequences", seqs)

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.sequences]

    def group_of(self, seq_id: str) -> str | None:
        return None if self.groups is None else self.groups.get(seq_id)


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# datasets


def read_dataset(path, fmt: str = "csv") -> Dataset:
    path = Path(path)
    if fmt == "csv":
        return _read_dataset_csv(path)
    if fmt == "json":
        return _read_dataset_json(path)
    raise DataFormatError(f"unknown dataset format {fmt!r}")


def write_dataset(dataset: Dataset, path, fmt: str = "csv") -> None:
    path = Path(path)
    if fmt == "csv":
        _write_dataset_csv(dataset, path)
    elif fmt == "json":
        _write_dataset_json(dataset, path)
    else:
        raise DataFormatError(f"unknown dataset format {fmt!r}")


def _read_dataset_csv(path: Path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if [c.strip() for c in header] != ["id", "value"]:
            raise DataFormatError(f"{path}: expected header 'id,value', got {header}")
        order: list[str] = []
        values: dict[str, list[float]] = {}
        finished: set[str] = set()
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataFormatError(f"{path}: row {row_no}: expected 2 columns")
            seq_id, raw = row[0], row[1]
            if seq_id in finished:
                raise DataFormatError(
                    f"{path}: row {row_no}: rows for id {seq_id!r} are not contiguous"
                )
            if seq_id not in values:
                if order:
                    finished.add(order[-1])
                order.append(seq_id)
                values[seq_id] = []
            try:
                value = float(raw)
            except ValueError:
                raise DataFormatError(
                    f"{path}: row {row_no}: bad number {raw!r} for id {seq_id!r}"
                ) from None
            if value < 0:
                raise DataFormatError(
                    f"{path}: row {row_no}: negative CCD value for id {seq_id!r}"
                )
            values[seq_id].append(value)
    return Dataset(tuple(_build_sequence(path, i, values[i]) for i in order))


def _build_sequence(path: Path, seq_id: str, vals: list[float]) -> CcdSequence:
    if len(vals) < 2:
        raise DataFormatError(f"{path}: id {seq_id!r} has fewer than 2 values")
    return CcdSequence(seq_id, np.array(vals))


def _write_dataset_csv(dataset: Dataset, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "value"])
        for seq in dataset.sequences:
            for v in seq.values:
                writer.writerow([seq.id, _fmt17(v)])


def _read_dataset_json(path: Path) -> Dataset:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DataFormatError(f"{path}: expected a JSON object")
    groups = None
    seqs = []
    for key, val in doc.items():
        if key == "groups":
            if not isinstance(val, dict):
                raise DataFormatError(f"{path}: 'groups' must be an object")
            groups = {str(k): str(v) for k, v in val.items()}
            continue
        if not isinstance(val, list):
            raise DataFormatError(f"{path}: id {key!r} must map to an array")
        if len(val) < 2:
            raise DataFormatError(f"{path}: id {key!r} has fewer than 2 values")
        arr = np.array(val, dtype=float)
        if np.any(arr < 0):
            row = int(np.argmax(arr < 0))
            raise DataFormatError(
                f"{path}: id {key!r}: negative CCD value at position {row}"
            )
        seqs.append(CcdSequence(str(key), arr))
    if not seqs:
        raise DataFormatError(f"{path}: no sequences found")
    return Dataset(tuple(seqs), groups)


def _write_dataset_json(dataset: Dataset, path: Path) -> None:
    if "groups" in dataset.ids:
        raise DataFormatError("id 'groups' clashes with the reserved JSON key")
    doc: dict = {seq.id: [float(v) for v in seq.values] for seq in dataset.sequences}
    if dataset.groups is not None:
        doc["groups"] = {i: dataset.groups[i] for i in dataset.ids if i in dataset.groups}
    _dump_json(doc, path)


def _dump_json(doc, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# distance matrices


def write_matrix(dm: DistanceMatrix, path, fmt: str = "csv") -> None:
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([""] + list(dm.labels))
            for label, row in zip(dm.labels, dm.entries):
                writer.writerow([label] + [_fmt17(v) for v in row])
    elif fmt == "json":
        doc = {
            "labels": list(dm.labels),
            "kind": {"tag": dm.kind.name, "moment_order": dm.kind.moment_order},
            "entries": [[float(v) for v in row] for row in dm.entries],
        }
        _dump_json(doc, path)
    else:
        raise DataFormatError(f"unknown matrix format {fmt!r}")


def read_matrix(path, fmt: str = "csv", kind: DistanceKind | None = None) -> DistanceMatrix:
    """Read a matrix written by :func:`write_matrix`.

    CSV files do not carry the distance kind, so ``kind`` may be supplied;
    it defaults to L1.
    """
    path = Path(path)
    if fmt == "csv":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0][:1] != [""]:
            raise DataFormatError(f"{path}: not a labeled square matrix CSV")
        labels = rows[0][1:]
        if len(rows) != len(labels) + 1:
            raise DataFormatError(f"{path}: expected {len(labels)} data rows")
        entries = np.empty((len(labels), len(labels)))
        for i, row in enumerate(rows[1:]):
            if len(row) != len(labels) + 1 or row[0] != labels[i]:
                raise DataFormatError(f"{path}: malformed row {i + 2}")
            try:
                entries[i] = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {i + 2}: {exc}") from None
        return DistanceMatrix(tuple(labels), entries, kind or DistanceKind("l1"))
    if fmt == "json":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
        try:
            file_kind = DistanceKind(doc["kind"]["tag"], doc["kind"]["moment_order"])
            return DistanceMatrix(
                tuple(doc["labels"]), np.array(doc["entries"], dtype=float),
                kind or file_kind,
            )
        except (KeyError, TypeError) as exc:
            raise DataFormatError(f"{path}: bad matrix schema: {exc}") from None
    raise DataFormatError(f"unknown matrix format {fmt!r}")


# ---------------------------------------------------------------------------
# dendrograms


def write_dendrogram(dend: Dendrogram, path) -> None:
    doc = {
        "labels": list(dend.labels),
        "merges": [
            {"left": mg.left, "right": mg.right, "height": float(mg.height), "size": mg.size}
            for mg in dend.merges
        ],
    }
    _dump_json(doc, Path(path))


def read_dendrogram(path) -> Dendrogram:
    path = Path(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    try:
        merges = tuple(
            Merge(int(r["left"]), int(r["right"]), float(r["height"]), int(r["size"]))
            for r in doc["merges"]
        )
        return Dendrogram(tuple(doc["labels"]), merges)
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"{path}: bad dendrogram schema: {exc}") from None


def write_clusters(labels, assignment, k: int, path) -> None:
    """Flat-cluster assignment as JSON: {"k": k, "assignment": {label: id}}."""
    doc = {
        "k": int(k),
        "assignment": {str(label): int(c) for label, c in zip(labels, assignment)},
    }
    _dump_json(doc, Path(path))


# ---------------------------------------------------------------------------
# densities (intermediate artifact for stagewise CLI runs)


def write_densities(densities, path) -> None:
    densities = list(densities)
    ids = [d.source_id for d in densities]
    if len(set(ids)) != len(ids):
        raise DataFormatError("duplicate source ids among densities")
    doc = {
        "densities": {
            d.source_id: {
                "breakpoints": [float(b) for b in d.breakpoints],
                "heights": [float(h) for h in d.heights],
                "rotation": float(d.rotation),
                "direction_defined": bool(d.direction_defined),
            }
            for d in densities
        }
    }
    _dump_json(doc, Path(path))


def read_densities(path) -> list[StepDensity]:
    path = Path(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    try:
        return [
            StepDensity(
                np.array(rec["breakpoints"], dtype=float),
                np.array(rec["heights"], dtype=float),
                source_id=str(seq_id),
                rotation=float(rec["rotation"]),
                direction_defined=bool(rec["direction_defined"]),
            )
            for seq_id, rec in doc["densities"].items()
        ]
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"{path}: bad densities schema: {exc}") from None
