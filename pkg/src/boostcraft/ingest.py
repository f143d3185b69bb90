"""CSV ingestion with one-hot expansion of categorical columns.

Numeric columns pass through as 64-bit floats; a column where no more than
half the values parse as numbers is treated as categorical and expanded into
one indicator per distinct value (first-appearance order, named "col=value").
A numeric-majority column with stray unparseable values is rejected rather
than coerced, as are missing values and non-finite numbers.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, IngestError


@dataclass(frozen=True)
class IngestSpec:
    """How to read one CSV: where the label lives and which raw value maps
    to the positive (+1, minority) class."""

    path: str
    label_column: str | int
    positive_label: str
    delimiter: str = ","
    has_header: bool = True


def _read_rows(spec: IngestSpec) -> tuple[list[str], list[list[str]]]:
    try:
        handle = open(spec.path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {spec.path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle, delimiter=spec.delimiter)
        rows = [row for row in reader if row]
    if not rows:
        raise IngestError(f"{spec.path} is empty")
    if spec.has_header:
        header, rows = rows[0], rows[1:]
    else:
        header = [f"col{j}" for j in range(len(rows[0]))]
    if not rows:
        raise IngestError(f"{spec.path} has no data rows")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise IngestError(f"row {i + 1}: expected {width} fields, got {len(row)}")
    return header, rows


def _parse_number(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def ingest_csv(spec: IngestSpec) -> Dataset:
    """Load a CSV into a Dataset with canonical +/-1 labels."""
    header, rows = _read_rows(spec)

    if isinstance(spec.label_column, int) or str(spec.label_column).isdigit():
        label_idx = int(spec.label_column)
        if not 0 <= label_idx < len(header):
            raise IngestError(f"label column index {label_idx} out of range")
    else:
        try:
            label_idx = header.index(str(spec.label_column))
        except ValueError:
            raise IngestError(
                f"label column {spec.label_column!r} not in header") from None

    raw_labels = [row[label_idx] for row in rows]
    distinct = sorted(set(raw_labels))
    if len(distinct) != 2:
        raise IngestError(
            f"label column must have exactly 2 distinct values, got {distinct}")
    positive = str(spec.positive_label)
    if positive not in distinct:
        raise IngestError(
            f"positive label {positive!r} not among label values {distinct}")
    labels = np.array([1 if value == positive else -1 for value in raw_labels],
                      dtype=np.int64)

    feature_cols = [j for j in range(len(header)) if j != label_idx]
    blocks: list[np.ndarray] = []
    names: list[str] = []
    for j in feature_cols:
        column = [row[j] for row in rows]
        for i, value in enumerate(column):
            if value.strip() == "":
                raise IngestError(
                    f"missing value at row {i + 1}, column {header[j]!r}")
        parsed = [_parse_number(value) for value in column]
        numeric = sum(value is not None for value in parsed)
        if numeric == len(column):
            for i, value in enumerate(parsed):
                if not math.isfinite(value):
                    raise IngestError(
                        f"non-finite value at row {i + 1}, column {header[j]!r}")
            blocks.append(np.array(parsed, dtype=np.float64)[:, None])
            names.append(header[j])
        elif numeric > len(column) / 2:
            bad = next(i for i, value in enumerate(parsed) if value is None)
            raise IngestError(
                f"unparseable numeric at row {bad + 1}, column {header[j]!r} "
                f"(column is numeric-majority)")
        else:
            seen: list[str] = []
            for value in column:
                if value not in seen:
                    seen.append(value)
            indicators = np.zeros((len(column), len(seen)))
            index = {value: k for k, value in enumerate(seen)}
            for i, value in enumerate(column):
                indicators[i, index[value]] = 1.0
            blocks.append(indicators)
            names.extend(f"{header[j]}={value}" for value in seen)

    if not blocks:
        raise IngestError("no feature columns besides the label")
    return Dataset(np.hstack(blocks), labels, names)


def write_dataset_csv(dataset: Dataset, path) -> None:
    """Canonical CSV form: feature columns (full-precision floats), then a
    ``target`` column holding 1 / -1. Re-ingesting with positive label "1"
    reproduces the dataset exactly."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(dataset.feature_names) + ["target"])
        for i in range(dataset.n):
            row = [repr(value) for value in dataset.features[i].tolist()]
            writer.writerow(row + [str(int(dataset.labels[i]))])


def canonical_spec(path) -> IngestSpec:
    """IngestSpec matching :func:`write_dataset_csv` output."""
    return IngestSpec(path=str(path), label_column="target", positive_label="1")
