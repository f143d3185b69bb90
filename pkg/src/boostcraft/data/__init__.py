"""Bundled sample datasets for out-of-the-box runs.

Small imbalanced binarizations derived from public datasets shipped with
scikit-learn (optical digits, diabetes progression, Wisconsin breast cancer);
see tools/make_bundled_data.py in the repository for the exact derivation.
"""
from __future__ import annotations

from importlib import resources

from ..ingest import IngestSpec, ingest_csv

# name -> (filename, label column, positive value)
REGISTRY = {
    "digits8_60": ("digits8_60.csv", "target", "pos"),
    "digits8_40": ("digits8_40.csv", "target", "pos"),
    "diabetes44": ("diabetes44.csv", "target", "pos"),
    "wdbc40": ("wdbc40.csv", "target", "pos"),
}


def available() -> tuple:
    return tuple(sorted(REGISTRY))


def bundled_path(name: str):
    filename, _, _ = REGISTRY[name]
    return resources.files(__package__) / filename


def load_bundled(name: str):
    filename, label, positive = REGISTRY[name]
    path = resources.files(__package__) / filename
    return ingest_csv(IngestSpec(path=str(path), label_column=label,
                                 positive_label=positive))
