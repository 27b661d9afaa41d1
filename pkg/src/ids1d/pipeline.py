"""Tabular data pipeline: CSV loading, cleaning, stratified split, class stats.

Tables are plain pandas DataFrames; numeric-looking cells are parsed as
numbers and empty/nan cells become missing values. All operations are pure
and deterministic under a fixed seed and schema.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError

# Identifier / free-text / payload columns of the Edge-IIoTset ML-ready CSV.
# The cleaning schema is configurable; this default targets columns that carry
# no per-flow signal (timestamps, raw addresses, URIs, payload bytes).
DEFAULT_EDGE_IIOTSET_DROP = [
    "frame.time",
    "ip.src_host",
    "ip.dst_host",
    "arp.src.proto_ipv4",
    "arp.dst.proto_ipv4",
    "http.file_data",
    "http.request.full_uri",
    "icmp.transmit_timestamp",
    "http.request.uri.query",
    "tcp.options",
    "tcp.payload",
    "tcp.srcport",
    "tcp.dstport",
    "udp.port",
    "mqtt.msg",
    "Attack_label",  # binary indicator, redundant with the class label
]


@dataclass
class PrepSchema:
    """What to drop, what the label is, what gets one-hot encoded."""

    label_column: str
    drop_columns: list[str] = field(default_factory=list)
    categorical_columns: list[str] | None = None  # None = infer from dtypes
    normalization: str = "zscore"  # zscore | minmax | none

    def __post_init__(self):
        if self.label_column in self.drop_columns:
            raise ConfigError(f"label column {self.label_column!r} is in drop_columns")
        if self.categorical_columns is not None:
            overlap = set(self.drop_columns) & set(self.categorical_columns)
            if overlap:
                raise ConfigError(f"columns both dropped and categorical: {sorted(overlap)}")
        if self.normalization not in ("zscore", "minmax", "none"):
            raise ConfigError(f"unknown normalization {self.normalization!r}")


@dataclass
class CleanStats:
    rows_in: int
    dropped_nan: int
    dropped_duplicates: int
    rows_out: int


def load_csv(path: str | Path, delimiter: str = ",") -> pd.DataFrame:
    """Load a delimited text file with a header row into a typed table."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"cannot read {path}: no such file")
    try:
        df = pd.read_csv(path, sep=delimiter, low_memory=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError as exc:
        raise DataError(f"{path}: empty table") from exc
    except pd.errors.ParserError as exc:
        # pandas reports the offending line number in the message
        raise DataError(f"{path}: ragged row ({exc})") from exc
    if df.shape[0] == 0:
        raise DataError(f"{path}: empty table (header only)")
    return df


def clean(table: pd.DataFrame, schema: PrepSchema) -> tuple[pd.DataFrame, CleanStats]:
    """Drop schema columns, then rows with missing values, then exact
    duplicates (first occurrence kept), in that order."""
    missing = [c for c in schema.drop_columns + [schema.label_column]
               if c not in table.columns]
    if missing:
        raise ConfigError(f"schema references unknown column(s): {missing}")
    rows_in = len(table)
    out = table.drop(columns=schema.drop_columns)
    no_nan = out.dropna(axis=0)
    dropped_nan = len(out) - len(no_nan)
    deduped = no_nan.drop_duplicates(keep="first").reset_index(drop=True)
    dropped_dup = len(no_nan) - len(deduped)
    return deduped, CleanStats(rows_in, dropped_nan, dropped_dup, len(deduped))


def stratified_split_indices(
    labels: np.ndarray, train_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class shuffle-and-cut. Classes with a single row go to train with a
    warning; every class with >= 2 rows keeps at least one test row."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < 2:
            warnings.warn(f"class {cls} has {len(idx)} row(s); assigned to train")
            train_parts.append(idx)
            continue
        n_train = int(round(len(idx) * train_fraction))
        n_train = min(max(n_train, 1), len(idx) - 1)
        perm = rng.permutation(idx)
        train_parts.append(np.sort(perm[:n_train]))
        test_parts.append(np.sort(perm[n_train:]))
    train_idx = np.sort(np.concatenate(train_parts)) if train_parts else np.array([], int)
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.array([], int)
    return train_idx, test_idx


def class_stats(labels: np.ndarray, label_names: list[str]) -> pd.DataFrame:
    """Per-class counts and fractions as a `class,count,fraction` table."""
    labels = np.asarray(labels)
    counts = np.bincount(labels, minlength=len(label_names)) if labels.size else \
        np.zeros(len(label_names), dtype=int)
    rows = [
        {"class": name, "count": int(c), "fraction": float(c) / labels.size}
        for name, c in zip(label_names, counts)
        if labels.size
    ]
    return pd.DataFrame(rows, columns=["class", "count", "fraction"])
