"""Feature/label encoding: one-hot categoricals, normalized numerics.

`TabularEncoder` is a scikit-learn style transformer (fit on the training
table, transform anywhere) so normalization statistics never leak from test
data. Category and class orders are lexicographic for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ConfigError, DataError
from .pipeline import PrepSchema


@dataclass
class LabeledDataset:
    features: np.ndarray  # [N, F] float32
    labels: np.ndarray  # [N] int64
    label_names: list[str]
    feature_names: list[str]

    def __post_init__(self):
        if not np.all(np.isfinite(self.features)):
            raise DataError("feature matrix contains non-finite values")
        if self.labels.size and (self.labels.min() < 0 or
                                 self.labels.max() >= len(self.label_names)):
            raise DataError("label index out of range")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    def subset(self, idx: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(self.features[idx], self.labels[idx],
                              self.label_names, self.feature_names)


class TabularEncoder(BaseEstimator, TransformerMixin):
    """Encode a cleaned table into a dense float32 matrix plus integer labels.

    Parameters
    ----------
    schema : PrepSchema
        Names the label column, explicit categorical columns (None = infer
        object-dtype columns) and the normalization mode.
    cardinality_cap : int
        Maximum distinct categories allowed per categorical column.
    """

    def __init__(self, schema: PrepSchema, cardinality_cap: int = 64):
        self.schema = schema
        self.cardinality_cap = cardinality_cap

    def fit(self, table: pd.DataFrame, y=None):
        schema = self.schema
        if schema.label_column not in table.columns:
            raise ConfigError(f"label column {schema.label_column!r} not in table")
        feats = table.drop(columns=[schema.label_column])
        if schema.categorical_columns is None:
            cat_cols = [c for c in feats.columns
                        if not pd.api.types.is_numeric_dtype(feats[c])]
        else:
            unknown = [c for c in schema.categorical_columns if c not in feats.columns]
            if unknown:
                raise ConfigError(f"categorical column(s) not in table: {unknown}")
            cat_cols = list(schema.categorical_columns)

        self.categories_: dict[str, list[str]] = {}
        for col in cat_cols:
            cats = sorted(str(v) for v in feats[col].unique())
            if len(cats) > self.cardinality_cap:
                raise ConfigError(
                    f"column {col!r} has {len(cats)} categories, "
                    f"cap is {self.cardinality_cap}"
                )
            self.categories_[col] = cats

        self.columns_ = list(feats.columns)
        self.label_names_ = sorted(str(v) for v in table[schema.label_column].unique())

        self.feature_names_ = []
        for col in self.columns_:
            if col in self.categories_:
                self.feature_names_ += [f"{col}={c}" for c in self.categories_[col]]
            else:
                self.feature_names_.append(col)

        # normalization statistics over the numeric columns of the encoded
        # training matrix; one-hot indicators are never rescaled
        numeric = np.zeros(len(self.feature_names_), dtype=bool)
        pos = 0
        for col in self.columns_:
            width = len(self.categories_[col]) if col in self.categories_ else 1
            if col not in self.categories_:
                numeric[pos] = True
            pos += width

        mat = self._encode_features(table)
        mode = schema.normalization
        if mode == "zscore":
            mean = mat.mean(axis=0)
            std = mat.std(axis=0)
            use = numeric & (std > 0)  # zero-variance columns pass through
            scale = np.where(use, std, 1.0)
            offset = np.where(use, mean, 0.0)
        elif mode == "minmax":
            lo, hi = mat.min(axis=0), mat.max(axis=0)
            rng = hi - lo
            use = numeric & (rng > 0)
            scale = np.where(use, rng, 1.0)
            offset = np.where(use, lo, 0.0)
        else:
            scale = np.ones(mat.shape[1])
            offset = np.zeros(mat.shape[1])
        self.offset_ = offset.astype(np.float64)
        self.scale_ = scale.astype(np.float64)
        self.unseen_categories_ = 0
        return self

    def _encode_features(self, table: pd.DataFrame) -> np.ndarray:
        missing = [c for c in self.columns_ if c not in table.columns]
        if missing:
            raise DataError(f"table is missing encoded column(s): {missing}")
        blocks = []
        unseen = 0
        for col in self.columns_:
            if col in self.categories_:
                cats = self.categories_[col]
                values = table[col].astype(str).to_numpy()
                code = np.searchsorted(cats, values)
                code = np.clip(code, 0, len(cats) - 1)
                hit = np.array(cats)[code] == values  # unseen -> all-zero row
                onehot = np.zeros((len(values), len(cats)))
                rows = np.flatnonzero(hit)
                onehot[rows, code[rows]] = 1.0
                unseen += int((~hit).sum())
                blocks.append(onehot)
            else:
                numeric = pd.to_numeric(table[col], errors="coerce").to_numpy(float)
                if np.isnan(numeric).any():
                    raise DataError(f"non-numeric value in numeric column {col!r}")
                blocks.append(numeric[:, None])
        self.unseen_categories_ = unseen
        return np.concatenate(blocks, axis=1)

    def transform(self, table: pd.DataFrame) -> np.ndarray:
        mat = self._encode_features(table)
        return ((mat - self.offset_) / self.scale_).astype(np.float32)

    def encode_labels(self, table: pd.DataFrame) -> np.ndarray:
        values = table[self.schema.label_column].astype(str).to_numpy()
        code = np.searchsorted(self.label_names_, values)
        code = np.clip(code, 0, len(self.label_names_) - 1)
        bad = np.array(self.label_names_)[code] != values
        if bad.any():
            raise DataError(
                f"unknown class name(s): {sorted(set(values[bad]))[:5]}"
            )
        return code.astype(np.int64)

    def decode_labels(self, codes: np.ndarray) -> list[str]:
        return [self.label_names_[int(c)] for c in codes]

    def encode_dataset(self, table: pd.DataFrame) -> LabeledDataset:
        return LabeledDataset(self.transform(table), self.encode_labels(table),
                              list(self.label_names_), list(self.feature_names_))

    # -- serialization (embedded in the model file) -------------------------

    def to_metadata(self) -> dict:
        return {
            "schema": {
                "label_column": self.schema.label_column,
                "drop_columns": list(self.schema.drop_columns),
                "categorical_columns": (None if self.schema.categorical_columns is None
                                        else list(self.schema.categorical_columns)),
                "normalization": self.schema.normalization,
            },
            "cardinality_cap": self.cardinality_cap,
            "columns": self.columns_,
            "categories": self.categories_,
            "label_names": self.label_names_,
            "feature_names": self.feature_names_,
            "offset": self.offset_.tolist(),
            "scale": self.scale_.tolist(),
        }

    @classmethod
    def from_metadata(cls, meta: dict) -> "TabularEncoder":
        schema = PrepSchema(**meta["schema"])
        enc = cls(schema, meta["cardinality_cap"])
        enc.columns_ = list(meta["columns"])
        enc.categories_ = {k: list(v) for k, v in meta["categories"].items()}
        enc.label_names_ = list(meta["label_names"])
        enc.feature_names_ = list(meta["feature_names"])
        enc.offset_ = np.asarray(meta["offset"], dtype=np.float64)
        enc.scale_ = np.asarray(meta["scale"], dtype=np.float64)
        enc.unseen_categories_ = 0
        return enc
