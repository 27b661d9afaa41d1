"""scikit-learn style front door for the conv net.

`ConvNetClassifier` exposes fit/predict/predict_proba/score and get_params so
the network slots into sklearn pipelines and model selection utilities. The
heavy lifting lives in `trainer` and `network`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .encoding import LabeledDataset
from .errors import DataError
from .metrics import predict, predict_proba
from .trainer import TrainConfig, train


class ConvNetClassifier(BaseEstimator, ClassifierMixin):
    """1D-CNN multiclass classifier over dense tabular feature rows."""

    def __init__(self, epochs=3, batch_size=256, learning_rate=1e-3,
                 dropout_rate=0.5, conv_filters=(64, 128, 256), kernel_len=3,
                 pool_len=2, dense_units=128, seed=0, validation_fraction=0.1):
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.dropout_rate = dropout_rate
        self.conv_filters = conv_filters
        self.kernel_len = kernel_len
        self.pool_len = pool_len
        self.dense_units = dense_units
        self.seed = seed
        self.validation_fraction = validation_fraction

    def _config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs, batch_size=self.batch_size,
            learning_rate=self.learning_rate, dropout_rate=self.dropout_rate,
            conv_filters=tuple(self.conv_filters), kernel_len=self.kernel_len,
            pool_len=self.pool_len, dense_units=self.dense_units,
            seed=self.seed, validation_fraction=self.validation_fraction,
        )

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float32)
        y = np.asarray(y)
        if X.ndim != 2 or len(X) != len(y):
            raise DataError(f"X must be [N, F] with matching y; got {X.shape} / {y.shape}")
        self.classes_, codes = np.unique(y, return_inverse=True)
        ds = LabeledDataset(X, codes.astype(np.int64),
                            [str(c) for c in self.classes_],
                            [f"f{i}" for i in range(X.shape[1])])
        self.net_, self.report_ = train(ds, self._config())
        return self

    def predict(self, X):
        codes = predict(self.net_, np.asarray(X, dtype=np.float32))
        return self.classes_[codes]

    def predict_proba(self, X):
        return predict_proba(self.net_, np.asarray(X, dtype=np.float32))
