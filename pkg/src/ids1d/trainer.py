"""Mini-batch training loop: shuffling, validation carve-out, loss tracking,
wall-time capture and checkpointing."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import model_io
from .encoding import LabeledDataset
from .errors import ConfigError, DataError, NumericError
from .layers import softmax_cross_entropy
from .network import Architecture, ConvNet
from .optim import AdamState, adam_step
from .pipeline import stratified_split_indices


@dataclass
class TrainConfig:
    epochs: int = 3
    batch_size: int = 256
    learning_rate: float = 1e-3
    dropout_rate: float = 0.5
    conv_filters: tuple[int, int, int] = (64, 128, 256)
    kernel_len: int = 3
    pool_len: int = 2
    dense_units: int = 128
    seed: int = 0
    validation_fraction: float = 0.1

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(
                f"validation_fraction must be in [0, 1), got {self.validation_fraction}"
            )

    def architecture(self, input_len: int, num_classes: int) -> Architecture:
        return Architecture(
            input_len=input_len,
            num_classes=num_classes,
            conv_filters=tuple(self.conv_filters),
            kernel_len=self.kernel_len,
            pool_len=self.pool_len,
            dense_units=self.dense_units,
            dropout_rate=self.dropout_rate,
        )


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    seconds: float


@dataclass
class TrainReport:
    epochs: list[EpochStats] = field(default_factory=list)
    total_seconds: float = 0.0
    optimizer_steps: int = 0


def evaluate_loss(net: ConvNet, features: np.ndarray, labels: np.ndarray,
                  batch_size: int = 1024) -> float:
    """Mean cross-entropy over all rows, dropout off."""
    if len(features) == 0:
        raise DataError("cannot evaluate loss of an empty dataset")
    total = 0.0
    for start in range(0, len(features), batch_size):
        logits, _ = net.forward(features[start:start + batch_size], train=False)
        losses, _ = softmax_cross_entropy(logits.astype(np.float64), labels[start:start + batch_size])
        total += float(losses.sum())
    return total / len(features)


def train(dataset: LabeledDataset, config: TrainConfig) -> tuple[ConvNet, TrainReport]:
    """Train the conv net on the dataset; deterministic under config.seed.

    A stratified validation_fraction of the rows is held out for per-epoch
    validation loss; those rows never contribute gradients. Aborts with
    NumericError on a non-finite batch loss.
    """
    if dataset.n_rows == 0:
        raise DataError("training dataset is empty")
    arch = config.architecture(dataset.n_features, dataset.n_classes)
    arch.stage_lengths()  # fail on bad architecture before any epoch

    if config.validation_fraction > 0 and dataset.n_rows >= 2:
        tr_idx, val_idx = stratified_split_indices(
            dataset.labels, 1.0 - config.validation_fraction, seed=config.seed)
    else:
        tr_idx = np.arange(dataset.n_rows)
        val_idx = np.array([], dtype=int)
    x_tr, y_tr = dataset.features[tr_idx], dataset.labels[tr_idx]
    x_val, y_val = dataset.features[val_idx], dataset.labels[val_idx]

    net = ConvNet.init(arch, seed=config.seed)
    adam = AdamState.for_params(net.param_arrays(), learning_rate=config.learning_rate)
    dropout_rng = np.random.default_rng([config.seed, 0xD0])

    report = TrainReport()
    t_start = time.perf_counter()
    for epoch in range(1, config.epochs + 1):
        t_epoch = time.perf_counter()
        perm = np.random.default_rng([config.seed, epoch]).permutation(len(x_tr))
        loss_sum = 0.0
        for batch_no, start in enumerate(range(0, len(perm), config.batch_size)):
            sel = perm[start:start + config.batch_size]
            xb, yb = x_tr[sel], y_tr[sel]
            logits, cache = net.forward(xb, train=True, dropout_rng=dropout_rng)
            losses, grad_logits = softmax_cross_entropy(logits, yb)
            batch_loss = float(losses.mean())
            if not np.isfinite(batch_loss):
                raise NumericError(
                    f"non-finite training loss at epoch {epoch}, batch {batch_no}"
                )
            loss_sum += float(losses.sum())
            grads = net.backward(cache, grad_logits / len(sel))
            adam_step(net.param_arrays(), grads, adam)
        train_loss = loss_sum / len(perm)
        val_loss = evaluate_loss(net, x_val, y_val) if len(x_val) else float("nan")
        report.epochs.append(EpochStats(epoch, train_loss, val_loss,
                                        time.perf_counter() - t_epoch))
    report.total_seconds = time.perf_counter() - t_start
    report.optimizer_steps = adam.t
    return net, report


def save_checkpoint(net: ConvNet, encoder_metadata: dict, path, seed: int = 0) -> None:
    model_io.write_model(net, encoder_metadata, path, seed=seed)


def load_checkpoint(path) -> tuple[ConvNet, dict]:
    return model_io.read_model(path)
