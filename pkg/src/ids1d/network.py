"""The fixed conv net: three conv+pool stages, flatten, dense, dropout, dense.

Input rows are treated as a single-channel 1D signal over the encoded feature
axis. The class owns parameter initialization, the forward pass (train and
infer modes) and the analytic backward pass for all parameter tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import layers as L
from .errors import ArchitectureError, ShapeError


@dataclass(frozen=True)
class Architecture:
    """Static shape description of the layer stack."""

    input_len: int
    num_classes: int
    conv_filters: tuple[int, int, int] = (64, 128, 256)
    kernel_len: int = 3
    pool_len: int = 2
    dense_units: int = 128
    dropout_rate: float = 0.5
    conv_stride: int = 1

    @property
    def pool_stride(self) -> int:
        return self.pool_len

    def stage_lengths(self) -> list[int]:
        """Signal length after each conv and pool stage; raises if the input
        is too short to survive the stack."""
        length = self.input_len
        lengths = []
        for i in range(3):
            for kind, window, stride in (
                ("conv", self.kernel_len, self.conv_stride),
                ("pool", self.pool_len, self.pool_stride),
            ):
                if length < window:
                    raise ArchitectureError(
                        f"{kind} layer {i + 1} needs length >= {window} "
                        f"but receives {length} (input_len={self.input_len})"
                    )
                length = (length - window) // stride + 1
                lengths.append(length)
        return lengths

    @property
    def flatten_len(self) -> int:
        return self.conv_filters[2] * self.stage_lengths()[-1]


@dataclass
class ConvNet:
    """Parameters plus forward/backward for the architecture above."""

    arch: Architecture
    conv: list[L.Conv1DLayer]
    dense1: L.DenseLayer
    dense2: L.DenseLayer

    PARAM_NAMES = (
        "conv1.kernels", "conv1.bias",
        "conv2.kernels", "conv2.bias",
        "conv3.kernels", "conv3.bias",
        "dense1.weights", "dense1.bias",
        "dense2.weights", "dense2.bias",
    )

    @classmethod
    def init(cls, arch: Architecture, seed: int, dtype=np.float32) -> "ConvNet":
        """He-normal weights (variance 2/fan_in), zero biases, deterministic
        under the seed."""
        arch.stage_lengths()  # validates before any allocation
        rng = np.random.default_rng(seed)

        def he(shape, fan_in):
            return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape).astype(dtype)

        f1, f2, f3 = arch.conv_filters
        k = arch.kernel_len
        conv = [
            L.Conv1DLayer(he((f1, 1, k), 1 * k), np.zeros(f1, dtype), arch.conv_stride),
            L.Conv1DLayer(he((f2, f1, k), f1 * k), np.zeros(f2, dtype), arch.conv_stride),
            L.Conv1DLayer(he((f3, f2, k), f2 * k), np.zeros(f3, dtype), arch.conv_stride),
        ]
        flat = arch.flatten_len
        dense1 = L.DenseLayer(he((arch.dense_units, flat), flat), np.zeros(arch.dense_units, dtype))
        dense2 = L.DenseLayer(
            he((arch.num_classes, arch.dense_units), arch.dense_units),
            np.zeros(arch.num_classes, dtype),
        )
        return cls(arch, conv, dense1, dense2)

    # -- parameter access ---------------------------------------------------

    def param_arrays(self) -> list[np.ndarray]:
        out = []
        for c in self.conv:
            out += [c.kernels, c.bias]
        out += [self.dense1.weights, self.dense1.bias,
                self.dense2.weights, self.dense2.bias]
        return out

    def set_param_arrays(self, arrays: list[np.ndarray]) -> None:
        current = self.param_arrays()
        if len(arrays) != len(current):
            raise ShapeError(f"expected {len(current)} parameter tensors, got {len(arrays)}")
        for name, cur, new in zip(self.PARAM_NAMES, current, arrays):
            if cur.shape != new.shape:
                raise ShapeError(f"{name}: shape {new.shape} != expected {cur.shape}")
        k1, b1, k2, b2, k3, b3, w1, bb1, w2, bb2 = arrays
        self.conv[0].kernels, self.conv[0].bias = k1, b1
        self.conv[1].kernels, self.conv[1].bias = k2, b2
        self.conv[2].kernels, self.conv[2].bias = k3, b3
        self.dense1.weights, self.dense1.bias = w1, bb1
        self.dense2.weights, self.dense2.bias = w2, bb2

    def astype(self, dtype) -> "ConvNet":
        clone = ConvNet(
            self.arch,
            [L.Conv1DLayer(c.kernels.astype(dtype), c.bias.astype(dtype), c.stride)
             for c in self.conv],
            L.DenseLayer(self.dense1.weights.astype(dtype), self.dense1.bias.astype(dtype)),
            L.DenseLayer(self.dense2.weights.astype(dtype), self.dense2.bias.astype(dtype)),
        )
        return clone

    # -- forward / backward -------------------------------------------------

    def forward(
        self,
        x: np.ndarray,
        train: bool = False,
        dropout_rng: np.random.Generator | None = None,
    ) -> tuple[np.ndarray, dict]:
        """x: [B, F] (or [F]) -> logits [B, K] (or [K]) plus a backward cache."""
        single = x.ndim == 1
        xb = np.atleast_2d(x)
        if xb.shape[1] != self.arch.input_len:
            raise ShapeError(
                f"input has {xb.shape[1]} features, model expects {self.arch.input_len}"
            )
        pool = L.MaxPool1DLayer(self.arch.pool_len, self.arch.pool_stride)
        cache: dict = {"conv_in": [], "relu_in": [], "pool_arg": [], "pool_in_len": []}

        h = xb[:, None, :]  # [B, 1, F]
        for c in self.conv:
            cache["conv_in"].append(h)
            h = L.conv1d_forward(h, c)
            cache["relu_in"].append(h)
            h = L.relu(h)
            cache["pool_in_len"].append(h.shape[2])
            h, arg = L.maxpool1d_forward(h, pool)
            cache["pool_arg"].append(arg)

        cache["flat_shape"] = h.shape
        flat = h.reshape(h.shape[0], -1)
        cache["dense1_in"] = flat
        z1 = L.dense_forward(flat, self.dense1)
        cache["relu_d_in"] = z1
        a1 = L.relu(z1)
        if train:
            drop = L.DropoutLayer(self.arch.dropout_rate,
                                  dropout_rng or np.random.default_rng())
            a1d, mask = L.dropout_forward(a1, drop, train=True)
        else:
            a1d, mask = a1, None
        cache["drop_mask"] = mask
        cache["dense2_in"] = a1d
        logits = L.dense_forward(a1d, self.dense2)
        return (logits[0] if single else logits), cache

    def backward(self, cache: dict, grad_logits: np.ndarray) -> list[np.ndarray]:
        """Gradients for every parameter tensor, in param_arrays() order."""
        g = np.atleast_2d(grad_logits)
        g, gw2, gb2 = L.dense_backward(cache["dense2_in"], self.dense2, g)
        g = L.dropout_backward(cache["drop_mask"], self.arch.dropout_rate, g)
        g = L.relu_backward(cache["relu_d_in"], g)
        g, gw1, gb1 = L.dense_backward(cache["dense1_in"], self.dense1, g)
        g = g.reshape(cache["flat_shape"])

        conv_grads: list[tuple[np.ndarray, np.ndarray]] = []
        for i in (2, 1, 0):
            g = L.maxpool1d_backward(cache["pool_arg"][i], g, cache["pool_in_len"][i])
            g = L.relu_backward(cache["relu_in"][i], g)
            g, gk, gb = L.conv1d_backward(cache["conv_in"][i], self.conv[i], g)
            conv_grads.append((gk, gb))
        conv_grads.reverse()

        out = []
        for gk, gb in conv_grads:
            out += [gk, gb]
        out += [gw1, gb1, gw2, gb2]
        return out

    def predict_logits(self, x: np.ndarray, batch_size: int = 1024) -> np.ndarray:
        """Inference-mode logits, batched to bound memory."""
        xb = np.atleast_2d(x)
        chunks = []
        for start in range(0, xb.shape[0], batch_size):
            logits, _ = self.forward(xb[start:start + batch_size], train=False)
            chunks.append(logits)
        out = np.concatenate(chunks, axis=0)
        return out[0] if x.ndim == 1 else out
