"""From-scratch 1D-CNN building blocks.

Every op takes either a single sample or a batch (leading batch axis) and
returns the matching rank. Forward passes are vectorized with im2col-style
gathers; backward passes are exact analytic gradients of the forward maps,
verified against central finite differences in the test suite.

Arrays are float32 on the production path; gradient checks run the same code
on float64 inputs (all ops are dtype-generic).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ShapeError


def out_length(length: int, window: int, stride: int) -> int:
    """Output length of a valid (no padding) sliding window."""
    if length < window:
        raise ShapeError(
            f"input length {length} shorter than window {window} (valid padding)"
        )
    return (length - window) // stride + 1


def _window_index(length: int, window: int, stride: int) -> np.ndarray:
    """[L_out, window] gather index for valid sliding windows."""
    n_out = out_length(length, window, stride)
    return np.arange(n_out)[:, None] * stride + np.arange(window)[None, :]


@dataclass
class Conv1DLayer:
    kernels: np.ndarray  # [out_channels, in_channels, kernel_len]
    bias: np.ndarray  # [out_channels]
    stride: int = 1

    def __post_init__(self):
        if self.kernels.ndim != 3:
            raise ShapeError(f"conv kernels must be 3-D, got shape {self.kernels.shape}")
        if self.bias.shape != (self.kernels.shape[0],):
            raise ShapeError(
                f"conv bias shape {self.bias.shape} does not match "
                f"{self.kernels.shape[0]} output channels"
            )
        if self.kernels.shape[2] < 1 or self.stride < 1:
            raise ShapeError("kernel_len and stride must be >= 1")


@dataclass
class MaxPool1DLayer:
    pool_len: int
    stride: int

    def __post_init__(self):
        if self.pool_len < 1 or self.stride < 1:
            raise ShapeError("pool_len and stride must be >= 1")


@dataclass
class DenseLayer:
    weights: np.ndarray  # [out_units, in_units]
    bias: np.ndarray  # [out_units]

    def __post_init__(self):
        if self.weights.ndim != 2:
            raise ShapeError(f"dense weights must be 2-D, got shape {self.weights.shape}")
        if self.bias.shape != (self.weights.shape[0],):
            raise ShapeError(
                f"dense bias shape {self.bias.shape} does not match "
                f"{self.weights.shape[0]} output units"
            )


@dataclass
class DropoutLayer:
    rate: float
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ShapeError(f"dropout rate must be in [0, 1), got {self.rate}")


def _batched(x: np.ndarray, rank: int) -> tuple[np.ndarray, bool]:
    if x.ndim == rank:
        return x[None], False
    if x.ndim == rank + 1:
        return x, True
    raise ShapeError(f"expected rank {rank} or {rank + 1} input, got shape {x.shape}")


# ---------------------------------------------------------------------------
# convolution


def conv1d_forward(x: np.ndarray, layer: Conv1DLayer) -> np.ndarray:
    """Valid 1D convolution. x: [C_in, L] or [B, C_in, L] -> [*, C_out, L_out]."""
    xb, batched = _batched(x, 2)
    n, c_in, length = xb.shape
    c_out, c_k, k_len = layer.kernels.shape
    if c_in != c_k:
        raise ShapeError(
            f"input has {c_in} channels but kernels expect {c_k}"
        )
    idx = _window_index(length, k_len, layer.stride)
    n_out = idx.shape[0]
    cols = xb[:, :, idx]  # [B, C_in, L_out, K]
    mat = cols.transpose(0, 2, 1, 3).reshape(n * n_out, c_in * k_len)
    w = layer.kernels.reshape(c_out, c_in * k_len)
    out = (mat @ w.T).reshape(n, n_out, c_out).transpose(0, 2, 1)
    out = out + layer.bias[None, :, None]
    return out if batched else out[0]


def conv1d_backward(
    x: np.ndarray, layer: Conv1DLayer, grad_out: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of conv1d_forward w.r.t. input, kernels and bias."""
    xb, batched = _batched(x, 2)
    gb, gbatched = _batched(grad_out, 2)
    if batched != gbatched or gb.shape[0] != xb.shape[0]:
        raise ShapeError(
            f"grad_out batching {grad_out.shape} does not match input {x.shape}"
        )
    n, c_in, length = xb.shape
    c_out, _, k_len = layer.kernels.shape
    idx = _window_index(length, k_len, layer.stride)
    n_out = idx.shape[0]
    if gb.shape[1:] != (c_out, n_out):
        raise ShapeError(
            f"grad_out shape {grad_out.shape} does not match conv output "
            f"({c_out} channels x {n_out})"
        )

    cols = xb[:, :, idx].transpose(0, 2, 1, 3).reshape(n * n_out, c_in * k_len)
    g = gb.transpose(0, 2, 1).reshape(n * n_out, c_out)  # [B*L_out, C_out]

    grad_kernels = (g.T @ cols).reshape(layer.kernels.shape)
    grad_bias = gb.sum(axis=(0, 2))

    w = layer.kernels.reshape(c_out, c_in * k_len)
    contrib = (g @ w).reshape(n, n_out, c_in, k_len).transpose(0, 2, 1, 3)
    grad_x = np.zeros_like(xb)
    # per kernel offset the target positions are disjoint, so slice-add is exact
    for k in range(k_len):
        stop = k + (n_out - 1) * layer.stride + 1
        grad_x[:, :, k:stop:layer.stride] += contrib[:, :, :, k]
    return (grad_x if batched else grad_x[0]), grad_kernels, grad_bias


# ---------------------------------------------------------------------------
# max pooling


def maxpool1d_forward(
    x: np.ndarray, layer: MaxPool1DLayer
) -> tuple[np.ndarray, np.ndarray]:
    """Sliding-window max. Returns (output, argmax positions in the input axis).

    Ties go to the first occurrence in the window; a trailing partial window
    is dropped.
    """
    xb, batched = _batched(x, 2)
    _, _, length = xb.shape
    idx = _window_index(length, layer.pool_len, layer.stride)
    windows = xb[:, :, idx]  # [B, C, L_out, P]
    out = windows.max(axis=-1)
    arg = windows.argmax(axis=-1)  # first max wins
    arg_abs = arg + (np.arange(idx.shape[0]) * layer.stride)[None, None, :]
    if not batched:
        return out[0], arg_abs[0]
    return out, arg_abs


def maxpool1d_backward(
    argmax: np.ndarray, grad_out: np.ndarray, input_length: int
) -> np.ndarray:
    """Scatter grad_out back to the winning input positions."""
    ab, batched = _batched(argmax, 2)
    gb, gbatched = _batched(grad_out, 2)
    if ab.shape != gb.shape:
        raise ShapeError(
            f"argmax shape {argmax.shape} does not match grad_out {grad_out.shape}"
        )
    if ab.size and (ab.min() < 0 or ab.max() >= input_length):
        raise ShapeError(
            f"argmax index out of range for input length {input_length}"
        )
    n, c, n_out = gb.shape
    grad_x = np.zeros((n * c, input_length), dtype=gb.dtype)
    rows = np.repeat(np.arange(n * c), n_out)
    np.add.at(grad_x, (rows, ab.reshape(-1)), gb.reshape(-1))
    grad_x = grad_x.reshape(n, c, input_length)
    return grad_x if batched else grad_x[0]


# ---------------------------------------------------------------------------
# dense


def dense_forward(x: np.ndarray, layer: DenseLayer) -> np.ndarray:
    xb, batched = _batched(x, 1)
    if xb.shape[1] != layer.weights.shape[1]:
        raise ShapeError(
            f"dense input length {xb.shape[1]} != layer in_units {layer.weights.shape[1]}"
        )
    out = xb @ layer.weights.T + layer.bias
    return out if batched else out[0]


def dense_backward(
    x: np.ndarray, layer: DenseLayer, grad_out: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xb, batched = _batched(x, 1)
    gb, _ = _batched(grad_out, 1)
    if gb.shape != (xb.shape[0], layer.weights.shape[0]):
        raise ShapeError(
            f"grad_out shape {grad_out.shape} does not match dense output "
            f"({layer.weights.shape[0]} units)"
        )
    grad_x = gb @ layer.weights
    grad_w = gb.T @ xb
    grad_b = gb.sum(axis=0)
    return (grad_x if batched else grad_x[0]), grad_w, grad_b


# ---------------------------------------------------------------------------
# activations / regularization


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(x: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    return grad_out * (x > 0)


def dropout_forward(
    x: np.ndarray, layer: DropoutLayer, train: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    """Inverted dropout. Returns (output, keep mask); mask is None outside train
    mode or at rate 0, where the op is the identity."""
    if not train or layer.rate == 0.0:
        return x, None
    keep = layer.rng.random(x.shape) >= layer.rate
    scale = 1.0 / (1.0 - layer.rate)
    return x * keep * scale, keep


def dropout_backward(
    mask: np.ndarray | None, rate: float, grad_out: np.ndarray
) -> np.ndarray:
    if mask is None:
        return grad_out
    return grad_out * mask / (1.0 - rate)


# ---------------------------------------------------------------------------
# loss


def softmax(logits: np.ndarray) -> np.ndarray:
    """Numerically stable softmax over the last axis."""
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(
    logits: np.ndarray, true_class: int | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Cross-entropy loss and its gradient w.r.t. the logits.

    Single sample: logits [K], integer class -> (scalar loss, grad [K]).
    Batch: logits [B, K], classes [B] -> (losses [B], grads [B, K]).
    """
    if not np.all(np.isfinite(logits)):
        raise NumericError("non-finite logits passed to softmax_cross_entropy")
    lb, batched = _batched(np.asarray(logits), 1)
    y = np.atleast_1d(np.asarray(true_class, dtype=np.int64))
    k = lb.shape[1]
    if y.shape != (lb.shape[0],):
        raise ShapeError(f"class labels shape {y.shape} does not match batch {lb.shape[0]}")
    if y.size and (y.min() < 0 or y.max() >= k):
        raise ShapeError(f"class index out of range [0, {k})")
    z = lb - lb.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(z).sum(axis=1))
    rows = np.arange(lb.shape[0])
    loss = logsumexp - z[rows, y]
    grad = softmax(lb)
    grad[rows, y] -= 1.0
    if batched:
        return loss, grad
    return loss[0], grad[0]
