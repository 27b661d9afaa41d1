"""Independent reference implementations used to check the fast kernels.

Everything here is deliberately naive (nested loops, central finite
differences) and shares no code with the package under test.
"""

import numpy as np


def conv1d_reference(x, kernels, bias, stride=1):
    """Triple-nested-loop valid 1D convolution. x: [C_in, L]."""
    c_in, length = x.shape
    c_out, _, k_len = kernels.shape
    n_out = (length - k_len) // stride + 1
    out = np.zeros((c_out, n_out), dtype=np.float64)
    for o in range(c_out):
        for j in range(n_out):
            acc = bias[o]
            for c in range(c_in):
                for k in range(k_len):
                    acc += kernels[o, c, k] * x[c, j * stride + k]
            out[o, j] = acc
    return out


def maxpool1d_reference(x, pool_len, stride):
    """Sliding-window max with first-occurrence argmax. x: [C, L]."""
    c, length = x.shape
    n_out = (length - pool_len) // stride + 1
    out = np.zeros((c, n_out), dtype=np.float64)
    arg = np.zeros((c, n_out), dtype=np.int64)
    for ch in range(c):
        for j in range(n_out):
            best, best_i = -np.inf, -1
            for k in range(pool_len):
                v = x[ch, j * stride + k]
                if v > best:
                    best, best_i = v, j * stride + k
            out[ch, j] = best
            arg[ch, j] = best_i
    return out, arg


def numerical_gradient(f, x, eps=1e-5):
    """Central finite differences of scalar-valued f at x (float64)."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        fp = f(x)
        flat[i] = orig - eps
        fm = f(x)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2 * eps)
    return grad


def max_relative_error(analytic, numeric, floor=1e-8):
    """Max elementwise relative error, skipping entries where both magnitudes
    are below the floor."""
    a = np.asarray(analytic, dtype=np.float64).reshape(-1)
    n = np.asarray(numeric, dtype=np.float64).reshape(-1)
    worst = 0.0
    for ai, ni in zip(a, n):
        if abs(ai) < floor and abs(ni) < floor:
            continue
        worst = max(worst, abs(ai - ni) / max(abs(ai), abs(ni)))
    return worst


def confusion_reference(true_labels, predicted_labels, num_classes):
    """Per-pair tally."""
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    for t, p in zip(true_labels, predicted_labels):
        counts[int(t), int(p)] += 1
    return counts
