"""Initialization, architecture validation and whole-model forward behavior."""

import numpy as np
import pytest

from ids1d.errors import ArchitectureError, ShapeError
from ids1d.layers import softmax
from ids1d.network import Architecture, ConvNet


def test_stage_length_arithmetic():
    arch = Architecture(input_len=32, num_classes=10)
    # conv k3 s1 then pool 2/2, three times
    assert arch.stage_lengths() == [30, 15, 13, 6, 4, 2]
    assert arch.flatten_len == 256 * 2


def test_too_short_input_names_offending_layer():
    arch = Architecture(input_len=16, num_classes=10)  # dies at the third conv
    with pytest.raises(ArchitectureError, match="conv layer 3"):
        arch.stage_lengths()


def test_init_deterministic():
    arch = Architecture(input_len=32, num_classes=5, conv_filters=(4, 4, 4))
    a = ConvNet.init(arch, seed=11)
    b = ConvNet.init(arch, seed=11)
    for pa, pb in zip(a.param_arrays(), b.param_arrays()):
        np.testing.assert_array_equal(pa, pb)


def test_init_biases_zero():
    net = ConvNet.init(Architecture(32, 5, conv_filters=(4, 4, 4)), seed=0)
    for c in net.conv:
        assert not c.bias.any()
    assert not net.dense1.bias.any()
    assert not net.dense2.bias.any()


def test_he_variance():
    # 10k-element draw: empirical variance within 10% of 2/fan_in
    arch = Architecture(input_len=200, num_classes=10, dense_units=64)
    net = ConvNet.init(arch, seed=3)
    w = net.dense1.weights  # 64 x flatten_len, plenty of samples
    fan_in = w.shape[1]
    assert w.size >= 10_000
    assert abs(w.var() - 2.0 / fan_in) < 0.1 * (2.0 / fan_in)


def test_zeroed_final_layer_gives_uniform_softmax(rng):
    net = ConvNet.init(Architecture(32, 10, conv_filters=(4, 4, 4)), seed=0)
    net.dense2.weights[:] = 0
    net.dense2.bias[:] = 0
    logits, _ = net.forward(rng.normal(size=(7, 32)).astype(np.float32))
    p = softmax(logits)
    np.testing.assert_allclose(p, np.full((7, 10), 0.1), atol=1e-7)


def test_inference_deterministic(rng):
    net = ConvNet.init(Architecture(32, 4, conv_filters=(4, 4, 4)), seed=0)
    x = rng.normal(size=(5, 32)).astype(np.float32)
    a, _ = net.forward(x, train=False)
    b, _ = net.forward(x, train=False)
    np.testing.assert_array_equal(a, b)


def test_wrong_feature_count_rejected(rng):
    net = ConvNet.init(Architecture(32, 4, conv_filters=(4, 4, 4)), seed=0)
    with pytest.raises(ShapeError, match="features"):
        net.forward(rng.normal(size=(5, 31)).astype(np.float32))


def test_set_param_arrays_shape_checked():
    net = ConvNet.init(Architecture(32, 4, conv_filters=(4, 4, 4)), seed=0)
    arrays = net.param_arrays()
    arrays[0] = np.zeros((1, 1, 1), dtype=np.float32)
    with pytest.raises(ShapeError):
        net.set_param_arrays(arrays)
