"""Binary model file round-trips and corruption handling."""

import numpy as np
import pytest

from ids1d.errors import (
    BadMagicError,
    ChecksumError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from ids1d.model_io import read_model, write_model
from ids1d.network import Architecture, ConvNet

META = {"label_names": ["a", "b", "c"], "columns": []}


def a_net(seed=1):
    return ConvNet.init(Architecture(32, 3, conv_filters=(4, 4, 4)), seed=seed)


def test_round_trip_bit_exact(tmp_path):
    net = a_net()
    path = tmp_path / "m.ids1d"
    write_model(net, META, path, seed=1)
    loaded, meta = read_model(path)
    for a, b in zip(net.param_arrays(), loaded.param_arrays()):
        np.testing.assert_array_equal(a, b)
    assert meta["encoder"] == META
    assert meta["seed"] == 1


def test_write_is_byte_deterministic(tmp_path):
    net = a_net()
    p1, p2 = tmp_path / "a", tmp_path / "b"
    write_model(net, META, p1)
    write_model(net, META, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_flipped_payload_byte_is_checksum_error(tmp_path):
    path = tmp_path / "m"
    write_model(a_net(), META, path)
    blob = bytearray(path.read_bytes())
    blob[-100] ^= 0xFF  # inside the payload
    path.write_bytes(bytes(blob))
    with pytest.raises(ChecksumError):
        read_model(path)


def test_truncated_file(tmp_path):
    path = tmp_path / "m"
    write_model(a_net(), META, path)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(TruncatedFileError):
        read_model(path)


def test_empty_file_is_bad_magic(tmp_path):
    path = tmp_path / "m"
    path.write_bytes(b"")
    with pytest.raises(BadMagicError):
        read_model(path)


def test_wrong_magic(tmp_path):
    path = tmp_path / "m"
    path.write_bytes(b"NOPE" + b"\0" * 64)
    with pytest.raises(BadMagicError):
        read_model(path)


def test_unknown_version(tmp_path):
    path = tmp_path / "m"
    write_model(a_net(), META, path)
    blob = bytearray(path.read_bytes())
    blob[4] = 99
    path.write_bytes(bytes(blob))
    with pytest.raises(UnsupportedVersionError):
        read_model(path)


def test_loaded_model_predicts_identically(tmp_path, rng):
    net = a_net()
    path = tmp_path / "m"
    write_model(net, META, path)
    loaded, _ = read_model(path)
    x = rng.normal(size=(10, 32)).astype(np.float32)
    np.testing.assert_array_equal(net.predict_logits(x), loaded.predict_logits(x))
