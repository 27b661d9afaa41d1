import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_separable(n_rows, n_features, n_classes, seed, noise=0.3):
    """Gaussian blobs around well-separated class prototypes, z-scored the
    way the real pipeline would deliver them."""
    gen = np.random.default_rng(seed)
    prototypes = gen.normal(0, 1, size=(n_classes, n_features)) * 2.0
    labels = gen.integers(0, n_classes, size=n_rows)
    features = prototypes[labels] + gen.normal(0, noise, size=(n_rows, n_features))
    features = (features - features.mean(axis=0)) / features.std(axis=0)
    return features.astype(np.float32), labels.astype(np.int64)
