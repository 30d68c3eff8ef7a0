"""Shared fixtures for the test suite."""

import numpy as np
import pandas as pd
import pytest


@pytest.fixture
def latent_data():
    """Factory for small named datasets with low-rank predictor structure."""

    def make(seed, n=30, p=6, q=3, h_true=2, noise=0.05):
        rng = np.random.default_rng(seed)
        t = rng.standard_normal((n, h_true))
        px = rng.uniform(-2.0, 2.0, size=(p, h_true))
        b = rng.uniform(0.2, 0.7, size=(p, q))
        x = t @ px.T + noise * rng.standard_normal((n, p))
        y = x @ b + noise * rng.standard_normal((n, q))
        frame_x = pd.DataFrame(x, columns=[f"x{i + 1}" for i in range(p)])
        frame_y = pd.DataFrame(y, columns=[f"y{j + 1}" for j in range(q)])
        return frame_x, frame_y

    return make
