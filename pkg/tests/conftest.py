import numpy as np
import pytest

from stereoconf.dataio import GrayImage


def make_shifted_pair(height, width, shift, seed=0, pad=16):
    """Random textured pair where the right image is the left one shifted,
    so ground-truth disparity is exactly `shift` everywhere."""
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 256, size=(height, width + pad), dtype=np.uint8)
    left = GrayImage(np.ascontiguousarray(base[:, :width]))
    right = GrayImage(np.ascontiguousarray(base[:, shift:shift + width]))
    return left, right


@pytest.fixture
def shifted_pair():
    return make_shifted_pair
