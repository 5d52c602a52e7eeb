import numpy as np
import pytest

from fracsticky.variates import RngStream


@pytest.fixture
def stream():
    """Fresh deterministic stream factory; distinct ids per call site."""

    def make(stream_id: int = 0, seed: int = 20260815) -> RngStream:
        return RngStream(seed, stream_id)

    return make


@pytest.fixture
def gen():
    return np.random.Generator(np.random.Philox(key=[20260815, 0xFFFF]))
