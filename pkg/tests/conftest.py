import numpy as np
import pytest

from nudge import dsp

SMALL_ARCH = {"input_hw": [12, 8], "conv1": 2, "conv2": 3, "dense": 8}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_chunk(rng):
    return dsp.AudioChunk(rng.uniform(-1, 1, dsp.CHUNK_SAMPLES), seq_no=0)


def make_chunk(samples, seq_no=0):
    return dsp.AudioChunk(np.asarray(samples, dtype=np.float64), seq_no)
