import numpy as np
import pytest

from hsz.counters import decode_counters
from hsz.stages import slab_tracker


@pytest.fixture(autouse=True)
def _reset_instrumentation():
    decode_counters.reset()
    slab_tracker.reset()
    yield


@pytest.fixture
def example_field():
    """The small 2x4 field used throughout as a hand-checkable fixture."""
    return np.array(
        [[1.2, 1.5, -2.3, -2.5], [2.5, -1.0, 2.0, 1.7]], dtype=np.float32
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field(rng, dims, kind="mixed"):
    """Random test field: smooth (correlated) or white noise, float32."""
    if kind == "smooth":
        noise = rng.normal(0, 0.05, size=dims)
        out = noise
        for ax in range(len(dims)):
            out = np.cumsum(out, axis=ax)
        out += rng.uniform(-2, 2)
    elif kind == "noise":
        out = rng.normal(rng.uniform(-3, 3), rng.uniform(0.1, 4), size=dims)
    else:
        a = random_field(rng, dims, "smooth")
        b = random_field(rng, dims, "noise")
        out = a + 0.25 * b
    return out.astype(np.float32)
