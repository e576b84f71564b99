from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from spectral_hardcore.graphs import Graph, random_connected_graph, saw_example_graph

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture
def saw_example() -> Graph:
    return saw_example_graph()


@st.composite
def connected_graphs(draw, min_n: int = 2, max_n: int = 7) -> Graph:
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_connected_graph(n, np.random.default_rng(seed))


fugacities = st.floats(min_value=0.05, max_value=4.0, allow_nan=False)
