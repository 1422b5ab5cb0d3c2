import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from conegeo.harness.rng import make_rng, rand_herm, rand_invertible, rand_posdef

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Random matrices are drawn from a seeded stream rather than element-wise
# strategies: hypothesis explores (seed, dim), the numerics stay well scaled.
seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.sampled_from([2, 3, 4, 6, 8])


def herm(seed, n, scale=None, label="h"):
    return rand_herm(make_rng(seed, label), n, 1 / np.sqrt(n) if scale is None else scale)


def posdef(seed, n, scale=None, label="p"):
    return rand_posdef(make_rng(seed, label), n, 1 / np.sqrt(n) if scale is None else scale)


def invertible(seed, n, scale=0.5, label="g"):
    return rand_invertible(make_rng(seed, label), n, scale)


@pytest.fixture
def rng():
    return make_rng(7, "tests")


D4_ROT = np.array([[0, -1], [1, 0]], dtype=complex)
D4_REFL = np.diag([1.0, -1.0]).astype(complex)
