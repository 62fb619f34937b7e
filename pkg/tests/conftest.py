"""Shared helpers for the test suite."""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from qpair import TwoQubitState, to_density_matrix


def random_rotation(rng):
    """A Haar-ish random proper rotation (det +1)."""
    return Rotation.from_quat(rng.normal(size=4), scalar_first=False).as_matrix()


def scaled_invalid_state(state, rng):
    """Over-scale the parameters of a valid state until positivity breaks.

    Scaling (s, t, C) by f mixes the state linearly with chaos:
    eigenvalues become 1/4 + f (lam - 1/4), crossing zero at
    f* = 1/(1 - 4 lam_min).  Any factor beyond f* gives a certainly
    invalid parameter set with margin at least (f/f* - 1)/4 below zero.
    """
    lam_min = float(np.linalg.eigvalsh(to_density_matrix(state))[0])
    f = (1.0 + rng.uniform(0.5, 4.0)) / (1.0 - 4.0 * min(lam_min, 0.2499))
    return TwoQubitState(s=f * state.s, t=f * state.t, C=f * state.C)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
