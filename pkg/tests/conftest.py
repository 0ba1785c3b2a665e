"""Shared fixtures and corpus builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from stab_lab.states import FamilySpec, StateVector, haar_unit, make_state


def random_states(n: int, count: int, seed: int = 0) -> list[StateVector]:
    """Deterministic Haar-random corpus."""
    rng = np.random.default_rng(seed)
    return [StateVector.from_unit(haar_unit(n, rng)) for _ in range(count)]


def random_real_states(n: int, count: int, seed: int = 0) -> list[StateVector]:
    """Deterministic corpus of real-amplitude unit states."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        vec = rng.standard_normal(1 << n)
        out.append(StateVector.from_unit(vec / np.linalg.norm(vec)))
    return out


@pytest.fixture(scope="session")
def t_state() -> StateVector:
    return make_state(FamilySpec("t_tensor", 1))


@pytest.fixture(scope="session")
def t2_state() -> StateVector:
    return make_state(FamilySpec("t_tensor", 2))
