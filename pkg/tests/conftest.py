import numpy as np
import pytest

from symtens.config import SolverConfig


@pytest.fixture
def cfg() -> SolverConfig:
    """Fewer restarts and grid points than the defaults; enough for the sizes tested here."""
    return SolverConfig(
        restarts=8,
        seed=0,
        oracle_budget=4000,
        als_restarts=8,
        als_max_iter=150,
        lp_rounds=3,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)
