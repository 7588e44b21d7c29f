import numpy as np
import pytest

from symtens.config import SolverConfig
from symtens.core import DenseTensor, Field, elementary, random_symmetric, random_tensor, unit
from symtens.power import (
    best_multilinear,
    best_symmetric,
    elementary_value,
    multilinear_power_iteration,
    sphere_grid,
    sphere_oracle,
)
from symtens.seeding import best_of, restart_generators, run_restarts


def test_restart_generators_are_reproducible():
    a = [g.standard_normal(3) for g in restart_generators(5, 4)]
    b = [g.standard_normal(3) for g in restart_generators(5, 4)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    other = restart_generators(5, 1, stream=1)[0].standard_normal(3)
    assert not np.array_equal(a[0], other)


def test_worker_count_does_not_change_results():
    def draw(index, rng):
        return index, float(rng.standard_normal())

    serial = run_restarts(draw, seed=3, count=16)
    threaded = run_restarts(draw, seed=3, count=16, workers=4)
    assert serial == threaded


def test_best_of_prefers_the_lowest_index_on_ties():
    assert best_of([1.0, 3.0, 3.0, 2.0], key=lambda x: x) == (1, 3.0)


def test_elementary_tensor_is_its_own_best_point(rng):
    xs = [unit(rng.standard_normal(n)) for n in (2, 3, 2)]
    z = 2.5 * elementary(xs)
    result = multilinear_power_iteration(z, [unit(x + 0.1) for x in xs], tol=1e-13, max_iter=500)
    assert result.converged
    assert result.value == pytest.approx(2.5)
    assert abs(elementary_value(z, result.vectors)) == pytest.approx(2.5)


def test_matrix_case_is_the_top_singular_value(rng):
    z = random_tensor((3, 4), Field.COMPLEX, rng)
    result = sphere_oracle(z, SolverConfig())
    assert result.value == pytest.approx(np.linalg.svd(z.array, compute_uv=False)[0])


def test_oracle_agrees_with_power_iteration(cfg):
    z = random_symmetric(2, 3, Field.REAL, np.random.default_rng(8))
    power = best_multilinear(z, cfg)
    oracle = sphere_oracle(z, cfg)
    assert oracle.value == pytest.approx(power.value, rel=1e-6)


def test_symmetric_power_iteration_on_a_power(cfg):
    v = unit(np.array([1.0, 2.0, -1.0]))
    z = -3.0 * elementary([v, v, v])
    result = best_symmetric(z, cfg)
    assert result.value == pytest.approx(3.0)
    assert abs(result.vectors[0] @ v) == pytest.approx(1.0)


@pytest.mark.parametrize("field", [Field.REAL, Field.COMPLEX])
def test_sphere_grid_points_are_unit(field, rng):
    grid = sphere_grid(3, 64, field, rng)
    assert grid.shape == (64, 3)
    assert np.allclose(np.linalg.norm(grid, axis=1), 1.0)


def test_zero_tensor_power_iteration(cfg):
    z = DenseTensor.zeros((2, 2, 2))
    assert best_symmetric(z, cfg).value == 0.0
