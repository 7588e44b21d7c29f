import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symtens.config import SolverConfig
from symtens.core import (
    CPDecomposition,
    DenseTensor,
    Field,
    SymDecomposition,
    basis_vector,
    elementary,
    hs_norm,
    multilinear_eval,
    random_symmetric,
    random_tensor,
    random_unit_vector,
    sym_decomposable,
    symmetrize,
)
from symtens.models import NormKind
from symtens.symrank import (
    border_gap,
    border_limit,
    border_limit_decomposition,
    border_rank_instance,
    border_sequence_decomposition,
    e_operator,
    fit_sym_decomposition,
    injective_nonstrict_example,
    rank_bounds,
    strict_improvement_complex,
    symmetrize_approximation,
    y_rank_lower_bound_check,
)


def _e(i: int, n: int = 6) -> np.ndarray:
    return basis_vector(n, i)


# ── Symmetrization ──


def test_symmetric_y_is_left_alone(rng):
    z = random_symmetric(3, 3, Field.REAL, rng)
    y = random_symmetric(3, 3, Field.REAL, rng)
    res = symmetrize_approximation(z, y)
    assert res.x.allclose(y, 1e-12)
    assert res.improvement == pytest.approx(0.0, abs=1e-12)
    assert res.kind is NormKind.EXACT


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 4), complex_field=st.booleans())
def test_hs_improvement_is_strict_for_non_symmetric_y(seed, d, complex_field):
    rng = np.random.default_rng(seed)
    field = Field.COMPLEX if complex_field else Field.REAL
    z = random_symmetric(3, d, field, rng)
    y = random_tensor((3,) * d, field, rng)
    res = symmetrize_approximation(z, y)
    assert res.after <= res.before
    if hs_norm(y - symmetrize(y)) > 1e-8:
        assert res.improvement > 0
    # Pythagoras: the lost part is exactly the antisymmetric remainder
    assert res.before**2 == pytest.approx(res.after**2 + hs_norm(y - symmetrize(y)) ** 2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_injective_bound_improves(seed):
    rng = np.random.default_rng(seed)
    z = random_symmetric(3, 3, Field.COMPLEX, rng)
    y = random_tensor((3, 3, 3), Field.COMPLEX, rng)
    res = symmetrize_approximation(z, y, "injective")
    assert res.after <= res.before + 1e-10
    assert res.kind is NormKind.UPPER_BOUND


def test_projective_bound_improves(rng):
    cfg = SolverConfig(restarts=6, oracle_budget=3000, lp_rounds=2)
    for _ in range(2):
        z = random_symmetric(2, 3, Field.REAL, rng)
        y = random_tensor((2, 2, 2), Field.REAL, rng)
        res = symmetrize_approximation(z, y, "projective", cfg)
        assert res.after <= res.before + 1e-10


def test_cp_input_keeps_rank_bookkeeping(rng):
    z = random_symmetric(3, 3, Field.REAL, rng)
    terms = [[random_unit_vector(3, Field.REAL, rng) for _ in range(3)] for _ in range(2)]
    y = CPDecomposition.from_terms(terms)
    res = symmetrize_approximation(z, y)
    assert res.cp_terms == 2
    assert res.sym_terms <= res.cp_terms
    assert res.x.allclose(symmetrize(y.densify()), 1e-12)


def test_symmetrize_approximation_guards(rng):
    z = random_tensor((2, 2), Field.REAL, rng)
    with pytest.raises(ValueError):
        symmetrize_approximation(z, z)
    s = random_symmetric(2, 2, Field.REAL, rng)
    with pytest.raises(ValueError):
        symmetrize_approximation(s, s, "spectral")
    with pytest.raises(ValueError):
        symmetrize_approximation(s, random_tensor((2, 2, 2), Field.REAL, rng))


def test_strict_improvement_on_complex_elementary():
    cfg = SolverConfig(restarts=8, oracle_budget=4000, lp_rounds=12)
    e1, e2 = basis_vector(2, 0, Field.COMPLEX), basis_vector(2, 1, Field.COMPLEX)
    w = elementary([e1, e1, e2])
    res = strict_improvement_complex(w, cfg)
    assert res.pi_lower_w == pytest.approx(1.0, abs=1e-8)
    # the optimal v-decomposition reaches sqrt(3)/2
    assert res.pi_upper_sigma >= math.sqrt(3) / 2 - 1e-6
    assert res.strict


def test_strict_improvement_preconditions(cfg):
    e1, e2 = basis_vector(2, 0, Field.COMPLEX), basis_vector(2, 1, Field.COMPLEX)
    with pytest.raises(ValueError):
        strict_improvement_complex(elementary([e1, e2]), cfg)
    with pytest.raises(ValueError):
        strict_improvement_complex(elementary([basis_vector(2, 0), basis_vector(2, 0), basis_vector(2, 1)]), cfg)
    with pytest.raises(ValueError):
        strict_improvement_complex(elementary([e1, e1, e1]), cfg)


@pytest.mark.parametrize("field", [Field.REAL, Field.COMPLEX])
def test_injective_nonstrict_example(field, cfg):
    ex = injective_nonstrict_example(0.1, field, cfg)
    assert ex.eps_w == pytest.approx(1.0, abs=1e-8)
    assert ex.eps_sigma_w == pytest.approx(1.0, abs=1e-8)
    e1 = basis_vector(3, 0, field)
    assert ex.sigma_w.allclose(elementary([e1, e1], field), 1e-14)
    assert not ex.w.allclose(ex.sigma_w)


def test_injective_nonstrict_limits(cfg):
    assert injective_nonstrict_example(0.0, cfg=cfg).eps_w == pytest.approx(1.0)
    assert injective_nonstrict_example(1.0, cfg=cfg).eps_w == pytest.approx(1.0)
    with pytest.raises(ValueError, match="threshold"):
        injective_nonstrict_example(2.0, cfg=cfg)
    with pytest.raises(ValueError):
        injective_nonstrict_example(-0.1, cfg=cfg)


# ── Border rank ──


def test_border_gap_closed_form():
    gaps = []
    for n in range(1, 101):
        inst = border_rank_instance(n)
        assert inst.gap_hs == pytest.approx(math.sqrt(1 / (2 * n**2) + 1 / (6 * n**4)), abs=1e-12)
        assert inst.gap_hs == pytest.approx(border_gap(n), abs=1e-12)
        gaps.append(inst.gap_hs)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[9] / gaps[19] == pytest.approx(2.0, rel=0.01)


def test_border_instance_shape():
    inst = border_rank_instance(3)
    assert inst.y_n.shape == (6, 6, 6)
    assert len(inst.decomposition) == 2
    assert inst.decomposition.densify().allclose(inst.y_n, 1e-12)
    assert inst.y_limit.allclose(border_limit(), 0)
    with pytest.raises(ValueError):
        border_rank_instance(0)


def test_e_operator_image_rank():
    y = border_limit()
    assert np.allclose(e_operator(y, _e(1), _e(5)), _e(0) / 6)
    assert np.allclose(e_operator(y, _e(0), _e(5)), _e(1) / 6)
    assert np.allclose(e_operator(y, _e(0), _e(4)), _e(2) / 6)
    assert np.allclose(e_operator(y, _e(1), _e(2)), _e(3) / 6)
    assert np.allclose(e_operator(y, _e(0), _e(2)), _e(4) / 6)
    assert np.allclose(e_operator(y, _e(0), _e(1)), _e(5) / 6)


def test_e_operator_on_elementary(rng):
    x = [rng.standard_normal(4) for _ in range(3)]
    v, w = rng.standard_normal(4), rng.standard_normal(4)
    expected = (x[0] @ v) * (x[1] @ w) * x[2]
    assert np.allclose(e_operator(elementary(x), v, w), expected)


def test_e_operator_represents_the_form_over_c(rng):
    x = [random_unit_vector(3, Field.COMPLEX, rng) for _ in range(3)]
    v, w, y = (random_unit_vector(3, Field.COMPLEX, rng) for _ in range(3))
    u = elementary(x)
    e = e_operator(u, v, w)
    assert np.allclose(e, np.vdot(v, x[0]) * np.vdot(w, x[1]) * x[2])
    assert np.vdot(e, y) == pytest.approx(multilinear_eval(u, [v, w, y]), abs=1e-12)


def test_e_operator_shape_errors():
    y = border_limit()
    with pytest.raises(ValueError):
        e_operator(y, np.ones(5), np.ones(6))
    with pytest.raises(ValueError):
        e_operator(DenseTensor(np.ones((6, 6))), np.ones(6), np.ones(6))


def test_image_rank_certificate():
    report = y_rank_lower_bound_check(fit=False)
    assert report.image_rank == 6
    assert report.image_rank_exact == 6
    assert report.image_values_match
    assert report.als_residual is None


def test_two_term_candidate_is_obstructed():
    candidate = border_sequence_decomposition(5)
    report = y_rank_lower_bound_check(candidate, fit=False)
    assert report.candidate_basis_rank == 6
    assert report.candidate_bound == 2
    assert report.candidate_image_rank >= 3
    assert report.violated_dimensions >= 1
    assert report.candidate_residual == pytest.approx(border_gap(5), abs=1e-12)


def test_degenerate_candidate_reports_missing_dimensions():
    e = [_e(i) for i in range(6)]
    candidate = SymDecomposition.from_terms([(1.0, [e[0], e[1], e[5]]), (1.0, [e[0], e[2], e[4]])])
    report = y_rank_lower_bound_check(candidate, fit=False)
    assert report.candidate_basis_rank == 5
    assert report.violated_dimensions == 1
    with pytest.raises(ValueError):
        y_rank_lower_bound_check(border_limit_decomposition(), fit=False)


def test_two_term_fits_of_the_limit_stay_away():
    cfg = SolverConfig(als_restarts=64, als_max_iter=200)
    report = y_rank_lower_bound_check(cfg=cfg)
    assert report.als_restarts == 64
    assert report.als_residual > 1e-3
    # three terms are enough, and the limit's own decomposition shows it
    assert border_limit_decomposition().densify().allclose(border_limit(), 1e-14)


def test_fit_recovers_a_single_term(cfg):
    v, w = basis_vector(3, 0), basis_vector(3, 1)
    z = 2.0 * sym_decomposable([v, w, w])
    decomp, residual = fit_sym_decomposition(z, 1, cfg)
    assert len(decomp) == 1
    assert residual <= 1e-3 * hs_norm(z)
    assert hs_norm(decomp.densify() - z) == pytest.approx(residual)


def test_fit_guards(rng, cfg):
    with pytest.raises(ValueError):
        fit_sym_decomposition(random_tensor((2, 2), Field.REAL, rng), 1, cfg)
    with pytest.raises(ValueError):
        fit_sym_decomposition(random_symmetric(2, 2, Field.REAL, rng), 0, cfg)


# ── Rank bounds ──


def test_symmetric_product_has_rank_gap():
    v, w = basis_vector(3, 0), basis_vector(3, 1)
    z = sym_decomposable([v, w])
    bounds = rank_bounds(z, SymDecomposition.from_terms([(1.0, [v, w])]))
    assert (bounds.sym_upper, bounds.tensor_lower, bounds.tensor_upper) == (1, 2, 2)


def test_rank_chain_on_the_border_limit():
    bounds = rank_bounds(border_limit(), border_limit_decomposition())
    assert bounds.sym_upper == 3
    assert bounds.tensor_lower == 6
    assert bounds.tensor_upper == 18
    assert bounds.tensor_lower <= bounds.tensor_upper


def test_rank_bounds_of_a_power():
    v = basis_vector(2, 0)
    bounds = rank_bounds(elementary([v, v, v]), SymDecomposition.from_terms([(1.0, [v, v, v])]))
    assert (bounds.sym_upper, bounds.tensor_lower, bounds.tensor_upper) == (1, 1, 1)


def test_rank_bounds_rejects_wrong_decomposition():
    v, w = basis_vector(2, 0), basis_vector(2, 1)
    with pytest.raises(ValueError):
        rank_bounds(elementary([v, v]), SymDecomposition.from_terms([(1.0, [v, w])]))
