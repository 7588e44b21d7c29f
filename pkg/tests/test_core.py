import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symtens.core import (
    CPDecomposition,
    DenseTensor,
    Field,
    SymDecomposition,
    basis_vector,
    compress,
    contract_slots,
    elementary,
    flattening_norm,
    flattening_rank,
    hs_norm,
    inner_product,
    is_symmetric,
    multilinear_eval,
    poly_eval,
    random_symmetric,
    random_tensor,
    random_unit_vector,
    sym_decomposable,
    sym_inner_product,
    sym_power_product,
    symmetrize,
)


def test_elementary_entries():
    t = elementary([np.array([1.0, 2.0]), np.array([3.0, 5.0])])
    assert t.shape == (2, 2)
    assert np.array_equal(t.array, [[3.0, 5.0], [6.0, 10.0]])


def test_inner_product_conjugates_second_argument():
    x = DenseTensor(np.array([1j, 0]), Field.COMPLEX)
    y = DenseTensor(np.array([1, 0], dtype=complex), Field.COMPLEX)
    assert inner_product(x, y) == pytest.approx(1j)
    assert inner_product(y, x) == pytest.approx(-1j)


def test_complex_entries_rejected_for_real_field():
    with pytest.raises(ValueError):
        DenseTensor(np.array([1 + 1j, 0]), Field.REAL)


def test_mixed_fields_do_not_combine():
    a = DenseTensor(np.ones(2), Field.REAL)
    b = DenseTensor(np.ones(2, dtype=complex), Field.COMPLEX)
    with pytest.raises(ValueError):
        a + b


def test_from_flat_length_mismatch():
    with pytest.raises(ValueError):
        DenseTensor.from_flat("real", [2, 2], [1.0, 2.0, 3.0])


def test_symmetrize_is_an_orthogonal_projection(rng):
    x = random_tensor((3, 3, 3), Field.COMPLEX, rng)
    s = symmetrize(x)
    assert is_symmetric(s)
    assert symmetrize(s).allclose(s, 1e-12)
    # x - sigma(x) is orthogonal to every symmetric tensor
    u = random_symmetric(3, 3, Field.COMPLEX, rng)
    assert abs(inner_product(x - s, u)) < 1e-12


def test_multilinear_eval_matches_inner_product(rng):
    z = random_tensor((2, 3, 4), Field.COMPLEX, rng)
    ys = [random_unit_vector(n, Field.COMPLEX, rng) for n in (2, 3, 4)]
    assert multilinear_eval(z, ys) == pytest.approx(inner_product(elementary(ys), z))


def test_poly_eval_needs_symmetry(rng):
    with pytest.raises(ValueError):
        poly_eval(random_tensor((2, 2), Field.REAL, rng), np.ones(2))


def test_contract_slots_binds_leading_arguments(rng):
    z = random_tensor((3, 3, 3), Field.REAL, rng)
    a, b, c = (random_unit_vector(3, Field.REAL, rng) for _ in range(3))
    section = contract_slots(z, [a])
    assert multilinear_eval(section, [b, c]) == pytest.approx(multilinear_eval(z, [a, b, c]))
    with pytest.raises(ValueError):
        contract_slots(z, [a, b, c])


def test_compress_with_identity(rng):
    z = random_symmetric(3, 3, Field.REAL, rng)
    assert compress(z, np.eye(3)).allclose(z, 1e-14)


def test_sym_power_product_range():
    v, w = basis_vector(2, 0), basis_vector(2, 1)
    assert sym_power_product(v, w, 3, 3).allclose(elementary([v, v, v]))
    with pytest.raises(ValueError):
        sym_power_product(v, w, 4, 3)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 4), complex_field=st.booleans())
def test_sym_inner_product_matches_dense(seed, d, complex_field):
    rng = np.random.default_rng(seed)
    field = Field.COMPLEX if complex_field else Field.REAL
    zs = [random_unit_vector(3, field, rng) for _ in range(d)]
    xs = [random_unit_vector(3, field, rng) for _ in range(d)]
    dense = inner_product(sym_decomposable(zs), sym_decomposable(xs))
    assert abs(sym_inner_product(zs, xs) - dense) <= 1e-12
    # symmetrization is self-adjoint, so one side may stay elementary
    assert abs(inner_product(sym_decomposable(zs), elementary(xs)) - dense) <= 1e-12


def test_flattening_rank_of_symmetric_product():
    v, w = basis_vector(3, 0), basis_vector(3, 1)
    assert flattening_rank(sym_decomposable([v, w])) == 2
    assert flattening_rank(elementary([v, w, w])) == 1


def test_flattening_norm_bounds_hs(rng):
    z = random_tensor((2, 3, 2), Field.REAL, rng)
    assert flattening_norm(z, [0]) <= hs_norm(z) + 1e-12


def test_sym_decomposition_densify_and_as_cp(rng):
    vecs = [random_unit_vector(3, Field.REAL, rng) for _ in range(3)]
    decomp = SymDecomposition.from_terms([(2.0, vecs), (-1.0, [vecs[0]] * 3)])
    dense = decomp.densify()
    expected = 2.0 * sym_decomposable(vecs) - elementary([vecs[0]] * 3)
    assert dense.allclose(expected, 1e-12)
    assert decomp.as_cp().densify().allclose(dense, 1e-12)
    assert decomp.norm_sum() == pytest.approx(3.0)


def test_sym_decomposition_rejects_ragged_terms():
    with pytest.raises(ValueError):
        SymDecomposition.from_terms([(1.0, [np.ones(2), np.ones(2)]), (1.0, [np.ones(2)])])


def test_cp_symmetrized_matches_symmetrize(rng):
    terms = [[random_unit_vector(2, Field.COMPLEX, rng) for _ in range(3)] for _ in range(2)]
    cp = CPDecomposition.from_terms(terms)
    assert cp.rank == 2 and cp.order == 3
    sym = cp.symmetrized()
    assert len(sym) == cp.rank
    assert sym.densify().allclose(symmetrize(cp.densify()), 1e-12)
    assert cp.norm_sum() == pytest.approx(2.0)


def test_permanent_formula_on_orthonormal_pair():
    v, w = basis_vector(2, 0), basis_vector(2, 1)
    # <v v w, v v w> = perm([[1,0],[0,1]]) / 2 = 1/2
    assert sym_inner_product([v, w], [v, w]) == pytest.approx(0.5)
    assert hs_norm(sym_decomposable([v, w])) == pytest.approx(math.sqrt(0.5))
