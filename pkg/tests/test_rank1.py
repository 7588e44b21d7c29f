import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symtens.config import SolverConfig
from symtens.core import (
    Field,
    basis_vector,
    elementary,
    hs_norm,
    inner_product,
    multilinear_eval,
    random_symmetric,
    random_tensor,
    sym_decomposable,
)
from symtens.models import NormKind, StructureClass
from symtens.rank1 import (
    best_rank1,
    best_sym_rank1,
    certify_rank1,
    complex_counterexample,
    non_uniqueness_family,
    rank1_structure_check,
    span_dimension,
    sym_ratio,
)
from symtens.recovery import explicit_form

FAST = SolverConfig(restarts=6, oracle_budget=3000)


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    d=st.integers(2, 4),
    n=st.integers(2, 4),
    complex_field=st.booleans(),
)
def test_rank1_certificate_identity(seed, d, n, complex_field):
    rng = np.random.default_rng(seed)
    field = Field.COMPLEX if complex_field else Field.REAL
    z = random_tensor((n,) * d, field, rng)
    cert = best_rank1(z, FAST)
    x = elementary(cert.vectors, field)
    assert abs(cert.lam - inner_product(z, x)) <= 1e-10
    assert cert.lambda_gap <= 1e-10
    assert cert.residual_hs**2 + abs(cert.lam) ** 2 == pytest.approx(hs_norm(z) ** 2, abs=1e-8)


def test_elementary_tensor_is_its_own_approximation(cfg):
    z = 2.5 * elementary([basis_vector(3, 0), basis_vector(3, 1), basis_vector(3, 2)])
    cert = best_rank1(z, cfg)
    assert abs(cert.lam) == pytest.approx(2.5, abs=1e-10)
    assert cert.residual_hs <= 1e-8


def test_complex_counterexample_attains_the_norm(cfg):
    z, vectors = complex_counterexample()
    cert = certify_rank1(z, vectors, cfg)
    assert abs(cert.lam) == pytest.approx(1.0, abs=1e-8)
    assert cert.eps_value == pytest.approx(1.0, abs=1e-8)
    assert cert.eps_gap <= 1e-8
    assert cert.eps_kind is NormKind.EXACT
    # optimal but not symmetric: the two vectors are independent
    assert span_dimension(cert.vectors) == 2
    assert rank1_structure_check(z, cert) is StructureClass.COPLANAR


def test_certify_rank1_checks_arity(cfg):
    z, vectors = complex_counterexample()
    with pytest.raises(ValueError):
        certify_rank1(z, vectors[:1], cfg)


@settings(max_examples=12, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(3, 4))
def test_real_optimum_spans_at_most_a_plane(seed, d):
    rng = np.random.default_rng(seed)
    z = random_symmetric(2 if d == 4 else 3, d, Field.REAL, rng)
    cert = best_rank1(z, FAST)
    if cert.eps_kind is not NormKind.EXACT:
        return
    assert span_dimension(cert.vectors, 1e-6) <= 2
    assert rank1_structure_check(z, cert, tol=1e-6) is not StructureClass.VIOLATION


@settings(max_examples=12, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_complex_optimum_is_collinear(seed):
    rng = np.random.default_rng(seed)
    z = random_symmetric(2, 3, Field.COMPLEX, rng)
    cert = best_rank1(z, FAST)
    if cert.eps_kind is not NormKind.EXACT:
        return
    assert rank1_structure_check(z, cert, tol=1e-6) is StructureClass.COLLINEAR


def test_structure_check_rejects_non_symmetric(rng, cfg):
    z = random_tensor((2, 2, 2), Field.REAL, rng)
    cert = best_rank1(z, cfg)
    with pytest.raises(ValueError):
        rank1_structure_check(z, cert)


def test_span_dimension():
    e = [basis_vector(3, i) for i in range(3)]
    assert span_dimension([e[0], 2 * e[0]]) == 1
    assert span_dimension(e) == 3
    with pytest.raises(ValueError):
        span_dimension([])


def test_sym_ratio_is_scale_invariant(rng):
    z = random_symmetric(3, 3, Field.REAL, rng)
    vecs = [rng.standard_normal(3) for _ in range(3)]
    scaled = [2.0 * vecs[0], -0.5 * vecs[1], vecs[2]]
    assert sym_ratio(z, vecs) == pytest.approx(sym_ratio(z, scaled))


def test_best_sym_rank1_recovers_a_symmetric_product(cfg):
    v = np.array([1.0, 0.0, 0.0])
    w = np.array([0.0, 1.0, 0.0])
    z = 3.0 * sym_decomposable([v, w, w])
    cert = best_sym_rank1(z, cfg)
    assert cert.ratio == pytest.approx(hs_norm(z), rel=1e-6)
    assert cert.residual_hs <= 1e-2 * hs_norm(z)


def test_best_sym_rank1_needs_symmetry(rng, cfg):
    with pytest.raises(ValueError):
        best_sym_rank1(random_tensor((2, 2, 2), Field.REAL, rng), cfg)


def test_best_sym_rank1_beats_symmetric_power(rng, cfg):
    z = random_symmetric(3, 3, Field.REAL, rng)
    cert = best_sym_rank1(z, cfg)
    power = best_rank1(z, cfg)
    # every (x)^d y is a v-term, so the v-ratio is at least the injective norm
    assert cert.ratio >= abs(power.lam) - 1e-8


@settings(max_examples=12, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 3))
def test_v_term_fit_is_never_worse_than_the_rank1_fit(seed, n):
    rng = np.random.default_rng(seed)
    z = random_symmetric(n, 3, Field.REAL, rng)
    sym = best_sym_rank1(z, FAST)
    full = best_rank1(z, FAST)
    assert sym.residual_hs <= full.residual_hs + 1e-6


def test_best_sym_rank1_fits_e1_v_e2_exactly(cfg):
    z = sym_decomposable([basis_vector(2, 0), basis_vector(2, 1)])
    cert = best_sym_rank1(z, cfg)
    assert cert.ratio == pytest.approx(hs_norm(z), abs=1e-10)
    assert abs(cert.lam) == pytest.approx(1.0, abs=1e-5)
    assert cert.residual_hs <= 1e-5


@pytest.mark.parametrize("a", [-1.0, -0.5, 0.0, 0.5, 1.0])
def test_non_uniqueness_family(a):
    v, w = basis_vector(3, 0), basis_vector(3, 1)
    base = explicit_form(v, w, 1, 3)
    point = [v, w, w]
    family = non_uniqueness_family(base, point, a)
    assert multilinear_eval(family, point) == pytest.approx(multilinear_eval(base, point), abs=1e-12)
    rng = np.random.default_rng(7)
    ys = rng.standard_normal((10_000, 3))
    ys /= np.linalg.norm(ys, axis=1, keepdims=True)
    values = np.einsum("mi,mj,mk,ijk->m", ys, ys, ys, family.array)
    assert np.max(np.abs(values)) <= 1 + 1e-9


def test_non_uniqueness_family_guards():
    v, w = basis_vector(3, 0), basis_vector(3, 1)
    base = explicit_form(v, w, 1, 3)
    with pytest.raises(ValueError):
        non_uniqueness_family(base, [v, w, w], 1.5)
    with pytest.raises(ValueError):
        non_uniqueness_family(base, [v, w, basis_vector(3, 2)], 0.5)
    small = explicit_form(basis_vector(2, 0), basis_vector(2, 1), 1, 3)
    with pytest.raises(ValueError):
        non_uniqueness_family(small, [basis_vector(2, 0)] * 3, 0.5)
    with pytest.raises(ValueError):
        non_uniqueness_family(base, [v, w, w], 0.5, w=v)


def test_counterexample_value():
    z, vectors = complex_counterexample()
    assert abs(multilinear_eval(z, vectors)) == pytest.approx(1.0)
    assert math.isclose(hs_norm(z), math.sqrt(2))
