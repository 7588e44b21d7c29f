"""Decomposable symmetric rank: symmetrization, border rank and rank witnesses.

rank_sigma(z) is the least r with z = sum_i c_i z_1^i v ... v z_d^i. Only upper
bounds are witnessed here (by explicit decompositions); the one lower bound
computed is the E-operator obstruction for the border-rank limit tensor.
"""

import logging
import math
from collections import Counter
from functools import reduce

import numpy as np
import sympy
from scipy.linalg import lstsq

from symtens.config import SolverConfig, settings
from symtens.core import (
    CPDecomposition,
    DenseTensor,
    Field,
    SymDecomposition,
    _permutations,
    as_vector,
    basis_vector,
    flattening_rank,
    hs_norm,
    is_symmetric,
    numeric_rank,
    symmetrize,
)
from symtens.errors import ContractViolation
from symtens.models import (
    BorderRankInstance,
    ImprovementResult,
    NonstrictExample,
    NormKind,
    RankBounds,
    RankObstructionReport,
    StrictImprovement,
)
from symtens.norms import injective_norm, projective_lower, projective_upper, shared_injective_bound
from symtens.seeding import best_of, run_restarts

log = logging.getLogger(__name__)

STREAM_SYM_ALS = 7

ALS_RIDGE = 1e-6  # relative to HS(z)^2; keeps factor norms bounded
BORDER_TOL = 1e-12

NORMS = ("hs", "injective", "projective")

# (v, w) index pairs whose E-images reproduce e_1..e_6 (0-based)
E_ARGUMENTS = ((1, 5), (0, 5), (0, 4), (1, 2), (0, 2), (0, 1))


def _cfg(cfg: SolverConfig | None) -> SolverConfig:
    return cfg if cfg is not None else settings.solver


# ── Symmetrization ──


def symmetrize_approximation(
    z: DenseTensor,
    y: DenseTensor | CPDecomposition,
    norm: str = "hs",
    cfg: SolverConfig | None = None,
    tol: float = 1e-10,
) -> ImprovementResult:
    """Replace the approximation y of a symmetric z by x = sigma(y).

    For hs the improvement is exact. For injective and projective it compares
    upper bounds produced by one bounding procedure on both residuals: the
    shared flattening bound for eps, and for pi a decomposition of z - y whose
    symmetrization is offered as a witness for z - x."""
    cfg = _cfg(cfg)
    if norm not in NORMS:
        raise ValueError(f"unknown norm {norm!r}; expected one of {', '.join(NORMS)}")
    if not is_symmetric(z):
        raise ValueError("symmetrize_approximation needs a symmetric z")
    dense = y.densify() if isinstance(y, CPDecomposition) else y
    if dense.shape != z.shape:
        raise ValueError(f"y has shape {list(dense.shape)}, z has {list(z.shape)}")
    if dense.field is not z.field:
        raise ValueError(f"y is over {dense.field.value}, z over {z.field.value}")

    x = symmetrize(dense)
    kind = NormKind.UPPER_BOUND
    if norm == "hs":
        before, after = hs_norm(z - dense), hs_norm(z - x)
        kind = NormKind.EXACT
    elif norm == "injective":
        before, after = shared_injective_bound(z - dense), shared_injective_bound(z - x)
    else:
        est = projective_upper(z - dense, cfg=cfg)
        hints = ()
        if isinstance(est.witness, CPDecomposition):
            hints = (est.witness.symmetrized(),)
        elif isinstance(est.witness, SymDecomposition):
            hints = (est.witness,)
        before = est.value
        after = projective_upper(z - x, cfg=cfg, hints=hints).value
        if est.kind is NormKind.EXACT and z.order <= 2:
            kind = NormKind.EXACT

    improvement = before - after
    if after > before + tol * max(1.0, before):
        raise ContractViolation(
            "symmetrization-improvement",
            f"{norm} bound grew from {before:.12g} to {after:.12g}",
            after - before,
        )

    sym_terms = cp_terms = None
    if isinstance(y, CPDecomposition):
        cp_terms = y.rank
        sym_terms = len(y.symmetrized())
    log.info("symmetrization (%s): %.12g -> %.12g", norm, before, after)
    return ImprovementResult(
        norm=norm,
        x=x,
        improvement=improvement,
        before=before,
        after=after,
        kind=kind,
        sym_terms=sym_terms,
        cp_terms=cp_terms,
    )


def strict_improvement_complex(w: DenseTensor, cfg: SolverConfig | None = None) -> StrictImprovement:
    """Compare an upper bound on pi(sigma(w)) with a lower bound on pi(w).

    Strictness is reported, not asserted: the bounds may be too loose to see it."""
    cfg = _cfg(cfg)
    if w.field is not Field.COMPLEX:
        raise ValueError("strict improvement is a statement about complex tensors")
    if w.order <= 2:
        raise ValueError(f"needs d > 2, got d = {w.order}; for d <= 2 pi(sigma(w)) = pi(w) can hold")
    if not w.is_cubical:
        raise ValueError(f"w must be cubical, got shape {list(w.shape)}")
    if is_symmetric(w):
        raise ValueError("w is already symmetric")
    upper = projective_upper(symmetrize(w), cfg=cfg).value
    lower = projective_lower(w, cfg).value
    strict = upper < lower
    log.info("pi(sigma(w)) <= %.12g, pi(w) >= %.12g: %s", upper, lower, "strict" if strict else "not shown")
    return StrictImprovement(pi_upper_sigma=upper, pi_lower_w=lower, strict=strict)


def injective_nonstrict_example(
    t: float = 0.1,
    field: Field | str = Field.REAL,
    cfg: SolverConfig | None = None,
) -> NonstrictExample:
    """w = e_1 (x) e_1 + t (e_2 (x) e_3 - e_3 (x) e_2) on K^3: non-symmetric, yet
    eps(w) = eps(sigma(w)) = 1 while t <= 1."""
    cfg = _cfg(cfg)
    field = Field(field)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    arr = np.zeros((3, 3), dtype=field.dtype)
    arr[0, 0] = 1.0
    arr[1, 2], arr[2, 1] = t, -t
    w = DenseTensor(arr, field)
    eps_w = injective_norm(w, cfg).value
    if eps_w > 1 + 1e-12:
        # the antisymmetric block has singular values t, t
        raise ValueError(f"t = {t} too large: eps(w) = {eps_w:.12g} exceeds 1 (threshold t <= 1)")
    sigma_w = symmetrize(w)
    eps_sigma = injective_norm(sigma_w, cfg).value
    deviation = max(abs(eps_w - 1), abs(eps_sigma - 1))
    if deviation > 1e-8:
        raise ContractViolation("injective-nonstrict", "eps(w) or eps(sigma(w)) differs from 1", deviation)
    return NonstrictExample(t=t, w=w, sigma_w=sigma_w, eps_w=eps_w, eps_sigma_w=eps_sigma)


# ── Border rank ──


def _e(i: int) -> np.ndarray:
    return basis_vector(6, i, Field.REAL)


def _sym3(i: int, j: int, k: int) -> SymDecomposition:
    return SymDecomposition.from_terms([(1.0, [_e(i), _e(j), _e(k)])], Field.REAL)


def border_limit_decomposition() -> SymDecomposition:
    """y = e_1 v e_2 v e_6 + e_1 v e_3 v e_5 + e_2 v e_3 v e_4."""
    triples = [(0, 1, 5), (0, 2, 4), (1, 2, 3)]
    return SymDecomposition.from_terms([(1.0, [_e(i) for i in tr]) for tr in triples], Field.REAL)


def border_limit() -> DenseTensor:
    return border_limit_decomposition().densify()


def border_sequence_decomposition(n: int) -> SymDecomposition:
    """y_n = n (e_1 + e_4/n) v (e_2 + e_5/n) v (e_3 + e_6/n) - n e_1 v e_2 v e_3."""
    shifted = [_e(0) + _e(3) / n, _e(1) + _e(4) / n, _e(2) + _e(5) / n]
    return SymDecomposition.from_terms([(float(n), shifted), (-float(n), [_e(0), _e(1), _e(2)])], Field.REAL)


def border_gap(n: int) -> float:
    """HS(y_n - y) in closed form; distinct e_i v e_j v e_k are orthogonal with HS^2 = 1/6."""
    return math.sqrt(1 / (2 * n**2) + 1 / (6 * n**4))


def border_rank_instance(n: int) -> BorderRankInstance:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    decomposition = border_sequence_decomposition(n)
    y_n = decomposition.densify()
    y = border_limit()
    expansion = (
        (_sym3(2, 3, 4).densify() + _sym3(1, 3, 5).densify() + _sym3(0, 4, 5).densify()) * (1 / n)
        + _sym3(3, 4, 5).densify() * (1 / n**2)
    )
    deviation = float(np.max(np.abs((y_n - y - expansion).array)))
    if deviation > BORDER_TOL:
        raise ContractViolation("border-expansion", f"y_{n} - y differs from its 1/n expansion", deviation)
    gap = hs_norm(y_n - y)
    log.debug("border instance n=%d: gap %.12g", n, gap)
    return BorderRankInstance(n=n, y_n=y_n, y_limit=y, gap_hs=gap, decomposition=decomposition)


# ── E-operator ──


def e_operator(u: DenseTensor, v, w) -> np.ndarray:
    """E(u, v, w): the vector representing y -> L_u(v, w, y), so <y, E> = L_u(v, w, y).

    Convention: E_k = sum_ij conj(v_i) conj(w_j) u_ijk, which on elementary tensors
    is E(x_1 (x) x_2 (x) x_3, v, w) = <x_1, v><x_2, w> x_3. Over R this is
    <v, x_1><w, x_2> x_3. Over C that order is conjugate-linear in x_1 and x_2, so it
    does not extend linearly to tensors; the representing vector does."""
    if u.order != 3:
        raise ValueError(f"E is defined on order-3 tensors, got order {u.order}")
    vv = as_vector(v, Field.COMPLEX if np.iscomplexobj(v) else u.field)
    ww = as_vector(w, Field.COMPLEX if np.iscomplexobj(w) else u.field)
    if vv.shape[0] != u.shape[0] or ww.shape[0] != u.shape[1]:
        raise ValueError(
            f"vectors of lengths {vv.shape[0]}, {ww.shape[0]} do not fit a tensor of shape {list(u.shape)}"
        )
    return np.einsum("i,j,ijk->k", vv.conj(), ww.conj(), u.array)


def _exact_image_rank(y: DenseTensor) -> int:
    scaled = np.rint(6 * y.array).astype(int)
    if np.max(np.abs(6 * y.array - scaled)) > BORDER_TOL:
        raise ContractViolation("image-integrality", "6 y is not an integer tensor")
    rows = [[sympy.Integer(int(x)) for x in scaled[i, j, :]] for i, j in E_ARGUMENTS]
    return sympy.Matrix(rows).rank()


def _candidate_obstruction(y: DenseTensor, candidate: SymDecomposition) -> dict:
    if len(candidate) != 2 or candidate.n != 6 or candidate.d != 3:
        raise ValueError("the candidate must be a 2-term decomposition in (x)^3 K^6")
    target = y.as_field(candidate.field)
    residual = hs_norm(candidate.densify() - target)
    basis = np.stack([v for term in candidate.terms for v in term.vectors], axis=1)
    basis_rank = numeric_rank(basis, 1e-10)
    report = {"candidate_basis_rank": basis_rank, "candidate_bound": 2, "candidate_residual": residual}
    if basis_rank < 6:
        # the image of E(y, ., .) is all of K^6, so an exact candidate needs a basis
        report["violated_dimensions"] = 6 - basis_rank
        return report

    # column i is y_i^*, <y_j, y_i^*> = delta_ij
    dual = np.linalg.inv(basis.conj().T)
    i = int(np.argmax(np.abs(dual[0, :])))
    # on the candidate, E(., y_i^*, .) only sees the term holding y_i, so its image
    # lies in the span of that term's other two vectors
    image = np.stack([e_operator(target, dual[:, i], _e(k)) for k in range(6)], axis=1)
    image_rank = numeric_rank(image, 1e-8)
    report["candidate_image_rank"] = image_rank
    report["violated_dimensions"] = max(0, image_rank - 2)
    return report


def y_rank_lower_bound_check(
    candidate: SymDecomposition | None = None,
    cfg: SolverConfig | None = None,
    fit: bool = True,
) -> RankObstructionReport:
    """Replay the obstruction showing the border limit y is not a sum of two v-terms.

    The six evaluations of E(y, ., .) span K^6. For a supplied 2-term
    candidate, a dual-basis functional gives a slot-fixed map E(y, y_i^*, .) whose
    image would have to fit in two dimensions; its measured rank is reported."""
    cfg = _cfg(cfg)
    y = border_limit()
    images = [e_operator(y, _e(i), _e(j)) for i, j in E_ARGUMENTS]
    image_rank = numeric_rank(np.stack(images, axis=1), 1e-10)
    match = all(np.allclose(img, _e(k) / 6, rtol=0, atol=BORDER_TOL) for k, img in enumerate(images))
    fields: dict = {}
    if candidate is not None:
        fields.update(_candidate_obstruction(y, candidate))
    if fit and cfg.als_restarts > 0:
        _, als_residual = fit_sym_decomposition(y, 2, cfg)
        fields.update(als_residual=als_residual, als_restarts=cfg.als_restarts)
    report = RankObstructionReport(
        image_rank=image_rank,
        image_rank_exact=_exact_image_rank(y),
        image_values_match=match,
        images=images,
        **fields,
    )
    log.info(
        "E image rank %d (exact %d), 2-term ALS residual %s",
        report.image_rank,
        report.image_rank_exact,
        "skipped" if report.als_residual is None else f"{report.als_residual:.6g}",
    )
    return report


# ── Fits and rank bounds ──


def _slot_columns(others: list[np.ndarray], n: int, dtype) -> np.ndarray:
    """Columns sigma(e_i (x) others) for i < n, flattened."""
    block = reduce(np.multiply.outer, [np.eye(n, dtype=dtype), *others])
    d = len(others) + 1
    acc = np.zeros_like(block)
    for p in _permutations(d):
        acc += np.transpose(block, (0, *[1 + k for k in p]))
    return (acc / math.factorial(d)).reshape(n, -1).T


def _balance_terms(vectors: list[list[np.ndarray]]) -> None:
    for term in vectors:
        norms = [np.linalg.norm(v) for v in term]
        if min(norms) == 0:
            continue
        g = math.prod(norms) ** (1.0 / len(term))
        for k, nk in enumerate(norms):
            term[k] = term[k] * (g / nk)


def fit_sym_decomposition(
    z: DenseTensor,
    terms: int,
    cfg: SolverConfig | None = None,
) -> tuple[SymDecomposition, float]:
    """Fit z by `terms` v-terms with alternating least squares.

    Each step solves for one vector slot of every term at once; the map from those
    vectors to the symmetric tensor is linear. A small ridge bounds the factor
    norms, so sequences escaping to infinity (border rank) leave a visible gap."""
    cfg = _cfg(cfg)
    if terms < 1:
        raise ValueError(f"terms must be at least 1, got {terms}")
    if not is_symmetric(z):
        raise ValueError("fit_sym_decomposition needs a symmetric tensor")
    n, d = z.dim, z.order
    dtype = z.field.dtype
    hs = hs_norm(z)
    target = z.array.reshape(-1)
    mu = ALS_RIDGE * hs**2
    ridge_rows = math.sqrt(mu) * np.eye(terms * n, dtype=dtype)
    rhs = np.concatenate([target, np.zeros(terms * n, dtype=dtype)])
    scale = (hs / terms) ** (1.0 / d) if hs > 0 else 1.0

    def run(index: int, rng: np.random.Generator) -> tuple[float, list[list[np.ndarray]]]:
        vectors = []
        for _ in range(terms):
            term = []
            for _ in range(d):
                v = rng.standard_normal(n)
                if z.field is Field.COMPLEX:
                    v = v + 1j * rng.standard_normal(n)
                term.append(scale * v / np.linalg.norm(v))
            vectors.append(term)

        previous = np.inf
        for _ in range(cfg.als_max_iter):
            for k in range(d):
                blocks = [
                    _slot_columns([vectors[r][j] for j in range(d) if j != k], n, dtype) for r in range(terms)
                ]
                lhs = np.vstack([np.hstack(blocks), ridge_rows])
                solution, *_ = lstsq(lhs, rhs)
                for r in range(terms):
                    vectors[r][k] = solution[r * n : (r + 1) * n]
            _balance_terms(vectors)
            misfit = float(np.linalg.norm(lhs @ solution - rhs))
            if abs(previous - misfit) <= 1e-13 * max(hs, 1.0):
                break
            previous = misfit
        approx = SymDecomposition.from_terms([(1.0, term) for term in vectors], z.field)
        return hs_norm(z - approx.densify()), vectors

    results = run_restarts(run, cfg.seed, max(1, cfg.als_restarts), cfg.workers, STREAM_SYM_ALS)
    index, (residual, vectors) = best_of(results, key=lambda r: -r[0])
    log.info("%d-term symmetric fit: residual %.6g (restart %d)", terms, residual, index)
    return SymDecomposition.from_terms([(1.0, term) for term in vectors], z.field), residual


def _expanded_terms(vectors: tuple[np.ndarray, ...]) -> int:
    """Distinct elementary tensors among the d! permutations of one v-term."""
    labels = []
    for v in vectors:
        match = next((i for i, u in enumerate(vectors) if np.array_equal(u, v)), None)
        labels.append(match)
    counts = Counter(labels).values()
    return math.factorial(len(vectors)) // math.prod(math.factorial(c) for c in counts)


def rank_bounds(z: DenseTensor, decomp: SymDecomposition, tol: float = 1e-8) -> RankBounds:
    """Witnessed bounds around the decomposable symmetric rank of z.

    rank_sigma(z) <= len(decomp); the tensor rank lies between the largest
    flattening rank and the number of distinct elementary terms of decomp."""
    drift = hs_norm(decomp.densify() - z)
    if drift > tol * max(1.0, hs_norm(z)):
        raise ValueError(f"decomposition does not represent z (HS drift {drift:.3e})")
    nonzero = [t for t in decomp.terms if t.coeff != 0]
    return RankBounds(
        sym_upper=len(nonzero),
        tensor_lower=flattening_rank(z) if hs_norm(z) > 0 else 0,
        tensor_upper=sum(_expanded_terms(t.vectors) for t in nonzero),
    )
