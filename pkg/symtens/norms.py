"""Injective and projective norm engines.

Every estimate says what it is: `exact` only when an independent check agrees
(singular values for d <= 2, the sphere-grid oracle at tiny sizes), otherwise a
lower or upper bound together with the witness that produces it.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import khatri_rao, lstsq, orth, svd, svdvals
from scipy.optimize import linprog

from symtens.config import SolverConfig, settings
from symtens.core import (
    CPDecomposition,
    DenseTensor,
    Field,
    SymDecomposition,
    basis_vector,
    bipartitions,
    compress,
    elementary,
    flattening,
    flattening_norm,
    flattening_rank,
    hs_norm,
    inner_product,
    is_symmetric,
    numeric_rank,
    random_unit_vector,
    symmetrize,
)
from symtens.errors import ContractViolation
from symtens.models import BanachCheck, NormEstimate, NormKind, NuclearStructureReport
from symtens.power import (
    PowerResult,
    best_multilinear,
    best_symmetric,
    elementary_value,
    sphere_oracle,
    symmetric_power_iteration,
)
from symtens.seeding import best_of, run_restarts

log = logging.getLogger(__name__)

CONFIRM_TOL = 1e-6  # oracle agreement needed to call a value exact
WITNESS_TOL = 1e-6

STREAM_ALS = 4
STREAM_LP = 5

_LP_PRICE_SLACK = 1e-9


def _cfg(cfg: SolverConfig | None) -> SolverConfig:
    return cfg if cfg is not None else settings.solver


def _agrees(a: float, b: float) -> bool:
    return abs(a - b) <= CONFIRM_TOL * max(1.0, abs(a), abs(b))


# ── Hilbert-Schmidt ──


def hs_estimate(z: DenseTensor) -> NormEstimate:
    return NormEstimate(norm="hs", value=hs_norm(z), kind=NormKind.EXACT, witness=z)


# ── Injective norm ──


def _injective_estimate(z: DenseTensor, point: PowerResult, kind: NormKind, cfg: SolverConfig) -> NormEstimate:
    return NormEstimate(
        norm="injective",
        value=point.value,
        kind=kind,
        witness=elementary(point.vectors, z.field),
        witness_vectors=list(point.vectors),
        iterations=point.iterations,
        seed=cfg.seed,
    )


def injective_point(z: DenseTensor, cfg: SolverConfig | None = None) -> tuple[PowerResult, NormKind]:
    """Best elementary point of z and whether it is confirmed global."""
    cfg = _cfg(cfg)
    if z.order <= 2:
        return sphere_oracle(z, cfg), NormKind.EXACT

    power = best_multilinear(z, cfg)
    if z.size > cfg.oracle_cutoff:
        return power, NormKind.LOWER_BOUND

    oracle = sphere_oracle(z, cfg)
    if _agrees(oracle.value, power.value):
        log.debug("oracle confirms eps=%.12g", power.value)
        return (power if power.value >= oracle.value else oracle), NormKind.EXACT
    log.warning(
        "power iteration (%.12g) and grid oracle (%.12g) disagree; reporting the larger as a lower bound",
        power.value,
        oracle.value,
    )
    return (power if power.value >= oracle.value else oracle), NormKind.LOWER_BOUND


def injective_norm(z: DenseTensor, cfg: SolverConfig | None = None) -> NormEstimate:
    cfg = _cfg(cfg)
    if hs_norm(z) == 0:
        return NormEstimate(norm="injective", value=0.0, kind=NormKind.EXACT, seed=cfg.seed)
    point, kind = injective_point(z, cfg)
    return _injective_estimate(z, point, kind, cfg)


def injective_sym(z: DenseTensor, cfg: SolverConfig | None = None) -> NormEstimate:
    """eps_s(z) = max |P_z(y)| over unit y, for symmetric z."""
    cfg = _cfg(cfg)
    if not is_symmetric(z):
        raise ValueError("injective_sym needs a symmetric tensor")
    if z.order == 1:
        y = z.array / hs_norm(z) if hs_norm(z) > 0 else basis_vector(z.dim, 0, z.field)
        point = PowerResult(hs_norm(z), elementary_value(z, [y]), [y], 0, 0, True)
        kind = NormKind.EXACT
    else:
        point = best_symmetric(z, cfg)
        kind = NormKind.LOWER_BOUND
        if z.order == 2 or z.size <= cfg.oracle_cutoff:
            oracle = sphere_oracle(z, cfg)
            if not _agrees(oracle.value, point.value):
                # Banach: the diagonal attains eps too, so restart from the oracle's slots
                for v in oracle.vectors:
                    retry = symmetric_power_iteration(z, v, cfg.tol, cfg.max_iter)
                    if retry.value > point.value:
                        point = retry
            if _agrees(oracle.value, point.value):
                kind = NormKind.EXACT
            else:
                log.warning("symmetric iteration stalled at %.12g below oracle %.12g", point.value, oracle.value)

    y = point.vectors[0]
    lam = point.lam
    sign = None
    if z.field is Field.REAL:
        if z.order % 2 == 1 and lam < 0:
            y, lam = -y, -lam
        sign = 1 if lam >= 0 else -1
    return NormEstimate(
        norm="injective_sym",
        value=abs(lam),
        kind=kind,
        witness=elementary([y] * z.order, z.field),
        witness_vectors=[y],
        iterations=point.iterations,
        seed=cfg.seed,
        sign=sign,
    )


def banach_check(z: DenseTensor, cfg: SolverConfig | None = None) -> BanachCheck:
    """Compare eps_s and eps on a symmetric tensor; they coincide on Hilbert spaces."""
    cfg = _cfg(cfg)
    sym = injective_sym(z, cfg)
    full = injective_norm(z, cfg)
    gap = abs(full.value - sym.value)
    both_exact = sym.kind is NormKind.EXACT and full.kind is NormKind.EXACT
    if both_exact and gap > CONFIRM_TOL:
        raise ContractViolation("banach-identity", "eps_s and eps differ on an oracle-verified instance", gap)
    return BanachCheck(
        eps_sym=sym.value,
        eps=full.value,
        gap=gap,
        eps_kind=NormKind.EXACT if both_exact else NormKind.LOWER_BOUND,
    )


def injective_upper(z: DenseTensor, cfg: SolverConfig | None = None) -> NormEstimate:
    """Certified upper bound on eps: the smallest flattening operator norm.

    Exact for d <= 2. At oracle sizes an oracle-confirmed value replaces it."""
    cfg = _cfg(cfg)
    value = min(flattening_norm(z, s) for s in bipartitions(z.order))
    kind = NormKind.EXACT if z.order <= 2 else NormKind.UPPER_BOUND
    if kind is NormKind.UPPER_BOUND and z.size <= cfg.oracle_cutoff:
        confirmed = injective_norm(z, cfg)
        if confirmed.kind is NormKind.EXACT and confirmed.value <= value:
            return confirmed
    return NormEstimate(norm="injective", value=value, kind=kind, seed=cfg.seed)


def shared_injective_bound(t: DenseTensor) -> float:
    """min over sizes s of the largest flattening norm with |S| = s.

    Every flattening of sigma(t) averages permuted flattenings of t of the same
    size, so this bound never increases under symmetrization."""
    d = t.order
    if d == 1:
        return hs_norm(t)
    by_size = {}
    for s in bipartitions(d):
        by_size.setdefault(len(s), []).append(flattening_norm(t, s))
    return min(max(norms) for norms in by_size.values())


# ── Projective norm, upper side ──


@dataclass
class _Bound:
    value: float
    residual: float
    witness: CPDecomposition | SymDecomposition | None
    source: str


def _decomposition_bound(z: DenseTensor, decomp: CPDecomposition | SymDecomposition, source: str) -> _Bound:
    approx = decomp.densify()
    if approx.shape != z.shape or approx.field is not z.field:
        raise ValueError(f"{source}: decomposition of shape {list(approx.shape)} does not match {list(z.shape)}")
    residual = float(np.sum(np.abs(z.array - approx.array)))
    return _Bound(decomp.norm_sum() + residual, residual, decomp, source)


def _matrix_decomposition(z: DenseTensor) -> CPDecomposition:
    if z.order == 1:
        return CPDecomposition(z.field, (z.array.reshape(-1, 1),))
    u, s, vh = svd(z.array, full_matrices=False)
    return CPDecomposition(z.field, (u * s, vh.T))


def _slice_decomposition(z: DenseTensor) -> CPDecomposition:
    """SVD of every matrix slice over the last two modes."""
    d = z.order
    columns: list[list[np.ndarray]] = [[] for _ in range(d)]
    for idx in np.ndindex(*z.shape[:-2]):
        u, s, vh = svd(z.array[idx], full_matrices=False)
        for r in np.flatnonzero(s > 0):
            for k, i in enumerate(idx):
                columns[k].append(basis_vector(z.shape[k], i, z.field))
            columns[d - 2].append(u[:, r] * s[r])
            columns[d - 1].append(vh[r, :])
    return CPDecomposition(z.field, tuple(np.stack(c, axis=1) for c in columns))


def _random_factor(n: int, rank: int, field: Field, scale: float, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, rank))
    if field is Field.COMPLEX:
        a = a + 1j * rng.standard_normal((n, rank))
    return scale * a / np.linalg.norm(a, axis=0)


def _balance(factors: list[np.ndarray]) -> None:
    """Spread each term's weight evenly over its vectors; the tensor is unchanged."""
    d = len(factors)
    norms = np.stack([np.linalg.norm(f, axis=0) for f in factors])
    for r in range(norms.shape[1]):
        col = norms[:, r]
        if np.any(col == 0):
            continue
        g = np.prod(col) ** (1.0 / d)
        for k in range(d):
            factors[k][:, r] *= g / col[k]


def cp_als(z: DenseTensor, rank: int, rng: np.random.Generator, cfg: SolverConfig) -> CPDecomposition:
    """Rank-`rank` CP fit by ridge-damped alternating least squares.

    The ridge weight decays from HS(z)/10 to 0 so early sweeps favour small
    factors (a proxy for a small norm sum) and the last stage fits exactly."""
    d = z.order
    hs = hs_norm(z)
    scale = (hs / rank) ** (1.0 / d) if hs > 0 else 1.0
    factors = [_random_factor(n, rank, z.field, scale, rng) for n in z.shape]
    unfoldings = [flattening(z, [k]) for k in range(d)]
    stages = [hs * 10.0**-t for t in range(1, 9)] + [0.0]
    sweeps = max(1, cfg.als_max_iter // len(stages))
    eye = np.eye(rank, dtype=z.field.dtype)

    for mu in stages:
        previous = np.inf
        for _ in range(sweeps):
            for k in range(d):
                kr = reduce(khatri_rao, [factors[j] for j in range(d) if j != k])
                lhs, rhs = kr, unfoldings[k].T
                if mu > 0:
                    lhs = np.vstack([kr, math.sqrt(mu) * eye])
                    rhs = np.vstack([rhs, np.zeros((rank, z.shape[k]), dtype=z.field.dtype)])
                solution, *_ = lstsq(lhs, rhs)
                factors[k] = solution.T
            _balance(factors)
            misfit = float(np.linalg.norm(unfoldings[0] - factors[0] @ reduce(khatri_rao, factors[1:]).T))
            if abs(previous - misfit) <= 1e-12 * max(hs, 1.0):
                break
            previous = misfit
    return CPDecomposition(z.field, tuple(factors))


def _als_bound(z: DenseTensor, r_max: int, cfg: SolverConfig) -> _Bound | None:
    trivial = math.prod(z.shape) // max(z.shape)
    seed_rank = max(1, flattening_rank(z))
    ranks = range(min(seed_rank, r_max), min(r_max, trivial) + 1)
    count = max(1, cfg.restarts // 8)
    best: _Bound | None = None
    for rank in ranks:

        def run(index: int, rng: np.random.Generator, rank=rank) -> _Bound:
            return _decomposition_bound(z, cp_als(z, rank, rng, cfg), f"als rank {rank}")

        results = run_restarts(run, cfg.seed, count, cfg.workers, stream=STREAM_ALS * 1000 + rank)
        _, candidate = best_of(results, key=lambda b: -b.value)
        log.debug("als rank %d: norm sum %.12g (residual %.3e)", rank, candidate.value, candidate.residual)
        if best is None or candidate.value < best.value:
            best = candidate
    return best


# ── Symmetric decomposition search ──


@dataclass
class SymmetricSearch:
    value: float  # LP objective: sum of atom weights
    decomposition: SymDecomposition
    dual: DenseTensor  # symmetric, |<(x)^d a, dual>| <= 1 on every priced atom
    dual_value: float  # Re <z, dual>
    rounds: int
    converged: bool = True


def _sym_rows(n: int, d: int) -> np.ndarray:
    return np.array(list(itertools.combinations_with_replacement(range(n), d)), dtype=int)


def _multiplicity(row: np.ndarray) -> int:
    _, counts = np.unique(row, return_counts=True)
    return math.factorial(len(row)) // math.prod(math.factorial(int(c)) for c in counts)


def _phases(field: Field) -> np.ndarray:
    if field is Field.REAL:
        return np.array([1.0, -1.0])
    return np.exp(2j * np.pi * np.arange(8) / 8)


def _dual_tensor(u_rows: np.ndarray, rows: np.ndarray, n: int, field: Field) -> DenseTensor:
    arr = np.zeros((n,) * rows.shape[1], dtype=field.dtype)
    for row, u in zip(rows, u_rows):
        value = u / _multiplicity(row)
        for perm in set(itertools.permutations(row)):
            arr[perm] = value
    return DenseTensor(arr, field)


def _solve_sym_lp(atoms: list[np.ndarray], rows: np.ndarray, target: np.ndarray, field: Field):
    phases = _phases(field)
    base = np.prod(np.stack(atoms)[:, rows], axis=2).T  # rows x atoms
    cols = np.concatenate([p * base for p in phases], axis=1)
    if field is Field.REAL:
        a_eq, b_eq = cols.real, target.real
    else:
        a_eq = np.vstack([cols.real, cols.imag])
        b_eq = np.concatenate([target.real, target.imag])
    res = linprog(np.ones(a_eq.shape[1]), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res, phases


def symmetric_search(z: DenseTensor, cfg: SolverConfig | None = None) -> SymmetricSearch | None:
    """Smallest sum_i |c_i| with z = sum_i c_i (x)^d a_i over a dictionary of unit
    atoms, grown by column generation until no atom prices above 1. Phases are
    discretized over C, so the objective is an upper bound on the symmetric
    projective norm.

    The LP runs on the span of z's fibers; atoms and the dual are mapped back
    isometrically. Returns None if the LP cannot be solved."""
    cfg = _cfg(cfg)
    n, d = z.dim, z.order
    q = orth(flattening(z, [0]), rcond=1e-12)
    if q.shape[1] == 0:
        return None
    if q.shape[1] < n:
        small = compress(z, q.conj().T)
    else:
        q, small = np.eye(n, dtype=z.field.dtype), z
    k = small.dim
    rows = _sym_rows(k, d)
    target = small.array[tuple(rows.T)]
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, STREAM_LP]))
    atoms = [basis_vector(k, i, z.field) for i in range(k)]
    atoms += [random_unit_vector(k, z.field, rng) for _ in range(2 * len(rows))]
    pricing = cfg.model_copy(update={"restarts": max(4, cfg.restarts // 4)})

    rounds = 0
    converged = False
    while True:
        res, phases = _solve_sym_lp(atoms, rows, target, z.field)
        if res.status != 0:
            log.warning("symmetric decomposition LP failed: %s", res.message)
            return None
        y = res.eqlin.marginals
        u_rows = y if z.field is Field.REAL else y[: len(rows)] + 1j * y[len(rows) :]
        dual = _dual_tensor(u_rows, rows, k, z.field)
        price = best_symmetric(dual, pricing)
        if price.value <= 1 + _LP_PRICE_SLACK:
            converged = True
            break
        if rounds >= cfg.lp_rounds:
            break
        atoms.append(price.vectors[0])
        rounds += 1
        log.debug("LP round %d: objective %.12g, priced atom %.6g", rounds, res.fun, price.value)
    if not converged:
        log.warning("column generation stopped after %d rounds with an atom pricing at %.9g", rounds, price.value)

    weights = res.x.reshape(len(phases), len(atoms))
    cutoff = 1e-12 * max(1.0, float(np.max(weights)))
    terms = [
        (float(weights[p, a]) * phases[p], [q @ atoms[a]] * d)
        for p in range(len(phases))
        for a in range(len(atoms))
        if weights[p, a] > cutoff
    ]
    if not terms:
        terms = [(0.0, [q @ atoms[0]] * d)]
    decomposition = SymDecomposition.from_terms(terms, z.field)
    if k < n:
        dual = compress(dual, q)
    dual_value = float(np.real(inner_product(z, dual)))
    return SymmetricSearch(float(res.fun), decomposition, dual, dual_value, rounds, converged)


def projective_upper(
    z: DenseTensor,
    r_max: int | None = None,
    cfg: SolverConfig | None = None,
    hints: tuple[CPDecomposition | SymDecomposition, ...] = (),
) -> NormEstimate:
    """Smallest sum of factor-norm products found, plus the l1 mass of whatever the
    decomposition misses. Exact for d <= 2."""
    cfg = _cfg(cfg)
    if r_max is not None and r_max < 1:
        raise ValueError(f"r_max must be at least 1, got {r_max}")
    if hs_norm(z) == 0:
        return NormEstimate(norm="projective", value=0.0, kind=NormKind.EXACT, seed=cfg.seed)
    if z.order <= 2:
        exact = _decomposition_bound(z, _matrix_decomposition(z), "svd")
        return NormEstimate(
            norm="projective",
            value=exact.value,
            kind=NormKind.EXACT,
            witness=exact.witness,
            residual=exact.residual,
            seed=cfg.seed,
        )

    if r_max is None:
        r_max = flattening_rank(z) + 2
    candidates = [_decomposition_bound(z, _slice_decomposition(z), "slices")]
    als = _als_bound(z, r_max, cfg)
    if als is not None:
        candidates.append(als)
    if is_symmetric(z):
        search = symmetric_search(z, cfg)
        if search is not None:
            candidates.append(_decomposition_bound(z, search.decomposition, "symmetric lp"))
    for i, hint in enumerate(hints):
        candidates.append(_decomposition_bound(z, hint, f"hint {i}"))

    best = min(candidates, key=lambda b: b.value)
    log.debug("projective upper %.12g from %s", best.value, best.source)
    return NormEstimate(
        norm="projective",
        value=best.value,
        kind=NormKind.UPPER_BOUND,
        witness=best.witness,
        residual=best.residual,
        seed=cfg.seed,
    )


# ── Projective norm, lower side ──


def polar_witnesses(z: DenseTensor) -> list[DenseTensor]:
    """U V^H of every flattening, reshaped back; <z, u> is the flattening's nuclear norm."""
    out = []
    for s in bipartitions(z.order):
        if z.order == 1:
            break
        rest = [k for k in range(z.order) if k not in s]
        u, _, vh = svd(flattening(z, s), full_matrices=False)
        polar = (u @ vh).reshape([z.shape[k] for k in list(s) + rest])
        out.append(DenseTensor(np.transpose(polar, np.argsort(list(s) + rest)), z.field))
    return out


def projective_lower(z: DenseTensor, cfg: SolverConfig | None = None) -> NormEstimate:
    """max over candidate witnesses u of |<z, u>| / eps_upper(u)."""
    cfg = _cfg(cfg)
    if hs_norm(z) == 0:
        return NormEstimate(norm="projective", value=0.0, kind=NormKind.EXACT, seed=cfg.seed)
    if z.order <= 2:
        s = svdvals(z.array.reshape(z.shape[0], -1))
        polar = polar_witnesses(z)[0] if z.order == 2 else z / hs_norm(z)
        return NormEstimate(
            norm="projective", value=float(np.sum(s)), kind=NormKind.EXACT, witness=polar, seed=cfg.seed
        )

    point, _ = injective_point(z, cfg)
    candidates: list[tuple[str, DenseTensor, float]] = [
        ("rank-1", elementary(point.vectors, z.field), 1.0),
        ("self", z, injective_upper(z, cfg).value),
    ]
    for polar in polar_witnesses(z):
        candidates.append(("polar", polar, injective_upper(polar, cfg).value))
    if is_symmetric(z):
        search = symmetric_search(z, cfg)
        if search is not None and hs_norm(search.dual) > 0:
            candidates.append(("lp dual", search.dual, injective_upper(search.dual, cfg).value))

    best_value, best_source, best_witness = -1.0, "", None
    for source, u, eps_u in candidates:
        if eps_u <= 0:
            continue
        value = abs(inner_product(z, u)) / eps_u
        log.debug("projective lower candidate %s: %.12g", source, value)
        if value > best_value:
            best_value, best_source, best_witness = value, source, u / eps_u
    log.debug("projective lower %.12g from %s", best_value, best_source)
    return NormEstimate(
        norm="projective",
        value=best_value,
        kind=NormKind.LOWER_BOUND,
        witness=best_witness,
        iterations=point.iterations,
        seed=cfg.seed,
    )


# ── Nuclear decompositions ──


def _elementary_terms(decomp) -> list[list[np.ndarray]]:
    if isinstance(decomp, SymDecomposition):
        return decomp.as_cp().terms()
    if isinstance(decomp, CPDecomposition):
        return decomp.terms()
    return [[np.asarray(v) for v in term] for term in decomp]


def _align(u: DenseTensor, term_tensors: list[DenseTensor]) -> DenseTensor:
    total = sum(inner_product(t, u) for t in term_tensors)
    if abs(total) == 0:
        return u
    phase = total / abs(total)
    return u * (phase if u.field is Field.COMPLEX else float(np.sign(np.real(phase))))


def _equality_correction(u: DenseTensor, term_tensors: list[DenseTensor], targets: np.ndarray) -> DenseTensor:
    """Smallest symmetric change making <T_i, u> = t_i for every term."""
    mat = np.stack([symmetrize(t).data for t in term_tensors])  # row i: sigma(T_i)
    gap = targets - np.array([inner_product(t, u) for t in term_tensors])
    # delta = sum_j c_j sigma(T_j) gives <T_i, delta> = sum_j conj(c_j) <sigma(T_i), sigma(T_j)>
    gram = mat @ mat.conj().T
    conj_coeffs, *_ = lstsq(gram, gap)
    delta = conj_coeffs.conj() @ mat
    return u + DenseTensor(delta.reshape(u.shape), u.field)


def nuclear_structure_check(
    z: DenseTensor,
    decomp,
    certificate: float | NormEstimate | None,
    tol: float = 1e-8,
    cfg: SolverConfig | None = None,
) -> NuclearStructureReport:
    """Structure of an allegedly norm-attaining decomposition of a symmetric z.

    `decomp` is a SymDecomposition, a CPDecomposition or a list of vector tuples.
    For d > 2, every term of an optimal decomposition spans a line over C and at
    most a plane over R; a symmetric norm-one form attaining every term's norm
    product must exist, and is searched for."""
    cfg = _cfg(cfg)
    if certificate is None:
        raise ValueError("nuclear_structure_check needs a certified projective norm")
    cert = certificate.value if isinstance(certificate, NormEstimate) else float(certificate)
    if not is_symmetric(z):
        raise ValueError("nuclear_structure_check needs a symmetric tensor")

    terms = _elementary_terms(decomp)
    cp = CPDecomposition.from_terms(terms, z.field)
    drift = hs_norm(cp.densify() - z)
    if drift > tol * max(1.0, hs_norm(z)):
        raise ValueError(f"decomposition does not sum to z (HS distance {drift:.3e})")
    norm_sum = cp.norm_sum()
    if abs(norm_sum - cert) > tol * max(1.0, cert):
        raise ValueError(f"norm sum {norm_sum:.12g} does not match the certificate {cert:.12g}")

    d = z.order
    span_dims = [numeric_rank(np.stack(vecs, axis=1), tol) for vecs in terms]
    limit = 1 if z.field is Field.COMPLEX else 2
    violations = [i for i, dim in enumerate(span_dims) if d > 2 and dim > limit]
    if violations:
        log.warning("%d term(s) exceed span dimension %d: %s", len(violations), limit, violations)

    term_tensors = [elementary(vecs, z.field) for vecs in terms]
    targets = np.array([np.prod([np.linalg.norm(v) for v in vecs]) for vecs in terms])

    seeds: list[tuple[str, DenseTensor]] = []
    if d > 2 and z.size <= 4096:
        search = symmetric_search(z, cfg)
        if search is not None:
            seeds.append(("lp dual", search.dual))
    seeds += [("polar", symmetrize(p)) for p in polar_witnesses(z)]
    point, _ = injective_point(z, cfg)
    seeds.append(("rank-1", symmetrize(elementary(point.vectors, z.field))))

    best = None
    for source, raw in seeds:
        if hs_norm(raw) == 0:
            continue
        for corrected in (False, True):
            u = raw / injective_norm(raw, cfg).value
            u = _align(u, term_tensors)
            if corrected:
                u = _equality_correction(u, term_tensors, targets)
            eps_u = injective_norm(u, cfg).value
            residuals = [abs(inner_product(t, u) - target) for t, target in zip(term_tensors, targets)]
            score = max(max(residuals), abs(eps_u - 1.0))
            log.debug("witness %s (corrected=%s): max residual %.3e, eps %.12g", source, corrected, score, eps_u)
            if best is None or score < best[0]:
                best = (score, u, eps_u, residuals)

    if best is None:
        return NuclearStructureReport(span_dims=span_dims, violations=violations, norm_sum=norm_sum, certificate=cert)
    score, u, eps_u, residuals = best
    found = score <= WITNESS_TOL
    if not found:
        log.warning("no norm-attaining symmetric form found (best max residual %.3e)", score)
    return NuclearStructureReport(
        span_dims=span_dims,
        violations=violations,
        norm_sum=norm_sum,
        certificate=cert,
        witness_form=u,
        witness_eps=eps_u,
        residuals=[float(r) for r in residuals],
        witness_found=found,
    )
