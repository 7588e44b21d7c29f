"""Best rank-1 approximations and their optimality certificates.

A point x_1 (x) ... (x) x_d of unit vectors scaled by lam is a best rank-1
approximation of z exactly when lam = <z, x_1 (x) ... (x) x_d> and |lam| = eps(z).
Certificates record both conditions as measured gaps.
"""

import logging
import math

import numpy as np
from scipy.linalg import null_space, orth
from scipy.optimize import minimize

from symtens.config import SolverConfig, settings
from symtens.core import (
    DenseTensor,
    Field,
    basis_vector,
    compress,
    elementary,
    hs_norm,
    inner_product,
    is_symmetric,
    multilinear_eval,
    numeric_rank,
    random_unit_vector,
    sym_decomposable,
    sym_inner_product,
    unit,
)
from symtens.models import NormEstimate, NormKind, Rank1Certificate, StructureClass, SymRank1Certificate
from symtens.norms import injective_norm, injective_point
from symtens.power import best_symmetric, elementary_value
from symtens.seeding import best_of, run_restarts

log = logging.getLogger(__name__)

STREAM_SYM_RANK1 = 6

SPAN_TOL = 1e-6


def _cfg(cfg: SolverConfig | None) -> SolverConfig:
    return cfg if cfg is not None else settings.solver


# ── Tensor best rank-1 ──


def certify_rank1(
    z: DenseTensor,
    vectors: list[np.ndarray],
    cfg: SolverConfig | None = None,
    eps: NormEstimate | None = None,
) -> Rank1Certificate:
    """Certificate for the caller's point; `eps` skips re-estimating eps(z)."""
    cfg = _cfg(cfg)
    if len(vectors) != z.order:
        raise ValueError(f"expected {z.order} vectors, got {len(vectors)}")
    xs = [unit(np.asarray(v, dtype=z.field.dtype)) for v in vectors]
    lam = elementary_value(z, xs)
    x = elementary(xs, z.field)
    residual = hs_norm(z - lam * x)
    if eps is None:
        eps = injective_norm(z, cfg)
    return Rank1Certificate(
        lam=lam,
        vectors=xs,
        residual_hs=residual,
        eps_gap=abs(abs(lam) - eps.value),
        lambda_gap=abs(lam - inner_product(z, x)),
        eps_value=eps.value,
        eps_kind=eps.kind,
    )


def best_rank1(z: DenseTensor, cfg: SolverConfig | None = None) -> Rank1Certificate:
    cfg = _cfg(cfg)
    if hs_norm(z) == 0:
        xs = [basis_vector(n, 0, z.field) for n in z.shape]
        return certify_rank1(z, xs, cfg)
    point, kind = injective_point(z, cfg)
    eps = NormEstimate(norm="injective", value=point.value, kind=kind, seed=cfg.seed)
    cert = certify_rank1(z, point.vectors, cfg, eps=eps)
    log.info("best rank-1: |lam|=%.12g (%s), residual %.3e", abs(cert.lam), kind.value, cert.residual_hs)
    return cert


def span_dimension(vectors: list[np.ndarray], tol: float = 1e-8) -> int:
    if not vectors:
        raise ValueError("span_dimension needs at least one vector")
    return numeric_rank(np.stack([np.asarray(v) for v in vectors], axis=1), tol)


def rank1_structure_check(
    z: DenseTensor,
    cert: Rank1Certificate,
    tol: float = 1e-8,
    span_tol: float = SPAN_TOL,
) -> StructureClass:
    """Classify the span of an optimal point of a symmetric z.

    Over R the span is a line or a plane. Over C with d > 2 it is a line; d = 2
    over C allows a plane."""
    if not is_symmetric(z):
        raise ValueError("rank1_structure_check needs a symmetric tensor")
    if cert.eps_gap > tol:
        raise ValueError(f"certificate is not near-optimal (eps_gap {cert.eps_gap:.3e} > {tol:.1e})")
    if cert.eps_kind is not NormKind.EXACT:
        log.warning("optimality of the certified point is not oracle-confirmed")
    d = z.order
    dim = span_dimension(cert.vectors, span_tol)
    if dim == 1 or d == 1:
        return StructureClass.COLLINEAR
    if z.field is Field.REAL:
        return StructureClass.COPLANAR if dim == 2 else StructureClass.VIOLATION
    if d == 2:
        return StructureClass.COPLANAR
    return StructureClass.VIOLATION


def complex_counterexample() -> tuple[DenseTensor, list[np.ndarray]]:
    """e_1 (x) e_1 + e_2 (x) e_2 over C^2 and a best rank-1 point of it that is
    not symmetric."""
    e1, e2 = basis_vector(2, 0, Field.COMPLEX), basis_vector(2, 1, Field.COMPLEX)
    z = elementary([e1, e1]) + elementary([e2, e2])
    s = 1 / math.sqrt(2)
    vectors = [np.array([s, 1j * s]), np.array([s, -1j * s])]
    return z, vectors


# ── Decomposable symmetric best rank-1 ──


def _pack(vectors: list[np.ndarray], field: Field) -> np.ndarray:
    flat = np.concatenate(vectors)
    return flat if field is Field.REAL else np.concatenate([flat.real, flat.imag])


def _unpack(params: np.ndarray, n: int, d: int, field: Field) -> list[np.ndarray]:
    if field is Field.COMPLEX:
        half = params.size // 2
        params = params[:half] + 1j * params[half:]
    return [params[k * n : (k + 1) * n] for k in range(d)]


def sym_ratio(z: DenseTensor, vectors: list[np.ndarray]) -> float:
    """|L_z(u_1..u_d)| / HS(u_1 v ... v u_d); invariant under scaling each u_k."""
    sq = float(np.real(sym_inner_product(vectors, vectors, z.field)))
    if sq <= 0:
        return 0.0
    return abs(multilinear_eval(z, vectors)) / math.sqrt(sq)


def _maximize_ratio(z: DenseTensor, start: list[np.ndarray], cfg: SolverConfig) -> list[np.ndarray]:
    n, d = z.dim, z.order

    def objective(params: np.ndarray) -> float:
        vectors = _unpack(params, n, d, z.field)
        if any(np.linalg.norm(v) == 0 for v in vectors):
            return 0.0
        return -sym_ratio(z, vectors)

    res = minimize(
        objective,
        _pack(start, z.field),
        method="L-BFGS-B",
        options={"maxiter": min(cfg.max_iter, 2000), "ftol": 1e-15, "gtol": 1e-12},
    )
    vectors = _unpack(res.x, n, d, z.field)
    if any(np.linalg.norm(v) == 0 for v in vectors):
        return start
    return [unit(v) for v in vectors]


def best_sym_rank1(z: DenseTensor, cfg: SolverConfig | None = None) -> SymRank1Certificate:
    """Best approximation of a symmetric z by lam * x_1 v ... v x_d."""
    cfg = _cfg(cfg)
    if not is_symmetric(z):
        raise ValueError("best_sym_rank1 needs a symmetric tensor")
    n, d = z.dim, z.order
    starts: list[list[np.ndarray]] = []
    if hs_norm(z) > 0:
        point, _ = injective_point(z, cfg)
        starts.append([unit(v) for v in point.vectors])
        if d > 1:
            starts.append([best_symmetric(z, cfg).vectors[0]] * d)
    else:
        starts.append([basis_vector(n, 0, z.field)] * d)

    def run(index: int, rng: np.random.Generator) -> tuple[float, list[np.ndarray]]:
        start = starts[index] if index < len(starts) else [random_unit_vector(n, z.field, rng) for _ in range(d)]
        candidates = [start]
        if d > 1 and hs_norm(z) > 0:
            candidates.append(_maximize_ratio(z, start, cfg))
        scored = [(sym_ratio(z, c), c) for c in candidates]
        _, best = best_of(scored, key=lambda s: s[0])
        return best

    count = len(starts) + max(1, cfg.restarts // 4)
    results = run_restarts(run, cfg.seed, count, cfg.workers, STREAM_SYM_RANK1)
    index, (ratio, xs) = best_of(results, key=lambda r: r[0])

    s = sym_decomposable(xs, z.field)
    hs_sq = hs_norm(s) ** 2
    lam = inner_product(z, s) / hs_sq
    residual = hs_norm(z - lam * s)
    log.info("best symmetric rank-1: ratio %.12g from start %d, residual %.3e", ratio, index, residual)
    return SymRank1Certificate(lam=lam, vectors=xs, ratio=ratio, residual_hs=residual)


# ── Non-uniqueness ──


def non_uniqueness_family(
    base: DenseTensor,
    vectors: list[np.ndarray],
    a: float,
    w: np.ndarray | None = None,
    tol: float = 1e-8,
) -> DenseTensor:
    """Tensor of L_a(y_1..y_d) = L(P y_1, .., P y_d) + a <y_1, w> ... <y_d, w>.

    P projects onto span(vectors) and w is a unit vector orthogonal to it. Each
    member is a norm-one symmetric form with the same values at `vectors`."""
    if not is_symmetric(base, tol):
        raise ValueError("base must be a symmetric tensor")
    n, d = base.dim, base.order
    if n < 3:
        raise ValueError(f"ambient dimension must be at least 3, got {n}")
    if abs(a) > 1:
        raise ValueError(f"|a| must be at most 1, got {a}")
    q = orth(np.stack([np.asarray(v, dtype=base.field.dtype) for v in vectors], axis=1), rcond=tol)
    if q.shape[1] > 2:
        raise ValueError(f"vectors span dimension {q.shape[1]}, at most 2 allowed")
    if w is None:
        complement = null_space(q.conj().T, rcond=tol)
        if complement.shape[1] == 0:
            raise ValueError("no unit vector orthogonal to the span")
        w = complement[:, 0]
    else:
        w = np.asarray(w, dtype=base.field.dtype)
        if abs(np.linalg.norm(w) - 1) > tol or np.max(np.abs(q.conj().T @ w)) > tol:
            raise ValueError("w must be a unit vector orthogonal to the span")

    return compress(base, q @ q.conj().T) + a * elementary([w] * d, base.field)
