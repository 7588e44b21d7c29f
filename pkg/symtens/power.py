"""Power-iteration engines behind the injective norm and best rank-1 searches.

Three engines share this module:

* multilinear power iteration (alternating unit-vector maximization per slot) for
  max |<z, x_1 (x) ... (x) x_d>|;
* shifted symmetric power iteration for max |P_z(y)| on the unit sphere;
* the sphere-grid oracle: low-discrepancy grids on all but the last two slots, an
  exact SVD on the remaining matrix, and power-iteration refinement of the best
  grid cells.
"""

import logging
import math
import string
from dataclasses import dataclass

import numpy as np
from scipy.linalg import svd
from scipy.stats import norm as normal_dist
from scipy.stats import qmc

from symtens.config import SolverConfig
from symtens.core import DenseTensor, Field, Scalar, flattening, to_scalar, unit
from symtens.seeding import best_of, run_restarts

log = logging.getLogger(__name__)

STREAM_MULTILINEAR = 1
STREAM_SYMMETRIC = 2
STREAM_ORACLE = 3

_ORACLE_REFINE = 8


@dataclass
class PowerResult:
    value: float  # |lam|
    lam: Scalar
    vectors: list[np.ndarray]
    iterations: int
    restart: int
    converged: bool


def _slot_gradient(z_arr: np.ndarray, conj_xs: list[np.ndarray], k: int) -> np.ndarray:
    """G_k with <z, x_1 (x) ... (x) x_d> = <G_k, x_k>: z contracted with conj(x_j), j != k."""
    t = z_arr
    for j in reversed(range(len(conj_xs))):
        if j != k:
            t = np.tensordot(t, conj_xs[j], axes=([j], [0]))
    return t


def elementary_value(z: DenseTensor, vectors: list[np.ndarray]) -> Scalar:
    """<z, x_1 (x) ... (x) x_d>."""
    t = z.array
    for j in reversed(range(z.order)):
        t = np.tensordot(t, np.conj(vectors[j]), axes=([j], [0]))
    return to_scalar(t, z.field)


def hosvd_start(z: DenseTensor) -> list[np.ndarray]:
    """Leading left singular vector of every mode flattening."""
    starts = []
    for k in range(z.order):
        u, _, _ = svd(flattening(z, [k]), full_matrices=False)
        starts.append(u[:, 0].astype(z.field.dtype))
    return starts


def random_start(z: DenseTensor, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for n in z.shape:
        v = rng.standard_normal(n)
        if z.field is Field.COMPLEX:
            v = v + 1j * rng.standard_normal(n)
        out.append(unit(v))
    return out


def multilinear_power_iteration(
    z: DenseTensor,
    start: list[np.ndarray],
    tol: float,
    max_iter: int,
    restart: int = 0,
) -> PowerResult:
    xs = [unit(np.asarray(v, dtype=z.field.dtype)) for v in start]
    arr = z.array
    d = z.order
    if d == 1:
        x = unit(arr) if np.any(arr) else xs[0]
        lam = elementary_value(z, [x])
        return PowerResult(abs(lam), lam, [x], 0, restart, True)

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        step = 0.0
        for k in range(d):
            g = _slot_gradient(arr, [np.conj(x) for x in xs], k)
            gnorm = np.linalg.norm(g)
            if gnorm == 0:
                continue
            new = g / gnorm
            step = max(step, float(np.linalg.norm(new - xs[k])))
            xs[k] = new
        if step <= tol:
            converged = True
            break

    lam = elementary_value(z, xs)
    return PowerResult(abs(lam), lam, xs, it, restart, converged)


def best_multilinear(z: DenseTensor, cfg: SolverConfig) -> PowerResult:
    """Best point over cfg.restarts runs; restart 0 starts from the HOSVD vectors."""

    def run(index: int, rng: np.random.Generator) -> PowerResult:
        start = hosvd_start(z) if index == 0 else random_start(z, rng)
        return multilinear_power_iteration(z, start, cfg.tol, cfg.max_iter, restart=index)

    results = run_restarts(run, cfg.seed, max(cfg.restarts, 1), cfg.workers, STREAM_MULTILINEAR)
    index, best = best_of(results, key=lambda r: r.value)
    stalled = sum(not r.converged for r in results)
    if stalled:
        log.debug("%d of %d restarts hit max_iter=%d", stalled, len(results), cfg.max_iter)
    log.debug("multilinear power iteration: best |lam|=%.12g from restart %d", best.value, index)
    return best


# ── Symmetric power iteration ──


def _diagonal_gradient(conj_z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """g with P_z(y) = y^T g: conj(z) contracted with y in all slots but the first."""
    t = conj_z
    for j in reversed(range(1, conj_z.ndim)):
        t = np.tensordot(t, y, axes=([j], [0]))
    return t


def symmetric_power_iteration(
    z: DenseTensor,
    start: np.ndarray,
    tol: float,
    max_iter: int,
    restart: int = 0,
) -> PowerResult:
    """Shifted iteration y <- normalize(phase(P) * conj(g) + alpha * y) for max |P_z(y)|."""
    conj_z = z.array.conj()
    d = z.order
    y = unit(np.asarray(start, dtype=z.field.dtype))
    alpha = max(d - 1, 1) * float(np.linalg.norm(z.array))
    if alpha == 0:
        return PowerResult(0.0, to_scalar(0.0, z.field), [y] * d, 0, restart, True)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        g = _diagonal_gradient(conj_z, y)
        p = complex(y @ g)
        phase = p / abs(p) if abs(p) > 0 else 1.0
        direction = phase * np.conj(g) + alpha * y
        if z.field is Field.REAL:
            direction = direction.real
        new = unit(direction)
        step = float(np.linalg.norm(new - y))
        y = new
        if step <= tol:
            converged = True
            break
    lam = to_scalar(y @ _diagonal_gradient(conj_z, y), z.field)
    return PowerResult(abs(lam), lam, [y] * d, it, restart, converged)


def best_symmetric(z: DenseTensor, cfg: SolverConfig) -> PowerResult:
    n = z.shape[0]

    def run(index: int, rng: np.random.Generator) -> PowerResult:
        if index == 0:
            start = hosvd_start(z)[0]
        else:
            start = rng.standard_normal(n)
            if z.field is Field.COMPLEX:
                start = start + 1j * rng.standard_normal(n)
        return symmetric_power_iteration(z, start, cfg.tol, cfg.max_iter, restart=index)

    results = run_restarts(run, cfg.seed, max(cfg.restarts, 1), cfg.workers, STREAM_SYMMETRIC)
    index, best = best_of(results, key=lambda r: r.value)
    log.debug("symmetric power iteration: best |P|=%.12g from restart %d", best.value, index)
    return best


# ── Sphere-grid oracle ──


def sphere_grid(n: int, count: int, field: Field, rng: np.random.Generator) -> np.ndarray:
    """`count` points of the unit sphere of K^n (rows), from a scrambled Sobol sequence."""
    if n == 1:
        return np.ones((1, 1), dtype=field.dtype)
    real_dim = n if field is Field.REAL else 2 * n
    sampler = qmc.Sobol(d=real_dim, scramble=True, seed=rng)
    u = sampler.random_base2(max(1, math.ceil(math.log2(max(count, 2)))))[:count]
    g = normal_dist.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    if field is Field.COMPLEX:
        g = g[:, :n] + 1j * g[:, n:]
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _matrix_optimum(z: DenseTensor) -> PowerResult:
    """Exact best rank-1 point of an order-2 tensor."""
    u, s, vh = svd(z.array)
    vectors = [u[:, 0].astype(z.field.dtype), vh[0, :].astype(z.field.dtype)]
    lam = elementary_value(z, vectors)
    return PowerResult(float(s[0]), lam, vectors, 0, 0, True)


def sphere_oracle(z: DenseTensor, cfg: SolverConfig) -> PowerResult:
    """Global search for max |<z, (x)x_k>|; exact for d <= 2."""
    d = z.order
    if d == 1:
        x = unit(z.array)
        lam = elementary_value(z, [x])
        return PowerResult(abs(lam), lam, [x], 0, 0, True)
    if d == 2:
        return _matrix_optimum(z)

    grid_slots = d - 2
    per_slot = max(2, int(cfg.oracle_budget ** (1.0 / grid_slots)))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, STREAM_ORACLE]))
    grids = [sphere_grid(z.shape[k], per_slot, z.field, rng) for k in range(grid_slots)]

    # batch of matrices: z contracted with conj(grid point) on every gridded slot
    letters = string.ascii_lowercase
    tensor_idx = letters[8 : 8 + d]
    batch_idx = letters[:grid_slots]
    operands = ",".join(b + t for b, t in zip(batch_idx, tensor_idx))
    expr = f"{operands},{tensor_idx}->{batch_idx}{tensor_idx[grid_slots:]}"
    batch = np.einsum(expr, *[g.conj() for g in grids], z.array)
    shape = batch.shape
    mats = batch.reshape(-1, z.shape[-2], z.shape[-1])
    values = np.linalg.svd(mats, compute_uv=False)[:, 0]

    top = np.argsort(values)[::-1][:_ORACLE_REFINE]
    refined = []
    for rank_pos, flat in enumerate(top):
        cell = np.unravel_index(flat, shape[:grid_slots])
        head = [grids[k][cell[k]] for k in range(grid_slots)]
        u, _, vh = svd(mats[flat])
        start = head + [u[:, 0], vh[0, :]]
        refined.append(multilinear_power_iteration(z, start, cfg.tol, cfg.max_iter, restart=rank_pos))
    _, best = best_of(refined, key=lambda r: r.value)
    log.debug(
        "oracle: %d grid cells, best cell %.12g, refined %.12g",
        mats.shape[0],
        float(values[top[0]]),
        best.value,
    )
    return best
