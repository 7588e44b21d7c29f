"""A one-parameter family of norm-one symmetric forms sharing a best rank-1 point."""

import logging

import numpy as np

from symtens.config import SolverConfig
from symtens.core import Field, basis_vector, multilinear_eval, random_unit_vector
from symtens.demos import register
from symtens.demos.models import DemoResult
from symtens.rank1 import non_uniqueness_family
from symtens.recovery import explicit_form
from symtens.seeding import restart_generators

log = logging.getLogger(__name__)

STREAM_NONUNIQUENESS = 9


def _floats(raw, default: list[float]) -> list[float]:
    if raw is None:
        return default
    if isinstance(raw, str):
        return [float(x) for x in raw.split(",") if x.strip()]
    return [float(x) for x in raw]


def _max_diagonal(family, samples: np.ndarray) -> float:
    """max |P(y)| over the rows of `samples`."""
    t = np.tensordot(samples, family.array.conj(), axes=(1, 0))
    for _ in range(family.order - 1):
        t = np.einsum("mi,mi...->m...", samples, t)
    return float(np.max(np.abs(t)))


@register("nonuniqueness")
def nonuniqueness_sweep(params: dict, cfg: SolverConfig) -> DemoResult:
    n = int(params.get("n", 3))
    d = int(params.get("d", 3))
    j = int(params.get("j", 1))
    count = int(params.get("samples", 10_000))
    grid = _floats(params.get("a"), [-1.0, -0.5, 0.0, 0.5, 1.0])
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")

    v, w = basis_vector(n, 0), basis_vector(n, 1)
    base = explicit_form(v, w, j, d)
    point = [v] * j + [w] * (d - j)
    rng = restart_generators(cfg.seed, 1, STREAM_NONUNIQUENESS)[0]
    samples = np.stack([random_unit_vector(n, Field.REAL, rng) for _ in range(count)])

    rows: list[list] = []
    warnings: list[str] = []
    for a in grid:
        family = non_uniqueness_family(base, point, a)
        value = float(multilinear_eval(family, point))
        diag = _max_diagonal(family, samples)
        rows.append([a, value, diag])
        if diag > 1 + 1e-9:
            warnings.append(f"a={a}: sampled |P(y)| reached {diag:.12g}")

    values = [r[1] for r in rows]
    summary = {
        "n": n,
        "d": d,
        "j": j,
        "samples": count,
        "value_spread": max(values) - min(values),
        "max_diagonal": max(r[2] for r in rows),
    }
    return DemoResult(
        demo="nonuniqueness",
        summary=summary,
        columns=["a", "value_at_point", "max_sampled_diagonal"],
        rows=rows,
        warnings=warnings,
    )
