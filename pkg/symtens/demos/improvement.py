"""Symmetrizing an approximation of a symmetric tensor never hurts."""

import logging

from symtens.config import SolverConfig
from symtens.core import Field, hs_norm, random_symmetric, random_tensor, symmetrize
from symtens.demos import register
from symtens.demos.models import DemoResult
from symtens.seeding import run_restarts
from symtens.symrank import symmetrize_approximation

log = logging.getLogger(__name__)

STREAM_IMPROVEMENT = 10


@register("improvement")
def improvement_sweep(params: dict, cfg: SolverConfig) -> DemoResult:
    pairs = int(params.get("pairs", 200))
    n = int(params.get("n", 3))
    d = int(params.get("d", 3))
    field = Field(params.get("field", "real"))
    norm = params.get("norm", "hs")
    if pairs < 1:
        raise ValueError(f"pairs must be at least 1, got {pairs}")

    def run(index: int, rng) -> list:
        z = random_symmetric(n, d, field, rng)
        y = random_tensor((n,) * d, field, rng)
        res = symmetrize_approximation(z, y, norm, cfg)
        return [index, res.before, res.after, res.improvement, hs_norm(y - symmetrize(y))]

    rows = run_restarts(run, cfg.seed, pairs, cfg.workers, STREAM_IMPROVEMENT)
    strict = sum(1 for r in rows if r[3] > 0 and r[4] > 1e-8)
    asymmetric = sum(1 for r in rows if r[4] > 1e-8)
    summary = {
        "norm": norm,
        "pairs": pairs,
        "min_improvement": min(r[3] for r in rows),
        "strict": strict,
        "asymmetric": asymmetric,
    }
    warnings = []
    if norm == "hs" and strict < asymmetric:
        warnings.append(f"only {strict} of {asymmetric} non-symmetric y improved strictly")
    return DemoResult(
        demo="improvement",
        summary=summary,
        columns=["pair", "before", "after", "improvement", "asymmetry_hs"],
        rows=rows,
        warnings=warnings,
    )
