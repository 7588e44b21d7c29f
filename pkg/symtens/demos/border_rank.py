"""Border-rank sweep: y_n -> y with rank_sigma(y_n) <= 2 while y needs 3 terms."""

import logging

from symtens.config import SolverConfig
from symtens.demos import register
from symtens.demos.models import DemoResult
from symtens.symrank import border_gap, border_rank_instance, y_rank_lower_bound_check

log = logging.getLogger(__name__)


@register("border-rank")
def border_rank_sweep(params: dict, cfg: SolverConfig) -> DemoResult:
    n_max = int(params.get("n_max", 100))
    fit = str(params.get("fit", "false")).lower() in ("1", "true", "yes")
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")

    rows: list[list] = []
    warnings: list[str] = []
    for n in range(1, n_max + 1):
        gap = border_rank_instance(n).gap_hs
        closed = border_gap(n)
        rows.append([n, gap, closed, abs(gap - closed)])

    gaps = [r[1] for r in rows]
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    if not monotone:
        warnings.append("gap_hs is not strictly decreasing")
    summary = {
        "n_max": n_max,
        "max_abs_error": max(r[3] for r in rows),
        "monotone": monotone,
        "last_gap": gaps[-1],
    }
    if n_max >= 20:
        summary["ratio_10_20"] = gaps[9] / gaps[19]

    report = y_rank_lower_bound_check(cfg=cfg, fit=fit)
    summary["image_rank"] = report.image_rank
    summary["image_rank_exact"] = report.image_rank_exact
    if report.als_residual is not None:
        summary["two_term_residual"] = report.als_residual
        if report.als_residual <= 1e-3:
            warnings.append(f"2-term fit reached residual {report.als_residual:.3e}")

    return DemoResult(
        demo="border-rank",
        summary=summary,
        columns=["n", "gap_hs", "closed_form", "abs_error"],
        rows=rows,
        warnings=warnings,
    )
