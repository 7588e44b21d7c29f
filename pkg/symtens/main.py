import argparse
import csv
import logging
import sys
import time
from pathlib import Path

from symtens.config import SolverConfig, settings
from symtens.core import hs_norm, is_symmetric
from symtens.demos import available, run_demo
from symtens.errors import ContractViolation, DegenerateRecovery
from symtens.forms import factor_binary_form, read_binary_form, sym_rank1_on_c2, tensor_from_form
from symtens.models import Report
from symtens.norms import (
    banach_check,
    hs_estimate,
    injective_norm,
    injective_sym,
    injective_upper,
    projective_lower,
    projective_upper,
)
from symtens.rank1 import best_rank1, best_sym_rank1, certify_rank1, rank1_structure_check
from symtens.recovery import recover_from_rank1
from symtens.tensor_io import encode_tensor, file_digest, read_tensor, read_vectors

log = logging.getLogger(__name__)


def _dump(model) -> dict:
    return model.model_dump(mode="json")


def _solver(args: argparse.Namespace) -> SolverConfig:
    update = {}
    if args.seed is not None:
        update["seed"] = args.seed
    if args.restarts is not None:
        update["restarts"] = args.restarts
    return settings.solver.model_copy(update=update)


def _tol(args: argparse.Namespace) -> float:
    return args.tol if args.tol is not None else settings.report.equality_tol


# ── Subcommands ──


def cmd_rank1(args: argparse.Namespace, cfg: SolverConfig) -> tuple[dict, dict]:
    z = read_tensor(args.input)
    inputs = {args.input: file_digest(args.input)}
    if args.point:
        _, vectors, _ = read_vectors(args.point)
        cert = certify_rank1(z, vectors, cfg)
        inputs[args.point] = file_digest(args.point)
    else:
        cert = best_rank1(z, cfg)
    results: dict = {"rank1": _dump(cert)}
    if z.is_cubical and is_symmetric(z):
        try:
            results["structure"] = rank1_structure_check(z, cert, tol=max(_tol(args), 1e-8)).value
        except ValueError as exc:
            log.warning("structure check skipped: %s", exc)
            results["structure"] = None
        results["sym_rank1"] = _dump(best_sym_rank1(z, cfg))
    return inputs, results


def cmd_recover(args: argparse.Namespace, cfg: SolverConfig) -> tuple[dict, dict]:
    _, vectors, form = read_vectors(args.input)
    inputs = {args.input: file_digest(args.input)}
    try:
        report = recover_from_rank1(vectors, form, tol=max(_tol(args), 1e-8))
    except DegenerateRecovery as exc:
        log.error("recover: %s", exc)
        return inputs, {"recovery": None, "degenerate": {"reason": str(exc), "tensor": encode_tensor(exc.tensor)}}
    if not args.trace:
        report = report.model_copy(update={"steps": []})
    return inputs, {"recovery": _dump(report)}


def cmd_norms(args: argparse.Namespace, cfg: SolverConfig) -> tuple[dict, dict]:
    z = read_tensor(args.input)
    results: dict = {}
    if args.norm == "hs":
        results["hs"] = _dump(hs_estimate(z))
    elif args.norm == "eps":
        results["eps_lower"] = _dump(injective_norm(z, cfg))
        results["eps_upper"] = _dump(injective_upper(z, cfg))
        if z.is_cubical and is_symmetric(z):
            results["eps_sym"] = _dump(injective_sym(z, cfg))
            results["banach"] = _dump(banach_check(z, cfg))
    else:
        results["pi_lower"] = _dump(projective_lower(z, cfg))
        results["pi_upper"] = _dump(projective_upper(z, cfg=cfg))
    return {args.input: file_digest(args.input)}, results


def cmd_factor(args: argparse.Namespace, cfg: SolverConfig) -> tuple[dict, dict]:
    form = read_binary_form(args.input)
    factorization = factor_binary_form(form, cfg)
    z = tensor_from_form(form)
    decomp = sym_rank1_on_c2(z, cfg, tol=max(_tol(args), 1e-8))
    results = {
        "factorization": _dump(factorization),
        "round_trip_hs": hs_norm(decomp.densify() - z),
    }
    return {args.input: file_digest(args.input)}, results


def _demo_params(raw: list[str]) -> dict:
    params = {}
    for item in raw:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"demo parameter must look like key=value, got {item!r}")
        params[key] = value
    return params


def _write_csv(path: str, columns: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def cmd_demo(args: argparse.Namespace, cfg: SolverConfig) -> tuple[dict, dict]:
    params = _demo_params(args.param)
    if args.norm and args.name == "improvement":
        params.setdefault("norm", {"eps": "injective", "pi": "projective"}.get(args.norm, args.norm))
    result = run_demo(args.name, params, cfg)
    if args.csv:
        _write_csv(args.csv, result.columns, result.rows)
        log.info("wrote %d rows to %s", len(result.rows), args.csv)
    return {}, {"demo": _dump(result)}


COMMANDS = {
    "rank1": cmd_rank1,
    "recover": cmd_recover,
    "norms": cmd_norms,
    "factor": cmd_factor,
    "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base seed for every randomized engine")
    common.add_argument("--tol", type=float, default=None, help="comparison tolerance")
    common.add_argument("--restarts", type=int, default=None, help="restarts per randomized engine")
    common.add_argument("--out", default=None, help="also write the report to this file")
    common.add_argument("--timing", action="store_true", help="include runtime_ms in the report")
    common.add_argument("--log-level", default=None, help="logging level (default from settings)")

    parser = argparse.ArgumentParser(prog="symtens", description="Symmetric tensor approximation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank1", parents=[common], help="best rank-1 approximation and certificates")
    p.add_argument("input", help="tensor JSON file")
    p.add_argument("--point", default=None, help="vector-list file with a point to certify instead of searching")

    p = sub.add_parser("recover", parents=[common], help="recover the explicit form from a rank-1 point")
    p.add_argument("input", help="vector-list JSON file, optionally carrying the form tensor")
    p.add_argument("--trace", action="store_true", help="include the rotation steps")

    p = sub.add_parser("norms", parents=[common], help="norm bounds and witnesses")
    p.add_argument("input", help="tensor JSON file")
    p.add_argument("--norm", choices=["hs", "eps", "pi"], default="hs")

    p = sub.add_parser("factor", parents=[common], help="factor a binary form into linear forms")
    p.add_argument("input", help="binary form text file")

    p = sub.add_parser("demo", parents=[common], help="run a packaged construction")
    p.add_argument("name", choices=available())
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--csv", default=None, help="write the series as CSV")
    p.add_argument("--norm", choices=["hs", "eps", "pi"], default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.report.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    cfg = _solver(args)
    start = time.perf_counter()
    try:
        inputs, results = COMMANDS[args.command](args, cfg)
    except ContractViolation as exc:
        log.error("contract violation: %s", exc)
        print(f"symtens: contract violation {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        log.error("%s failed: %s", args.command, exc)
        print(f"symtens: {exc}", file=sys.stderr)
        return 1

    runtime = None
    if args.timing or settings.report.include_runtime:
        runtime = int((time.perf_counter() - start) * 1000)
    report = Report(command=args.command, inputs=inputs, results=results, seed=cfg.seed, runtime_ms=runtime)
    text = report.model_dump_json(indent=settings.report.indent) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    if results.get("degenerate"):
        print(f"symtens: {results['degenerate']['reason']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
