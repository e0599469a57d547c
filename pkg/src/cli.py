#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Command line entry point."""

import argparse
import csv
import io
import logging
import sys
from typing import Callable, Dict, Optional, Sequence, Tuple

from attain import (
    SWEEP_COLUMNS,
    attainlemma_check,
    criterion_cor_attain,
    criterion_thm_attain,
    first_appearances,
    proposition_sweep,
)
from chains import count_separating, max_separated
from coeffs import descending_order
from constants import (
    BOUND_THEOREMS,
    CHECK_THEOREMS,
    DEFAULT_CHAIN_SAMPLES,
    DEFAULT_LOG_LEVEL,
    EXIT_BUDGET,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATED,
    LOG_LEVELS,
    LYM_THEOREMS,
    PROOF_BELOW_CUTOFF,
    PROOF_BUDGET_EXCEEDED,
    SCOPES,
    SEARCH_CONSTRAINTS,
    SEARCH_UNIVERSES,
    TOOL_NAME,
    TOOL_VERSION,
)
from extremal import (
    SearchProblem,
    construct_eg_pairs,
    construct_meshalkin,
    construct_middle_layers,
    construct_notr,
    max_family_search,
    verify_sharp_structure,
)
from hyp import (
    HypothesisVerdict,
    eg_condition,
    gst_condition,
    is_antichain,
    is_r_chain_free,
    meshalkin_condition,
    rfamily_condition,
    unifying_condition,
)
from lym import (
    LymReport,
    cardinality_bound_from_lym,
    lym_compositions_full,
    lym_compositions_partial,
    lym_pairs,
    lym_subsets,
    theorem_bound,
    theorem_lym_bound,
)
from model import (
    Family,
    ParameterError,
    SpernerError,
    load_family,
    serialize_family,
)
from utils import dict_to_report_output, render_table, report_to_json

logger = logging.getLogger(__name__)

CommandResult = Tuple[Dict, Dict, int]


def _require_subsets(family: Family, theorem: str) -> None:
    if family.is_compositions:
        raise ParameterError(f"Theorem {theorem} needs a subset family")


def _require_compositions(family: Family, theorem: str) -> None:
    if not family.is_compositions:
        raise ParameterError(f"Theorem {theorem} needs a composition family")


def _full_verdict(family: Family) -> Optional[HypothesisVerdict]:
    for j, item in enumerate(family.items, start=1):
        if not item.is_full(family.n):
            return HypothesisVerdict(False, {"kind": "not-full", "item": j})
    return None


def check_family(theorem: str, family: Family, r: int = 1) -> HypothesisVerdict:
    """Evaluate a theorem's hypothesis on a family."""
    if theorem in ("sperner", "erdos"):
        _require_subsets(family, theorem)
        if theorem == "sperner":
            return is_antichain(family.items)
        return is_r_chain_free(family.items, r)
    _require_compositions(family, theorem)
    if theorem == "meshalkin":
        return meshalkin_condition(family, require_full=True)
    if theorem == "gst":
        return gst_condition(family, size_cap=family.n)
    if theorem == "e-g":
        return eg_condition(family, r)
    if theorem == "unifying":
        return unifying_condition(family, r)
    if theorem == "m-g":
        return unifying_condition(family, 1)
    if theorem == "e-m":
        not_full = _full_verdict(family)
        if not_full is not None:
            return not_full
        return rfamily_condition(family, r, coordinates=range(1, family.p))
    if theorem == "rfamily":
        return rfamily_condition(family, r)
    raise ParameterError(f"Unknown theorem {theorem}")


def lym_family(theorem: str, family: Family, r: int = 1) -> LymReport:
    """Evaluate a theorem's LYM sum on a family."""
    p = family.p or 2
    bound = theorem_lym_bound(theorem, p, r)
    if theorem in ("sperner", "erdos"):
        _require_subsets(family, theorem)
        return lym_subsets(family, bound)
    _require_compositions(family, theorem)
    if theorem in ("meshalkin", "e-m"):
        return lym_compositions_full(family, bound)
    if theorem in ("gst", "e-g"):
        return lym_pairs(family, bound)
    return lym_compositions_partial(family, bound)


def cmd_bound(args: argparse.Namespace) -> CommandResult:
    parameters = {"n": args.n, "p": args.p, "r": args.r}
    if args.count is not None:
        parameters.update({"count": args.count, "scope": args.scope})
        bound = cardinality_bound_from_lym(args.n, args.p, args.count, args.scope)
        return parameters, {"bound": bound}, EXIT_OK
    if args.theorem is None:
        raise ParameterError("bound needs --theorem or --count")
    parameters["theorem"] = args.theorem
    return parameters, {"bound": theorem_bound(args.theorem, args.n, args.p, args.r)}, EXIT_OK


def cmd_check(args: argparse.Namespace) -> CommandResult:
    family = load_family(args.family)
    verdict = check_family(args.theorem, family, args.r)
    parameters = {"theorem": args.theorem, "family": args.family, "r": args.r}
    results = verdict.to_dict()
    results["m"] = family.m
    return parameters, results, EXIT_OK if verdict.holds else EXIT_VIOLATED


def cmd_lym(args: argparse.Namespace) -> CommandResult:
    family = load_family(args.family)
    report = lym_family(args.theorem, family, args.r)
    parameters = {"theorem": args.theorem, "family": args.family, "r": args.r}
    return parameters, report.to_dict(), EXIT_OK if report.satisfied else EXIT_VIOLATED


def cmd_search(args: argparse.Namespace) -> CommandResult:
    problem = SearchProblem(
        n=args.n,
        universe=args.universe,
        constraint=args.constraint,
        r=args.r,
        p=args.p,
        cap=args.cap,
        symmetry=args.symmetry,
        budget_ms=args.budget_ms,
        lym_pruning=not args.no_lym_pruning,
        cutoff=args.at_least,
        seed=args.seed if args.seed is not None else 0,
    )
    result = max_family_search(problem)
    parameters = {
        "n": args.n,
        "p": args.p,
        "r": args.r,
        "universe": args.universe,
        "constraint": args.constraint,
        "cap": args.cap,
        "symmetry": args.symmetry,
        "at_least": args.at_least,
        "budget_ms": args.budget_ms,
    }
    results = {
        "optimum": result.optimum,
        "lower_bound": result.lower_bound,
        "upper_bound": result.upper_bound,
        "proof": result.proof,
        "nodes": result.nodes,
        "witness": serialize_family(result.witness),
    }
    if result.proof == PROOF_BUDGET_EXCEEDED:
        code = EXIT_BUDGET
    elif result.proof == PROOF_BELOW_CUTOFF:
        code = EXIT_VIOLATED
    else:
        code = EXIT_OK
    return parameters, results, code


CONSTRUCTIONS: Dict[str, Callable[[argparse.Namespace], Family]] = {
    "middle-layers": lambda a: construct_middle_layers(a.n, a.r),
    "meshalkin": lambda a: construct_meshalkin(a.n, a.p),
    "eg-pairs": lambda a: construct_eg_pairs(a.n, a.r),
    "notr": lambda a: construct_notr(a.n, a.p, a.r),
}

CONSTRUCTION_THEOREMS = {
    "middle-layers": "erdos",
    "meshalkin": "meshalkin",
    "eg-pairs": "e-g",
    "notr": "rfamily",
}


def cmd_construct(args: argparse.Namespace) -> CommandResult:
    family = CONSTRUCTIONS[args.kind](args)
    theorem = CONSTRUCTION_THEOREMS[args.kind]
    verdict = check_family(theorem, family, args.r)
    parameters = {"kind": args.kind, "n": args.n, "p": args.p, "r": args.r}
    results = {
        "m": family.m,
        "theorem": theorem,
        "verdict": verdict.to_dict(),
        "family": serialize_family(family),
    }
    if args.kind == "meshalkin":
        results["sharp_structure"] = verify_sharp_structure(family, 1).to_dict()
    return parameters, results, EXIT_OK if verdict.holds else EXIT_VIOLATED


def _parse_shape(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ParameterError(f"Invalid shape {text}") from e


def cmd_separate(args: argparse.Namespace) -> CommandResult:
    if args.action == "count":
        if args.shape is None:
            raise ParameterError("separate count needs --shape")
        shape = _parse_shape(args.shape)
        parameters = {"action": "count", "n": args.n, "shape": list(shape)}
        return parameters, {"count": count_separating(args.n, shape)}, EXIT_OK

    if args.family is None:
        raise ParameterError("separate max needs --family")
    family = load_family(args.family)
    seed = args.seed if args.seed is not None else 0
    if args.mode == "sampled" and args.seed is None:
        raise ParameterError("Sampled mode needs an explicit --seed")
    result = max_separated(family, args.mode, args.samples, seed)
    parameters = {"action": "max", "family": args.family, "mode": args.mode, "r": args.r}
    results = result.to_dict()
    code = EXIT_OK
    if args.r is not None:
        cap = args.r ** (family.p - 1) if family.all_full() else args.r**family.p
        results["cap"] = cap
        code = EXIT_OK if result.maximum <= cap else EXIT_VIOLATED
    return parameters, results, code


def _sweep_csv(args: argparse.Namespace) -> str:
    rows = proposition_sweep(
        range(args.p_min, args.p_max + 1), range(args.n_min, args.n_max + 1)
    )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(row.to_csv_row())
    return buffer.getvalue()


def cmd_attain(args: argparse.Namespace) -> CommandResult:
    n, p, r = args.n, args.p, args.r
    table = first_appearances(n, p)
    order = descending_order(n, p)
    thm = criterion_thm_attain(n, p, r)
    cor = criterion_cor_attain(n, p, r)
    results = {
        "first_appearances": table.to_dict(),
        "m_rank_plus_one": order.value_at(r ** (p - 1) + 1),
        "criterion_thm": thm,
        "criterion_cor": cor,
        "bound": theorem_bound("e-m", n, p, r),
        "status": "unattainable" if thm else "undecided",
    }
    try:
        check = attainlemma_check(n, p, r)
        results["lemma"] = {
            "sizes": list(check.sizes),
            "count": check.count,
            "total": check.total,
            "largest_sum": check.largest_sum,
            "ok": check.ok,
        }
    except ParameterError as e:
        logger.info(f"Skipping lemma check: {e}")
    # exit 1 when attainment is ruled out
    return {"n": n, "p": p, "r": r}, results, EXIT_VIOLATED if thm else EXIT_OK


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be at least 1")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{value} must not be negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser for every command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json"], default="table")
    common.add_argument("--log-level", choices=LOG_LEVELS, default=DEFAULT_LOG_LEVEL)
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog=TOOL_NAME, description="Exact checks of Sperner-type theorems."
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    bound = commands.add_parser("bound", parents=[common], help="largest family a theorem allows")
    bound.add_argument("--theorem", choices=BOUND_THEOREMS)
    bound.add_argument("--n", type=_non_negative, required=True)
    bound.add_argument("--p", type=_positive, default=2)
    bound.add_argument("--r", type=_positive, default=1)
    bound.add_argument("--count", type=_positive, help="sum this many largest coefficients")
    bound.add_argument("--scope", choices=SCOPES, default=SCOPES[0])
    bound.set_defaults(handler=cmd_bound)

    check = commands.add_parser("check", parents=[common], help="check a theorem's hypothesis")
    check.add_argument("--theorem", choices=CHECK_THEOREMS, required=True)
    check.add_argument("--family", required=True)
    check.add_argument("--r", type=_positive, default=1)
    check.set_defaults(handler=cmd_check)

    lym = commands.add_parser("lym", parents=[common], help="exact LYM sum of a family")
    lym.add_argument("--theorem", choices=LYM_THEOREMS, required=True)
    lym.add_argument("--family", required=True)
    lym.add_argument("--r", type=_positive, default=1)
    lym.set_defaults(handler=cmd_lym)

    search = commands.add_parser("search", parents=[common], help="exact maximum family search")
    search.add_argument("--universe", choices=SEARCH_UNIVERSES, default="subsets")
    search.add_argument("--constraint", choices=SEARCH_CONSTRAINTS, default="antichain")
    search.add_argument("--n", type=_non_negative, required=True)
    search.add_argument("--p", type=_positive, default=2)
    search.add_argument("--r", type=_positive, default=1)
    search.add_argument("--cap", type=_non_negative)
    search.add_argument("--symmetry", action="store_true")
    search.add_argument("--budget-ms", type=_positive)
    search.add_argument("--at-least", type=_non_negative)
    search.add_argument("--no-lym-pruning", action="store_true")
    search.set_defaults(handler=cmd_search)

    construct = commands.add_parser("construct", parents=[common], help="extremal constructions")
    construct.add_argument("--kind", choices=sorted(CONSTRUCTIONS), required=True)
    construct.add_argument("--n", type=_non_negative, required=True)
    construct.add_argument("--p", type=_positive, default=2)
    construct.add_argument("--r", type=_positive, default=1)
    construct.set_defaults(handler=cmd_construct)

    separate = commands.add_parser("separate", parents=[common], help="maximal chain separation")
    separate.add_argument("action", choices=["count", "max"])
    separate.add_argument("--n", type=_non_negative, default=0)
    separate.add_argument("--shape")
    separate.add_argument("--family")
    separate.add_argument("--mode", choices=["all", "sampled"], default="all")
    separate.add_argument("--samples", type=_positive, default=DEFAULT_CHAIN_SAMPLES)
    separate.add_argument("--r", type=_positive)
    separate.set_defaults(handler=cmd_separate)

    attain = commands.add_parser("attain", parents=[common], help="non-attainment criteria")
    attain.add_argument("--n", type=_non_negative, default=4)
    attain.add_argument("--p", type=_positive, default=3)
    attain.add_argument("--r", type=_positive, default=2)
    attain.add_argument("--sweep", action="store_true", help="emit the sweep as CSV")
    attain.add_argument("--p-min", type=_positive, default=3)
    attain.add_argument("--p-max", type=_positive, default=6)
    attain.add_argument("--n-min", type=_non_negative, default=3)
    attain.add_argument("--n-max", type=_non_negative, default=20)
    attain.set_defaults(handler=cmd_attain)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run a command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )

    try:
        if args.command == "attain" and args.sweep:
            sys.stdout.write(_sweep_csv(args))
            return EXIT_OK
        parameters, results, code = args.handler(args)
    except FileNotFoundError as e:
        logger.error(f"Family file not found: {e.filename}")
        return EXIT_USAGE
    except SpernerError as e:
        logger.error(str(e))
        return EXIT_USAGE

    provenance = {"tool": TOOL_NAME, "version": TOOL_VERSION}
    if args.seed is not None:
        provenance["seed"] = args.seed
    report = dict_to_report_output(
        {
            "command": args.command,
            "parameters": parameters,
            "results": results,
            "provenance": provenance,
        }
    )
    if args.format == "json":
        sys.stdout.write(report_to_json(report) + "\n")
    else:
        sys.stdout.write(render_table(report))
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
