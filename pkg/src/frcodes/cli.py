"""Command line front end.

Exit codes: 0 success, 1 simulation scenario failed, 2 bad input or unmet
precondition, 3 search budget exceeded, 4 property violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, compose
from .catalog import catalog_load, catalog_names, catalog_text
from .core import (FRCode, bipartite_export, find_repair_table, repair_parameters, resilience, transpose,
                   validate)
from .designs import is_steiner
from .errors import BudgetExceeded, NotAnFRCode, PropertyViolation
from .families import FAMILIES, construct
from .sim import run_scenario

EXIT_OK, EXIT_SIM_FAIL, EXIT_INPUT, EXIT_BUDGET, EXIT_PROPERTY = 0, 1, 2, 3, 4


def dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_code(ref: str) -> FRCode:
    """A JSON file path, or ``catalog:NAME``."""
    if ref.startswith("catalog:"):
        return catalog_load(ref.split(":", 1)[1])
    with open(ref, encoding="utf-8") as fh:
        return FRCode.from_dict(json.load(fh))


def parse_ks(text: str, n: int) -> list:
    ks = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            ks.extend(range(int(a), int(b) + 1))
        elif part == "all":
            ks.extend(range(1, n + 1))
        else:
            ks.append(int(part))
    return sorted(set(ks))


def params_line(code: FRCode) -> str:
    p = validate(code)
    rep = code.meta.get("repair") or {}
    return (f"n={p.n} theta={p.theta} alpha={p.alpha} rho={p.rho} "
            f"d={rep.get('d', '-')} beta={rep.get('beta', '-')}")


def write_code(code: FRCode, out) -> None:
    text = code.to_json() + "\n"
    if out:
        emit(text, out)
        print(params_line(code))
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------


def cmd_construct(args) -> int:
    params = {k: getattr(args, k) for k in ("a", "q", "m", "r", "t", "theta", "graph", "name")
              if getattr(args, k) is not None}
    write_code(construct(args.family, **params), args.out)
    return EXIT_OK


def cmd_compose(args) -> int:
    if args.op == "kronecker":
        if len(args.inputs) != 2:
            raise ValueError("kronecker needs exactly two input codes")
        code, _ = compose.kronecker(read_code(args.inputs[0]), read_code(args.inputs[1]))
    else:
        if len(args.inputs) != 1:
            raise ValueError(f"{args.op} takes exactly one input code")
        src = read_code(args.inputs[0])
        if args.op == "expand":
            code = compose.beta_expand(src, args.m)
        elif args.op == "union":
            code = compose.disjoint_union(src, args.l)
        elif args.op == "select-classes":
            if not args.classes:
                raise ValueError("select-classes needs --classes")
            code = compose.select_classes(src, [int(x) for x in args.classes.split(",")])
        else:
            code = transpose(src)
    write_code(code, args.out)
    return EXIT_OK


def analyze_report(code: FRCode, ks=None, M=None, budget=analysis.DEFAULT_BUDGET, oracle=False,
                   seed=0, resilience_budget=20000) -> dict:
    p = validate(code)
    rep = code.meta.get("repair")
    if rep and rep.get("d") and rep.get("beta"):
        d, beta = rep["d"], rep["beta"]
        find_repair_table(code, d, beta).verify(code)  # a claimed table must exist
    else:
        try:
            d, beta = repair_parameters(code)
        except NotAnFRCode:
            d = beta = None
    report = {"params": (p.with_repair(d, beta) if d else p).to_dict()}
    ks = ks or []
    entries = [analysis.file_size(code, k, budget) for k in ks]
    report["profile"] = [e.to_dict() for e in entries]
    if oracle:
        diffs = []
        for e in entries:
            bm, _ = analysis.file_size_bruteforce(code, e.k)
            if bm != e.M:
                diffs.append({"k": e.k, "fast": e.M, "oracle": bm})
        report["oracle"] = {"checked": [e.k for e in entries], "mismatches": diffs}
        if diffs:
            raise PropertyViolation(f"fast path disagrees with brute force: {diffs}")
    if M is None and len(entries) == 1:
        M = entries[0].M
    if M is not None:
        local = analysis.local_structure(code)
        dmin = analysis.dmin_exact(code, M, budget)
        k_rec = analysis.reconstruction_degree(code, M, budget) if M <= code.theta else None
        b = analysis.bounds(p.n, p.alpha, M, d, local, dmin, k_rec)
        report["bounds"] = dict(b.to_dict(), M=M, k=k_rec)
        report["verdicts"] = b.verdicts
        if local is not None:
            ok, slack = analysis.check_union_condition(local)
            report["local"] = dict(local.to_dict(), union_condition_ok=ok, union_condition_slack=slack)
    if is_steiner(code):
        ca = analysis.find_cap_and_arc(code)
        report["arcs"] = {"cap": list(ca.cap), "cap_size": len(ca.cap),
                          "arc": list(ca.arc) if ca.arc else None}
    if d:
        report["resilience"] = resilience(code, d, beta, "both", resilience_budget, seed).to_dict()
    return report


def cmd_analyze(args) -> int:
    code = read_code(args.code)
    ks = parse_ks(args.k, code.n) if args.k else []
    report = analyze_report(code, ks, args.M, args.budget, args.oracle, args.seed, args.resilience_budget)
    emit(dump(report), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    with open(args.scenario, encoding="utf-8") as fh:
        scenario = json.load(fh)
    scenario.setdefault("seed", args.seed)
    metrics = run_scenario(scenario, os.path.dirname(os.path.abspath(args.scenario)))
    emit(dump(metrics), args.out)
    return EXIT_OK if metrics["success"] else EXIT_SIM_FAIL


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in catalog_names():
            code = catalog_load(name)
            print(f"{name:12s} {params_line(code)}  {code.meta.get('title') or ''}".rstrip())
        return EXIT_OK
    if not args.name:
        raise ValueError("catalog show needs a NAME")
    if args.json:
        sys.stdout.write(catalog_load(args.name).to_json() + "\n")
    else:
        sys.stdout.write(catalog_text(args.name))
    return EXIT_OK


def cmd_export(args) -> int:
    code = read_code(args.code)
    name = os.path.splitext(os.path.basename(args.code))[0].replace("-", "_").replace(":", "_") or "fr"
    emit(bipartite_export(code, name), args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frcodes", description="Fractional repetition code toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a code from a named family")
    c.add_argument("--family", required=True, choices=FAMILIES)
    for flag in ("a", "q", "m", "r", "t", "theta"):
        c.add_argument(f"--{flag}", type=int)
    c.add_argument("--graph", help="petersen, K5, K3,3, pg2-q")
    c.add_argument("--name", help="catalog entry")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("compose", help="combine or transform codes")
    c.add_argument("op", choices=("kronecker", "expand", "union", "select-classes", "transpose"))
    c.add_argument("inputs", nargs="+", help="code JSON files or catalog:NAME")
    c.add_argument("--m", type=int, default=2, help="expansion factor")
    c.add_argument("--l", type=int, default=2, help="number of copies for union")
    c.add_argument("--classes", help="comma separated class indices")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compose)

    c = sub.add_parser("analyze", help="file sizes, bounds, arcs and resilience")
    c.add_argument("code")
    c.add_argument("--k", help="e.g. 3, 1-5, 2,4 or all")
    c.add_argument("--M", type=int, help="file size for distance bounds")
    c.add_argument("--budget", type=int, default=analysis.DEFAULT_BUDGET)
    c.add_argument("--resilience-budget", type=int, default=20000)
    c.add_argument("--oracle", action="store_true", help="cross-check file sizes by brute force")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_analyze)

    c = sub.add_parser("simulate", help="run a storage scenario")
    c.add_argument("scenario")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("catalog", help="embedded design tables")
    c.add_argument("action", choices=("list", "show"))
    c.add_argument("name", nargs="?")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_catalog)

    c = sub.add_parser("export", help="export a code for external tools")
    c.add_argument("format", choices=("dot",))
    c.add_argument("code")
    c.add_argument("--out")
    c.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PropertyViolation, NotAnFRCode) as exc:
        print(f"error: property violation: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
