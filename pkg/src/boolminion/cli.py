"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 budget exceeded, 4 failed verification.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import canon, mincore, system
from .boolfun import bits_to_hex
from .classify import classify_relations
from .descriptions import Description, ReducedDescription, to_reduced
from .errors import BudgetExceeded, ContractViolation, InputError, VerificationError
from .multisorted import TRIVIAL, structure_from_json, structure_to_json
from .translate import FiniteStructure, classify_finite, translate_small_projections, finite_core

EXIT_INPUT, EXIT_BUDGET, EXIT_VERIFY = 2, 3, 4


def load_input(arg: str | None):
    """Parse --input: a file path, '-' for stdin, inline JSON, or a bare core name."""
    if arg is None or arg == "-":
        text = sys.stdin.read()
    elif os.path.exists(arg):
        with open(arg) as fh:
            text = fh.read()
    else:
        text = arg
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        s = text.strip()
        if s and all(ch.isalnum() or ch == "_" for ch in s):
            return s
        raise InputError("input is neither JSON nor a core name")


def _minion_system(ref):
    """A constraint system for a minion reference: core name, I<k>, or description JSON."""
    if isinstance(ref, str):
        if ref.startswith("I") and ref[1:].isdigit():
            return system.ConstraintSystem(int(ref[1:]), ()), ref
        core = canon.CoreId.parse(ref)
        if core.tag == "T":
            return None, "T"
        return canon.canonical_system(core), str(core)
    if isinstance(ref, dict) and "f" in ref:
        rd = ReducedDescription.from_json(ref)
        return rd.system(), rd.show()
    if isinstance(ref, dict) and "k" in ref:
        d = Description.from_json(ref)
        return d.system(), d.show()
    raise InputError("expected a core name, I<k>, or a description object")


def _truncated(ref, cap: int, budget):
    cs, name = _minion_system(ref)
    if cs is None:
        return mincore.OnePointMinion(cap, name)
    return mincore.from_system(cs, cap, name=name, budget=budget)


def cmd_classify(data, args):
    if isinstance(data, dict) and "domain" in data:
        return classify_finite(FiniteStructure.from_json(data), budget=args.budget_ops,
                               cap=args.arity_cap).to_json()
    if isinstance(data, dict) and "sorts" in data:
        sig, rels = structure_from_json(data)
        return classify_relations(rels, sig, idempotent=bool(data.get("idempotent", False)),
                                  budget=args.budget_ops, cap=args.arity_cap).to_json()
    raise InputError("classify expects {sorts, relations} or {domain, relations}")


def cmd_translate(data, args):
    if not (isinstance(data, dict) and "domain" in data):
        raise InputError("translate expects {domain, relations}")
    structure = FiniteStructure.from_json(data)
    core = finite_core(structure, budget=args.budget_ops or 10 ** 6)
    out = {"input": structure.to_json()}
    if core == TRIVIAL:
        out.update({"trivial": True, "sorts": [], "relations": [], "sortDictionary": []})
        return out
    tr = translate_small_projections([frozenset(r.tuples) for r in core.relations])
    out.update({"trivial": False, "core_domain": list(core.signature.sorts[0])})
    out.update(structure_to_json(tr.signature, tr.relations))
    out["sortDictionary"] = tr.sort_dictionary()
    return out


def cmd_reduce(data, args):
    d = Description.from_json(data)
    red = to_reduced(d)
    names = red.reduced.names()
    return {"description": d.to_json(), "description_text": d.show(),
            "reduced": red.reduced.to_json(), "reduced_text": red.reduced.show(),
            "symbol_map": [lit.name(names) for lit in red.symbol_map],
            "formula": {"vars": red.formula.n_vars, "clauses": [list(c) for c in red.formula.clauses]}}


def cmd_enumerate(data, args):
    ref = data.get("minion") if isinstance(data, dict) and "minion" in data else data
    cs, name = _minion_system(ref)
    n = args.arity
    if cs is None:
        return {"minion": name, "arity": n, "count": 1, "elements": [[]]}
    if not 1 <= n <= 5:
        raise InputError("arity must lie in 1..5")
    rows = system.enumerate_all(cs, n, symmetric=(n == 5 and args.arity_cap < 5),
                                budget=args.budget_ops, cap=args.arity_cap)
    return {"minion": name, "arity": n, "symmetric_only": n == 5 and args.arity_cap < 5,
            "count": int(len(rows)),
            "elements": [[bits_to_hex(int(v), n) for v in r] for r in rows]}


def cmd_hom(data, args):
    if not (isinstance(data, dict) and "source" in data and "target" in data):
        raise InputError("hom expects {source, target}")
    cap = min(args.arity_cap, 4)
    M = _truncated(data["source"], cap, args.budget_ops)
    N = _truncated(data["target"], cap, args.budget_ops)
    hom = mincore.hom_search(M, N, budget=args.budget_ops)
    out = {"source": M.name, "target": N.name, "cap": cap, "found": hom is not None,
           "scope": f"verified up to arity {cap} with symmetric 5-ary witnesses"}
    if hom is not None:
        out["binary_map"] = [int(v) for v in hom.binary]
        if isinstance(M, mincore.FunctionMinion) and isinstance(N, mincore.FunctionMinion):
            out["binary_tables"] = [
                {"from": [bits_to_hex(int(v), 2) for v in M.rows[2][i]],
                 "to": [bits_to_hex(int(v), 2) for v in N.rows[2][j]]}
                for i, j in enumerate(hom.binary)]
    return out


def cmd_core(data, args):
    cap = min(args.arity_cap, 4)
    M = _truncated(data, cap, args.budget_ops)
    C = mincore.compute_core_truncated(M, budget=args.budget_ops)
    out = {"minion": M.name, "cap": cap, "sizes": list(M.size_tuple()), "core_sizes": list(C.size_tuple()),
           "is_core": mincore.is_core_truncated(C, budget=args.budget_ops)}
    if isinstance(C, mincore.FunctionMinion):
        out["core_binary"] = [[bits_to_hex(int(v), 2) for v in r] for r in C.rows[2]]
    return out


def cmd_poset(data, args):
    nodes = canon.all_cores(args.max_k)
    if args.format == "dot":
        return canon.poset_dot(args.max_k)
    covers = canon.hasse_covers(nodes)
    if args.format == "text":
        return "".join(f"{a} < {b}\n" for a, b in covers)
    return {"nodes": [str(c) for c in nodes], "covers": [[str(a), str(b)] for a, b in covers]}


COMMANDS = {
    "classify": cmd_classify, "translate": cmd_translate, "reduce": cmd_reduce,
    "enumerate": cmd_enumerate, "hom": cmd_hom, "core": cmd_core, "poset": cmd_poset,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boolminion",
                                description="Classify multisorted Boolean clones up to minion homomorphisms.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", help="JSON file, '-' for stdin, inline JSON, or a core name")
    p.add_argument("--arity-cap", type=int, default=4, help="largest arity enumerated in full (2..5)")
    p.add_argument("--budget-ops", type=int, default=None, help="cap on enumerated rows / search nodes")
    p.add_argument("--format", choices=("json", "dot", "text"), default=None)
    p.add_argument("--max-k", type=int, default=3, help="largest index shown by poset")
    p.add_argument("--arity", type=int, default=2, help="arity for enumerate")
    return p


def _emit(result, fmt, out):
    if isinstance(result, str):
        out.write(result)
        return
    if fmt == "text":
        for key, val in result.items():
            out.write(f"{key}: {json.dumps(val, sort_keys=True)}\n")
        return
    out.write(json.dumps(result, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not 2 <= args.arity_cap <= 5:
            raise InputError("--arity-cap must lie in 2..5")
        if args.budget_ops is not None and args.budget_ops <= 0:
            raise InputError("--budget-ops must be positive")
        if args.max_k < 1:
            raise InputError("--max-k must be positive")
        if args.format is None:
            args.format = "dot" if args.command == "poset" else "json"
        if args.format == "dot" and args.command != "poset":
            raise InputError("dot output is only available for poset")
        data = None if args.command == "poset" else load_input(args.input)
        result = COMMANDS[args.command](data, args)
        if isinstance(result, dict) and "verified" in result and not result["verified"]:
            raise VerificationError("report is not verified")
        _emit(result, args.format, sys.stdout)
        return 0
    except (InputError, ContractViolation) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
