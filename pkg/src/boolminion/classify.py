"""Classify a reduced description and certify the answer.

The forward witness is a list of terms over the description's symbols
built from meet, join and dual, one per sort of the canonical core; it maps
every member of the clone into the core.  The backward witness sends each
symbol to a (possibly dualised) sort of the core.  Both are checked on all
members up to arity 4 and on the symmetric 5-ary members before a report
is returned.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bulk, system
from .boolfun import TruthTable, dual, join, meet
from .canon import BINF, CINF, DINF, CoreId, canonical_system
from .descriptions import (Description, ReducedDescription, chain_rank, chain_rank_terms,
                           extract_description, has_monotone, longest_path, rank, to_reduced)
from .errors import BudgetExceeded, ContractViolation, InputError, VerificationError
from .multisorted import TRIVIAL, SortedSignature, TypedRelation, idempotent_core, pol_enumerate
from .system import Literal

# terms


@dataclass(frozen=True)
class TermExpr:
    op: str                         # "leaf", "meet", "join" or "dual"
    args: tuple = ()
    sym: int = -1

    def prefix(self, names: Sequence[str]) -> str:
        if self.op == "leaf":
            return names[self.sym]
        return f"{self.op}(" + ", ".join(a.prefix(names) for a in self.args) + ")"

    def symbols(self) -> set[int]:
        if self.op == "leaf":
            return {self.sym}
        return set().union(*(a.symbols() for a in self.args))


def leaf(i: int) -> TermExpr:
    return TermExpr("leaf", sym=i)


def t_meet(a: TermExpr, b: TermExpr) -> TermExpr:
    return a if a == b else TermExpr("meet", (a, b))


def t_join(a: TermExpr, b: TermExpr) -> TermExpr:
    return a if a == b else TermExpr("join", (a, b))


def t_dual(a: TermExpr) -> TermExpr:
    return a.args[0] if a.op == "dual" else TermExpr("dual", (a,))


def lit_term(lit: Literal) -> TermExpr:
    return t_dual(leaf(lit.sym)) if lit.dual else leaf(lit.sym)


def eval_term(t: TermExpr, ops: Sequence[TruthTable]) -> TruthTable:
    if not ops:
        raise InputError("no operations to evaluate on")
    if len({f.arity for f in ops}) != 1:
        raise InputError("operations of different arities")
    return _eval(t, ops)


def _eval(t, ops):
    if t.op == "leaf":
        if not 0 <= t.sym < len(ops):
            raise InputError(f"leaf {t.sym} out of range")
        return ops[t.sym]
    if t.op == "dual":
        return dual(_eval(t.args[0], ops))
    a, b = (_eval(x, ops) for x in t.args)
    return meet(a, b) if t.op == "meet" else join(a, b)


def eval_term_bulk(t: TermExpr, cols: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Evaluate on many tuples at once; cols[i] holds the tables of symbol i."""
    if t.op == "leaf":
        if not 0 <= t.sym < len(cols):
            raise InputError(f"leaf {t.sym} out of range")
        return cols[t.sym]
    if t.op == "dual":
        return bulk.dual(eval_term_bulk(t.args[0], cols, n), n)
    a, b = (eval_term_bulk(x, cols, n) for x in t.args)
    return a & b if t.op == "meet" else a | b


# the core


def collapse_core(rd: ReducedDescription) -> CoreId:
    if has_monotone(rd):
        if rd.m == 0:
            return BINF
        if any(rd.is_g(s) for s in rd.monotone_symbols()):
            return DINF
        return CINF
    r = chain_rank(rd)
    l = math.ceil(r / 2)
    if rd.m == 0:
        return CoreId("A", l) if r % 2 else CoreId("B", l)
    return CoreId("D", l) if r % 2 else CoreId("C", l + 1)


def _chain_case(rd: ReducedDescription):
    """The case of the chain-rank definition that is used, after tie-breaking."""
    r = chain_rank(rd)
    priority = {"rank": 0, "pair": 1, "g": 2}
    best = None
    for value, case, i, j in chain_rank_terms(rd):
        if value != r:
            continue
        if case == "pair" and rank(rd, i) < rank(rd, j):
            i, j = j, i
        key = (priority[case], i, j)
        if best is None or key < best:
            best = key
    case = {0: "rank", 1: "pair", 2: "g"}[best[0]]
    return case, best[1], best[2]


def _s_t(rd: ReducedDescription):
    """Term sequences s_1..s_l, t_1..t_l of the chain claim."""
    r = chain_rank(rd)
    l = math.ceil(r / 2)
    if l == 0:
        return [], []
    case, i, j = _chain_case(rd)
    f = [leaf(s) for s in range(rd.k)]
    if case == "rank":
        p = longest_path(rd, i)
        s = [f[p[q]] for q in range(l)]
        t = [t_dual(f[p[r - q - 1]]) for q in range(l)]
    elif case == "pair":
        p, pj = longest_path(rd, i), longest_path(rd, j)
        ri, rj = len(p), len(pj)
        s = [f[p[q]] for q in range(l)]
        t = [f[pj[q]] for q in range(rj)]
        t += [t_dual(f[p[ri - 1 - q]]) for q in range(l - rj)]
    else:
        p = longest_path(rd, i)
        s = [f[x] for x in p] + [f[j]]
        t = list(s)
    return s, t


def witness_forward(rd: ReducedDescription) -> list[TermExpr]:
    core = collapse_core(rd)
    if core == DINF:
        g = next(s for s in rd.monotone_symbols() if rd.is_g(s))
        return [leaf(g)]
    if core in (BINF, CINF):
        fi = leaf(min(rd.monotone_symbols()))
        u = t_meet(fi, t_dual(fi))
        if core == BINF:
            return [u]
        g = leaf(rd.n)
        return [u, t_meet(t_join(g, u), t_dual(u))]
    s, t = _s_t(rd)
    hs = [t_meet(a, b) for a, b in zip(s, t)]
    if rd.m == 0:
        return hs
    g = leaf(rd.n)
    if not hs:
        return [g]
    u = hs[-1]
    top = t_meet(t_join(g, u), t_dual(u))
    if core.tag == "D":
        return hs[:-1] + [top]
    return hs + [top]


def witness_backward(rd: ReducedDescription, core: CoreId | None = None) -> list[tuple[int, bool]]:
    """For each symbol of rd, the core sort (0-based) and dual flag it is read from."""
    core = core or collapse_core(rd)
    if core != collapse_core(rd):
        raise ContractViolation("backward witness requested for a different core")
    if core in (BINF, DINF):
        return [(0, False)] * rd.k
    if core == CINF:
        return [(0, False)] * rd.n + [(1, False)] * rd.m
    r = chain_rank(rd)
    l = math.ceil(r / 2)
    hprime = [(q, False) for q in range(l)] + [(r - l - 1 - q, True) for q in range(r - l)]
    out = [hprime[rank(rd, i) - 1] for i in range(rd.n)]
    out += [(core.sorts - 1, False)] * rd.m
    return out


# verification


def _arities(cap):
    return list(range(1, min(cap, 4) + 1)) + [5]


def _check_forward(rd, core, terms, budget, log, cap=4):
    target = canonical_system(core)
    for n in _arities(cap):
        total = 0
        for rows in system.enumerate_chunks(rd.system(), n, symmetric=(n == 5), budget=budget):
            cols = [rows[:, s] for s in range(rd.k)]
            out = np.stack([eval_term_bulk(t, cols, n) for t in terms], axis=1)
            ok = system.member_mask(target, out, n)
            if not ok.all():
                bad = rows[np.nonzero(~ok)[0][0]]
                raise VerificationError(f"forward witness leaves {core} at arity {n} on {[hex(int(v)) for v in bad]}")
            total += len(rows)
        log.append(f"forward: {total} members of arity {n}{' (symmetric)' if n == 5 else ''} land in {core}")


def _apply_backward(rows, assign, n):
    cols = []
    for s, d in assign:
        c = rows[:, s]
        cols.append(bulk.dual(c, n) if d else c)
    return np.stack(cols, axis=1) if cols else np.zeros((len(rows), 0), dtype=np.uint64)


def _check_backward(rd, core, assign, budget, log, cap=4):
    source = canonical_system(core)
    for n in _arities(cap):
        rows = system.enumerate_all(source, n, symmetric=(n == 5), budget=budget)
        ok = system.member_mask(rd.system(), _apply_backward(rows, assign, n), n)
        if not ok.all():
            bad = rows[np.nonzero(~ok)[0][0]]
            raise VerificationError(f"backward witness leaves the clone at arity {n} on {[hex(int(v)) for v in bad]}")
        log.append(f"backward: {len(rows)} members of {core} at arity {n}{' (symmetric)' if n == 5 else ''} satisfy the reduced description")


def _check_reduction(d: Description, rd: ReducedDescription, smap, budget, log, max_n=3):
    """Clo(D) and Clo(rd) correspond through the symbol map, both ways."""
    back = {}
    for s, lit in enumerate(smap):
        back.setdefault(lit.sym, (s, lit.dual))
    if len(back) != rd.k:
        raise VerificationError("symbol map does not cover the reduced symbols")
    inv = [back[t] for t in range(rd.k)]
    for n in range(1, max_n + 1):
        rows = system.enumerate_all(d.system(), n, budget=budget)
        img = _apply_backward(rows, inv, n)
        if not system.member_mask(rd.system(), img, n).all():
            raise VerificationError(f"a member of Clo(D) at arity {n} does not reduce")
        rrows = system.enumerate_all(rd.system(), n, budget=budget)
        pre = _apply_backward(rrows, [(lit.sym, lit.dual) for lit in smap], n)
        if not system.member_mask(d.system(), pre, n).all():
            raise VerificationError(f"a member of the reduced clone at arity {n} does not lift")
        if len(rows) != len(rrows):
            raise VerificationError(f"clone sizes differ at arity {n}: {len(rows)} vs {len(rrows)}")
        log.append(f"reduction: {len(rows)} members at arity {n} correspond under the symbol map")


def _check_pol(sig, relations, d, log, limit=10 ** 5):
    """Pol of the core structure equals Clo(D) at arity 2, when cheap enough."""
    if 16 ** sig.k > limit:
        log.append("polymorphisms: arity-2 comparison skipped (too many candidates)")
        return
    pol = pol_enumerate(sig, relations, 2, idempotent_only=False, budget=None)
    rows = system.enumerate_all(d.system(), 2)
    got = sorted(tuple(c.bits for c in op.components) for op in pol)
    want = sorted(tuple(int(v) for v in r) for r in rows)
    if got != want:
        raise VerificationError("binary polymorphisms differ from the description's clone")
    log.append(f"polymorphisms: {len(got)} binary polymorphisms equal the description's clone")


# reports


@dataclass
class ClassificationReport:
    input_digest: str
    core: CoreId
    description: Description | None = None
    reduced: ReducedDescription | None = None
    symbol_map: tuple = ()
    chain_rank: int | None = None
    forward: list = field(default_factory=list)
    backward: list = field(default_factory=list)
    log: list = field(default_factory=list)
    verified: bool = False
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"core": str(self.core), "verified": self.verified, "input_digest": self.input_digest}
        if self.reduced is not None:
            names = self.reduced.names()
            out["description"] = self.description.to_json()
            out["reduced"] = self.reduced.to_json()
            out["reduced_text"] = self.reduced.show()
            out["symbol_map"] = [lit.name(names) for lit in self.symbol_map]
            out["chain_rank"] = self.chain_rank
            out["forward_witness"] = [t.prefix(names) for t in self.forward]
            out["backward_witness"] = [{"symbol": names[i], "sort": s + 1, "dual": d}
                                       for i, (s, d) in enumerate(self.backward)]
        out["verification"] = list(self.log)
        out.update(self.extra)
        return out


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def classify_reduced(rd: ReducedDescription, *, budget: int | None = None,
                     cap: int = 4) -> tuple[CoreId, list, list, list[str]]:
    """Core plus verified witnesses for a reduced description."""
    rd.validate()
    core = collapse_core(rd)
    fwd = witness_forward(rd)
    bwd = witness_backward(rd, core)
    if len(fwd) != core.sorts or len(bwd) != rd.k:
        raise VerificationError("witness lengths do not match")
    log: list[str] = []
    _check_forward(rd, core, fwd, budget, log, cap)
    _check_backward(rd, core, bwd, budget, log, cap)
    return core, fwd, bwd, log


def classify_description(d: Description, *, budget: int | None = None, cap: int = 4,
                         digest_of=None) -> ClassificationReport:
    red = to_reduced(d)
    rd = red.reduced
    log: list[str] = [f"reduced: {rd.show()}"]
    _check_reduction(d, rd, red.symbol_map, budget, log, max_n=min(cap, 3))
    core, fwd, bwd, wlog = classify_reduced(rd, budget=budget, cap=cap)
    log += wlog
    return ClassificationReport(
        input_digest=digest(digest_of if digest_of is not None else d.to_json()),
        core=core, description=d, reduced=rd, symbol_map=red.symbol_map,
        chain_rank=None if has_monotone(rd) else chain_rank(rd),
        forward=fwd, backward=bwd, log=log, verified=True)


def singletons(signature: SortedSignature) -> list[TypedRelation]:
    return [TypedRelation((s,), frozenset({(a,)})) for s, carrier in enumerate(signature.sorts) for a in carrier]


def classify_relations(relations: Sequence[TypedRelation], signature: SortedSignature, *,
                       idempotent: bool = False, budget: int | None = None,
                       cap: int = 4) -> ClassificationReport:
    """Full pipeline for relations of arity at most 2 on a Boolean multisorted set.

    With idempotent=True the idempotent polymorphisms are classified, i.e.
    every singleton unary relation is adjoined first.
    """
    from .multisorted import structure_to_json
    if not signature.is_boolean():
        raise InputError("classify_relations needs Boolean sorts; translate finite domains first")
    relations = list(relations)
    dig = digest(dict(structure_to_json(signature, relations), idempotent=idempotent))
    if idempotent:
        relations += [r for r in singletons(signature) if r not in relations]
    core_result = idempotent_core(signature, relations, budget=10 ** 6 if budget is None else budget)
    if core_result == TRIVIAL:
        return ClassificationReport(dig, CoreId("T"), log=["idempotent core is trivial: a constant unary polymorphism exists"],
                                    verified=True)
    sig, rels = core_result.signature, list(core_result.relations)
    for r in rels:
        if r.arity > 2:
            raise InputError("relations of arity above 2 are not supported")
    d = extract_description(sig, rels)
    rep = classify_description(d, budget=budget, cap=cap)
    rep.input_digest = dig
    try:
        _check_pol(sig, rels, d, rep.log)
    except BudgetExceeded:
        rep.log.append("polymorphisms: arity-2 comparison skipped (budget)")
    rep.log.insert(0, f"idempotent core keeps sorts {[s + 1 for s in core_result.kept_sorts]}")
    return rep
