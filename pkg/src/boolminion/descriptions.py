"""Descriptions: symbols with order constraints, and their reduced form.

A description over k symbols h_1..h_k is a set of constraints
lhs <| rhs or lhs = rhs between literals.  Its clone is the set of
k-tuples of idempotent Boolean operations satisfying all constraints.

The reduced form splits symbols into f's and g's (every g self-dual), keeps
only the constraint shapes
    f_i <| f_j,  f_i <| f_j^d,  f_i <| g_j,  g_i <| g_i,  g = g^d
and has no <|-cycles through distinct f's.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import system
from .errors import ContractViolation, InputError, VerificationError
from .multisorted import SortedSignature, TypedRelation
from .scc import tarjan
from .system import Constraint, ConstraintSystem, Literal, make_constraint
from .twosat import CnfFormula, apt_solve, eliminate_self_dual

TRI, EQ = "tri", "eq"


def tri(a: Literal, b: Literal) -> Constraint:
    return Constraint(TRI, a, b)


def eq(a: Literal, b: Literal) -> Constraint:
    return make_constraint(EQ, a, b)


@dataclass(frozen=True)
class Description:
    k: int
    constraints: frozenset

    def __post_init__(self):
        for c in self.constraints:
            if c.kind not in (TRI, EQ):
                raise InputError(f"description constraints are tri/eq, got {c.kind}")
            for lit in (c.lhs, c.rhs):
                if not 0 <= lit.sym < self.k:
                    raise InputError(f"symbol {lit.sym + 1} outside 1..{self.k}")

    @classmethod
    def make(cls, k: int, constraints) -> "Description":
        return cls(k, frozenset(make_constraint(*c) if not isinstance(c, Constraint) else
                                (eq(c.lhs, c.rhs) if c.kind == EQ else c) for c in constraints))

    def names(self) -> list[str]:
        return [f"h{i + 1}" for i in range(self.k)]

    def system(self) -> ConstraintSystem:
        return ConstraintSystem(self.k, tuple(sorted(self.constraints)))

    def show(self) -> str:
        names = self.names()
        return "{" + ", ".join(c.show(names) for c in sorted(self.constraints)) + "}"

    def to_json(self) -> dict:
        return {"k": self.k, "constraints": [_c_json(c) for c in sorted(self.constraints)]}

    @classmethod
    def from_json(cls, obj: dict) -> "Description":
        try:
            k = int(obj["k"])
            cons = [(c["kind"], _lit_in(c["lhs"]), _lit_in(c["rhs"])) for c in obj["constraints"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad description JSON: {exc}") from exc
        return cls.make(k, cons)


def _c_json(c: Constraint) -> dict:
    return {"kind": c.kind, "lhs": [c.lhs.sym + 1, c.lhs.dual], "rhs": [c.rhs.sym + 1, c.rhs.dual]}


def _lit_in(pair) -> tuple[int, bool]:
    # JSON symbols are 1-based
    return int(pair[0]) - 1, bool(pair[1])


@dataclass(frozen=True)
class ReducedDescription:
    n: int                      # f-symbols are 0..n-1
    m: int                      # g-symbols are n..n+m-1
    constraints: frozenset
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def k(self) -> int:
        return self.n + self.m

    def is_g(self, s: int) -> bool:
        return s >= self.n

    def names(self) -> list[str]:
        return [f"f{i + 1}" for i in range(self.n)] + [f"g{j + 1}" for j in range(self.m)]

    def system(self) -> ConstraintSystem:
        return ConstraintSystem(self.k, tuple(sorted(self.constraints)))

    def show(self) -> str:
        names = self.names()
        return "{" + ", ".join(c.show(names) for c in sorted(self.constraints)) + "}"

    def validate(self):
        """Raise VerificationError unless every reduced-form invariant holds."""
        if self.k < 1:
            raise VerificationError("reduced description needs at least one symbol")
        for j in range(self.n, self.k):
            if eq(Literal(j), Literal(j, True)) not in self.constraints:
                raise VerificationError(f"g-symbol {j} lacks g = g^d")
        for c in self.constraints:
            a, b = c.lhs, c.rhs
            if c.kind == EQ:
                if not (a.sym == b.sym and self.is_g(a.sym) and a.dual != b.dual):
                    raise VerificationError(f"disallowed equality {c}")
                continue
            if a.dual:
                raise VerificationError(f"dual on the left of {c}")
            if self.is_g(a.sym):
                if not (b.sym == a.sym and not b.dual):
                    raise VerificationError(f"disallowed g constraint {c}")
            elif self.is_g(b.sym) and b.dual:
                raise VerificationError(f"dual g on the right of {c}")
        # no <|-cycles of length > 1 among f's
        adj = [[] for _ in range(self.n)]
        for i, j in self.f_edges():
            if i != j:
                adj[i].append(j)
        comp = tarjan(self.n, adj)
        if len(set(comp)) != self.n:
            raise VerificationError("cycle through distinct f-symbols")

    def f_edges(self) -> list[tuple[int, int]]:
        return sorted((c.lhs.sym, c.rhs.sym) for c in self.constraints
                      if c.kind == TRI and not c.lhs.dual and not c.rhs.dual
                      and c.lhs.sym < self.n and c.rhs.sym < self.n)

    def monotone_symbols(self) -> list[int]:
        return sorted(c.lhs.sym for c in self.constraints
                      if c.kind == TRI and c.lhs == c.rhs)

    def to_json(self) -> dict:
        return {"k": self.k, "f": self.n, "g": self.m,
                "constraints": [_c_json(c) for c in sorted(self.constraints)]}

    @classmethod
    def from_json(cls, obj: dict) -> "ReducedDescription":
        try:
            n, m = int(obj["f"]), int(obj["g"])
            cons = frozenset(make_constraint(c["kind"], _lit_in(c["lhs"]), _lit_in(c["rhs"]))
                             for c in obj["constraints"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad reduced description JSON: {exc}") from exc
        rd = cls(n, m, cons)
        rd.validate()
        return rd


# extraction from Boolean relations

_BINARY_SHAPES = {
    frozenset({(0, 0), (0, 1), (1, 0)}): (TRI, False, True),    # h_i <| h_j^d
    frozenset({(0, 1), (1, 0), (1, 1)}): (TRI, True, False),    # h_i^d <| h_j
    frozenset({(0, 0), (0, 1), (1, 1)}): (TRI, False, False),   # h_i <| h_j
    frozenset({(0, 0), (1, 0), (1, 1)}): (TRI, True, True),     # h_i^d <| h_j^d
    frozenset({(0, 0), (1, 1)}): (EQ, False, False),
    frozenset({(0, 1), (1, 0)}): (EQ, False, True),
}


def binary_constraint(rel: TypedRelation) -> Constraint | None:
    """The constraint a binary Boolean relation imposes, or None if every
    idempotent operation preserves it."""
    if rel.arity != 2:
        raise InputError("binary_constraint needs a binary relation")
    shape = _BINARY_SHAPES.get(rel.tuples)
    if shape is None:
        return None
    kind, da, db = shape
    i, j = rel.type
    return make_constraint(kind, (i, da), (j, db))


def extract_description(sig: SortedSignature, relations: Sequence[TypedRelation]) -> Description:
    """Description whose clone is the idempotent polymorphisms of the relations."""
    if not sig.is_boolean():
        raise InputError("extract_description needs Boolean sorts")
    cons = set()
    for r in relations:
        r.validate(sig)
        if r.arity <= 1:
            continue   # unary Boolean relations are preserved by idempotent operations
        if r.arity > 2:
            raise InputError(f"relation of arity {r.arity} is not supported")
        c = binary_constraint(r)
        if c is not None:
            cons.add(c)
    return Description(sig.k, frozenset(cons))


# forced merging


def _lit_node(lit: Literal) -> int:
    return 2 * lit.sym + (1 if lit.dual else 0)


def _node_lit(v: int) -> Literal:
    return Literal(v // 2, bool(v % 2))


def literal_graph(k: int, constraints) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(2 * k)]

    def edge(a, b):
        adj[_lit_node(a)].append(_lit_node(b))
        adj[_lit_node(~b)].append(_lit_node(~a))

    for c in sorted(constraints):
        edge(c.lhs, c.rhs)
        if c.kind == EQ:
            edge(c.rhs, c.lhs)
    return adj


@dataclass(frozen=True)
class MergeResult:
    description: Description
    symbol_map: tuple[Literal, ...]     # original symbol -> literal over merged symbols
    self_dual: frozenset                 # merged symbols forced to be self-dual


def _map_constraint(c: Constraint, smap) -> Constraint:
    def m(lit):
        t = smap[lit.sym]
        return Literal(t.sym, t.dual != lit.dual)
    if c.kind == EQ:
        return eq(m(c.lhs), m(c.rhs))
    return tri(m(c.lhs), m(c.rhs))


def forced_merge(d: Description) -> MergeResult:
    """Merge symbols that share a strongly connected component of the literal graph."""
    adj = literal_graph(d.k, d.constraints)
    comp = tarjan(2 * d.k, adj)
    members: dict[int, list[int]] = {}
    for v, c in enumerate(comp):
        members.setdefault(c, []).append(v)
    # the survivor is the highest symbol of the component, taken positively if possible
    rep = {c: max((_node_lit(v) for v in vs), key=lambda lit: (lit.sym, not lit.dual))
           for c, vs in members.items()}
    survivors = sorted({rep[comp[2 * s]].sym for s in range(d.k)})
    renum = {s: i for i, s in enumerate(survivors)}
    smap = []
    for s in range(d.k):
        r = rep[comp[2 * s]]
        smap.append(Literal(renum[r.sym], r.dual))
    self_dual = frozenset(renum[s] for s in survivors if comp[2 * s] == comp[2 * s + 1])
    cons = frozenset(_map_constraint(c, smap) for c in d.constraints)
    return MergeResult(Description(len(survivors), cons), tuple(smap), self_dual)


# simple adjustments


def simple_adjust(k: int, g_syms: frozenset, constraints) -> frozenset:
    out = set()
    for c in constraints:
        a, b = c.lhs, c.rhs
        if c.kind == EQ:
            if a.sym != b.sym:
                raise VerificationError(f"equality between distinct symbols survived merging: {c}")
            continue   # h = h is void; h = h^d is re-added below for each g
        if a.sym in g_syms:
            a = Literal(a.sym)
        if b.sym in g_syms:
            b = Literal(b.sym)
        ga, gb = a.sym in g_syms, b.sym in g_syms
        if ga and gb:
            if a.sym != b.sym:
                raise VerificationError(f"distinct g-symbols related after merging: {c}")
            out.add(tri(a, b))
        elif ga:
            out.add(tri(~b, a))          # g <| f^e  becomes  f^(not e) <| g
        elif not gb and a.dual and b.dual:
            out.add(tri(~b, ~a))         # f_i^d <| f_j^d  becomes  f_j <| f_i
        else:
            out.add(tri(a, b))
    for s in g_syms:
        out.add(eq(Literal(s), Literal(s, True)))
    return frozenset(out)


def build_2cnf(k: int, g_syms: frozenset, constraints) -> CnfFormula:
    """Clauses over variables 1..k (symbol s is variable s + 1), one per constraint shape."""
    clauses = []
    for c in sorted(constraints):
        if c.kind != TRI:
            continue
        a, b = c.lhs, c.rhs
        if a.sym in g_syms:
            continue
        va, vb = a.sym + 1, b.sym + 1
        la = va if a.dual else -va
        if b.sym in g_syms:
            clauses.append((la, vb if a.dual else -vb))
        else:
            clauses.append((la, -vb if b.dual else vb))
    return CnfFormula(k, tuple(clauses))


# reduction


@dataclass(frozen=True)
class Reduction:
    reduced: ReducedDescription
    symbol_map: tuple[Literal, ...]     # original symbol -> literal over reduced symbols
    formula: CnfFormula
    assignment: dict


def to_reduced(d: Description) -> Reduction:
    merged = forced_merge(d)
    k = merged.description.k
    gs = merged.self_dual
    cons = simple_adjust(k, gs, merged.description.constraints)
    phi = build_2cnf(k, gs, cons)
    solved = apt_solve(eliminate_self_dual(phi, {s + 1 for s in gs}))
    if solved is None:
        raise VerificationError("2-CNF of the merged description is unsatisfiable")
    flip = [solved[s + 1] and s not in gs for s in range(k)]

    def flipped(lit):
        return Literal(lit.sym, lit.dual != flip[lit.sym])
    cons = frozenset(Constraint(c.kind, flipped(c.lhs), flipped(c.rhs)) for c in cons)
    cons = simple_adjust(k, gs, cons)
    # renumber: f-symbols first, then g-symbols, each in merged order
    fs = [s for s in range(k) if s not in gs]
    order = fs + sorted(gs)
    pos = {s: i for i, s in enumerate(order)}
    smap_merged = [Literal(pos[s], flip[s]) for s in range(k)]
    cons = frozenset(_map_constraint(c, [Literal(pos[s]) for s in range(k)]) for c in cons)
    rd = ReducedDescription(len(fs), len(gs), cons)
    rd.validate()
    full_map = tuple(Literal(smap_merged[t.sym].sym, smap_merged[t.sym].dual != t.dual)
                     for t in merged.symbol_map)
    return Reduction(rd, full_map, phi, solved)


# rank and chain rank


def has_monotone(rd: ReducedDescription) -> bool:
    return bool(rd.monotone_symbols())


def _ranks(rd: ReducedDescription) -> list[int]:
    if "ranks" in rd._cache:
        return rd._cache["ranks"]
    if has_monotone(rd):
        raise ContractViolation("rank is undefined when a symbol is monotone")
    preds: list[list[int]] = [[] for _ in range(rd.n)]
    for i, j in rd.f_edges():
        preds[j].append(i)

    @lru_cache(maxsize=None)
    def r(i):
        return 1 + max((r(p) for p in preds[i]), default=0)
    ranks = [r(i) for i in range(rd.n)]
    rd._cache["ranks"] = ranks
    return ranks


def rank(rd: ReducedDescription, i: int) -> int:
    """Vertices on the longest <|-path of f's ending at f_i."""
    if not 0 <= i < rd.n:
        raise ContractViolation(f"{i} is not an f-symbol")
    return _ranks(rd)[i]


def longest_path(rd: ReducedDescription, i: int) -> list[int]:
    """A longest path ending at f_i; ties go to the smallest predecessor."""
    ranks = _ranks(rd)
    preds: list[list[int]] = [[] for _ in range(rd.n)]
    for a, b in rd.f_edges():
        preds[b].append(a)
    path = [i]
    while ranks[path[-1]] > 1:
        cur = path[-1]
        path.append(min(p for p in preds[cur] if ranks[p] == ranks[cur] - 1))
    return path[::-1]


def chain_rank_terms(rd: ReducedDescription) -> list[tuple[int, str, int, int]]:
    """All candidate values (value, case, i, j) of the chain rank, in tie-break order."""
    ranks = _ranks(rd)
    out = []
    for i in range(rd.n):
        out.append((ranks[i], "rank", i, -1))
    for c in sorted(rd.constraints):
        if c.kind != TRI or c.lhs.sym >= rd.n:
            continue
        i, j = c.lhs.sym, c.rhs.sym
        if j < rd.n and c.rhs.dual:
            out.append((ranks[i] + ranks[j], "pair", i, j))
        elif j >= rd.n:
            out.append((2 * ranks[i] + 1, "g", i, j))
    return out


def chain_rank(rd: ReducedDescription) -> int:
    terms = chain_rank_terms(rd)
    return max((t[0] for t in terms), default=0)


# enumeration


def clo_enumerate(d: Description | ReducedDescription, n: int, *, budget: int | None = None,
                  cap: int = 4) -> np.ndarray:
    """Members of the clone at arity n as rows of tables (one column per symbol).

    Arity 5 yields the symmetric members only.
    """
    return system.enumerate_all(d.system(), n, symmetric=(n == 5), budget=budget, cap=cap)


def clo_chunks(d, n: int, *, budget: int | None = None, cap: int = 4):
    return system.enumerate_chunks(d.system(), n, symmetric=(n == 5), budget=budget, cap=cap)
