"""Relations with small projections on a finite set, as multisorted Boolean relations.

Every two-element projection P = {a, b} (a < b) of a relation becomes a
Boolean sort, with a renamed to 0 and b to 1.  Coordinates whose projection
is a single element are constant and are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .boolfun import TruthTable
from .canon import CoreId
from .classify import ClassificationReport, classify_relations, digest
from .errors import BudgetExceeded, ContractViolation, InputError, VerificationError
from .multisorted import (TRIVIAL, FiniteOp, MultiOp, SortedSignature, TypedRelation, idempotent_core,
                          pol_enumerate, preserves)

Relation = frozenset   # of equal-length tuples of domain elements


@dataclass(frozen=True)
class FiniteStructure:
    domain: tuple[int, ...]
    relations: tuple[Relation, ...]

    @classmethod
    def make(cls, domain: Sequence[int], relations) -> "FiniteStructure":
        dom = tuple(sorted(set(int(v) for v in domain)))
        rels = []
        for r in relations:
            tups = frozenset(tuple(int(v) for v in t) for t in r)
            if len({len(t) for t in tups}) > 1:
                raise InputError("tuples of one relation must have equal length")
            for t in tups:
                if any(v not in dom for v in t):
                    raise InputError(f"tuple {t} leaves the domain")
            rels.append(tups)
        return cls(dom, tuple(rels))

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteStructure":
        try:
            l = int(obj["domain"])
            rels = [r["tuples"] for r in obj.get("relations", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad finite-domain JSON: {exc}") from exc
        if l < 1:
            raise InputError("domain must be positive")
        return cls.make(range(1, l + 1), rels)

    def to_json(self) -> dict:
        return {"domain": len(self.domain),
                "relations": [{"tuples": [list(t) for t in sorted(r)]} for r in self.relations]}


def projections(rel: Relation) -> list[tuple[int, ...]]:
    """Projection of the relation onto each coordinate, as sorted tuples."""
    if not rel:
        return []
    r = len(next(iter(rel)))
    return [tuple(sorted({t[i] for t in rel})) for i in range(r)]


def small_projections_check(relations: Sequence[Relation]) -> bool:
    return all(len(p) <= 2 for r in relations for p in projections(r))


# translation


@dataclass(frozen=True)
class Translation:
    signature: SortedSignature
    relations: tuple[TypedRelation, ...]
    sorts: tuple[tuple[int, int], ...]       # original elements (renamed 0, 1) per sort

    def sort_dictionary(self) -> list[dict]:
        return [{"sort": i + 1, "elements": list(p), "rename": {str(p[0]): 0, str(p[1]): 1}}
                for i, p in enumerate(self.sorts)]


def translate_small_projections(relations: Sequence[Relation]) -> Translation:
    """One Boolean sort per two-element projection; singleton relations adjoined.

    The input should already be an idempotent core (see classify_finite).
    """
    relations = [r for r in relations if r]
    if not small_projections_check(relations):
        raise InputError("a relation has a projection with more than two elements")
    sorts = sorted({p for r in relations for p in projections(r) if len(p) == 2})
    index = {p: i for i, p in enumerate(sorts)}
    out: list[TypedRelation] = []
    for r in relations:
        proj = projections(r)
        keep = [i for i, p in enumerate(proj) if len(p) == 2]
        if not keep:
            continue        # a single tuple: preserved by every idempotent operation
        typ = tuple(index[proj[i]] for i in keep)
        tups = frozenset(tuple(proj[i].index(t[i]) for i in keep) for t in r)
        rel = TypedRelation(typ, tups)
        if rel not in out:
            out.append(rel)
    for s in range(len(sorts)):
        for a in (0, 1):
            rel = TypedRelation((s,), frozenset({(a,)}))
            if rel not in out:
                out.append(rel)
    return Translation(SortedSignature.boolean(len(sorts)), tuple(out), tuple(sorts))


def restrict_polymorphism(f: FiniteOp, sorts: Sequence[tuple[int, int]]) -> MultiOp:
    """The Boolean multisorted operation (f restricted to P)_P."""
    comps = []
    for p in sorts:
        vals = []
        for bits in range(1 << f.arity):
            args = [p[(bits >> j) & 1] for j in range(f.arity)]
            v = f(*args)
            if v not in p:
                raise ContractViolation(f"operation does not preserve {set(p)}")
            vals.append(p.index(v))
        comps.append(TruthTable.from_values(f.arity, vals))
    return MultiOp(f.arity, tuple(comps))


def essential_coordinates(g) -> set[int]:
    """Coordinates (0-based) the operation depends on."""
    carrier = (0, 1) if isinstance(g, TruthTable) else g.carrier
    n = g.arity
    out = set()
    for i in range(n):
        for c in product(carrier, repeat=n):
            base = g(*c)
            if any(g(*(c[:i] + (b,) + c[i + 1:])) != base for b in carrier):
                out.add(i)
                break
    return out


# the reverse direction, for small domains


def point_map_value(f: MultiOp, sorts: Sequence[tuple[int, int]], domain: Sequence[int]) -> int:
    """X(f) for an l-ary f, l = |domain|: coordinates are read as domain elements.

    If all components depend only on coordinates inside one sort Q, the value
    is f_Q at a tuple that puts each element of Q at its own coordinate.
    """
    ess = [essential_coordinates(c) for c in f.components]
    union = set().union(*ess) if ess else set()
    if len(union) == 1:
        return domain[next(iter(union))]
    for s, q in enumerate(sorts):
        cq = {domain.index(q[0]), domain.index(q[1])}
        if union <= cq:
            args = [0] * f.arity
            args[domain.index(q[1])] = 1
            return q[f.components[s](*args)]
    return domain[0]


def inverse_construction(signature: SortedSignature, relations: Sequence[TypedRelation]):
    """A finite structure whose translation gives back the relations.

    Sort i becomes the elements 2i+1, 2i+2 of a disjoint union; each sort is
    also added as a unary relation so that it appears as a projection.  Every
    element is pinned by a singleton relation, so the structure is its own
    idempotent core; translation drops those again.
    """
    if not signature.is_boolean():
        raise InputError("inverse construction expects Boolean sorts")
    k = signature.k
    elem = [(2 * i + 1, 2 * i + 2) for i in range(k)]
    rels = [frozenset({(elem[i][0],), (elem[i][1],)}) for i in range(k)]
    rels += [frozenset({(v,)}) for pair in elem for v in pair]
    for r in relations:
        rels.append(frozenset(tuple(elem[s][v] for s, v in zip(r.type, t)) for t in r.tuples))
    return FiniteStructure(tuple(range(1, 2 * k + 1)), tuple(rels))


# end to end


def finite_core(structure: FiniteStructure, budget):
    sig = SortedSignature((structure.domain,))
    rels = [TypedRelation.make((0,) * len(next(iter(r))), r) for r in structure.relations if r]
    return idempotent_core(sig, rels, budget=budget)


def _verify_restriction(core, tr: Translation, log, limit: int):
    """Restrict every binary polymorphism of the core and check it lands in Pol(Gamma)."""
    carrier = core.signature.sorts[0]
    q = len(carrier)
    if q ** (q * q) > limit:
        log.append(f"restriction: binary polymorphisms not enumerated ({q}^{q * q} candidates)")
        return
    pols = pol_enumerate(core.signature, core.relations, 2, idempotent_only=True, budget=None)
    images = set()
    for op in pols:
        img = restrict_polymorphism(op.components[0], tr.sorts)
        for r in tr.relations:
            if not preserves(img, r):
                raise VerificationError("a restricted polymorphism breaks a translated relation")
        # restriction commutes with the minors of arity 2 -> 1, 2
        for alpha, m in (((1, 0), 2), ((0, 0), 1), ((0, 1), 2)):
            lhs = restrict_polymorphism(op.components[0].minor(alpha, m), tr.sorts)
            if lhs != img.minor(alpha, m):
                raise VerificationError("restriction does not commute with a minor")
        images.add(tuple(c.bits for c in img.components))
    log.append(f"restriction: {len(pols)} binary polymorphisms of the core restrict into Pol(Gamma) "
               f"({len(images)} distinct images)")


def classify_finite(structure: FiniteStructure, *, budget: int | None = None, cap: int = 4,
                    restriction_limit: int = 10 ** 5) -> ClassificationReport:
    rels = [r for r in structure.relations if r]
    if not small_projections_check(rels):
        raise InputError("relations must have small projections")
    dig = digest(structure.to_json())
    core = finite_core(structure, budget=10 ** 6 if budget is None else budget)
    if core == TRIVIAL:
        rep = ClassificationReport(dig, CoreId("T"),
                                   log=["idempotent core is trivial: a constant unary polymorphism exists"],
                                   verified=True)
        rep.extra["sortDictionary"] = []
        return rep
    carrier = core.signature.sorts[0]
    core_rels = [frozenset(r.tuples) for r in core.relations]
    tr = translate_small_projections(core_rels)
    log = [f"idempotent core on elements {list(carrier)}"]
    sig, grels, sorts = tr.signature, list(tr.relations), tr.sorts
    if not sorts:
        # every projection is a single element: all idempotent operations
        sorts = ((carrier[0], carrier[1]),)
        sig = SortedSignature.boolean(1)
        grels = [TypedRelation((0,), frozenset({(0,)})), TypedRelation((0,), frozenset({(1,)}))]
        tr = Translation(sig, tuple(grels), sorts)
        log.append(f"no two-element projection: classified as all idempotent operations on {list(sorts[0])}")
        degenerate = True
    else:
        degenerate = False
    rep = classify_relations(grels, sig, budget=budget, cap=cap)
    if not degenerate:
        try:
            _verify_restriction(core, tr, log, restriction_limit)
        except BudgetExceeded:
            log.append("restriction: skipped (budget)")
    rep.input_digest = dig
    rep.log = log + rep.log
    rep.extra["sortDictionary"] = tr.sort_dictionary()
    return rep


def restriction_hom_on(pols: Sequence[MultiOp], sorts) -> list[MultiOp]:
    return [restrict_polymorphism(op.components[0], sorts) for op in pols]


def x_map_tables(M_rows: np.ndarray, sorts, domain) -> np.ndarray:
    """X on l-ary multisorted rows (one column per sort), l = |domain|."""
    l = len(domain)
    return np.array([domain.index(point_map_value(MultiOp(l, tuple(TruthTable(l, int(v)) for v in row)),
                                                   sorts, domain)) for row in M_rows], dtype=np.int64)
