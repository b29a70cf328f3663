"""Multisorted finite structures, their polymorphisms and idempotent cores.

Sorts are 0-based.  A carrier is a sorted tuple of ints; Boolean sorts use
(0, 1) and their operations are boolfun.TruthTable.  Other carriers use
FiniteOp, whose table is indexed in the same little-endian mixed radix.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .boolfun import TruthTable
from .errors import BudgetExceeded, InputError

BOOL = (0, 1)


@dataclass(frozen=True)
class FiniteOp:
    carrier: tuple[int, ...]
    arity: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.carrier) ** self.arity:
            raise InputError("table length does not match carrier and arity")
        if any(v not in self.carrier for v in self.values):
            raise InputError("table value outside carrier")

    def _index(self, args: Sequence[int]) -> int:
        q = len(self.carrier)
        idx = 0
        for j in reversed(range(len(args))):
            idx = idx * q + self.carrier.index(args[j])
        return idx

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ValueError("wrong number of arguments")
        return self.values[self._index(args)]

    def minor(self, alpha: Sequence[int], m: int) -> "FiniteOp":
        vals = []
        for c in product(self.carrier, repeat=m):
            c = c[::-1]  # little-endian: first coordinate varies fastest
            vals.append(self(*[c[a] for a in alpha]))
        return FiniteOp(self.carrier, m, tuple(vals))

    def inputs(self):
        """All argument tuples in table order."""
        for c in product(self.carrier, repeat=self.arity):
            yield c[::-1]


def op_on(carrier: Sequence[int], arity: int, fn) -> FiniteOp | TruthTable:
    """Build the table of fn on the given carrier."""
    carrier = tuple(carrier)
    if carrier == BOOL:
        return TruthTable.from_values(arity, [fn(*[(i >> j) & 1 for j in range(arity)])
                                              for i in range(1 << arity)])
    vals = []
    for c in product(carrier, repeat=arity):
        vals.append(fn(*c[::-1]))
    return FiniteOp(carrier, arity, tuple(vals))


def all_inputs(carrier: Sequence[int], n: int):
    for c in product(carrier, repeat=n):
        yield c[::-1]


@dataclass(frozen=True)
class SortedSignature:
    sorts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for s in self.sorts:
            if not s or list(s) != sorted(set(s)):
                raise InputError("carriers must be nonempty sorted tuples without repeats")

    @classmethod
    def boolean(cls, k: int) -> "SortedSignature":
        return cls(tuple(BOOL for _ in range(k)))

    @property
    def k(self) -> int:
        return len(self.sorts)

    def is_boolean(self) -> bool:
        return all(s == BOOL for s in self.sorts)


@dataclass(frozen=True)
class TypedRelation:
    type: tuple[int, ...]
    tuples: frozenset

    @classmethod
    def make(cls, type_, tuples) -> "TypedRelation":
        type_ = tuple(int(t) for t in type_)
        tups = frozenset(tuple(int(v) for v in t) for t in tuples)
        for t in tups:
            if len(t) != len(type_):
                raise InputError("tuple length differs from relation type")
        return cls(type_, tups)

    @property
    def arity(self) -> int:
        return len(self.type)

    def validate(self, sig: SortedSignature):
        for s in self.type:
            if not 0 <= s < sig.k:
                raise InputError(f"sort {s} out of range")
        for t in self.tuples:
            for s, v in zip(self.type, t):
                if v not in sig.sorts[s]:
                    raise InputError(f"value {v} not in carrier of sort {s}")

    def sorted_tuples(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples)


@dataclass(frozen=True)
class MultiOp:
    arity: int
    components: tuple

    def __post_init__(self):
        for c in self.components:
            if c.arity != self.arity:
                raise InputError("component arity mismatch")

    def minor(self, alpha: Sequence[int], m: int) -> "MultiOp":
        return MultiOp(m, tuple(c.minor(alpha, m) for c in self.components))


def preserves(op: MultiOp, rel: TypedRelation) -> bool:
    """Does op applied coordinatewise to any n tuples of rel stay in rel?"""
    rows = list(rel.tuples)
    comps = [op.components[s] for s in rel.type]
    for pick in product(rows, repeat=op.arity):
        out = tuple(comps[p](*[r[p] for r in pick]) for p in range(rel.arity))
        if out not in rel.tuples:
            return False
    return True


def _component_candidates(carrier, n, idempotent):
    """All n-ary tables on a carrier, in canonical order."""
    if carrier == BOOL:
        size = 1 << n
        for bits in range(1 << size):
            t = TruthTable(n, bits)
            if idempotent and not (t.at(0) == 0 and t.at(size - 1) == 1):
                continue
            yield t
        return
    inputs = list(all_inputs(carrier, n))
    diag = {i: c[0] for i, c in enumerate(inputs) if len(set(c)) == 1}
    for vals in product(carrier, repeat=len(inputs)):
        if idempotent and any(vals[i] != v for i, v in diag.items()):
            continue
        yield FiniteOp(carrier, n, vals)


def _sort_order(sig: SortedSignature, relations: Sequence[TypedRelation]) -> list[int]:
    """Visit sorts along the relation graph, breadth first, lowest index first."""
    adj: dict[int, set[int]] = {i: set() for i in range(sig.k)}
    for r in relations:
        for a in r.type:
            adj[a].update(r.type)
    order: list[int] = []
    seen: set[int] = set()
    for root in range(sig.k):
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(adj[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def pol_enumerate(sig: SortedSignature, relations: Sequence[TypedRelation], n: int,
                  idempotent_only: bool = False, budget: int | None = 10 ** 6) -> list[MultiOp]:
    """All n-ary polymorphisms, sorted by component tables.

    `budget` bounds the number of candidate component tables examined.
    """
    for r in relations:
        r.validate(sig)
    order = _sort_order(sig, relations)
    pos = {s: i for i, s in enumerate(order)}
    # relations become checkable once their last sort (in visit order) is placed
    due: dict[int, list[TypedRelation]] = {s: [] for s in order}
    for r in relations:
        if r.type:
            due[max(r.type, key=lambda s: pos[s])].append(r)
    cand_lists: dict[tuple, list] = {}
    spent = 0
    for s in order:
        key = (sig.sorts[s], n, idempotent_only)
        if key not in cand_lists:
            q = len(sig.sorts[s])
            size = q ** (q ** n)
            spent += size
            if budget is not None and spent > budget:
                raise BudgetExceeded(f"{size} candidate tables for sort {s} exceed budget {budget}")
            cand_lists[key] = list(_component_candidates(sig.sorts[s], n, idempotent_only))
    results: list[tuple] = []
    chosen: dict[int, object] = {}
    placeholder = TruthTable(n, 0)

    def rec(level: int):
        if level == len(order):
            results.append(tuple(chosen[i] for i in range(sig.k)))
            return
        s = order[level]
        for t in cand_lists[(sig.sorts[s], n, idempotent_only)]:
            chosen[s] = t
            comps = tuple(chosen.get(i, placeholder) for i in range(sig.k))
            op = MultiOp(n, comps)
            if all(preserves(op, r) for r in due[s]):
                rec(level + 1)
        chosen.pop(s, None)

    rec(0)
    results.sort(key=lambda comps: [_op_key(c) for c in comps])
    return [MultiOp(n, comps) for comps in results]


def _op_key(c):
    return c.bits if isinstance(c, TruthTable) else c.values


# idempotent cores


class TrivialT:
    """Marker for a structure whose polymorphism minion is trivial."""

    def __repr__(self):
        return "TrivialT"

    def __eq__(self, other):
        return isinstance(other, TrivialT)

    def __hash__(self):
        return hash("TrivialT")


TRIVIAL = TrivialT()


@dataclass(frozen=True)
class CoreResult:
    signature: SortedSignature
    relations: tuple[TypedRelation, ...]
    kept_sorts: tuple[int, ...]          # original index of each surviving sort
    retraction: tuple[dict, ...]        # per original sort: value -> value


def _unary_polymorphisms(sig, relations, budget):
    ops = pol_enumerate(sig, relations, 1, idempotent_only=False, budget=budget)
    maps = []
    for op in ops:
        m = []
        for s, carrier in enumerate(sig.sorts):
            c = op.components[s]
            m.append({v: c(v) for v in carrier})
        maps.append(m)
    return maps


def _compose(u, v):
    """u after v, sortwise."""
    return [{a: u[s][v[s][a]] for a in v[s]} for s in range(len(u))]


def idempotent_core(sig: SortedSignature, relations: Sequence[TypedRelation],
                    budget: int | None = 10 ** 6) -> CoreResult | TrivialT:
    """Retract onto a minimal image and adjoin all singleton unary relations.

    Sorts whose image is a single element are dropped, together with the
    coordinates of that sort in every relation.
    """
    relations = [r for r in relations if r.tuples]
    for r in relations:
        r.validate(sig)
    if sig.k == 0:
        return TRIVIAL
    maps = _unary_polymorphisms(sig, relations, budget)

    def cost(m):
        return sum(len(set(ms.values())) for ms in m)

    best = min(range(len(maps)), key=lambda i: (cost(maps[i]), i))
    u = maps[best]
    e = u
    while _compose(e, e) != e:
        e = _compose(e, u)
    images = [tuple(sorted(set(ms.values()))) for ms in e]
    kept = [s for s in range(sig.k) if len(images[s]) > 1]
    if not kept:
        return TRIVIAL
    new_index = {s: i for i, s in enumerate(kept)}
    new_sig = SortedSignature(tuple(images[s] for s in kept))
    out: list[TypedRelation] = []
    seen = set()
    for r in relations:
        keep_pos = [p for p, s in enumerate(r.type) if s in new_index]
        if not keep_pos:
            continue
        typ = tuple(new_index[r.type[p]] for p in keep_pos)
        tups = frozenset(tuple(e[r.type[p]][t[p]] for p in keep_pos) for t in r.tuples)
        rel = TypedRelation(typ, tups)
        if rel not in seen:
            seen.add(rel)
            out.append(rel)
    for i, carrier in enumerate(new_sig.sorts):
        for a in carrier:
            rel = TypedRelation((i,), frozenset({(a,)}))
            if rel not in seen:
                seen.add(rel)
                out.append(rel)
    return CoreResult(new_sig, tuple(out), tuple(kept), tuple(e))


# JSON


def structure_from_json(obj: dict) -> tuple[SortedSignature, list[TypedRelation]]:
    try:
        sorts = tuple(tuple(sorted(int(v) for v in s)) for s in obj["sorts"])
        sig = SortedSignature(sorts)
        rels = []
        for r in obj.get("relations", []):
            # JSON sort indices are 1-based
            rels.append(TypedRelation.make([int(t) - 1 for t in r["type"]], r["tuples"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad structure JSON: {exc}") from exc
    for r in rels:
        r.validate(sig)
    return sig, rels


def structure_to_json(sig: SortedSignature, relations: Sequence[TypedRelation]) -> dict:
    return {
        "sorts": [list(s) for s in sig.sorts],
        "relations": [{"type": [t + 1 for t in r.type], "tuples": [list(t) for t in r.sorted_tuples()]}
                      for r in relations],
    }
