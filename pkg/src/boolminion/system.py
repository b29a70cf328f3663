"""Order constraints between Boolean symbols and their vectorized solver.

A constraint relates two literals (a symbol or its dual) by one of
  'tri'  every a <= b gives lhs(a) <= rhs(b)
  'leq'  pointwise lhs <= rhs
  'eq'   lhs == rhs
Solutions are tuples of idempotent truth tables, one per symbol.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import bulk
from .boolfun import TruthTable, full_mask, is_idempotent, leq, triangle, dual
from .errors import BudgetExceeded, InputError

U64 = np.uint64
KINDS = ("tri", "leq", "eq")
DEFAULT_CHUNK = 1 << 21


class Literal(NamedTuple):
    sym: int
    dual: bool = False

    def __invert__(self) -> "Literal":
        return Literal(self.sym, not self.dual)

    def name(self, names: Sequence[str]) -> str:
        base = names[self.sym]
        return f"{base}^d" if self.dual else base


class Constraint(NamedTuple):
    kind: str
    lhs: Literal
    rhs: Literal

    def symbols(self) -> tuple[int, int]:
        return self.lhs.sym, self.rhs.sym

    def show(self, names: Sequence[str]) -> str:
        op = {"tri": "<|", "leq": "<=", "eq": "="}[self.kind]
        return f"{self.lhs.name(names)} {op} {self.rhs.name(names)}"


def make_constraint(kind: str, lhs, rhs) -> Constraint:
    if kind not in KINDS:
        raise InputError(f"unknown constraint kind {kind!r}")
    c = Constraint(kind, Literal(int(lhs[0]), bool(lhs[1])), Literal(int(rhs[0]), bool(rhs[1])))
    if c.kind == "eq" and c.rhs < c.lhs:
        c = Constraint("eq", c.rhs, c.lhs)
    return c


@dataclass(frozen=True)
class ConstraintSystem:
    k: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        for c in self.constraints:
            for lit in (c.lhs, c.rhs):
                if not 0 <= lit.sym < self.k:
                    raise InputError(f"symbol {lit.sym} out of range for {self.k} symbols")


# scalar checks


def _lit_table(tables: Sequence[TruthTable], lit: Literal) -> TruthTable:
    t = tables[lit.sym]
    return dual(t) if lit.dual else t


def holds(c: Constraint, tables: Sequence[TruthTable]) -> bool:
    a = _lit_table(tables, c.lhs)
    b = _lit_table(tables, c.rhs)
    if c.kind == "tri":
        return triangle(a, b)
    if c.kind == "leq":
        return leq(a, b)
    return a == b


def is_member(system: ConstraintSystem, tables: Sequence[TruthTable]) -> bool:
    if len(tables) != system.k:
        return False
    if len({t.arity for t in tables}) > 1:
        return False
    return all(is_idempotent(t) for t in tables) and all(holds(c, tables) for c in system.constraints)


# vectorized checks


def _lit_bulk(cols: Sequence[np.ndarray], lit: Literal, n: int) -> np.ndarray:
    v = cols[lit.sym]
    return bulk.dual(v, n) if lit.dual else v


def holds_bulk(c: Constraint, cols: Sequence[np.ndarray], n: int) -> np.ndarray:
    a = _lit_bulk(cols, c.lhs, n)
    b = _lit_bulk(cols, c.rhs, n)
    if c.kind == "tri":
        return (bulk.ucl(a, n) & ~b) == 0
    if c.kind == "leq":
        return (a & ~b) == 0
    return a == b


def member_mask(system: ConstraintSystem, rows: np.ndarray, n: int) -> np.ndarray:
    """Boolean mask: which rows (one table per symbol) are solutions."""
    rows = np.asarray(rows, dtype=np.uint64)
    cols = [rows[:, i] for i in range(system.k)]
    top = U64(1 << ((1 << n) - 1))
    ok = np.ones(len(rows), dtype=bool)
    for v in cols:
        ok &= ((v & U64(1)) == 0) & ((v & top) != 0)
    for c in system.constraints:
        ok &= holds_bulk(c, cols, n)
    return ok


# enumeration


def symbol_order(system: ConstraintSystem) -> list[int]:
    """Greedy order: most-constrained first, then most links to placed symbols."""
    degree = [0] * system.k
    links: dict[int, set[int]] = {i: set() for i in range(system.k)}
    for c in system.constraints:
        a, b = c.symbols()
        degree[a] += 1
        degree[b] += 1
        if a != b:
            links[a].add(b)
            links[b].add(a)
    order: list[int] = []
    left = set(range(system.k))
    while left:
        placed = set(order)
        best = min(left, key=lambda s: (-len(links[s] & placed), -degree[s], s))
        order.append(best)
        left.remove(best)
    return order


def _bounds(system, s, placed_cols, n, nrows):
    """Interval [lower, upper] for symbol s given the already placed columns."""
    full = U64(full_mask(n))
    lower = np.full(nrows, U64(1 << ((1 << n) - 1)), dtype=np.uint64)
    upper = np.full(nrows, full & ~U64(1), dtype=np.uint64)

    def bound(lit_s: Literal, low=None, up=None):
        # constrain the literal lit_s; translate to a bound on symbol s
        nonlocal lower, upper
        if lit_s.dual:
            low, up = (bulk.dual(up, n) if up is not None else None,
                       bulk.dual(low, n) if low is not None else None)
        if low is not None:
            lower = lower | low
        if up is not None:
            upper = upper & up

    for c in system.constraints:
        a, b = c.symbols()
        if a == s and b in placed_cols:
            other = placed_cols[b]
            r = bulk.dual(other, n) if c.rhs.dual else other
            if c.kind == "tri":
                bound(c.lhs, up=bulk.interior(r, n))
            elif c.kind == "leq":
                bound(c.lhs, up=r)
            else:
                bound(c.lhs, low=r, up=r)
        elif b == s and a in placed_cols:
            other = placed_cols[a]
            l_ = bulk.dual(other, n) if c.lhs.dual else other
            if c.kind == "tri":
                bound(c.rhs, low=bulk.ucl(l_, n))
            elif c.kind == "leq":
                bound(c.rhs, low=l_)
            else:
                bound(c.rhs, low=l_, up=l_)
    return lower, upper


def _self_filter(system, s, order_pos, rows, n):
    cons = [c for c in system.constraints if c.lhs.sym == s and c.rhs.sym == s]
    if not cons:
        return rows
    col = {s: rows[:, order_pos[s]]}
    ok = np.ones(len(rows), dtype=bool)
    for c in cons:
        ok &= holds_bulk(c, col, n)
    return rows[ok]


class _Counter:
    def __init__(self, budget):
        self.budget = budget
        self.total = 0

    def add(self, amount):
        self.total += amount
        if self.budget is not None and self.total > self.budget:
            raise BudgetExceeded(f"enumeration exceeded budget of {self.budget} rows")


def enumerate_chunks(system: ConstraintSystem, n: int, *, symmetric: bool = False,
                     budget: int | None = None, chunk: int = DEFAULT_CHUNK,
                     cap: int = 4) -> Iterator[np.ndarray]:
    """Yield arrays of solutions (rows of k tables, columns in symbol order).

    Full enumeration is allowed up to arity `cap`; `symmetric=True` restricts
    to symmetric 5-ary tables.
    """
    if symmetric:
        if n != 5:
            raise InputError("symmetric mode is for arity 5")
    elif not 1 <= n <= cap:
        raise InputError(f"arity {n} outside 1..{cap} for full enumeration")
    order = symbol_order(system)
    width = 1 << n
    counter = _Counter(budget)
    cands = bulk.sym5_tables() if symmetric else None

    def extend(rows: np.ndarray, level: int):
        if level == len(order):
            yield rows
            return
        s = order[level]
        placed = {order[i]: rows[:, i] for i in range(level)}
        lower, upper = _bounds(system, s, placed, n, len(rows))
        if symmetric:
            fits = ((cands[None, :] & ~upper[:, None]) == 0) & ((lower[:, None] & ~cands[None, :]) == 0)
            counts = fits.sum(axis=1)
        else:
            ok = (lower & ~upper) == 0
            counts = np.where(ok, np.left_shift(np.int64(1), bulk.popcount(upper & ~lower).astype(np.int64)), 0)
        # split the parent rows so that each expansion stays under `chunk`
        start = 0
        nrows = len(rows)
        csum = np.cumsum(counts)
        while start < nrows:
            base = csum[start - 1] if start else 0
            stop = int(np.searchsorted(csum, base + chunk, side="right"))
            stop = max(stop, start + 1)
            stop = min(stop, nrows)
            part = rows[start:stop]
            counter.add(int(csum[stop - 1] - base))
            if symmetric:
                pr, ci = np.nonzero(fits[start:stop])
                vals = cands[ci]
            else:
                pr, vals = bulk.expand_intervals(lower[start:stop], upper[start:stop], width)
            if len(vals):
                new = np.empty((len(vals), level + 1), dtype=np.uint64)
                new[:, :level] = part[pr]
                new[:, level] = vals
                new = _self_filter(system, s, {s: level}, new, n)
                if len(new):
                    yield from extend(new, level + 1)
            start = stop

    inv = np.argsort(order)
    for rows in extend(np.zeros((1, 0), dtype=np.uint64), 0):
        yield rows[:, inv]


def enumerate_all(system: ConstraintSystem, n: int, **kw) -> np.ndarray:
    """All solutions at arity n, sorted lexicographically by symbol 0, 1, ..."""
    parts = list(enumerate_chunks(system, n, **kw))
    if not parts:
        return np.zeros((0, system.k), dtype=np.uint64)
    rows = np.concatenate(parts)
    return rows[bulk.lexsort_rows(rows)]


def count(system: ConstraintSystem, n: int, **kw) -> int:
    return sum(len(r) for r in enumerate_chunks(system, n, **kw))


def rows_to_tables(rows: np.ndarray, n: int) -> list[tuple[TruthTable, ...]]:
    return [tuple(TruthTable(n, int(v)) for v in row) for row in rows]


def bruteforce(system: ConstraintSystem, n: int) -> list[tuple[TruthTable, ...]]:
    """Oracle: product over idempotent tables, filtered by `is_member`."""
    from itertools import product
    from .boolfun import enumerate_idempotent
    if n == 5:
        from .boolfun import all_sym5_profiles, sym5_from_profile
        tables = [sym5_from_profile(p) for p in all_sym5_profiles()]
    else:
        tables = enumerate_idempotent(n, cap=4)
    return sorted(t for t in product(tables, repeat=system.k) if is_member(system, t))
