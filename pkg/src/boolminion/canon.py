"""The canonical minions T, A_k, B_k, C_k, D_k, B_inf, C_inf, D_inf.

Each non-trivial one is a constraint system over k Boolean sorts:
    A_k    h1 <| ... <| hk <= hk^d
    B_k    h1 <| ... <| hk <| hk^d
    C_k    h1 <| ... <| h(k-1) <= hk = hk^d,  h(k-1) <| h(k-1)^d
    D_k    h1 <| ... <| hk = hk^d
    B_inf  h <| h <| h^d
    C_inf  h1 <| h1 <| h2 = h2^d
    D_inf  h <| h = h^d
T is the one-element minion.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import system
from .boolfun import X2, TruthTable, sym5_from_profile
from .errors import InputError
from .multisorted import MultiOp
from .system import Constraint, ConstraintSystem, Literal

TAGS = ("T", "A", "B", "C", "D", "Binf", "Cinf", "Dinf")
FINITE = ("A", "B", "C", "D")
INFINITE = ("Binf", "Cinf", "Dinf")


@dataclass(frozen=True)
class CoreId:
    tag: str
    k: int | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise InputError(f"unknown core tag {self.tag!r}")
        if self.tag in FINITE:
            if self.k is None or self.k < 1:
                raise InputError(f"{self.tag} needs an index k >= 1")
            if self.tag == "C" and self.k == 1:
                object.__setattr__(self, "tag", "D")    # C_1 is D_1
        elif self.k is not None:
            raise InputError(f"{self.tag} takes no index")

    def __str__(self):
        return self.tag + (str(self.k) if self.k is not None else "")

    @classmethod
    def parse(cls, s: str) -> "CoreId":
        s = s.strip()
        if s in ("Ainf", "A_inf"):
            s = "Binf"
        s = s.replace("_", "")
        m = re.fullmatch(r"([ABCD])(\d+)", s)
        if m:
            return cls(m.group(1), int(m.group(2)))
        if s in ("T", "Binf", "Cinf", "Dinf"):
            return cls(s)
        raise InputError(f"cannot parse core id {s!r}")

    @property
    def sorts(self) -> int:
        if self.tag == "T":
            return 0
        if self.tag in FINITE:
            return self.k
        return 2 if self.tag == "Cinf" else 1

    @property
    def family(self) -> str:
        if self.tag == "T":
            return "T"
        return "AB" if self.tag in ("A", "B", "Binf") else "CD"


T = CoreId("T")
BINF, CINF, DINF = CoreId("Binf"), CoreId("Cinf"), CoreId("Dinf")


def A(k): return CoreId("A", k)
def B(k): return CoreId("B", k)
def C(k): return CoreId("C", k)
def D(k): return CoreId("D", k)


def _tri(i, di, j, dj):
    return Constraint("tri", Literal(i, di), Literal(j, dj))


def _leq(i, di, j, dj):
    return Constraint("leq", Literal(i, di), Literal(j, dj))


def _eq(i, di, j, dj):
    return system.make_constraint("eq", (i, di), (j, dj))


def canonical_system(core: CoreId) -> ConstraintSystem:
    if core.tag == "T":
        raise InputError("T has no constraint system")
    k = core.sorts
    chain = [_tri(i, False, i + 1, False) for i in range(k - 1)]
    last = k - 1
    if core.tag == "A":
        cons = chain + [_leq(last, False, last, True)]
    elif core.tag == "B":
        cons = chain + [_tri(last, False, last, True)]
    elif core.tag == "C":
        cons = [_tri(i, False, i + 1, False) for i in range(k - 2)]
        cons += [_leq(k - 2, False, last, False), _eq(last, False, last, True),
                 _tri(k - 2, False, k - 2, True)]
    elif core.tag == "D":
        cons = chain + [_eq(last, False, last, True)]
    elif core.tag == "Binf":
        cons = [_tri(0, False, 0, False), _tri(0, False, 0, True)]
    elif core.tag == "Cinf":
        cons = [_tri(0, False, 0, False), _tri(0, False, 1, False), _eq(1, False, 1, True)]
    else:
        cons = [_tri(0, False, 0, False), _eq(0, False, 0, True)]
    return ConstraintSystem(k, tuple(cons))


def membership(core: CoreId, op) -> bool:
    """Is the multisorted operation (MultiOp or tuple of TruthTables) in the core?"""
    comps = op.components if isinstance(op, MultiOp) else tuple(op)
    if core.tag == "T":
        raise InputError("T is not a function minion")
    return system.is_member(canonical_system(core), comps)


def core_enumerate(core: CoreId, n: int, *, budget: int | None = None, cap: int = 4) -> np.ndarray:
    """Members at arity n as rows of tables; arity 5 gives the symmetric members."""
    return system.enumerate_all(canonical_system(core), n, symmetric=(n == 5), budget=budget, cap=cap)


def binary_part(core: CoreId) -> list[tuple[TruthTable, ...]]:
    return system.rows_to_tables(core_enumerate(core, 2), 2)


# chain operations


def sym_op(profiles: Sequence[Sequence[int]]) -> MultiOp:
    return MultiOp(5, tuple(sym5_from_profile(p) for p in profiles))


ZERO = (0, 0, 0, 0)


def t_op(i: int, k: int) -> MultiOp:
    """t^i for 1 <= i <= k."""
    cols = []
    for c in range(1, k + 1):
        cols.append(ZERO if c < i else (0, 0, 1, 0) if c == i else (0, 0, 1, 1))
    return sym_op(cols)


def u_op(k: int) -> MultiOp:
    cols = [ZERO] * (k - 2) + [(0, 0, 1, 0), (1, 0, 1, 0)]
    return sym_op(cols[-k:])


def v_op(k: int) -> MultiOp:
    return sym_op([ZERO] * (k - 1) + [(1, 0, 1, 0)])


def w_op(k: int) -> MultiOp:
    return sym_op([ZERO] * (k - 1) + [(0, 1, 0, 1)])


def cinf_ops() -> tuple[MultiOp, MultiOp]:
    return sym_op([ZERO, (0, 1, 0, 1)]), sym_op([ZERO, (1, 0, 1, 0)])


def chain_ops(core: CoreId) -> dict[str, object]:
    """Named chain tuples whose identities pin down the binary part."""
    if core.tag in ("A", "B"):
        k = core.k
        return {"t": [t_op(i, k) for i in range(1, k + 1)]}
    if core.tag in ("C", "D"):
        k = core.k
        ts = [t_op(i, k) for i in range(1, k)]
        out = {"tv": ts + [v_op(k)]}
        if k >= 2:
            out["tuw"] = ts[:-1] + [u_op(k), w_op(k)]
        return out
    if core.tag == "Cinf":
        t, t2 = cinf_ops()
        return {"t": [t], "t'": [t2]}
    return {}


# identities


class Identity(NamedTuple):
    """lhs_op(lhs_word) = rhs_op(rhs_word); rhs_op None means the variable rhs_word[0]."""
    lhs_op: int
    lhs_word: tuple[int, ...]
    rhs_op: int | None
    rhs_word: tuple[int, ...]
    nvars: int


def _w(s: str) -> tuple[int, ...]:
    return tuple("xy".index(ch) for ch in s)


def identity_suite(name: str, k: int) -> list[Identity]:
    """Identities over operation symbols 0..k-1 (5-ary)."""
    if name == "Chain":
        out = [Identity(0, _w("xxxyy"), None, (0,), 2)]
        out += [Identity(i + 1, _w("xxxyy"), i, _w("xxxxy"), 2) for i in range(k - 1)]
        return out
    if name == "AB":
        return [Identity(k - 1, _w("xxxxy"), k - 1, _w("yyyyx"), 2)]
    if name == "CD":
        return [Identity(k - 1, _w("xxxxy"), k - 1, _w("xxyyy"), 2)]
    if name == "Sym":
        out = []
        for i in range(k):
            for j in range(4):
                perm = list(range(5))
                perm[j], perm[j + 1] = perm[j + 1], perm[j]
                out.append(Identity(i, tuple(range(5)), i, tuple(perm), 5))
        return out
    raise InputError(f"unknown identity suite {name!r}")


def _side(ops, op_index, word, nvars):
    if op_index is None:
        sorts = len(ops[0].components)
        from .boolfun import projection
        return tuple(projection(nvars, word[0]) for _ in range(sorts))
    return ops[op_index].minor(word, nvars).components


def failed_identities(ops: Sequence[MultiOp], identities: Sequence[Identity]) -> list[Identity]:
    return [e for e in identities
            if _side(ops, e.lhs_op, e.lhs_word, e.nvars) != _side(ops, e.rhs_op, e.rhs_word, e.nvars)]


def check_identities(ops: Sequence[MultiOp], identities: Sequence[Identity]) -> bool:
    return not failed_identities(ops, identities)


def forcing_solutions(core: CoreId, ending: str) -> list[tuple[MultiOp, ...]]:
    """All k-tuples of symmetric 5-ary members satisfying (Chain) and the ending suite."""
    k = core.sorts
    rows = core_enumerate(core, 5)
    members = [MultiOp(5, tuple(TruthTable(5, int(v)) for v in r)) for r in rows]
    xs = tuple(X2 for _ in range(k))
    by_head: dict[tuple, list[MultiOp]] = {}
    for m in members:
        by_head.setdefault(m.minor(_w("xxxyy"), 2).components, []).append(m)
    end = identity_suite(ending, k)
    out = []

    def rec(prefix):
        if len(prefix) == k:
            last = [None] * (k - 1) + [prefix[-1]]
            if check_identities(last, end):
                out.append(tuple(prefix))
            return
        want = xs if not prefix else prefix[-1].minor(_w("xxxxy"), 2).components
        for m in by_head.get(want, []):
            rec(prefix + [m])

    rec([])
    return out


# poset


def _ab_pos(c: CoreId):
    if c.tag == "Binf":
        return float("inf")
    return 2 * c.k - 1 if c.tag == "A" else 2 * c.k


def _cd_pos(c: CoreId):
    if c.tag == "Cinf":
        return float("inf")
    if c.tag == "Dinf":
        return float("inf"), 1
    return 2 * c.k - 1 if c.tag == "D" else 2 * c.k - 2


def _cd_key(c: CoreId):
    p = _cd_pos(c)
    return p if isinstance(p, tuple) else (p, 0)


def poset_leq(a: CoreId, b: CoreId) -> bool:
    """a <= b: a minion homomorphism from a to b exists."""
    if b.tag == "T":
        return True
    if a.tag == "T":
        return False
    if a.family == b.family:
        if a.family == "AB":
            return _ab_pos(a) >= _ab_pos(b)
        return _cd_key(a) >= _cd_key(b)
    if a.family == "AB":
        return False
    # a in the CD chain, b in the AB chain
    if a.tag in ("Cinf", "Dinf"):
        return True
    if b.tag == "Binf":
        return False
    j = b.k
    if a.tag == "D":
        return j <= a.k if b.tag == "A" else j <= a.k - 1
    return j <= a.k - 1


def all_cores(max_k: int) -> list[CoreId]:
    out = [T]
    out += [A(k) for k in range(1, max_k + 1)]
    out += [B(k) for k in range(1, max_k + 1)]
    out += [C(k) for k in range(2, max_k + 1)]
    out += [D(k) for k in range(1, max_k + 1)]
    out += [BINF, CINF, DINF]
    return out


def hasse_covers(nodes: Sequence[CoreId]) -> list[tuple[CoreId, CoreId]]:
    """Pairs (a, b) with a < b and nothing strictly between them in `nodes`."""
    out = []
    for a in nodes:
        for b in nodes:
            if a == b or not poset_leq(a, b) or poset_leq(b, a):
                continue
            if any(c not in (a, b) and poset_leq(a, c) and poset_leq(c, b)
                   and not poset_leq(c, a) and not poset_leq(b, c) for c in nodes):
                continue
            out.append((a, b))
    return out


def poset_dot(max_k: int) -> str:
    nodes = all_cores(max_k)
    lines = ["digraph minions {", "  rankdir=BT;"]
    for c in nodes:
        lines.append(f'  "{c}";')
    for a, b in hasse_covers(nodes):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# explicit homomorphisms between comparable cores


@dataclass(frozen=True)
class SelectionHom:
    """Sends (h_1..h_k) to (h_s(1), ..., h_s(m)); target T when selection is None."""
    source: CoreId
    target: CoreId
    selection: tuple[int, ...] | None

    def apply(self, comps: Sequence):
        if self.selection is None:
            return ()
        return tuple(comps[s] for s in self.selection)

    def apply_rows(self, rows: np.ndarray) -> np.ndarray:
        return rows[:, list(self.selection)]


def generator_edges(max_k: int) -> list[SelectionHom]:
    """The generating homomorphisms of the ladder, for indices up to max_k."""
    e = [SelectionHom(DINF, CINF, (0, 0)), SelectionHom(CINF, BINF, (0,))]
    for k in range(1, max_k + 1):
        ident = tuple(range(k))
        e.append(SelectionHom(BINF, B(k), (0,) * k))
        e.append(SelectionHom(B(k), A(k), ident))
        e.append(SelectionHom(D(k), A(k), ident))
        if k >= 2:
            e.append(SelectionHom(CINF, C(k), (0,) * (k - 1) + (1,)))
            e.append(SelectionHom(D(k), C(k), ident))
        if k + 1 <= max_k:
            e.append(SelectionHom(A(k + 1), B(k), ident))
            e.append(SelectionHom(C(k + 1), D(k), tuple(range(k - 1)) + (k,)))
            e.append(SelectionHom(C(k + 1), B(k), ident))
    return e


def _index(c: CoreId) -> int:
    return c.k if c.k is not None else 0


def table1_hom(a: CoreId, b: CoreId) -> SelectionHom | None:
    """A composite of generating homomorphisms from a to b, or None if a is not below b."""
    if not poset_leq(a, b):
        return None
    if b.tag == "T":
        return SelectionHom(a, b, None)
    if a == b:
        return SelectionHom(a, b, tuple(range(a.sorts)))
    max_k = max(_index(a), _index(b)) + 1
    edges = generator_edges(max_k)
    out: dict[CoreId, list[SelectionHom]] = {}
    for e in edges:
        out.setdefault(e.source, []).append(e)
    prev: dict[CoreId, SelectionHom | None] = {a: None}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == b:
            break
        for e in out.get(v, []):
            if e.target not in prev:
                prev[e.target] = e
                queue.append(e.target)
    if b not in prev:
        return None
    path = []
    v = b
    while prev[v] is not None:
        path.append(prev[v])
        v = prev[v].source
    path.reverse()
    sel = tuple(range(a.sorts))
    for e in path:
        sel = tuple(sel[s] for s in e.selection)
    return SelectionHom(a, b, sel)
