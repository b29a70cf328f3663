"""Truncated minions: homomorphism search, endomorphisms and cores.

A truncated minion keeps its elements of arity 1..cap (plus, optionally, a
set of symmetric 5-ary witness elements) together with the minor maps
between them.  Every element also carries its *binary signature*: for each
a in {0,1}^n the index (among the binary elements) of the minor f(c) with
c_j = x if a_j = 0 and y otherwise.

For Boolean function minions an element is determined by its signature, so
a map on binary elements extends to at most one homomorphism: the image of
f is the target element whose signature is xi2 applied to the signature of
f.  hom_search backtracks over xi2 and checks that these images exist.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from . import bulk, system
from .errors import BudgetExceeded, ContractViolation, InputError
from .system import ConstraintSystem

U64 = np.uint64
WITNESS_ARITY = 5


# minor maps


def generator_minors(cap: int) -> list[tuple[int, tuple[int, ...], int]]:
    """(n, alpha, m) for adjacent swaps, merging the last two coordinates and adding a dummy.

    Every map [n] -> [m] with n, m <= cap factors through these without
    leaving arities <= cap.
    """
    out = []
    for n in range(1, cap + 1):
        for j in range(n - 1):
            alpha = list(range(n))
            alpha[j], alpha[j + 1] = alpha[j + 1], alpha[j]
            out.append((n, tuple(alpha), n))
        if n >= 2:
            out.append((n, tuple(range(n - 1)) + (n - 2,), n - 1))
        if n + 1 <= cap:
            out.append((n, tuple(range(n)), n + 1))
    return out


def all_minors(cap: int) -> list[tuple[int, tuple[int, ...], int]]:
    return [(n, alpha, m) for n in range(1, cap + 1) for m in range(1, cap + 1)
            for alpha in product(range(m), repeat=n)]


def _signature_alphas(n: int) -> list[tuple[int, ...]]:
    return [tuple((a >> j) & 1 for j in range(n)) for a in range(1 << n)]


# minions


class TruncatedMinion:
    """Elements of arity 1..cap as index ranges, with minor maps and signatures."""

    cap: int
    sizes: dict[int, int]
    sig: dict[int, np.ndarray]
    witness_sig: np.ndarray | None
    name: str

    def minor(self, n: int, alpha: Sequence[int], m: int) -> np.ndarray:
        """Index in arity m of the alpha-minor of every arity-n element."""
        raise NotImplementedError

    def witness_minor(self, alpha: Sequence[int], m: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def has_witnesses(self) -> bool:
        return self.witness_sig is not None

    def size_tuple(self) -> tuple[int, ...]:
        return tuple(self.sizes[n] for n in range(1, self.cap + 1))

    def swap(self) -> np.ndarray:
        return self.sig[2][:, 1]

    def _sig_index(self, n: int) -> bulk.RowIndex:
        cache = self.__dict__.setdefault("_sig_cache", {})
        if n not in cache:
            cache[n] = bulk.RowIndex(self.sig[n].astype(np.uint64))
        return cache[n]

    def lookup_signatures(self, n: int, sigs: np.ndarray) -> np.ndarray:
        return self._sig_index(n).lookup(sigs)

    def lookup_witness_signatures(self, sigs: np.ndarray) -> np.ndarray:
        cache = self.__dict__.setdefault("_sig_cache", {})
        if "w" not in cache:
            cache["w"] = bulk.RowIndex(self.witness_sig.astype(np.uint64))
        return cache["w"].lookup(sigs)

    def to_json(self) -> dict:
        out = {"name": self.name, "cap": self.cap,
               "sizes": [self.sizes[n] for n in range(1, self.cap + 1)],
               "minors": []}
        for n, alpha, m in generator_minors(self.cap):
            out["minors"].append({"from": n, "alpha": [a + 1 for a in alpha], "to": m,
                                  "map": [int(v) for v in self.minor(n, alpha, m)]})
        return out


class OnePointMinion(TruncatedMinion):
    """One element in every arity, e.g. the trivial minion T."""

    def __init__(self, cap: int, name: str = "T", witnesses: bool = True):
        self.cap = cap
        self.name = name
        self.sizes = {n: 1 for n in range(1, cap + 1)}
        self.sig = {n: np.zeros((1, 1 << n), dtype=np.int64) for n in range(1, cap + 1)}
        self.witness_sig = np.zeros((1, 1 << WITNESS_ARITY), dtype=np.int64) if witnesses else None

    def minor(self, n, alpha, m):
        return np.zeros(1, dtype=np.int64)

    def witness_minor(self, alpha, m):
        return np.zeros(1, dtype=np.int64)


def _codes(rows: np.ndarray, n: int, a: int) -> np.ndarray:
    """Binary-minor code of every row for the collapse pattern a."""
    full = (1 << n) - 1
    one = U64(1)
    out = np.zeros(len(rows), dtype=np.uint64)
    for s in range(rows.shape[1]):
        col = rows[:, s]
        code = ((col >> U64(0)) & one) | (((col >> U64(full ^ a)) & one) << U64(1)) \
            | (((col >> U64(a)) & one) << U64(2)) | (((col >> U64(full)) & one) << U64(3))
        out |= code << U64(4 * s)
    return out


class FunctionMinion(TruncatedMinion):
    """A Boolean multisorted function minion given by its tables per arity.

    rows[n] has one row per element and one column per sort; rows are kept
    in the given order, which fixes element identities.
    """

    def __init__(self, rows: dict[int, np.ndarray], k: int, *, witness_rows: np.ndarray | None = None,
                 name: str = "", check: bool = True):
        self.cap = max(rows)
        if sorted(rows) != list(range(1, self.cap + 1)):
            raise InputError("rows must be given for every arity 1..cap")
        if not 2 <= self.cap <= WITNESS_ARITY:
            raise InputError("cap must lie in 2..5")
        self.k = k
        self.name = name
        self.rows = {n: np.ascontiguousarray(r, dtype=np.uint64).reshape(-1, k) for n, r in rows.items()}
        self.witness_rows = None if witness_rows is None else \
            np.ascontiguousarray(witness_rows, dtype=np.uint64).reshape(-1, k)
        for n, r in self.rows.items():
            if len(r) == 0:
                raise ContractViolation(f"no elements of arity {n}")
        self.sizes = {n: len(r) for n, r in self.rows.items()}
        self._index: dict[int, bulk.RowIndex] = {}
        self._minor_cache: dict = {}
        codes2 = _codes(self.rows[2], 2, 0b10)
        self._code_order = np.argsort(codes2, kind="stable")
        self._code_sorted = codes2[self._code_order]
        self.sig = {n: self._signature(r, n) for n, r in self.rows.items()}
        self.witness_sig = None if self.witness_rows is None else self._signature(self.witness_rows, WITNESS_ARITY)
        if check:
            self.check_closure()

    def _binary_index(self, codes: np.ndarray) -> np.ndarray:
        pos = np.minimum(np.searchsorted(self._code_sorted, codes), len(self._code_sorted) - 1)
        hit = self._code_sorted[pos] == codes
        return np.where(hit, self._code_order[pos], -1)

    def _signature(self, rows: np.ndarray, n: int) -> np.ndarray:
        out = np.empty((len(rows), 1 << n), dtype=np.int64)
        for a in range(1 << n):
            out[:, a] = self._binary_index(_codes(rows, n, a))
        if (out < 0).any():
            bad = int(np.nonzero((out < 0).any(axis=1))[0][0])
            raise ContractViolation(f"a binary minor of arity-{n} element {bad} is missing")
        return out

    def index(self, m: int) -> bulk.RowIndex:
        if m not in self._index:
            self._index[m] = bulk.RowIndex(self.rows[m])
        return self._index[m]

    def _minor_rows(self, rows, n, alpha, m):
        out = np.empty_like(rows)
        for s in range(self.k):
            out[:, s] = bulk.minor(rows[:, s], n, alpha, m)
        return out

    def minor(self, n, alpha, m):
        key = (n, tuple(alpha), m)
        if key not in self._minor_cache:
            idx = self.index(m).lookup(self._minor_rows(self.rows[n], n, alpha, m))
            if (idx < 0).any():
                raise ContractViolation(f"minor {tuple(a + 1 for a in alpha)} of an arity-{n} element leaves the set")
            self._minor_cache[key] = idx
        return self._minor_cache[key]

    def witness_minor(self, alpha, m):
        idx = self.index(m).lookup(self._minor_rows(self.witness_rows, WITNESS_ARITY, alpha, m))
        if (idx < 0).any():
            raise ContractViolation("a witness minor leaves the set")
        return idx

    def check_closure(self, exhaustive: bool = False):
        for n, alpha, m in (all_minors(self.cap) if exhaustive else generator_minors(self.cap)):
            self.minor(n, alpha, m)

    def restrict(self, keep: dict[int, np.ndarray], keep_witness: np.ndarray | None = None,
                 name: str | None = None) -> "FunctionMinion":
        """The sub-minion on the given element indices (kept in their original order)."""
        rows = {n: self.rows[n][np.unique(keep[n])] for n in self.rows}
        w = None
        if self.witness_rows is not None and keep_witness is not None:
            w = self.witness_rows[np.unique(keep_witness)]
        return FunctionMinion(rows, self.k, witness_rows=w, name=name or self.name)


def from_function_minion(rows: dict[int, np.ndarray], k: int, **kw) -> FunctionMinion:
    """Wrap per-arity enumerations; raises ContractViolation if not closed under minors."""
    return FunctionMinion(rows, k, **kw)


def from_system(cs: ConstraintSystem, cap: int = 3, *, witnesses: bool = True, name: str = "",
                budget: int | None = None) -> FunctionMinion:
    rows = {n: system.enumerate_all(cs, n, budget=budget, cap=max(cap, 4)) for n in range(1, cap + 1)}
    w = system.enumerate_all(cs, WITNESS_ARITY, symmetric=True) if witnesses and cap < WITNESS_ARITY else None
    return FunctionMinion(rows, cs.k, witness_rows=w, name=name, check=False)


def projections_minion(cap: int = 3) -> FunctionMinion:
    from .boolfun import projection
    rows = {n: np.array([[projection(n, i).bits] for i in range(n)], dtype=np.uint64) for n in range(1, cap + 1)}
    return FunctionMinion(rows, 1, name="projections")


def idempotent_all(k: int, cap: int = 3, **kw) -> FunctionMinion:
    """All idempotent k-sorted Boolean operations."""
    return from_system(ConstraintSystem(k, ()), cap, name=f"I{k}", **kw)


@lru_cache(maxsize=None)
def canonical_minion(core_str: str, cap: int = 3, witnesses: bool = True) -> TruncatedMinion:
    from .canon import CoreId, canonical_system
    core = CoreId.parse(core_str)
    if core.tag == "T":
        return OnePointMinion(cap, "T", witnesses)
    return from_system(canonical_system(core), cap, witnesses=witnesses, name=str(core))


# homomorphisms


@dataclass
class TruncatedHom:
    source: TruncatedMinion
    target: TruncatedMinion
    images: dict[int, np.ndarray]
    witness_images: np.ndarray | None = None

    @property
    def binary(self) -> np.ndarray:
        return self.images[2]

    def image_sizes(self) -> tuple[int, ...]:
        return tuple(len(np.unique(self.images[n])) for n in range(1, self.source.cap + 1))

    def check(self, exhaustive: bool = False) -> list[str]:
        """Minor commutation problems, empty when the hom is sound within cap."""
        problems = []
        M, N = self.source, self.target
        gens = all_minors(M.cap) if exhaustive else generator_minors(M.cap)
        for n, alpha, m in gens:
            lhs = self.images[m][M.minor(n, alpha, m)]
            rhs = N.minor(n, alpha, m)[self.images[n]]
            if not np.array_equal(lhs, rhs):
                bad = int(np.nonzero(lhs != rhs)[0][0])
                problems.append(f"arity {n} element {bad}: minor {tuple(a + 1 for a in alpha)} does not commute")
        if self.witness_images is not None and M.has_witnesses and N.has_witnesses:
            for m in range(1, min(M.cap, 3) + 1):
                for alpha in _witness_alphas(m):
                    lhs = self.images[m][M.witness_minor(alpha, m)]
                    rhs = N.witness_minor(alpha, m)[self.witness_images]
                    if not np.array_equal(lhs, rhs):
                        problems.append(f"witness minor {tuple(a + 1 for a in alpha)} does not commute")
        return problems

    def to_json(self) -> dict:
        return {"source": self.source.name, "target": self.target.name,
                "images": {str(n): [int(v) for v in a] for n, a in self.images.items()}}


def _witness_alphas(m: int) -> list[tuple[int, ...]]:
    # symmetric witnesses: minors up to permutation are nondecreasing maps
    out = []
    for alpha in product(range(m), repeat=WITNESS_ARITY):
        if list(alpha) == sorted(alpha):
            out.append(alpha)
    return out


@dataclass
class Failure:
    reason: str

    def __bool__(self):
        return False


def _extend(M: TruncatedMinion, N: TruncatedMinion, xi2: np.ndarray):
    images = {}
    for n in range(1, M.cap + 1):
        img = N.lookup_signatures(n, xi2[M.sig[n]])
        if (img < 0).any():
            return Failure(f"arity-{n} element {int(np.nonzero(img < 0)[0][0])} has no image")
        images[n] = img
    w = None
    if M.has_witnesses and N.has_witnesses:
        w = N.lookup_witness_signatures(xi2[M.witness_sig])
        if (w < 0).any():
            return Failure(f"witness {int(np.nonzero(w < 0)[0][0])} has no image")
    return TruncatedHom(M, N, images, w)


def extend_binary_map(M: TruncatedMinion, N: TruncatedMinion, xi2: Sequence[int],
                      exhaustive: bool = False) -> TruncatedHom | Failure:
    """The unique extension of a map on binary elements, or a Failure with a counterexample."""
    if M.cap != N.cap:
        raise InputError("minions must share the truncation cap")
    xi2 = np.asarray(xi2, dtype=np.int64)
    if xi2.shape != (M.sizes[2],) or (xi2 < 0).any() or (xi2 >= N.sizes[2]).any():
        raise InputError("binary map has the wrong shape or range")
    hom = _extend(M, N, xi2)
    if not hom:
        return hom
    problems = hom.check(exhaustive)
    if problems:
        return Failure(problems[0])
    return hom


class _Search:
    """Backtracking over binary maps, orbit by orbit under the swap of variables."""

    def __init__(self, M: TruncatedMinion, N: TruncatedMinion, budget: int | None):
        if M.cap != N.cap:
            raise InputError("minions must share the truncation cap")
        self.M, self.N = M, N
        self.budget = budget
        self.nodes = 0
        swapM, swapN = M.swap(), N.swap()
        self.swapN = swapN
        reps = []
        seen = set()
        for h in range(M.sizes[2]):
            if h not in seen:
                seen.update((h, int(swapM[h])))
                reps.append(h)
        # orbits met by unary elements first, so that their values are settled early
        first = {int(v) for v in np.unique(M.sig[1])}
        reps.sort(key=lambda h: (not ({h, int(swapM[h])} & first), h))
        self.reps = reps
        self.partner = [int(swapM[h]) for h in reps]
        pos = np.empty(M.sizes[2], dtype=np.int64)
        for i, h in enumerate(reps):
            pos[h] = i
            pos[swapM[h]] = i
        # bucket every constraint row by the last orbit it mentions
        self.buckets: list[list[tuple[str, int, np.ndarray]]] = [[] for _ in reps]
        groups = [(("a", n), M.sig[n]) for n in range(1, M.cap + 1)]
        if M.has_witnesses and N.has_witnesses:
            groups.append((("w", 0), M.witness_sig))
        for key, sigs in groups:
            last = pos[sigs].max(axis=1)
            order = np.argsort(last, kind="stable")
            bounds = np.searchsorted(last[order], np.arange(len(reps) + 1))
            for v in range(len(reps)):
                sel = order[bounds[v]:bounds[v + 1]]
                if len(sel):
                    self.buckets[v].append((key, sigs[sel]))
        # values a symmetric element may take
        self.domain = []
        for h, p in zip(reps, self.partner):
            cand = np.arange(N.sizes[2])
            if h == p:
                cand = cand[swapN[cand] == cand]
            self.domain.append(cand)

    def _ok(self, v: int, xi: np.ndarray) -> bool:
        for (kind, n), sigs in self.buckets[v]:
            q = xi[sigs]
            if kind == "a":
                found = self.N.lookup_signatures(n, q)
            else:
                found = self.N.lookup_witness_signatures(q)
            if (found < 0).any():
                return False
        return True

    def solutions(self) -> Iterator[np.ndarray]:
        xi = np.full(self.M.sizes[2], -1, dtype=np.int64)
        nv = len(self.reps)

        def rec(v):
            if v == nv:
                yield xi.copy()
                return
            h, p = self.reps[v], self.partner[v]
            for g in self.domain[v]:
                self.nodes += 1
                if self.budget is not None and self.nodes > self.budget:
                    raise BudgetExceeded(f"hom search exceeded {self.budget} nodes")
                xi[h] = g
                xi[p] = self.swapN[g]
                if self._ok(v, xi):
                    yield from rec(v + 1)
            xi[h] = xi[p] = -1

        yield from rec(0)


def hom_search(M: TruncatedMinion, N: TruncatedMinion, *, budget: int | None = 10 ** 6,
               exhaustive: bool = False) -> TruncatedHom | None:
    """The first homomorphism M -> N in canonical order, or None."""
    for xi2 in _Search(M, N, budget).solutions():
        hom = extend_binary_map(M, N, xi2, exhaustive)
        if hom:
            return hom
    return None


def endo_enumerate(M: TruncatedMinion, *, budget: int | None = 10 ** 6,
                   limit: int | None = None) -> list[TruncatedHom]:
    out = []
    for xi2 in _Search(M, M, budget).solutions():
        hom = extend_binary_map(M, M, xi2)
        if hom:
            out.append(hom)
            if limit is not None and len(out) >= limit:
                break
    return out


def is_core_truncated(M: TruncatedMinion, *, budget: int | None = 10 ** 6) -> bool:
    """Does every endomorphism act bijectively on the binary elements?"""
    for xi2 in _Search(M, M, budget).solutions():
        if len(np.unique(xi2)) < len(xi2) and extend_binary_map(M, M, xi2):
            return False
    return True


def compute_core_truncated(M: TruncatedMinion, *, budget: int | None = 10 ** 6,
                           max_rounds: int = 64) -> TruncatedMinion:
    """Shrink M by image-minimal endomorphisms until every endomorphism is bijective."""
    for _ in range(max_rounds):
        endos = endo_enumerate(M, budget=budget)
        best = min(range(len(endos)), key=lambda i: (endos[i].image_sizes(), i))
        e = endos[best]
        if e.image_sizes() == M.size_tuple():
            return M
        if isinstance(M, OnePointMinion):
            return M
        M = M.restrict(e.images, e.witness_images, name=f"core({M.name})")
    raise BudgetExceeded("core computation did not stabilise")


# homomorphisms into the clone of all operations on [l]


@dataclass
class PointMapHom:
    """xi_n(f)(c) = X(minor of f along c), tables indexed little-endian in base l."""
    source: TruncatedMinion
    l: int
    tables: dict[int, np.ndarray]

    def check(self, exhaustive: bool = False) -> list[str]:
        M, l = self.source, self.l
        problems = []
        for n, alpha, m in (all_minors(M.cap) if exhaustive else generator_minors(M.cap)):
            lhs = self.tables[m][M.minor(n, alpha, m)]
            # xi_n(f)^alpha (c) = xi_n(f)(c o alpha)
            cols = [_tuple_index([c[a] for a in alpha], l) for c in _tuples(m, l)]
            rhs = self.tables[n][:, cols]
            if not np.array_equal(lhs, rhs):
                problems.append(f"minor {tuple(a + 1 for a in alpha)} at arity {n} does not commute")
        return problems


def _tuples(n: int, l: int) -> list[tuple[int, ...]]:
    return [c[::-1] for c in product(range(l), repeat=n)]


def _tuple_index(c: Sequence[int], l: int) -> int:
    idx = 0
    for v in reversed(c):
        idx = idx * l + v
    return idx


def hom_from_point_map(M: TruncatedMinion, X: Sequence[int], l: int) -> PointMapHom:
    """Build xi from a map X on the l-ary elements with values in range(l)."""
    if not 1 <= l <= M.cap:
        raise InputError("l must lie in 1..cap")
    X = np.asarray(X, dtype=np.int64)
    if X.shape != (M.sizes[l],) or (X < 0).any() or (X >= l).any():
        raise InputError("X must map every l-ary element into range(l)")
    tables = {}
    for n in range(1, M.cap + 1):
        cols = [X[M.minor(n, c, l)] for c in _tuples(n, l)]
        tables[n] = np.stack(cols, axis=1)
    return PointMapHom(M, l, tables)
