"""Boolean functions as bitmask truth tables.

A table of arity n is an int whose bit i holds f(a) where
i = a_1 + 2*a_2 + ... + 2^(n-1)*a_n (coordinate 1 is the low bit).
Coordinates are 0-based in every API of this package.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import NamedTuple, Sequence

MAX_ARITY = 5


def table_size(n: int) -> int:
    return 1 << n


def full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def coord_zero_mask(n: int, j: int) -> int:
    """Mask of indices whose j-th coordinate is 0."""
    m = 0
    for i in range(1 << n):
        if not (i >> j) & 1:
            m |= 1 << i
    return m


@dataclass(frozen=True, order=True)
class TruthTable:
    arity: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.arity <= MAX_ARITY:
            raise ValueError(f"arity {self.arity} outside 0..{MAX_ARITY}")
        if not 0 <= self.bits <= full_mask(self.arity):
            raise ValueError(f"bits {self.bits:#x} do not fit arity {self.arity}")

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ValueError("wrong number of arguments")
        idx = 0
        for j, a in enumerate(args):
            idx |= (a & 1) << j
        return (self.bits >> idx) & 1

    def at(self, index: int) -> int:
        return (self.bits >> index) & 1

    def __and__(self, other: "TruthTable") -> "TruthTable":
        return meet(self, other)

    def __or__(self, other: "TruthTable") -> "TruthTable":
        return join(self, other)

    @property
    def d(self) -> "TruthTable":
        return dual(self)

    def minor(self, alpha: Sequence[int], m: int) -> "TruthTable":
        return minor(self, alpha, m)

    def to_json(self) -> dict:
        return {"arity": self.arity, "bits": bits_to_hex(self.bits, self.arity)}

    @classmethod
    def from_json(cls, obj: dict) -> "TruthTable":
        n = int(obj["arity"])
        return cls(n, hex_to_bits(obj["bits"], n))

    @classmethod
    def from_values(cls, n: int, values: Sequence[int]) -> "TruthTable":
        if len(values) != 1 << n:
            raise ValueError("need 2^n values")
        bits = 0
        for i, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError("values must be 0/1")
            bits |= v << i
        return cls(n, bits)

    def values(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(1 << self.arity)]

    def __repr__(self):
        return f"TruthTable({self.arity}, {self.bits:#x})"


def bits_to_hex(bits: int, n: int) -> str:
    """Hex digits, lowest-index nibble first; nibble j covers indices 4j..4j+3."""
    ndig = max(1, (1 << n) // 4)
    return "".join("%x" % ((bits >> (4 * j)) & 0xF) for j in range(ndig))


def hex_to_bits(s: str, n: int) -> int:
    ndig = max(1, (1 << n) // 4)
    if len(s) != ndig:
        raise ValueError(f"expected {ndig} hex digits for arity {n}, got {s!r}")
    bits = 0
    for j, ch in enumerate(s):
        bits |= int(ch, 16) << (4 * j)
    if bits > full_mask(n):
        raise ValueError("hex string has bits beyond the table")
    return bits


def _check_same(f: TruthTable, g: TruthTable):
    if f.arity != g.arity:
        raise ValueError(f"arity mismatch: {f.arity} vs {g.arity}")


def projection(n: int, i: int) -> TruthTable:
    bits = 0
    for a in range(1 << n):
        if (a >> i) & 1:
            bits |= 1 << a
    return TruthTable(n, bits)


def constant(n: int, c: int) -> TruthTable:
    return TruthTable(n, full_mask(n) if c else 0)


def minor(f: TruthTable, alpha: Sequence[int], m: int) -> TruthTable:
    """f^(alpha): the m-ary function c -> f(c o alpha)."""
    if len(alpha) != f.arity:
        raise ValueError(f"alpha must have length {f.arity}")
    if any(not 0 <= a < m for a in alpha):
        raise ValueError(f"alpha values must lie in 0..{m - 1}")
    bits = 0
    for c in range(1 << m):
        src = 0
        for j, a in enumerate(alpha):
            src |= ((c >> a) & 1) << j
        bits |= ((f.bits >> src) & 1) << c
    return TruthTable(m, bits)


def dual(f: TruthTable) -> TruthTable:
    """f^d(a) = 1 - f(1-a)."""
    n = f.arity
    size = 1 << n
    top = size - 1
    bits = 0
    for i in range(size):
        if not (f.bits >> (top - i)) & 1:
            bits |= 1 << i
    return TruthTable(n, bits)


def meet(f: TruthTable, g: TruthTable) -> TruthTable:
    _check_same(f, g)
    return TruthTable(f.arity, f.bits & g.bits)


def join(f: TruthTable, g: TruthTable) -> TruthTable:
    _check_same(f, g)
    return TruthTable(f.arity, f.bits | g.bits)


def leq(f: TruthTable, g: TruthTable) -> bool:
    _check_same(f, g)
    return f.bits & ~g.bits == 0


def ucl_bits(bits: int, n: int) -> int:
    for j in range(n):
        bits |= (bits & coord_zero_mask(n, j)) << (1 << j)
    return bits


def interior_bits(bits: int, n: int) -> int:
    """Largest monotone table below `bits`."""
    c = ~bits & full_mask(n)
    for j in range(n):
        c |= (c >> (1 << j)) & coord_zero_mask(n, j)
    return ~c & full_mask(n)


def upward_closure(f: TruthTable) -> TruthTable:
    """Smallest monotone function above f."""
    return TruthTable(f.arity, ucl_bits(f.bits, f.arity))


def is_monotone(f: TruthTable) -> bool:
    return ucl_bits(f.bits, f.arity) == f.bits


def triangle(f: TruthTable, g: TruthTable) -> bool:
    """a <= b (pointwise) implies f(a) <= g(b)."""
    _check_same(f, g)
    return ucl_bits(f.bits, f.arity) & ~g.bits == 0


def triangle_bruteforce(f: TruthTable, g: TruthTable) -> bool:
    """Pair-scan version of `triangle`, kept as an oracle."""
    _check_same(f, g)
    size = 1 << f.arity
    for a in range(size):
        if not f.at(a):
            continue
        for b in range(size):
            if a & b == a and not g.at(b):
                return False
    return True


def is_idempotent(f: TruthTable) -> bool:
    return f.at(0) == 0 and f.at((1 << f.arity) - 1) == 1


def enumerate_idempotent(n: int, cap: int = 4) -> list[TruthTable]:
    if n > cap:
        raise ValueError(f"arity {n} above enumeration cap {cap}")
    if n < 1:
        raise ValueError("idempotent enumeration needs arity >= 1")
    size = 1 << n
    top_bit = 1 << (size - 1)
    inner = size - 2
    out = []
    for mid in range(1 << inner):
        out.append(TruthTable(n, top_bit | (mid << 1)))
    return out


# symmetric idempotent 5-ary operations


class Sym5Profile(NamedTuple):
    """Values on inputs of Hamming weight 1..4."""
    a1: int
    a2: int
    a3: int
    a4: int


SYM5_RELATIONS = ("leq", "tri", "self_leq", "self_tri", "self_eq")


def all_sym5_profiles() -> list[Sym5Profile]:
    return [Sym5Profile(*p) for p in product((0, 1), repeat=4)]


def _weight_masks5() -> list[int]:
    masks = [0] * 6
    for i in range(32):
        masks[bin(i).count("1")] |= 1 << i
    return masks


_W5 = _weight_masks5()


def sym5_from_profile(p: Sequence[int]) -> TruthTable:
    if len(p) != 4 or any(v not in (0, 1) for v in p):
        raise ValueError("profile must be four bits")
    bits = _W5[5]
    for w, v in enumerate(p, start=1):
        if v:
            bits |= _W5[w]
    return TruthTable(5, bits)


def sym5_profile(f: TruthTable) -> Sym5Profile:
    """Inverse of sym5_from_profile; raises if f is not symmetric idempotent."""
    if f.arity != 5:
        raise ValueError("need a 5-ary table")
    vals = []
    for w in range(6):
        part = f.bits & _W5[w]
        if part not in (0, _W5[w]):
            raise ValueError("not symmetric")
        vals.append(1 if part else 0)
    if vals[0] != 0 or vals[5] != 1:
        raise ValueError("not idempotent")
    return Sym5Profile(*vals[1:5])


def sym5_compare(p: Sequence[int], q: Sequence[int] | None, relation: str) -> bool:
    """Order relations between symmetric idempotent 5-ary operations.

    'leq' and 'tri' compare p with q; the 'self_*' relations compare p with
    its own dual and ignore q.
    """
    a = tuple(p)
    if relation == "leq":
        return all(x <= y for x, y in zip(a, q))
    if relation == "tri":
        # a_i <= b_j whenever i <= j
        return all(a[i] <= q[j] for i in range(4) for j in range(i, 4))
    if relation == "self_leq":
        return (a[0], a[3]) != (1, 1) and (a[1], a[2]) != (1, 1)
    if relation == "self_tri":
        return a[0] == 0 and a[1] == 0
    if relation == "self_eq":
        return a[0] == 1 - a[3] and a[1] == 1 - a[2]
    raise ValueError(f"unknown relation {relation!r}")


# common binary tables
X2 = projection(2, 0)
Y2 = projection(2, 1)
AND2 = TruthTable(2, 0b1000)
OR2 = TruthTable(2, 0b1110)
XOR2 = TruthTable(2, 0b0110)
