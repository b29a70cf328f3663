import numpy as np
import pytest

from boolminion import mincore
from boolminion.boolfun import TruthTable, minor
from boolminion.errors import ContractViolation, InputError
from boolminion.mincore import (OnePointMinion, canonical_minion, compute_core_truncated, endo_enumerate,
                                extend_binary_map, from_function_minion, hom_from_point_map, hom_search,
                                idempotent_all, is_core_truncated, projections_minion)

X, Y, AND = 0xA, 0xC, 0x8


def binary_index(M, comps):
    rows = [tuple(int(v) for v in r) for r in M.rows[2]]
    return rows.index(tuple(comps))


def formula_images(M, N, xi2, n):
    """Images of the n-ary elements read pointwise from the binary map."""
    rows2 = {tuple(int(v) for v in r): i for i, r in enumerate(M.rows[2])}
    out = []
    for r in M.rows[n]:
        comps = []
        for s in range(N.k):
            bits = 0
            for a in range(1 << n):
                alpha = [(a >> j) & 1 for j in range(n)]
                key = tuple(minor(TruthTable(n, int(v)), alpha, 2).bits for v in r)
                target = N.rows[2][xi2[rows2[key]]][s]
                # the binary element evaluated at x = 0, y = 1
                bits |= ((int(target) >> 2) & 1) << a
            comps.append(bits)
        out.append(tuple(comps))
    return out


def assert_sound(hom):
    assert hom.check(exhaustive=True) == []
    M, N = hom.source, hom.target
    if isinstance(M, mincore.FunctionMinion) and isinstance(N, mincore.FunctionMinion):
        for n in range(1, M.cap + 1):
            want = formula_images(M, N, hom.binary, n)
            got = [tuple(int(v) for v in N.rows[n][i]) for i in hom.images[n]]
            assert got == want


def test_sizes_of_simple_minions():
    assert canonical_minion("Binf", 3).size_tuple() == (1, 3, 11)
    assert projections_minion(3).size_tuple() == (1, 2, 3)
    assert OnePointMinion(3).size_tuple() == (1, 1, 1)


def test_closure_violation_is_reported():
    rows = {1: np.array([[0b10]], dtype=np.uint64), 2: np.array([[X], [AND]], dtype=np.uint64)}
    with pytest.raises(ContractViolation):
        from_function_minion(rows, 1)       # y = x(swap) is missing


def test_extend_binary_map_examples():
    B = canonical_minion("Binf", 3)
    ident = list(range(B.sizes[2]))
    assert_sound(extend_binary_map(B, B, ident))
    bad = [binary_index(B, (X,))] * 1 + ident[1:]
    bad[binary_index(B, (AND,))] = binary_index(B, (X,))
    assert not extend_binary_map(B, B, bad)
    Cm = canonical_minion("Cinf", 3)
    swap = list(range(Cm.sizes[2]))
    a, b = binary_index(Cm, (AND, X)), binary_index(Cm, (AND, Y))
    swap[a], swap[b] = b, a
    assert_sound(extend_binary_map(Cm, Cm, swap))
    with pytest.raises(InputError):
        extend_binary_map(B, B, [0])


def test_hom_search_examples():
    h = hom_search(canonical_minion("Dinf", 3), canonical_minion("Cinf", 3))
    assert h is not None
    assert_sound(h)
    Dinf, Cinf = canonical_minion("Dinf", 3), canonical_minion("Cinf", 3)
    for i, j in enumerate(h.binary):
        comps = tuple(int(v) for v in Dinf.rows[2][i])
        assert tuple(int(v) for v in Cinf.rows[2][j]) == comps * 2
    assert hom_search(canonical_minion("Binf", 3), canonical_minion("D1", 3)) is None
    assert is_core_truncated(canonical_minion("Dinf", 3))


def test_homs_into_and_from_the_one_point_minion():
    T = OnePointMinion(3)
    for name in ("A1", "Dinf"):
        M = canonical_minion(name, 3)
        assert hom_search(M, T) is not None
        assert hom_search(T, M) is None


@pytest.mark.parametrize("name", ["A1", "B1", "D1", "C2", "Binf", "Cinf"])
def test_endomorphisms_are_sound_and_fix_projections(name):
    M = canonical_minion(name, 3)
    x = binary_index(M, (X,) * M.k)
    y = binary_index(M, (Y,) * M.k)
    by_binary = {}
    for e in endo_enumerate(M, limit=50):
        assert_sound(e)
        assert e.binary[x] == x and e.binary[y] == y
        key = tuple(int(v) for v in e.binary)
        images = {n: tuple(int(v) for v in e.images[n]) for n in e.images}
        # homomorphisms are determined by their binary part
        assert by_binary.setdefault(key, images) == images


def test_generator_check_agrees_with_exhaustive_check():
    for a, b in [("Dinf", "Cinf"), ("D2", "A2"), ("C3", "B2"), ("Binf", "B2")]:
        M, N = canonical_minion(a, 3), canonical_minion(b, 3)
        for xi2 in mincore._Search(M, N, 10 ** 6).solutions():
            h = mincore._extend(M, N, xi2)
            if h:
                assert (h.check() == []) == (h.check(exhaustive=True) == [])


def test_core_of_dinf_is_itself():
    M = canonical_minion("Dinf", 3)
    assert compute_core_truncated(M).size_tuple() == M.size_tuple()
    T = OnePointMinion(3)
    assert compute_core_truncated(T) is T


def test_core_of_i1():
    I1 = idempotent_all(1, 3)
    core = compute_core_truncated(I1)
    assert {int(r[0]) for r in core.rows[2]} == {X, Y, AND}
    assert is_core_truncated(core)
    A1 = canonical_minion("A1", 3)
    for P, Q in ((core, A1), (A1, core), (core, I1), (I1, core)):
        h = hom_search(P, Q)
        assert h is not None
        assert h.check(exhaustive=True) == []


def test_point_map_on_projections():
    P = projections_minion(3)
    h = hom_from_point_map(P, [0, 1], 2)
    assert h.check(exhaustive=True) == []
    for n in range(1, 4):
        for i in range(n):
            # xi(pi_i)(c) = c_i
            cols = mincore._tuples(n, 2)
            assert list(h.tables[n][i]) == [c[i] for c in cols]


def test_point_map_on_binf():
    B = canonical_minion("Binf", 3)
    X_ = [0] * B.sizes[2]
    X_[binary_index(B, (Y,))] = 1
    assert hom_from_point_map(B, X_, 2).check(exhaustive=True) == []
    const = hom_from_point_map(B, [1] * B.sizes[2], 2)
    assert const.check(exhaustive=True) == []
    assert all((t == 1).all() for t in const.tables.values())
    with pytest.raises(InputError):
        hom_from_point_map(B, [2] * B.sizes[2], 2)


def test_minion_json_dump():
    d = canonical_minion("Dinf", 3).to_json()
    assert d["name"] == "Dinf"
