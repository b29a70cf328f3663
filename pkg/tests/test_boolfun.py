import random

import numpy as np
import pytest

from boolminion import bulk
from boolminion.boolfun import (AND2, OR2, X2, XOR2, Y2, TruthTable, all_sym5_profiles, bits_to_hex,
                                dual, enumerate_idempotent, hex_to_bits, is_monotone, join, leq, meet,
                                minor, projection, sym5_compare, sym5_from_profile, sym5_profile,
                                triangle, triangle_bruteforce, upward_closure)

import oracle


def all_tables(n):
    return [TruthTable(n, b) for b in range(1 << (1 << n))]


# worked examples

def test_minor_examples():
    assert minor(AND2, (0, 0), 1) == projection(1, 0)
    assert minor(X2, (1, 0), 2) == Y2
    assert minor(projection(3, 1), (0, 1, 1), 2) == Y2


def test_dual_examples():
    assert dual(AND2) == OR2
    assert dual(X2) == X2
    f = TruthTable(3, 0b01101000)
    assert dual(dual(f)) == f


def test_order_examples():
    assert leq(AND2, X2)
    assert not leq(OR2, AND2)
    assert meet(X2, Y2) == AND2
    assert join(X2, Y2) == OR2


def test_upward_closure_examples():
    assert upward_closure(X2) == X2
    assert upward_closure(XOR2) == OR2
    assert upward_closure(AND2) == AND2


def test_triangle_examples():
    assert triangle(AND2, X2)
    assert triangle(X2, X2)
    assert not triangle(X2, Y2)


def test_sym5_examples():
    assert sym5_from_profile((0, 0, 0, 0)).bits == 1 << 31
    assert sym5_compare((0, 0, 1, 0), (0, 0, 1, 1), "tri")
    assert sym5_compare((0, 1, 0, 1), None, "self_eq")


def test_enumerate_idempotent_sizes():
    assert enumerate_idempotent(1) == [projection(1, 0)]
    assert set(enumerate_idempotent(2)) == {X2, Y2, AND2, OR2}
    assert len(enumerate_idempotent(3)) == 64
    assert len(enumerate_idempotent(4)) == 1 << 14
    with pytest.raises(ValueError):
        enumerate_idempotent(5)


def test_arity_mismatch_raises():
    with pytest.raises(ValueError):
        meet(AND2, projection(3, 0))
    with pytest.raises(ValueError):
        triangle(AND2, projection(1, 0))


def test_hex_round_trip():
    assert bits_to_hex(AND2.bits, 2) == "8"
    assert bits_to_hex(0x1234, 4) == "4321"
    for n in range(1, 5):
        for _ in range(20):
            b = random.getrandbits(1 << n)
            assert hex_to_bits(bits_to_hex(b, n), n) == b
    with pytest.raises(ValueError):
        hex_to_bits("12", 2)


# agreement with the definition-level oracle

@pytest.mark.parametrize("n", [1, 2, 3])
def test_dual_and_closure_match_oracle(n):
    for f in all_tables(n):
        assert dual(f).bits == oracle.dual(f.bits, n)
        assert upward_closure(f).bits == oracle.upward_closure(f.bits, n)
        assert is_monotone(f) == (oracle.upward_closure(f.bits, n) == f.bits)


@pytest.mark.parametrize("n", [1, 2])
def test_triangle_matches_oracle_exhaustively(n):
    tabs = all_tables(n)
    for f in tabs:
        for g in tabs:
            assert triangle(f, g) == oracle.triangle(f.bits, g.bits, n)


def test_triangle_arity3_pair_scan_and_sample():
    tabs = all_tables(3)
    for f in tabs:
        for g in tabs:
            assert triangle(f, g) == triangle_bruteforce(f, g)
    rng = random.Random(7)
    for _ in range(2000):
        f, g = rng.choice(tabs), rng.choice(tabs)
        assert triangle(f, g) == oracle.triangle(f.bits, g.bits, 3)


def test_minor_matches_oracle():
    rng = random.Random(3)
    for n in range(1, 5):
        for m in range(1, 5):
            for _ in range(30):
                f = rng.getrandbits(1 << n)
                alpha = tuple(rng.randrange(m) for _ in range(n))
                assert minor(TruthTable(n, f), alpha, m).bits == oracle.minor(f, n, alpha, m)


def test_bulk_kernels_match_scalar():
    rng = np.random.default_rng(11)
    for n in range(1, 6):
        arr = rng.integers(0, 1 << (1 << n), size=200, dtype=np.uint64)
        for b, d, u, i in zip(arr, bulk.dual(arr, n), bulk.ucl(arr, n), bulk.interior(arr, n)):
            f = TruthTable(n, int(b))
            assert int(d) == dual(f).bits
            assert int(u) == upward_closure(f).bits
            # interior is the largest monotone table below f
            assert is_monotone(TruthTable(n, int(i))) and int(i) & ~int(b) == 0
        alpha = tuple(int(v) for v in rng.integers(0, 3, size=n))
        got = bulk.minor(arr, n, alpha, 3)
        for b, g in zip(arr, got):
            assert int(g) == minor(TruthTable(n, int(b)), alpha, 3).bits


def test_interior_is_largest_monotone_below():
    for f in all_tables(3):
        inner = bulk.interior(np.array([f.bits], dtype=np.uint64), 3)[0]
        monos = [g for g in all_tables(3) if is_monotone(g) and leq(g, f)]
        assert int(inner) == max(monos, key=lambda g: bin(g.bits).count("1")).bits


# symmetric 5-ary operations

def test_sym5_tables_are_symmetric_idempotent():
    for p in all_sym5_profiles():
        f = sym5_from_profile(p)
        assert sym5_profile(f) == p
        for alpha in [(1, 0, 2, 3, 4), (1, 2, 3, 4, 0)]:
            assert minor(f, alpha, 5) == f
        assert f.at(0) == 0 and f.at(31) == 1


def test_sym5_compare_matches_brute_force():
    profiles = all_sym5_profiles()
    bits = {p: sym5_from_profile(p).bits for p in profiles}
    for p in profiles:
        fp = bits[p]
        dp = oracle.dual(fp, 5)
        assert sym5_compare(p, None, "self_leq") == oracle.leq(fp, dp, 5)
        assert sym5_compare(p, None, "self_tri") == oracle.triangle(fp, dp, 5)
        assert sym5_compare(p, None, "self_eq") == (fp == dp)
        for q in profiles:
            assert sym5_compare(p, q, "leq") == oracle.leq(fp, bits[q], 5)
            assert sym5_compare(p, q, "tri") == oracle.triangle(fp, bits[q], 5)


# algebraic laws, exhaustive at arity <= 3

def _matrices(n):
    size = 1 << (1 << n)
    b = np.arange(size, dtype=np.uint64)
    up = bulk.ucl(b, n)
    tri = (up[:, None] & ~b[None, :]) == 0
    le = (b[:, None] & ~b[None, :]) == 0
    return b, tri, le


@pytest.mark.parametrize("n", [1, 2, 3])
def test_involution_and_de_morgan(n):
    tabs = all_tables(n)
    for f in tabs:
        assert dual(dual(f)) == f
    for f in tabs:
        for g in tabs:
            assert dual(meet(f, g)) == join(dual(f), dual(g))
            assert dual(join(f, g)) == meet(dual(f), dual(g))


def test_involution_sampled_arity4():
    rng = random.Random(5)
    for _ in range(500):
        f = TruthTable(4, rng.getrandbits(16))
        g = TruthTable(4, rng.getrandbits(16))
        assert dual(dual(f)) == f
        assert dual(meet(f, g)) == join(dual(f), dual(g))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_skew_symmetry(n):
    b, tri, _ = _matrices(n)
    d = bulk.dual(b, n).astype(np.int64)
    # f <| g^d iff g <| f^d
    assert np.array_equal(tri[:, d], tri[:, d].T)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_strong_transitivity(n):
    _, tri, le = _matrices(n)
    ti, li = tri.astype(np.int64), le.astype(np.int64)
    assert not ((li @ ti > 0) & ~tri).any()
    assert not ((ti @ li > 0) & ~tri).any()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_compatibility(n):
    _, tri, _ = _matrices(n)
    f, g = (a.astype(np.uint64) for a in np.nonzero(tri))
    for i in range(len(f)):
        lo_m, hi_m = f[i] & f, g[i] & g
        lo_j, hi_j = f[i] | f, g[i] | g
        assert ((bulk.ucl(lo_m, n) & ~hi_m) == 0).all()
        assert ((bulk.ucl(lo_j, n) & ~hi_j) == 0).all()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_self_dual_adjustment(n):
    # f <= f^d and g = g^d give f <= h = h^d for h = (g v f) ^ f^d
    tabs = all_tables(n)
    fs = [f for f in tabs if leq(f, dual(f))]
    gs = [g for g in tabs if g == dual(g)]
    assert gs
    for f in fs:
        for g in gs:
            h = meet(join(g, f), dual(f))
            assert leq(f, h)
            assert h == dual(h)


def test_deposit_matches_bitwise_scatter():
    rng = np.random.default_rng(17)
    for width in (2, 5, 8, 13, 16, 32):
        free = rng.integers(0, 1 << width, size=300, dtype=np.uint64)
        local = rng.integers(0, 1 << width, size=300, dtype=np.uint64)
        got = bulk.deposit(free, local, width)
        for f, v, g in zip(free.tolist(), local.tolist(), got.tolist()):
            want, r = 0, 0
            for p in range(width):
                if f >> p & 1:
                    want |= (v >> r & 1) << p
                    r += 1
            assert g == want
