import random

import numpy as np
import pytest

from boolminion import system
from boolminion.errors import BudgetExceeded
from boolminion.system import ConstraintSystem, make_constraint

import oracle


def random_system(rng, k, ncons):
    cons = []
    for _ in range(ncons):
        kind = rng.choice(["tri", "tri", "eq", "leq"])
        cons.append((kind, (rng.randrange(k), rng.random() < 0.5), (rng.randrange(k), rng.random() < 0.5)))
    return cons


def as_system(k, cons):
    return ConstraintSystem(k, tuple(make_constraint(*c) for c in cons))


def rows_as_tuples(rows):
    return sorted(tuple(int(v) for v in r) for r in rows)


@pytest.mark.parametrize("seed", range(40))
def test_enumeration_matches_brute_force(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    cons = random_system(rng, k, rng.randint(0, 4))
    cs = as_system(k, cons)
    for n in (1, 2):
        assert rows_as_tuples(system.enumerate_all(cs, n)) == oracle.clone_members(k, cons, n)
    if k <= 2:
        assert rows_as_tuples(system.enumerate_all(cs, 3)) == oracle.clone_members(k, cons, 3)


@pytest.mark.parametrize("seed", range(10))
def test_arity4_members_pass_the_scalar_check(seed):
    rng = random.Random(100 + seed)
    k = rng.randint(1, 2)
    cs = as_system(k, random_system(rng, k, rng.randint(1, 4)))
    rows = system.enumerate_all(cs, 4)
    for r in rows[rng.sample(range(len(rows)), min(50, len(rows)))] if len(rows) else []:
        assert system.is_member(cs, [system.TruthTable(4, int(v)) for v in r])
    assert system.member_mask(cs, rows, 4).all()


def test_symmetric_mode_keeps_symmetric_members():
    cs = as_system(2, [("tri", (0, False), (1, False))])
    sym = rows_as_tuples(system.enumerate_all(cs, 5, symmetric=True))
    tables = oracle_sym5()
    expected = sorted((a, b) for a in tables for b in tables if oracle.triangle(a, b, 5))
    assert sym == expected


def oracle_sym5():
    out = []
    for prof in range(16):
        bits = 0
        for i in range(32):
            w = bin(i).count("1")
            if w == 5 or (1 <= w <= 4 and (prof >> (4 - w)) & 1):
                bits |= 1 << i
        out.append(bits)
    return out


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        system.enumerate_all(ConstraintSystem(2, ()), 3, budget=100)


def test_description_example_sizes():
    # {g = g^d} at arity 2 -> {x, y}; {h <| h^d} -> {x, y, and}; no constraint -> all four
    assert rows_as_tuples(system.enumerate_all(as_system(1, [("eq", (0, False), (0, True))]), 2)) == [(0xA,), (0xC,)]
    assert rows_as_tuples(system.enumerate_all(as_system(1, [("tri", (0, False), (0, True))]), 2)) == [(0x8,), (0xA,), (0xC,)]
    assert len(system.enumerate_all(ConstraintSystem(1, ()), 2)) == 4


def test_rows_are_sorted_and_unique():
    cs = as_system(3, [("tri", (0, False), (1, False)), ("tri", (1, False), (2, True))])
    rows = system.enumerate_all(cs, 3)
    tup = [tuple(int(v) for v in r) for r in rows]
    assert len(set(tup)) == len(tup)
    assert np.array_equal(rows, system.enumerate_all(cs, 3))
