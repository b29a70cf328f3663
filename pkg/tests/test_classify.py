import random
from itertools import product

import numpy as np
import pytest

from boolminion.boolfun import AND2, OR2, X2, TruthTable, enumerate_idempotent, minor
from boolminion.canon import BINF, CINF, A, B, D, T, all_cores, poset_leq
from boolminion.classify import (classify_description, classify_reduced, classify_relations,
                                 collapse_core, eval_term, eval_term_bulk, leaf, t_dual, t_join, t_meet,
                                 witness_backward, witness_forward)
from boolminion.descriptions import Description, ReducedDescription, eq, to_reduced, tri
from boolminion.errors import InputError
from boolminion.mincore import canonical_minion, from_system, hom_search
from boolminion.multisorted import SortedSignature, TypedRelation
from boolminion.system import Literal

import oracle

NEQ = frozenset({(0, 1), (1, 0)})
LEQ = frozenset({(0, 0), (0, 1), (1, 1)})
NAND = frozenset({(0, 0), (0, 1), (1, 0)})


def lit(s, d=False):
    return Literal(s, d)


def rd_of(n, m, cons):
    return ReducedDescription(n, m, frozenset(cons))


FOUR_SORTS_RD = rd_of(3, 0, [tri(lit(0), lit(1)), tri(lit(1), lit(2, True))])
MONO = rd_of(1, 0, [tri(lit(0), lit(0))])
FG = rd_of(1, 1, [tri(lit(0), lit(1)), eq(lit(1), lit(1, True))])


def names(rd):
    return rd.names()


# terms

def test_eval_term_examples():
    assert eval_term(t_dual(leaf(0)), [AND2]) == OR2
    assert eval_term(t_meet(leaf(0), t_dual(leaf(1))), [X2, AND2]) == X2
    with pytest.raises(InputError):
        eval_term(leaf(0), [X2, TruthTable(3, 0x80)])


def random_term(rng, k, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return leaf(rng.randrange(k))
    op = rng.choice(["meet", "join", "dual"])
    if op == "dual":
        return t_dual(random_term(rng, k, depth - 1))
    a, b = random_term(rng, k, depth - 1), random_term(rng, k, depth - 1)
    return t_meet(a, b) if op == "meet" else t_join(a, b)


def test_terms_commute_with_minors():
    rng = random.Random(17)
    idem = {n: enumerate_idempotent(n) for n in (1, 2, 3)}
    for _ in range(150):
        k = rng.randint(1, 3)
        t = random_term(rng, k)
        n = rng.randint(1, 3)
        ops = [rng.choice(idem[n]) for _ in range(k)]
        val = eval_term(t, ops)
        for m in (1, 2, 3):
            for alpha in product(range(m), repeat=n):
                assert minor(val, alpha, m) == eval_term(t, [minor(f, alpha, m) for f in ops])


def test_bulk_evaluation_matches_scalar():
    rng = random.Random(4)
    for _ in range(50):
        t = random_term(rng, 2)
        ops = [rng.choice(enumerate_idempotent(3)) for _ in range(2)]
        cols = [np.array([f.bits], dtype=np.uint64) for f in ops]
        assert int(eval_term_bulk(t, cols, 3)[0]) == eval_term(t, ops).bits


# cores and witnesses

def test_collapse_examples():
    assert collapse_core(FOUR_SORTS_RD) == A(2)
    assert collapse_core(MONO) == BINF
    assert collapse_core(FG) == D(2)
    assert collapse_core(rd_of(0, 1, [eq(lit(0), lit(0, True))])) == D(1)


def test_forward_witness_examples():
    rd = rd_of(2, 0, [tri(lit(0), lit(1))])
    assert collapse_core(rd) == B(1)
    assert [t.prefix(names(rd)) for t in witness_forward(rd)] == ["meet(f1, dual(f2))"]
    assert [t.prefix(names(FOUR_SORTS_RD)) for t in witness_forward(FOUR_SORTS_RD)] == ["meet(f1, f3)", "meet(f2, dual(f2))"]
    assert [t.prefix(names(MONO)) for t in witness_forward(MONO)] == ["meet(f1, dual(f1))"]


def test_backward_witness_examples():
    assert witness_backward(MONO) == [(0, False)]
    assert witness_backward(FOUR_SORTS_RD) == [(0, False), (1, False), (0, False)]
    cinf = rd_of(2, 1, [tri(lit(0), lit(0)), tri(lit(0), lit(2)), tri(lit(1), lit(2)), eq(lit(2), lit(2, True))])
    assert collapse_core(cinf) == CINF
    assert witness_backward(cinf) == [(0, False), (0, False), (1, False)]


def _core_cons(core):
    return oracle.core_constraints(core.tag, core.k)


def _check_witnesses_by_oracle(rd, n_max=2):
    core = collapse_core(rd)
    k, ccons = _core_cons(core)
    rcons = [(c.kind, (c.lhs.sym, c.lhs.dual), (c.rhs.sym, c.rhs.dual)) for c in rd.constraints]
    fwd, bwd = witness_forward(rd), witness_backward(rd)
    for n in range(1, n_max + 1):
        for tup in oracle.clone_members(rd.k, rcons, n):
            img = tuple(eval_term(t, [TruthTable(n, b) for b in tup]).bits for t in fwd)
            assert oracle.is_member(k, ccons, img, n), (rd.show(), core, n)
        for tup in oracle.clone_members(k, ccons, n):
            img = tuple(oracle.dual(tup[s], n) if d else tup[s] for s, d in bwd)
            assert oracle.is_member(rd.k, rcons, img, n), (rd.show(), core, n)


def random_description(rng, max_k=3, max_c=4):
    k = rng.randint(1, max_k)
    cons = []
    for _ in range(rng.randint(0, max_c)):
        kind = "eq" if rng.random() < 0.2 else "tri"
        cons.append((kind, (rng.randrange(k), rng.random() < 0.5), (rng.randrange(k), rng.random() < 0.5)))
    return Description.make(k, cons)


@pytest.mark.parametrize("seed", range(60))
def test_witnesses_on_random_reduced_descriptions(seed):
    rd = to_reduced(random_description(random.Random(seed))).reduced
    _check_witnesses_by_oracle(rd)
    core, fwd, bwd, log = classify_reduced(rd, cap=3)
    assert len(fwd) == core.sorts and len(bwd) == rd.k
    assert any(s.startswith("forward") for s in log) and any(s.startswith("backward") for s in log)


@pytest.mark.parametrize("rd", [
    rd_of(4, 0, [tri(lit(0), lit(1)), tri(lit(1), lit(2)), tri(lit(2), lit(3, True))]),
    rd_of(4, 0, [tri(lit(0), lit(1)), tri(lit(1), lit(2)), tri(lit(2), lit(3))]),
    rd_of(2, 1, [tri(lit(0), lit(1)), tri(lit(1), lit(2)), eq(lit(2), lit(2, True))]),
    rd_of(2, 1, [tri(lit(0), lit(1, True)), tri(lit(1), lit(2)), eq(lit(2), lit(2, True))]),
    rd_of(3, 0, [tri(lit(0), lit(1)), tri(lit(0), lit(2)), tri(lit(1), lit(2, True))]),
], ids=lambda rd: rd.show())
def test_witnesses_on_longer_chains(rd):
    _check_witnesses_by_oracle(rd)
    classify_reduced(rd, cap=3)


def test_collapse_stable_under_renaming():
    rng = random.Random(23)
    for _ in range(60):
        rd = to_reduced(random_description(rng)).reduced
        pf = list(range(rd.n))
        rng.shuffle(pf)
        perm = pf + list(range(rd.n, rd.k))

        def ren(c):
            return type(c)(c.kind, Literal(perm[c.lhs.sym], c.lhs.dual), Literal(perm[c.rhs.sym], c.rhs.dual))
        renamed = ReducedDescription(rd.n, rd.m, frozenset(ren(c) for c in rd.constraints))
        renamed.validate()
        assert collapse_core(renamed) == collapse_core(rd)


@pytest.mark.parametrize("seed", range(12))
def test_reported_core_is_the_unique_equivalent_one(seed):
    rd = to_reduced(random_description(random.Random(1000 + seed))).reduced
    core = collapse_core(rd)
    M = from_system(rd.system(), 3)
    N = canonical_minion(str(core), 3)
    assert hom_search(M, N) is not None and hom_search(N, M) is not None
    # no hom into cores strictly below the reported one
    for other in all_cores(3):
        if other != T and poset_leq(other, core) and not poset_leq(core, other):
            assert hom_search(M, canonical_minion(str(other), 3)) is None, (rd.show(), core, other)


# full pipeline

def test_four_sort_report():
    sig = SortedSignature.boolean(4)
    rels = [TypedRelation((0, 1), NEQ), TypedRelation((1, 2), LEQ), TypedRelation((2, 3), NAND)]
    rep = classify_relations(rels, sig, idempotent=True)
    assert rep.core == A(2) and rep.verified
    js = rep.to_json()
    assert js["reduced_text"] == "{f1 <| f2, f2 <| f3^d}"
    assert js["forward_witness"] == ["meet(f1, f3)", "meet(f2, dual(f2))"]
    assert js["chain_rank"] == 3
    assert rep.to_json() == classify_relations(rels, sig, idempotent=True).to_json()


def test_single_relation_battery_idempotent():
    one = SortedSignature.boolean(1)
    assert classify_relations([], SortedSignature(()), idempotent=True).core == T
    assert classify_relations([TypedRelation((0, 0), LEQ)], one, idempotent=True).core == BINF
    assert classify_relations([TypedRelation((0, 0), NEQ)], one, idempotent=True).core == D(1)
    assert classify_relations([TypedRelation((0, 0), NAND)], one, idempotent=True).core == B(1)


def test_literal_polymorphisms_with_constants():
    one = SortedSignature.boolean(1)
    # constant unary polymorphisms collapse these to the trivial minion
    assert classify_relations([TypedRelation((0, 0), LEQ)], one).core == T
    assert classify_relations([TypedRelation((0, 0), NAND)], one).core == T
    assert classify_relations([TypedRelation((0, 0), NEQ)], one).core == D(1)


def test_f_below_g_gives_d2():
    rep = classify_description(Description.make(2, [("tri", (0, False), (1, False)), ("eq", (1, False), (1, True))]))
    assert rep.core == D(2)
    assert [t.prefix(rep.reduced.names()) for t in rep.forward] == ["f1", "meet(g1, dual(g1))"]


def test_ternary_relation_rejected():
    rel = TypedRelation((0, 0, 0), frozenset({(0, 0, 1), (1, 0, 0)}))
    with pytest.raises(InputError):
        classify_relations([rel, TypedRelation((0, 0), NEQ)], SortedSignature.boolean(1))
