"""2-CNF formulas and the Aspvall-Plass-Tarjan solver.

Literals are nonzero ints in DIMACS style: v is variable v true, -v false.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .scc import tarjan


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range")

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        def val(lit):
            return assignment[abs(lit)] == (lit > 0)
        return all(val(a) or val(b) for a, b in self.clauses)


def _node(lit: int, n_vars: int) -> int:
    # negative literals take the low node numbers, so the search roots at
    # them first and unconstrained variables come out false
    v = abs(lit) - 1
    return v if lit < 0 else n_vars + v


def implication_graph(phi: CnfFormula) -> list[list[int]]:
    n = phi.n_vars
    adj: list[list[int]] = [[] for _ in range(2 * n)]
    for a, b in phi.clauses:
        adj[_node(-a, n)].append(_node(b, n))
        adj[_node(-b, n)].append(_node(a, n))
    return adj


def apt_solve(phi: CnfFormula) -> dict[int, bool] | None:
    """A satisfying assignment, or None when the formula is unsatisfiable."""
    comp = tarjan(2 * phi.n_vars, implication_graph(phi))
    out = {}
    for v in range(1, phi.n_vars + 1):
        pos, neg = comp[_node(v, phi.n_vars)], comp[_node(-v, phi.n_vars)]
        if pos == neg:
            return None
        # the literal whose component is closer to the sinks is set true
        out[v] = pos < neg
    return out


def brute_force_sat(phi: CnfFormula) -> dict[int, bool] | None:
    for bits in product((False, True), repeat=phi.n_vars):
        a = {v + 1: bits[v] for v in range(phi.n_vars)}
        if phi.satisfied_by(a):
            return a
    return None


def eliminate_self_dual(phi: CnfFormula, variables: set[int]) -> CnfFormula:
    """Remove variables that stand for self-dual symbols.

    Such a variable and its negation denote the same object, so any two
    clauses (x or +-g), (y or +-g) yield (x or y), the case x = y included.
    The remaining variables keep their numbers.
    """
    clauses = list(phi.clauses)
    for g in sorted(variables):
        partners = []
        rest = []
        for a, b in clauses:
            if abs(a) == g and abs(b) == g:
                continue
            if abs(a) == g:
                partners.append(b)
            elif abs(b) == g:
                partners.append(a)
            else:
                rest.append((a, b))
        for i, x in enumerate(partners):
            for y in partners[i:]:
                rest.append((x, y))
        clauses = rest
    seen = []
    for c in clauses:
        c = tuple(sorted(c, key=lambda lit: (abs(lit), lit)))
        if c not in seen:
            seen.append(c)
    return CnfFormula(phi.n_vars, tuple(seen))
