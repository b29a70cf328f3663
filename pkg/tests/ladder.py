"""The two-chain ladder of canonical cores as plain strings, for indices up to 3."""
from itertools import product

AB_CHAIN = ["Binf", "B3", "A3", "B2", "A2", "B1", "A1", "T"]
CD_CHAIN = ["Dinf", "Cinf", "D3", "C3", "D2", "C2", "D1"]
CROSS = [("D1", "A1"), ("D2", "A2"), ("D3", "A3"), ("C2", "B1"), ("C3", "B2"), ("Cinf", "Binf")]


def covers():
    out = set(CROSS)
    for chain in (AB_CHAIN, CD_CHAIN):
        out |= set(zip(chain, chain[1:]))
    return out


def leq_closure():
    nodes = AB_CHAIN + CD_CHAIN
    le = {(a, a) for a in nodes} | covers()
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in product(list(le), list(le)):
            if b == c and (a, d) not in le:
                le.add((a, d))
                changed = True
    return nodes, le
