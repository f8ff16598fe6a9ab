"""Brute-force oracles shared by the test modules."""

import itertools
import math


def coset_count(rank, relations, N):
    """``|Z^rank / (relations + N Z^rank)|`` by enumerating the subgroup of ``(Z/N)^rank``."""
    if rank == 0:
        return 1
    gens = [tuple(x % N for x in r) for r in relations]
    seen = {(0,) * rank}
    frontier = [(0,) * rank]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % N for a, b in zip(v, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return N ** rank // len(seen)


def group_count(group, N):
    """``|G / N G|`` read off from a resolved group description."""
    out = N ** group.free_rank
    for t in group.torsion:
        out *= math.gcd(t, N)
    return out


def smith_invariants_bruteforce(rank, relations, bound):
    """Profile ``N -> |G/NG|`` for ``N <= bound``."""
    return [coset_count(rank, relations, N) for N in range(1, bound + 1)]


def span_gcd_bruteforce(p, q, B):
    """gcd of all bracket coefficients ``il - jk`` landing on ``(p, q)`` with every
    exponent in ``[-B, B]``; 0 if none is nonzero."""
    g = 0
    for i, j in itertools.product(range(-B, B + 1), repeat=2):
        k, l = p - i, q - j
        if abs(k) <= B and abs(l) <= B:
            g = math.gcd(g, i * l - j * k)
    return g
