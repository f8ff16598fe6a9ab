import math
import random

import pytest
from hypothesis import given, strategies as st

from stringtop.goldman import (BracketExpression, TorusChain, TorusClass, bezout,
                               derived_membership, generation_witness, goldman_bracket,
                               jacobi_residual, lcs_member_witness, torus, z_bracket_reachable)
from stringtop.parsing import ParseError

from oracles import span_gcd_bruteforce

exps = st.integers(-6, 6)
classes = st.tuples(exps, exps)
chains = st.dictionaries(classes, st.integers(-4, 4), max_size=3).map(TorusChain)


def test_bracket_formula_instances():
    assert str(goldman_bracket(TorusChain.parse("a^2 b"), TorusChain.parse("b"))) == "2·a^2 b^2"
    assert goldman_bracket(torus(1, 0), torus(0, 1)) == torus(1, 1)
    assert not goldman_bracket(torus(2, 4), torus(1, 2))


@given(chains, chains)
def test_antisymmetry(x, y):
    assert goldman_bracket(x, y) == -goldman_bracket(y, x)


@given(chains, chains, chains)
def test_jacobi(x, y, z):
    assert not jacobi_residual(x, y, z)


@given(chains, chains, st.integers(-5, 5))
def test_bilinear(x, y, c):
    assert goldman_bracket(c * x, y) == c * goldman_bracket(x, y)


def test_rings_do_not_mix():
    with pytest.raises(ValueError):
        goldman_bracket(torus(1, 0), torus(0, 1, ring="Q"))
    with pytest.raises(ParseError):
        TorusChain.parse("1/2·a", "Z")


@pytest.mark.parametrize("text,expected", [
    ("a^-3", (-3, 0)), ("a^{-3}", (-3, 0)), (" a ^ 2  b ", (2, 1)), ("1", (0, 0)), ("b a", (1, 1)),
])
def test_class_parsing(text, expected):
    assert TorusClass.parse(text) == expected


@given(chains)
def test_chain_text_round_trip(x):
    assert TorusChain.parse(str(x)) == x


@given(chains)
def test_chain_json_round_trip(x):
    assert TorusChain.from_json(x.to_json()) == x


def test_parse_error_has_position():
    with pytest.raises(ParseError) as info:
        TorusChain.parse("a^2 + c")
    assert info.value.pos == 6


@pytest.mark.parametrize("target", [(1, 0), (0, -1), (2, 3), (-4, 6), (5, -5), (0, 6)])
def test_generation_witness_self_verifies(target):
    expr = generation_witness(target)
    assert expr.value == TorusChain({target: 1}, "Q")
    assert {tuple(l) for l in expr.leaves()} <= {(1, 0), (0, 1), (-1, 0), (0, -1)}
    again = BracketExpression.parse(expr.to_sexpr(), "Q")
    assert again.value == expr.value
    assert BracketExpression.from_json(expr.to_json()).value == expr.value


def test_generation_witness_rejects_contractible():
    with pytest.raises(ValueError):
        generation_witness((0, 0))


@pytest.mark.parametrize("n", range(2, 12))
def test_z_obstruction_small(n):
    assert not z_bracket_reachable(n - 1, (n, 0))
    assert z_bracket_reachable(n, (0, n))


def test_derived_matches_span_oracle_small():
    for p in range(-3, 4):
        for q in range(-3, 4):
            g = span_gcd_bruteforce(p, q, 6)
            for c in range(-6, 7):
                oracle = (c == 0) if g == 0 else c % g == 0
                assert derived_membership(c, (p, q)) == oracle


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_bezout(i, j):
    d, x, y = bezout(i, j)
    assert d == math.gcd(i, j) and x * i + y * j == d


@pytest.mark.parametrize("c,cls,depth", [(2, (2, 2), 1), (2, (2, 2), 4), (3, (3, 0), 3),
                                         (1, (1, 1), 5), (-6, (4, 6), 2), (0, (0, 0), 2)])
def test_lcs_witness(c, cls, depth):
    expr = lcs_member_witness(c, cls, depth)
    assert expr.depth == depth
    assert expr.value == TorusChain({cls: c}) if c else not expr.value


def test_lcs_rejects_non_members():
    with pytest.raises(ValueError):
        lcs_member_witness(1, (2, 4), 2)


def test_seeded_random_triples_antisymmetry_jacobi():
    rng = random.Random(20240601)

    def rnd():
        return TorusChain({(rng.randint(-5, 5), rng.randint(-5, 5)): rng.randint(-3, 3)
                           for _ in range(rng.randint(1, 3))})
    for _ in range(200):
        x, y, z = rnd(), rnd(), rnd()
        assert goldman_bracket(x, y) == -goldman_bracket(y, x)
        assert not jacobi_residual(x, y, z)
