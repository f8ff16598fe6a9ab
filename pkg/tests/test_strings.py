import itertools
import math

import pytest

from stringtop.exact import AbelianGroup
from stringtop.loops import LoopChain, Space, bv_delta, loop_generators, mono
from stringtop.strings import (StringChain, cap, catalog, consistency_audit, erasing, marking,
                               string_bracket, string_homology, verify_gysin)
from stringtop.surfaces import parse_class_list

S1, S2, S3, S4 = (Space.sphere(n) for n in (1, 2, 3, 4))
SPHERES = [Space.sphere(n) for n in (1, 2, 3, 4, 5, 6, 7)]
T, G2 = Space.torus(), Space.surface(2)
CLASSES = parse_class_list("g1:3,g2:2,e")


def one(m):
    return LoopChain({m: 1}, m.space)


def window(space):
    if space.kind == "torus":
        return [(n, m) for n in range(-3, 4) for m in range(-3, 4)]
    if space.kind == "surface":
        return CLASSES
    return None


def string_gens(space, max_degree):
    cat = catalog(space)
    for k in range(max_degree + 1):
        tab = cat.table(k, window(space))
        yield from tab.gens
        yield from tab.members


def top_degree(space, exponent=20):
    """Ordinary degree reaching loop exponents of about ``exponent``."""
    if space.family == "circle":
        return 12
    if space.kind in ("torus", "surface"):
        return 8
    per = space.n - 1 if space.family == "odd" else 2 * space.n - 2
    return min(exponent * per + space.n, 80)


# ---------------------------------------------------------------- Gysin identities

@pytest.mark.parametrize("space", SPHERES + [T, G2], ids=str)
def test_marking_after_erasing_is_delta(space):
    bound = 20 if space.kind != "torus" else 8
    for m in loop_generators(space, bound, CLASSES):
        assert marking(erasing(one(m))) == bv_delta(one(m)), m


@pytest.mark.parametrize("space", SPHERES + [T, G2], ids=str)
def test_consecutive_gysin_maps_compose_to_zero(space):
    for g in string_gens(space, top_degree(space)):
        x = StringChain({g: 1}, space)
        assert not erasing(marking(x)), g
        assert not marking(cap(x)), g
    for m in loop_generators(space, 20 if space.kind != "torus" else 6, CLASSES):
        assert not cap(erasing(one(m))), m


@pytest.mark.parametrize("space", SPHERES + [T], ids=str)
def test_string_chain_round_trip(space):
    for g in string_gens(space, min(top_degree(space, 4), 24)):
        x = StringChain({g: 1}, space)
        assert StringChain.parse(str(x), space) == x, g


def test_surface_string_chain_round_trip():
    for g in string_gens(G2, 4):
        x = StringChain({g: 1}, G2)
        assert StringChain.parse(str(x), G2, CLASSES) == x


# ---------------------------------------------------------------- tables against the text

def _s1_expected(k, exps):
    if k == 0:
        return AbelianGroup((0,) * len(exps))
    if k % 2:
        return AbelianGroup((0,) + tuple(abs(n) for n in exps if abs(n) >= 2))
    return AbelianGroup((0,))


@pytest.mark.parametrize("k", range(0, 12))
def test_circle_table(k):
    exps = range(-5, 6)
    assert string_homology(S1, k, exps).isomorphic(_s1_expected(k, exps))


def _s3_expected(k):
    if k == 0:
        return AbelianGroup((0,))
    if k in (1, 3):
        return AbelianGroup(())
    if k % 2 == 0:
        return AbelianGroup((0, 0))
    i = (k - 1) // 2
    return AbelianGroup(tuple(range(2, i + 1)))


@pytest.mark.parametrize("k", range(0, 21))
def test_s3_table(k):
    assert string_homology(S3, k).isomorphic(_s3_expected(k))


def test_s3_named_generators():
    assert str(string_homology(S3, 5)) == "Z/2 ⟨(α⊗y^2)x⟩"
    assert str(string_homology(S3, 0)) == "Z ⟨α⊗1⟩"


S4_TABLE = ["Z", "0", "Z", "Z", "Z", "0", "Z ⊕ Z/2", "0"]


@pytest.mark.parametrize("k", range(8))
def test_s4_table(k):
    expected = {"Z": (0,), "0": (), "Z ⊕ Z/2": (0, 2)}[S4_TABLE[k]]
    assert string_homology(S4, k).isomorphic(AbelianGroup(expected))


def test_s2_low_degrees():
    assert string_homology(S2, 2).isomorphic(AbelianGroup((0, 2)))
    assert string_homology(S2, 4).isomorphic(AbelianGroup((0, 2, 6)))
    for i in range(5):
        assert string_homology(S2, 2 * i + 1).isomorphic(AbelianGroup((0,)))


def test_s2_unresolved_order():
    # members e(av)γ_{j-1} and e(v^m)γ_{j-1-m}: orders 2 and 2(2m+1)
    for j in range(3, 7):
        g = string_homology(S2, 2 * j)
        assert g.free_rank == 1
        assert g.unresolved_order == 2 * math.prod(2 * (2 * m + 1) for m in range(1, j))


@pytest.mark.parametrize("n", [5, 7, 9])
def test_odd_sphere_blocks_have_factorial_order(n):
    for k in range(2, 7):
        lo = k * (n - 1) // 2
        g = string_homology(Space.sphere(n), 2 * lo + 1)
        order = g.unresolved_order or math.prod(g.torsion)
        assert order == math.factorial(k)


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_audit_consistent(n, monkeypatch):
    monkeypatch.setenv("STRINGTOP_MAX_DEGREE", "200")
    rep = consistency_audit(Space.sphere(n), 6)
    assert rep.ok, str(rep)
    assert rep.to_json()["ok"]


def test_audit_rejects_small_spheres():
    with pytest.raises(ValueError):
        consistency_audit(S3, 3)


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        string_homology(S3, -1)


# ---------------------------------------------------------------- Gysin exactness

@pytest.mark.parametrize("space", [S1, S3], ids=str)
def test_gysin_exact_to_degree_20(space):
    rep = verify_gysin(space, 20)
    assert rep.exact and rep.checked > 20


def test_gysin_mutation_is_localized():
    cat = catalog(S3)
    bad = {("M", cat.gen("E", 2)): LoopChain({mono(S3, "1", 1): 1}, S3)}
    rep = verify_gysin(S3, 20, overrides=bad)
    assert not rep.exact
    assert [f.label for f in rep.failures] == ["H_5(L)"]
    assert rep.failures[0].witness


def test_gysin_degree_cap(monkeypatch):
    monkeypatch.setenv("STRINGTOP_MAX_DEGREE", "10")
    with pytest.raises(ValueError):
        verify_gysin(S3, 20)


# ---------------------------------------------------------------- brackets

def test_circle_bracket():
    x, y = StringChain.parse("e(a⊗x^2)", S1), StringChain.parse("e(a⊗x^3)", S1)
    assert str(string_bracket(x, y)) == "4·e(1⊗x^5)"


def test_circle_bracket_vanishes_above_degree_zero():
    x = StringChain.parse("(a⊗1)γ_1", S1)
    assert not string_bracket(x, StringChain.parse("e(a⊗x^3)", S1))


@pytest.mark.parametrize("i,j", list(itertools.product(range(1, 9), repeat=2)))
def test_s3_bracket_formula(i, j):
    x, y = StringChain.parse(f"α⊗y^{i}", S3), StringChain.parse(f"α⊗y^{j}", S3)
    target = StringChain.parse(f"e(1⊗y^{i + j - 2})", S3) if i + j > 2 else None
    got = string_bracket(x, y)
    if target is None:
        assert not got
    else:
        assert got == (-i * j) * target
        assert (not got) == ((i * j) % (i + j - 1) == 0)


def test_s4_bracket():
    x, y = StringChain.parse("e(b*v)", S4), StringChain.parse("e(b*v^2)", S4)
    assert str(string_bracket(x, y)) == "6·e(v^3)"


@pytest.mark.parametrize("space", [S1, S3, S4, Space.sphere(5)], ids=str)
def test_string_bracket_graded_antisymmetry(space):
    d = space.dim
    gens = list(string_gens(space, 14))
    for a, b in itertools.product(gens, repeat=2):
        x, y = StringChain({a: 1}, space), StringChain({b: 1}, space)
        s = -1 if ((a.degree + d - 2) * (b.degree + d - 2)) % 2 else 1
        assert string_bracket(x, y) == -s * string_bracket(y, x), (a, b)
