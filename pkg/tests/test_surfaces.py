import math

import pytest

from stringtop.exact import AbelianGroup
from stringtop.loops import IDENTITY_CLASS, LoopChain, Space, bv_delta, mono
from stringtop.strings import StringChain
from stringtop.surfaces import (GoldmanOracle, parse_class_list, parse_window,
                                sigma_g_string_bracket, sigma_g_string_homology,
                                torus_block_homology, torus_center_bruteforce,
                                torus_center_membership, torus_gysin_block, torus_string_bracket,
                                torus_string_homology, verify_surface_gysin)

from oracles import coset_count, group_count

T, G2 = Space.torus(), Space.surface(2)


def delta_coeffs(src, dst):
    """Columns of Δ from ``src`` monomials to ``dst`` monomials, read off bv_delta."""
    cols = []
    for m in src:
        d = bv_delta(LoopChain({m: 1}, T))
        cols.append([d.coefficient(t) for t in dst])
    return cols


def block_presentations(n, m):
    L0 = [mono(T, "1", n, m)]
    L1 = [mono(T, "x", n, m), mono(T, "y", n, m)]
    L2 = [mono(T, "z", n, m)]
    return delta_coeffs(L0, L1), delta_coeffs(L1, L2)


@pytest.mark.parametrize("n", range(-6, 7))
def test_blocks_h1_h2_against_coset_enumeration(n):
    for m in range(-6, 7):
        d0, d1 = block_presentations(n, m)
        h1, h2 = torus_block_homology(1, n, m), torus_block_homology(2, n, m)
        g = math.gcd(n, m)
        for N in range(1, 14):
            assert group_count(h1, N) == coset_count(2, d0, N)
            extra = N if (n, m) == (0, 0) else 1  # ker Δ_0 on the trivial block
            assert group_count(h2, N) == coset_count(1, d1, N) * extra
        if (n, m) != (0, 0):
            assert h1.isomorphic(AbelianGroup((0,) + ((g,) if g > 1 else ())))
            assert h2.isomorphic(AbelianGroup((g,) if g > 1 else ()))


def test_window_parsing():
    assert parse_window("0:1,-1:0") == [(0, -1), (0, 0), (1, -1), (1, 0)]
    with pytest.raises(ValueError):
        parse_window("0:1")


def test_named_torus_homology():
    g = torus_string_homology(1, [(2, 4)])
    assert g.isomorphic(AbelianGroup((0, 2)))
    assert torus_string_homology(0, [(0, 0), (1, 0)]).isomorphic(AbelianGroup((0, 0)))


@pytest.mark.parametrize("n", range(-4, 5))
def test_torus_gysin_blocks_exact(n):
    for m in range(-4, 5):
        rep = torus_gysin_block(n, m, 7)
        assert rep.exact, (n, m, str(rep))


def test_torus_bracket_example():
    x, y = StringChain.parse("e(x[1,1])", T), StringChain.parse("e(x[1,-1])", T)
    assert str(torus_string_bracket(x, y)) == "e(z[2,0])"


def test_torus_degree_zero_bracket_is_goldman():
    x, y = StringChain.parse("e(1[1,0])", T), StringChain.parse("e(1[0,1])", T)
    assert str(torus_string_bracket(x, y)) == "e(1[1,1])"
    x, y = StringChain.parse("e(1[2,1])", T), StringChain.parse("e(1[0,1])", T)
    assert str(torus_string_bracket(x, y)) == "2·e(1[2,2])"


@pytest.mark.parametrize("text,central", [
    ("e(1[1,0])", False), ("e(1[0,0])", True), ("e(x[2,0])", True), ("e(y[0,3])", True),
    ("e(y[2,0])", False), ("e(x[0,3])", False), ("e(z[1,1])", True),
])
def test_center(text, central):
    x = StringChain.parse(text, T)
    assert torus_center_membership(x) is central
    assert torus_center_bruteforce(x, radius=4) is central


def test_gcd_one_z_class_is_zero():
    # e(z[3,5]) = e(M(...)) vanishes on a primitive block
    assert not StringChain.parse("e(z[3,5])", T)


CLASSES = parse_class_list("g1:3,g2:2,e")


@pytest.mark.parametrize("k,expected", [
    (0, (0, 0, 0)), (1, (0, 0, 0, 0, 3, 2)), (2, (0, 0)), (3, (0,) * 4 + (3, 2)), (4, (0, 0)),
])
def test_sigma_g_tables(k, expected):
    assert sigma_g_string_homology(2, k, CLASSES).isomorphic(AbelianGroup(expected))


def test_sigma_g_single_class():
    g = sigma_g_string_homology(2, 1, parse_class_list("g1:3"))
    assert g.isomorphic(AbelianGroup((0, 0, 0, 0, 3)))


def test_sigma_g_rejects_low_genus():
    with pytest.raises(ValueError):
        sigma_g_string_homology(1, 0)


def test_sigma_g_gysin_exact():
    assert verify_surface_gysin(2, CLASSES, 6).exact


def _oracle():
    return GoldmanOracle.from_json({
        "classes": [{"token": "g1", "l": 3}, {"token": "g2", "l": 2}, {"token": "g3"}],
        "brackets": [{"left": "g1", "right": "g2", "value": [[2, "g3"]]}],
    })


def test_oracle_bracket_and_antisymmetry():
    o = _oracle()
    x = StringChain.parse("e([g1])", G2, list(o.classes.values()))
    y = StringChain.parse("e([g2])", G2, list(o.classes.values()))
    assert str(sigma_g_string_bracket(x, y, o)) == "2·e([g3])"
    assert sigma_g_string_bracket(y, x, o) == -sigma_g_string_bracket(x, y, o)


def test_oracle_missing_entry_named():
    o = _oracle()
    x = StringChain.parse("e([g1])", G2, list(o.classes.values()))
    y = StringChain.parse("e([g3])", G2, list(o.classes.values()))
    with pytest.raises(ValueError, match="g1, g3"):
        sigma_g_string_bracket(x, y, o)


def test_oracle_rejects_non_antisymmetric():
    with pytest.raises(ValueError):
        GoldmanOracle.from_json({"brackets": [
            {"left": "p", "right": "q", "value": [[1, "r"]]},
            {"left": "q", "right": "p", "value": [[1, "r"]]}]})


def test_oracle_csv(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text("left,right,coef,result\np,q,1,r\np,r,,\n")
    o = GoldmanOracle.load(path)
    assert o.bracket(o.classes["q"], o.classes["p"]) == {"r": -1}
    assert o.bracket(o.classes["p"], o.classes["r"]) == {}


def test_identity_component_is_central():
    o = _oracle()
    assert o.bracket(IDENTITY_CLASS, o.classes["g1"]) == {}


def test_surface_plain_bracket_needs_oracle():
    from stringtop.strings import string_bracket
    x = StringChain.parse("e([g1])", G2, CLASSES)
    with pytest.raises(ValueError):
        string_bracket(x, x)
