import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from stringtop.exact import (AbelianGroup, FreeChain, GroupMorphism, check_exact, cokernel,
                             kernel_generators, matmul, quotient, smith_normal_form, subquotient)

from oracles import coset_count, group_count

small = st.integers(-5, 5)


def matrices(max_rows=3, max_cols=3):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_snf_transforms_and_divisibility(m):
    snf = smith_normal_form(m)
    assert matmul(matmul(snf.U, m), snf.V) == snf.diagonal
    nz = [d for d in snf.factors if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_matches_sympy(m):
    ours = [d for d in smith_normal_form(m).factors if d]
    diag = sympy_snf(Matrix(m), domain=ZZ)
    theirs = sorted(abs(int(diag[i, i])) for i in range(min(diag.shape)) if diag[i, i] != 0)
    assert sorted(ours) == theirs


def test_cokernel_coset_enumeration_exhaustive_2x2_sample():
    # every 2x2 (and 2x1, 1x2, 1x1) relation matrix with entries in [-5, 5] on a grid
    vals = range(-5, 6)
    shapes = [(1, 1), (1, 2), (2, 1), (2, 2)]
    for a, b in shapes:
        entries = list(itertools.product(vals, repeat=a * b))
        step = 1 if a * b <= 2 else 37  # thin the 4-entry case, still ~4000 matrices
        for flat in entries[::step]:
            mat = [list(flat[i * b:(i + 1) * b]) for i in range(a)]
            f = GroupMorphism(AbelianGroup((0,) * b), AbelianGroup((0,) * a), mat)
            g = cokernel(f)
            cols = [[mat[i][j] for i in range(a)] for j in range(b)]
            for N in (2, 3, 4, 5, 6, 8, 9, 10):
                assert group_count(g, N) == coset_count(a, cols, N), (mat, N, g)


def test_cokernel_with_torsion_codomain():
    f = GroupMorphism(AbelianGroup((0,)), AbelianGroup((4, 0)), [[2], [3]])
    g = cokernel(f)
    for N in range(1, 13):
        assert group_count(g, N) == coset_count(2, [[2, 3], [4, 0]], N)


def test_group_text_and_names():
    assert str(AbelianGroup(())) == "0"
    q = quotient(2, [[2, 4]], ["x", "y"])
    assert q.group.isomorphic(AbelianGroup((2, 0)))
    g = AbelianGroup((0, 2), ("u", "v"))
    assert str(g) == "Z ⟨u⟩ ⊕ Z/2 ⟨v⟩"
    assert AbelianGroup.from_json(g.to_json()).isomorphic(g)


def test_unresolved_block_printing():
    g = AbelianGroup((0,), ("γ",), 6, ("p", "q"))
    assert "T(6)" in str(g)
    assert g.to_json()["unresolved_order"] == 6


def test_bad_orders_rejected():
    with pytest.raises(ValueError):
        AbelianGroup((1,))
    with pytest.raises(ValueError):
        AbelianGroup((2, 0), ("only one",))


def test_subquotient_simple_complex():
    # Z --(2)--> Z --0--> Z: homology at the middle is Z/2
    assert subquotient(1, [[0]], [[2]]).isomorphic(AbelianGroup((2,)))
    with pytest.raises(ValueError):
        subquotient(1, [[1]], [[1]])


def test_kernel_generators_respect_torsion():
    f = GroupMorphism(AbelianGroup((0,)), AbelianGroup((6,)), [[2]])
    ker = kernel_generators(f)
    assert ker and all((2 * v[0]) % 6 == 0 for v in ker)
    assert any(v[0] % 3 == 0 for v in ker)


def _ses(n):
    z, zn = AbelianGroup((0,)), AbelianGroup((n,))
    return [GroupMorphism(AbelianGroup(()), z, [[]]),
            GroupMorphism(z, z, [[n]]), GroupMorphism(z, zn, [[1]]),
            GroupMorphism(zn, AbelianGroup(()), [])]


@pytest.mark.parametrize("n", [2, 3, 7])
def test_short_exact_sequence_is_exact(n):
    rep = check_exact(_ses(n))
    assert rep.exact and rep.checked == 3


def test_mutation_is_localized():
    seq = _ses(5)
    seq[1] = GroupMorphism(seq[1].domain, seq[1].codomain, [[10]])
    rep = check_exact(seq, ["0", "Z", "Z'", "Z/5", "0'"])
    assert not rep.exact
    [bad] = rep.failures
    assert bad.label == "Z'" and bad.reason == "kernel not in image" and bad.witness
    assert rep.to_json()["nodes"][2]["status"] == "fail"


def test_composability_checked():
    f = GroupMorphism(AbelianGroup((0,)), AbelianGroup((0,)), [[1]])
    g = GroupMorphism(AbelianGroup((2,)), AbelianGroup((2,)), [[1]])
    with pytest.raises(ValueError):
        check_exact([f, g])


def test_morphism_json_round_trip():
    f = GroupMorphism(AbelianGroup((0, 3), ("a", "b")), AbelianGroup((0,)), [[1, 0]])
    assert GroupMorphism.from_json(f.to_json()).matrix == f.matrix


# ---------------------------------------------------------------- free module axioms

keys = st.sampled_from(["p", "q", "r", "s"])
chains = st.dictionaries(keys, st.integers(-20, 20), max_size=4).map(FreeChain)
coefs = st.integers(-9, 9)


@given(chains, chains, chains)
def test_addition_axioms(x, y, z):
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert x - x == FreeChain()
    assert -(-x) == x


@given(coefs, coefs, chains, chains)
def test_scalar_axioms(a, b, x, y):
    assert a * (x + y) == a * x + a * y
    assert (a + b) * x == a * x + b * x
    assert (a * b) * x == a * (b * x)
    assert 1 * x == x and not (0 * x)


def test_zero_terms_dropped_and_rationals():
    x = FreeChain({"p": 0, "q": Fraction(1, 2)})
    assert list(x) == ["q"] and x.coefficient("q") == Fraction(1, 2)
