"""Integral string homology ``H_*^{S^1}(LM)`` on named generators.

Each space has a catalog describing its string generators (degree, additive
order, printed name), the erasing map ``e`` on loop generators, the marking
map ``M`` and the cap product ``c`` with the Euler class. The Gysin sequence::

    ... -> H_k(LM) -e-> H_k^{S^1} -c-> H_{k-2}^{S^1} -M-> H_{k-1}(LM) -e-> ...

is assembled from exactly these maps, so ``verify_gysin`` checks the tables
rather than trusting them.

Degrees of string generators are ordinary degrees. Loop generators enter with
their ordinary degree ``|x| + d``; ``e`` preserves it and ``M`` raises it by one.

Names follow the usual notation: ``γ`` marks a lift along ``c`` (``γ_j`` for the
j-th), ``(α⊗y^j)x_m`` are the S^3 torsion classes and ``T(N)`` in a group
denotes a torsion block of order ``N`` whose cyclic decomposition is unknown.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import NamedTuple

from .exact import AbelianGroup, ExactnessReport, FreeChain, GroupMorphism, check_exact, cokernel
from .exact import smith_normal_form
from .loops import LoopChain, LoopMonomial, Space, bv_delta, loop_basis, loop_product, mono
from .parsing import Cursor, ParseError, parse_chain_terms

DEFAULT_MAX_DEGREE = 64


def max_degree_cap() -> int:
    """Upper bound for verification degrees (``STRINGTOP_MAX_DEGREE``)."""
    raw = os.environ.get("STRINGTOP_MAX_DEGREE")
    if raw is None:
        return DEFAULT_MAX_DEGREE
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"STRINGTOP_MAX_DEGREE must be an integer, got {raw!r}") from None
    if cap < 0:
        raise ValueError("STRINGTOP_MAX_DEGREE must be nonnegative")
    return cap


def lift_suffix(j: int, letter: str = "γ") -> str:
    if j == 0:
        return ""
    return letter if j == 1 else f"{letter}_{j}"


class GenInfo(NamedTuple):
    degree: int
    order: int  # additive order used for reduction; 0 = infinite
    name: str
    block: int = None  # order of the unresolved torsion block containing it


@dataclass(frozen=True, order=True)
class StringGen:
    """Named generator of string homology; ``kind`` and ``params`` are
    interpreted by the catalog of ``space``."""

    kind: str
    params: tuple
    space: Space

    def __post_init__(self):
        _gen_info(self)  # validates

    @property
    def degree(self) -> int:
        return _gen_info(self).degree

    @property
    def order(self) -> int:
        return _gen_info(self).order

    @property
    def block(self):
        return _gen_info(self).block

    @property
    def name(self) -> str:
        return _gen_info(self).name

    def __str__(self) -> str:
        return self.name

    def to_json(self) -> dict:
        info = _gen_info(self)
        return {"kind": self.kind, "params": [str(p) if not isinstance(p, int) else p
                                               for p in self.params],
                "name": info.name, "degree": info.degree, "order": info.order,
                "block_order": info.block}


@lru_cache(maxsize=None)
def _gen_info(g: StringGen) -> GenInfo:
    return catalog(g.space).info(g)


class StringChain(FreeChain):
    """Integer chain of string generators, reduced modulo generator orders."""

    __slots__ = ("space",)

    def __init__(self, terms=(), space: Space = None):
        if space is None:
            raise ValueError("StringChain needs a space")
        self.space = space
        items = terms.items() if hasattr(terms, "items") else terms
        checked = []
        for k, c in items:
            if k.space != space:
                raise ValueError(f"generator {k} belongs to {k.space}, not {space}")
            checked.append((k, c))
        super().__init__(checked)

    def _check_coefficient(self, c) -> None:
        if not isinstance(c, int) or isinstance(c, bool):
            raise TypeError(f"string homology coefficients are integers, got {c!r}")

    def _reduce(self, key, c):
        o = key.order
        return c % o if o else c

    def _context(self) -> dict:
        return {"space": self.space}

    @classmethod
    def parse(cls, text: str, space: Space, classes=None) -> "StringChain":
        cat = catalog(space)
        terms = parse_chain_terms(text, lambda cur: parse_string_term(cur, cat, classes))
        return cls([(g, c * e) for x, c in terms for g, e in x.items()], space)


class DegreeTable(NamedTuple):
    gens: list  # resolved generators (direct sum of cyclic groups)
    members: list  # members of the unresolved torsion block
    block_order: int  # total order of that block (1 if none)

    def group(self) -> AbelianGroup:
        names = tuple(g.name for g in self.gens)
        block = self.block_order if self.members and self.block_order > 1 else None
        return AbelianGroup(tuple(g.order for g in self.gens), names, block,
                            tuple(g.name for g in self.members) if block else ())


# ---------------------------------------------------------------- catalogs

class Catalog:
    """Generator tables and Gysin maps for one space."""

    def __init__(self, space: Space):
        self.space = space
        self.d = space.dim

    def gen(self, kind: str, *params) -> StringGen:
        return StringGen(kind, tuple(params), self.space)

    def chain(self, terms) -> StringChain:
        return StringChain(terms, self.space)

    def loop_chain(self, terms) -> LoopChain:
        return LoopChain(terms, self.space)

    def loop_basis(self, k: int, window=None) -> list:
        return loop_basis(self.space, k, window)

    def parse_loop_chain(self, text: str, classes=None) -> LoopChain:
        return LoopChain.parse(text, self.space)

    def default_window(self):
        return None

    # subclasses: info, table, erase, mark, cap, lift, gamma
    def info(self, g: StringGen) -> GenInfo:
        raise NotImplementedError

    def table(self, k: int, window=None) -> DegreeTable:
        raise NotImplementedError

    def erase(self, m: LoopMonomial) -> list:
        raise NotImplementedError

    def mark(self, g: StringGen) -> LoopChain:
        return self.loop_chain(())

    def cap(self, g: StringGen) -> list:
        return []

    def lift(self, g: StringGen) -> StringGen:
        raise ValueError(f"{g} is not in the image of the cap map")

    def gamma(self, i: int) -> StringGen:
        raise ValueError(f"no bare γ classes on {self.space}")

    def x_product(self, m: LoopMonomial, k: int) -> StringGen:
        raise ValueError(f"x-products are only used on S3, not {self.space}")

    def _bad(self, g: StringGen):
        return ValueError(f"no string generator {g.kind}{g.params} on {self.space}")


class CircleCatalog(Catalog):
    """``S^1``: components ``n``; ``n != 0`` gives ``B Z/|n|``, ``n = 0`` gives
    ``S^1 x CP^∞``."""

    def default_window(self):
        return range(-5, 6)

    def info(self, g):
        p = g.params
        if g.kind == "E" and len(p) == 1:
            return GenInfo(0, 0, f"e({mono(self.space, 'a', p[0])})")
        if g.kind == "T" and len(p) == 2 and abs(p[0]) != 1 and p[1] >= 0:
            n, i = p
            m = mono(self.space, "1", n)
            name = f"e({m})" if i == 0 else f"({m}){lift_suffix(i)}"
            return GenInfo(2 * i + 1, abs(n), name)
        if g.kind == "G" and len(p) == 1 and p[0] >= 1:
            return GenInfo(2 * p[0], 0, f"(a⊗1){lift_suffix(p[0])}")
        raise self._bad(g)

    def table(self, k, window=None):
        window = self.default_window() if window is None else window
        if k == 0:
            gens = [self.gen("E", n) for n in window]
        elif k % 2 == 0:
            gens = [self.gen("G", k // 2)]
        else:
            gens = [self.gen("T", n, (k - 1) // 2) for n in window if abs(n) != 1]
        return DegreeTable(gens, [], 1)

    def erase(self, m):
        n = m.params[0]
        if m.family == "a":
            return [(self.gen("E", n), 1)]
        return [] if abs(n) == 1 else [(self.gen("T", n, 0), 1)]

    def mark(self, g):
        if g.kind == "E":
            return bv_delta(self.loop_chain({mono(self.space, "a", g.params[0]): 1}))
        return self.loop_chain(())

    def cap(self, g):
        if g.kind == "T" and g.params[1] >= 1:
            return [(self.gen("T", g.params[0], g.params[1] - 1), 1)]
        if g.kind == "G":
            i = g.params[0]
            return [(self.gen("G", i - 1) if i >= 2 else self.gen("E", 0), 1)]
        return []

    def lift(self, g):
        if g.kind == "T":
            return self.gen("T", g.params[0], g.params[1] + 1)
        if g.kind == "G":
            return self.gen("G", g.params[0] + 1)
        if g == self.gen("E", 0):
            return self.gen("G", 1)
        return super().lift(g)


class OddCatalog(Catalog):
    """Odd spheres ``n >= 3``: ``E(i) = e(a⊗u^i)``, ``X(i) = (a⊗1)x_i``, and
    ``T(j, m) = (a⊗u^j)x_m`` of order ``j`` (the class ``e(1⊗u^{j-1})`` and
    its lifts). For ``n >= 5`` odd-degree torsion forms a block of order ``K!``
    whose extension is left unresolved."""

    def __init__(self, space):
        super().__init__(space)
        self.n = space.n
        self.s3 = space.n == 3

    def _t_degree(self, j, m):
        return (j - 1) * (self.n - 1) + self.n + 2 * (m - 1)

    def _t_members(self, k):
        out = []
        j = 2
        while self._t_degree(j, 1) <= k:
            rest = k - self._t_degree(j, 1)
            if rest % 2 == 0:
                out.append((j, rest // 2 + 1))
            j += 1
        return out

    def info(self, g):
        p, n = g.params, self.n
        if g.kind == "E" and len(p) == 1 and p[0] >= 1:
            m = mono(self.space, "a", p[0])
            return GenInfo(p[0] * (n - 1), 0, str(m) if self.s3 else f"e({m})")
        if g.kind == "X" and len(p) == 1 and p[0] >= 0:
            i = p[0]
            if self.s3:
                name = "α⊗1" if i == 0 else f"(α⊗1){lift_suffix(i, 'x')}"
            else:
                name = "e(a⊗1)" if i == 0 else f"γ_{i}"
            return GenInfo(2 * i, 0, name)
        if g.kind == "T" and len(p) == 2 and p[0] >= 2 and p[1] >= 1:
            j, m = p
            deg = self._t_degree(j, m)
            if self.s3:
                return GenInfo(deg, j, f"({mono(self.space, 'a', j)}){lift_suffix(m, 'x')}")
            name = f"e({mono(self.space, '1', j - 1)}){lift_suffix(m - 1)}"
            members = self._t_members(deg)
            block = prod(jj for jj, _ in members) if len(members) > 1 else None
            # e(1⊗u^{j-1}) itself has order j; lifts inside a block only die at the block order
            return GenInfo(deg, block if block and m > 1 else j, name, block)
        raise self._bad(g)

    def table(self, k, window=None):
        if k % 2 == 0:
            gens = [self.gen("X", k // 2)]
            if k > 0 and k % (self.n - 1) == 0:
                gens.append(self.gen("E", k // (self.n - 1)))
            return DegreeTable(gens, [], 1)
        members = [self.gen("T", j, m) for j, m in self._t_members(k)]
        if self.s3 or len(members) <= 1:
            return DegreeTable(members, [], 1)
        return DegreeTable([], members, prod(g.params[0] for g in members))

    def erase(self, m):
        i = m.params[0]
        if m.family == "a":
            return [(self.gen("E", i) if i >= 1 else self.gen("X", 0), 1)]
        return [(self.gen("T", i + 1, 1), 1)] if i >= 1 else []

    def mark(self, g):
        if g.kind == "E":
            return bv_delta(self.loop_chain({mono(self.space, "a", g.params[0]): 1}))
        return self.loop_chain(())

    def cap(self, g):
        if g.kind == "X" and g.params[0] >= 1:
            return [(self.gen("X", g.params[0] - 1), 1)]
        if g.kind == "T" and g.params[1] >= 2:
            return [(self.gen("T", g.params[0], g.params[1] - 1), 1)]
        return []

    def lift(self, g):
        if g.kind == "X":
            return self.gen("X", g.params[0] + 1)
        if g.kind == "T":
            return self.gen("T", g.params[0], g.params[1] + 1)
        return super().lift(g)

    def gamma(self, i):
        return self.gen("X", i)

    def x_product(self, m, k):
        if not self.s3 or m.family != "a":
            return super().x_product(m, k)
        j = m.params[0]
        if j == 0:
            return self.gen("X", k)
        if j == 1 or k < 1:
            raise ValueError(f"({m})x_{k} is not a generator")
        return self.gen("T", j, k)


class EvenCatalog(Catalog):
    """Even spheres. ``G(i) = γ_i`` (``G(0) = e(a)``), ``B(k) = e(b v^k)``,
    ``A(k, m)``: lifts of ``e(a v^k)`` of order 2, ``V(k, m)``: lifts of
    ``e(v^k)``. On ``S^2`` the class ``e(a v^{k+1})`` equals
    ``(2k+1) e(v^k)`` and ``e(v^k)`` has order ``2(2k+1)``."""

    def __init__(self, space):
        super().__init__(space)
        self.n = space.n
        self.P = 2 * space.n - 2
        self.s2 = space.n == 2

    def _v_order(self, k):
        return 2 * (2 * k + 1) if self.s2 else 2 * k + 1

    def _v_members(self, D):
        out = []
        k = 0 if self.s2 else 1
        while self.n + k * self.P <= D:
            rest = D - self.n - k * self.P
            if rest % 2 == 0:
                out.append((k, rest // 2))
            k += 1
        return out

    def _v_resolved(self, D, members):
        return len(members) <= 1 or (self.s2 and D == 4)

    def info(self, g):
        p, n, P = g.params, self.n, self.P
        if g.kind == "G" and len(p) == 1 and p[0] >= 0:
            return GenInfo(2 * p[0], 0, "e(a)" if p[0] == 0 else f"γ_{p[0]}")
        if g.kind == "B" and len(p) == 1 and p[0] >= 0:
            return GenInfo(n - 1 + p[0] * P, 0, f"e({mono(self.space, 'b', p[0])})")
        if g.kind == "A" and not self.s2 and len(p) == 2 and p[0] >= 1 and p[1] >= 0:
            k, m = p
            return GenInfo(k * P + 2 * m, 2, f"e({mono(self.space, 'a', k)}){lift_suffix(m)}")
        if g.kind == "V" and len(p) == 2 and p[0] >= (0 if self.s2 else 1) and p[1] >= 0:
            k, m = p
            deg = n + k * P + 2 * m
            base = "a*v" if self.s2 and k == 0 else str(mono(self.space, "v", k))
            name = f"e({base}){lift_suffix(m)}"
            members = self._v_members(deg)
            if self._v_resolved(deg, members):
                return GenInfo(deg, self._v_order(k), name)
            block = prod(self._v_order(kk) for kk, _ in members)
            order = self._v_order(k) if m == 0 else block
            return GenInfo(deg, order, name, block)
        raise self._bad(g)

    def table(self, D, window=None):
        n, P = self.n, self.P
        if D % 2:
            if (D - n + 1) >= 0 and (D - n + 1) % P == 0:
                return DegreeTable([self.gen("B", (D - n + 1) // P)], [], 1)
            return DegreeTable([], [], 1)
        gens = [self.gen("G", D // 2)]
        if not self.s2:
            gens += [self.gen("A", k, (D - k * P) // 2) for k in range(1, D // P + 1)]
        members = [self.gen("V", k, m) for k, m in self._v_members(D)]
        if self._v_resolved(D, members):
            return DegreeTable(gens + members, [], 1)
        return DegreeTable(gens, members, prod(self._v_order(g.params[0]) for g in members))

    def erase(self, m):
        k = m.params[0]
        if m.family == "a":
            if k == 0:
                return [(self.gen("G", 0), 1)]
            if self.s2:
                return [(self.gen("V", k - 1, 0), 2 * k - 1)]
            return [(self.gen("A", k, 0), 1)]
        if m.family == "b":
            return [(self.gen("B", k), 1)]
        if k == 0 and not self.s2:
            return []
        return [(self.gen("V", k, 0), 1)]

    def mark(self, g):
        if g.kind == "B":
            return bv_delta(self.loop_chain({mono(self.space, "b", g.params[0]): 1}))
        return self.loop_chain(())

    def cap(self, g):
        if g.kind == "G" and g.params[0] >= 1:
            return [(self.gen("G", g.params[0] - 1), 1)]
        if g.kind in ("A", "V") and g.params[1] >= 1:
            return [(self.gen(g.kind, g.params[0], g.params[1] - 1), 1)]
        return []

    def lift(self, g):
        if g.kind == "G":
            return self.gen("G", g.params[0] + 1)
        if g.kind in ("A", "V"):
            return self.gen(g.kind, g.params[0], g.params[1] + 1)
        return super().lift(g)

    def gamma(self, i):
        return self.gen("G", i)


@lru_cache(maxsize=None)
def catalog(space: Space) -> Catalog:
    fam = space.family
    if fam == "circle":
        return CircleCatalog(space)
    if fam == "odd":
        return OddCatalog(space)
    if fam == "even":
        return EvenCatalog(space)
    from . import surfaces  # registers the surface catalogs
    if fam == "torus":
        return surfaces.TorusCatalog(space)
    return surfaces.SurfaceCatalog(space)


# ---------------------------------------------------------------- parsing

def _balanced(cur: Cursor) -> str:
    """Consume ``( ... )`` and return the inside."""
    cur.expect("(")
    start, depth = cur.pos, 1
    text = cur.text
    while cur.pos < len(text):
        ch = text[cur.pos]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                inner = text[start:cur.pos]
                cur.pos += 1
                return inner
        cur.pos += 1
    raise cur.error("unbalanced parenthesis", start - 1)


def _suffix(cur: Cursor, letter: str) -> int:
    """``letter``, ``letter_j`` or nothing; returns the count."""
    if not cur.take(letter):
        return 0
    if cur.pos < len(cur.text) and cur.text[cur.pos] == "_":
        cur.pos += 1
        cur.take("{")
        j = cur.integer()
        cur.take("}")
        return j
    return 1


def _single_monomial(chain, what: str):
    items = list(chain.items())
    if len(items) != 1 or items[0][1] != 1:
        raise ValueError(f"{what} is {chain}, not a single monomial")
    return items[0][0]


def _lift_times(cat: Catalog, x: StringChain, j: int) -> StringChain:
    for _ in range(j):
        x = cat.chain([(cat.lift(g), c) for g, c in x.items()])
    return x


def parse_string_term(cur: Cursor, cat: Catalog, classes=None) -> StringChain:
    """One term of a string chain, returned as a chain: ``e(L)`` may erase to
    several generators (e.g. ``e(y[2,0])`` on the torus is ``-e(q·x - p·y)``)."""
    start = cur.pos
    try:
        if cur.startswith("e("):
            cur.pos += 1
            inner = _balanced(cur)
            x = erasing(cat.parse_loop_chain(inner, classes))
            return _lift_times(cat, x, _suffix(cur, "γ"))
        if cur.peek() == "(":
            inner = _balanced(cur)
            m = _single_monomial(cat.parse_loop_chain(inner, classes), f"({inner})")
            if cur.peek() == "x":
                return cat.chain({cat.x_product(m, _suffix(cur, "x")): 1})
            j = _suffix(cur, "γ")
            if j == 0:
                raise ValueError(f"expected γ or x after ({inner})")
            return _lift_times(cat, erasing(cat.loop_chain({m: 1})), j)
        if cur.peek() == "γ":
            return cat.chain({cat.gamma(_suffix(cur, "γ")): 1})
        sub = Cursor(cur.text, cur.pos)
        if cat.space.family == "surface":
            from .surfaces import parse_surface_monomial
            m = parse_surface_monomial(sub, cat.space, classes)
        else:
            from .loops import parse_loop_monomial
            m = parse_loop_monomial(sub, cat.space)
        cur.pos = sub.pos
        return _lift_times(cat, erasing(cat.loop_chain({m: 1})), _suffix(cur, "γ"))
    except ParseError:
        raise
    except ValueError as exc:
        raise cur.error(str(exc), start) from None


# ---------------------------------------------------------------- maps

def _check_space(x, y) -> None:
    if x.space != y.space:
        raise ValueError(f"mixed spaces: {x.space} and {y.space}")


def erasing(x: LoopChain) -> StringChain:
    """The erasing map ``e``, degree-preserving in ordinary degrees."""
    cat = catalog(x.space)
    return cat.chain([(g, c * e) for m, c in x.items() for g, e in cat.erase(m)])


def marking(x: StringChain) -> LoopChain:
    """The marking map ``M``; ``M(e(g)) = Δ(g)`` and torsion or ``γ``-lifted
    classes go to zero."""
    cat = catalog(x.space)
    return cat.loop_chain([(m, c * v) for g, c in x.items() for m, v in cat.mark(g).items()])


def cap(x: StringChain) -> StringChain:
    """Cap product with the Euler class, degree -2."""
    cat = catalog(x.space)
    return cat.chain([(h, c * e) for g, c in x.items() for h, e in cat.cap(g)])


def string_homology(space: Space, k: int, window=None) -> AbelianGroup:
    """``H_k^{S^1}(LM)`` with named generators.

    ``window`` restricts the components for ``S^1`` (exponents), the torus
    (``(n, m)`` blocks) and genus ``g`` surfaces (class list).
    """
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    return catalog(space).table(k, window).group()


def string_bracket(x: StringChain, y: StringChain) -> StringChain:
    """``[x, y] = (-1)^{|x|-d} e(M(x) • M(y))`` for homogeneous ``x``."""
    _check_space(x, y)
    if x.space.family == "surface":
        raise ValueError("genus >= 2 brackets need a Goldman oracle (sigma_g_string_bracket)")
    if not x:
        return StringChain((), x.space)
    s = -1 if (x.homogeneous_degree() - x.space.dim) % 2 else 1
    return s * erasing(loop_product(marking(x), marking(y)))


# ---------------------------------------------------------------- Gysin

def _vector(chain, basis: list, where: str) -> list:
    index = {k: i for i, k in enumerate(basis)}
    vec = [0] * len(basis)
    for k, c in chain.items():
        if k not in index:
            raise ValueError(f"{where}: {k} lies outside the truncated basis")
        vec[index[k]] += c
    return vec


def _group(basis: list) -> AbelianGroup:
    return AbelianGroup(tuple(k.order for k in basis), tuple(str(k) for k in basis))


def _morphism(src: list, dst: list, fn, where: str) -> GroupMorphism:
    cols = [_vector(fn(k), dst, where) for k in src]
    matrix = [[cols[j][i] for j in range(len(src))] for i in range(len(dst))]
    return GroupMorphism(_group(src), _group(dst), matrix)


def gysin_sequence(cat: Catalog, max_degree: int, window=None, overrides=None):
    """Maps and node labels of the Gysin sequence from ``H_top(LM)`` down to
    ``H_0^{S^1} -> 0``.

    ``overrides`` maps ``(name, generator)`` with ``name`` in ``{"e", "c", "M"}``
    to a replacement chain; it exists to check that corrupted tables are caught.
    """
    overrides = dict(overrides or {})
    space = cat.space

    def e_map(m):
        return overrides.get(("e", m)) or erasing(cat.loop_chain({m: 1}))

    def c_map(g):
        return overrides.get(("c", g)) or cap(cat.chain({g: 1}))

    def m_map(g):
        return overrides.get(("M", g)) or marking(cat.chain({g: 1}))

    def strings(k):
        if k < 0:
            return []
        t = cat.table(k, window)
        if t.members:
            raise ValueError(f"degree {k} of {space} has an unresolved block; "
                             "the Gysin maps are not determined there")
        return t.gens

    def loops(k):
        return cat.loop_basis(k, window) if k >= 0 else []

    maps, labels = [], []
    for k in range(max_degree, -1, -1):
        labels += [f"H_{k}(L)", f"H_{k}^S1"]
        maps.append(_morphism(loops(k), strings(k), e_map, f"e on H_{k}(L)"))
        maps.append(_morphism(strings(k), strings(k - 2), c_map, f"c on H_{k}^S1"))
        if k >= 1:
            labels.append(f"H_{k - 2}^S1")
            maps.append(_morphism(strings(k - 2), loops(k - 1), m_map, f"M on H_{k - 2}^S1"))
    labels.append("H_-2^S1")
    return maps, labels


def verify_gysin(space: Space, max_degree: int, window=None, overrides=None) -> ExactnessReport:
    """Check exactness of the Gysin sequence for ``S^1`` or ``S^3`` up to
    ``max_degree`` (the torus is checked blockwise in ``surfaces``)."""
    if space.kind != "sphere" or space.n not in (1, 3):
        raise ValueError(f"Gysin maps are fully determined only for S1 and S3, not {space}")
    cap_ = max_degree_cap()
    if max_degree < 0 or max_degree > cap_:
        raise ValueError(f"max degree {max_degree} outside [0, {cap_}] "
                         "(raise STRINGTOP_MAX_DEGREE to allow more)")
    cat = catalog(space)
    if window is None and space.n == 1:
        window = range(-10, 11)
    maps, labels = gysin_sequence(cat, max_degree, window, overrides)
    return check_exact(maps, labels)


# ---------------------------------------------------------------- audit

def _torsion_order(group: AbelianGroup) -> int:
    return prod(group.torsion) * (group.unresolved_order or 1)


def _free_images(cat: Catalog, k: int, window=None):
    """Free generators of degree ``k`` and the matrix of ``M`` on them into the
    loop basis of degree ``k + 1``."""
    t = cat.table(k, window) if k >= 0 else DegreeTable([], [], 1)
    free = [g for g in t.gens if g.order == 0]
    basis = cat.loop_basis(k + 1, window) if k + 1 >= 0 else []
    m = GroupMorphism(_group(free), _group(basis),
                      [[_vector(marking(cat.chain({g: 1})), basis, "M")[i] for g in free]
                       for i in range(len(basis))])
    return free, basis, m


@dataclass
class AuditEntry:
    k: int
    degree: int
    block_order: int
    expected_order: int
    gysin_order: int
    torsion_order: int
    free_rank: int
    gysin_rank: int
    ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class AuditReport:
    space: Space
    entries: list

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_json(self) -> dict:
        return {"space": str(self.space), "ok": self.ok,
                "entries": [e.to_json() for e in self.entries]}

    def __str__(self) -> str:
        head = (f"{'k':>3} {'deg':>4} {'block':>8} {'expected':>9} {'torsion':>8} "
                f"{'gysin':>8} {'rank':>4} {'gysin':>5}  status")
        rows = [head]
        for e in self.entries:
            rows.append(f"{e.k:>3} {e.degree:>4} {e.block_order:>8} {e.expected_order:>9} "
                        f"{e.torsion_order:>8} {e.gysin_order:>8} {e.free_rank:>4} "
                        f"{e.gysin_rank:>5}  {'ok' if e.ok else 'MISMATCH'}")
        rows.append("consistent" if self.ok else "INCONSISTENT")
        return "\n".join(rows)


def consistency_audit(space: Space, max_k: int) -> AuditReport:
    """Order and rank bookkeeping forced by the Gysin sequence on ``S^n``,
    ``n >= 5``, where extensions stay unresolved.

    For each degree ``D`` the sequence gives
    ``0 -> coker(M: H_{D-1}^S1 -> H_D(L)) -> H_D^S1 -> ker(M: H_{D-2}^S1 -> H_{D-1}(L)) -> 0``;
    the torsion order and free rank of the table must match, and the block
    for ``k`` (``t_k`` on odd spheres, ``C_k`` on even ones) must have order
    ``k!`` respectively ``prod_{i<=k} (2i+1)``.
    """
    if space.kind != "sphere" or space.n < 5:
        raise ValueError("the audit covers spheres S^n with n >= 5")
    if max_k < 0:
        raise ValueError("max_k must be >= 0")
    cat = catalog(space)
    n = space.n
    if n % 2:
        first = {k: k * (n - 1) + 1 for k in range(max_k + 1)}
        expected = {k: prod(range(1, k + 1)) for k in range(max_k + 1)}
    else:
        first = {k: n + k * (2 * n - 2) for k in range(max_k + 1)}
        expected = {k: prod(2 * i + 1 for i in range(1, k + 1)) for k in range(max_k + 1)}
    top = max(first.values())
    cap_ = max_degree_cap()
    if top > cap_:
        raise ValueError(f"audit needs degree {top} > {cap_} (raise STRINGTOP_MAX_DEGREE)")

    torsion, ranks = {}, {}
    for D in range(0, top + 1):
        _, _, m_in = _free_images(cat, D - 1)
        co = cokernel(m_in)
        prev = D - 2
        prev_t = torsion.get(prev, 1)
        free_prev, _, m_prev = _free_images(cat, prev)
        rk = smith_normal_form(m_prev.matrix).rank if m_prev.matrix else 0
        torsion[D] = _torsion_order(co) * prev_t
        ranks[D] = co.free_rank + (len(free_prev) - rk)

    entries = []
    for k in range(max_k + 1):
        D = first[k]
        table = cat.table(D)
        group = table.group()
        if n % 2:
            block = _torsion_order(group)
        else:
            # the odd part: members of the e(v^k) block
            odd = [g for g in table.gens + table.members if g.kind == "V"]
            block = table.block_order if table.members else prod(g.order for g in odd)
        ok = (block == expected[k] and _torsion_order(group) == torsion[D]
              and group.free_rank == ranks[D])
        entries.append(AuditEntry(k, D, block, expected[k], torsion[D],
                                  _torsion_order(group), group.free_rank, ranks[D], ok))
    return AuditReport(space, entries)
