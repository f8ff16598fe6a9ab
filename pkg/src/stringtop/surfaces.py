"""String homology and string brackets of the torus and of genus ``g >= 2``
surfaces.

Torus. Every class ``(n, m)`` is a block; with ``g = gcd(n, m)``,
``n' = n/g``, ``m' = m/g`` and Bézout ``p n + q m = g`` the degree-one block
is generated by::

    τ = e(n'·x + m'·y)   of order g     φ = s·e(q·x - p·y)   free

with the sign ``s = ±1`` making the leading coefficient of ``φ`` positive, so
that ``e(x) = p τ + s m' φ``, ``e(y) = q τ - s n' φ``, ``M(τ) = 0`` and
``M(φ) = s g z``. Block ``(0, 0)`` has ``Δ = 0`` and all of its classes lift
along the cap product (``γ`` suffixes). Block groups are also computed
directly as cokernels and subquotients of the ``Δ`` matrices, and the two
answers are compared.

Genus ``g >= 2``. Components are conjugacy classes ``[γ]`` supplied as a
window of ``SurfaceConjClass`` tokens; degree-zero brackets come from a
user-supplied ``GoldmanOracle``.
"""

from __future__ import annotations

import csv
import io
import json
from math import gcd
from pathlib import Path

from .exact import AbelianGroup, ExactnessReport, check_exact, format_terms, quotient, subquotient
from .goldman import TorusChain, bezout, goldman_bracket
from .loops import (IDENTITY_CLASS, LoopChain, LoopMonomial, Space, SurfaceConjClass, bv_delta,
                    mono)
from .parsing import Cursor, parse_chain_terms
from .strings import (Catalog, DegreeTable, GenInfo, StringChain, catalog,
                      gysin_sequence, lift_suffix, max_degree_cap, string_bracket)

__all__ = [
    "GoldmanOracle", "SurfaceConjClass", "TorusCatalog", "SurfaceCatalog",
    "torus_block_homology", "torus_string_homology", "torus_gysin_block",
    "torus_string_bracket", "torus_center_membership", "torus_center_bruteforce",
    "sigma_g_string_homology", "sigma_g_string_bracket", "verify_surface_gysin",
    "parse_window", "parse_class_list", "iter_torus_blocks",
]

TORUS = Space.torus()


def parse_window(text: str) -> list:
    """``n0:n1,m0:m1`` (inclusive ranges) to a list of ``(n, m)`` blocks."""
    try:
        a, b = text.split(",")
        n0, n1 = (int(v) for v in a.split(":"))
        m0, m1 = (int(v) for v in b.split(":"))
    except ValueError:
        raise ValueError(f"window must look like n0:n1,m0:m1, got {text!r}") from None
    if n0 > n1 or m0 > m1:
        raise ValueError(f"empty window {text!r}")
    return [(n, m) for n in range(n0, n1 + 1) for m in range(m0, m1 + 1)]


def default_torus_window(radius: int = 2) -> list:
    return [(n, m) for n in range(-radius, radius + 1) for m in range(-radius, radius + 1)]


# ---------------------------------------------------------------- torus

class TorusCatalog(Catalog):
    def default_window(self):
        return default_torus_window()

    @staticmethod
    def block_data(n: int, m: int):
        """``(g, n', m', p, q)`` for block ``(n, m) != (0, 0)``."""
        g, p, q = bezout(n, m)
        return g, n // g, m // g, p, q

    def _rep(self, kind: str, n: int, m: int) -> LoopChain:
        """Loop chain whose erasure is the degree-zero-lift generator."""
        sp = self.space
        if kind == "one":
            return self.loop_chain({mono(sp, "1", n, m): 1})
        if kind == "z":
            return self.loop_chain({mono(sp, "z", n, m): 1})
        if (n, m) == (0, 0):
            fam = "x" if kind == "tau" else "y"
            return self.loop_chain({mono(sp, fam, 0, 0): 1})
        g, n1, m1, p, q = self.block_data(n, m)
        if kind == "tau":
            return self.loop_chain({mono(sp, "x", n, m): n1, mono(sp, "y", n, m): m1})
        s = self.phi_sign(p, q)
        return self.loop_chain({mono(sp, "x", n, m): s * q, mono(sp, "y", n, m): -s * p})

    @staticmethod
    def phi_sign(p: int, q: int) -> int:
        """φ is ``±e(q·x - p·y)``, signed so its leading coefficient is positive."""
        return 1 if q > 0 or (q == 0 and p < 0) else -1

    def info(self, g):
        if len(g.params) != 3 or g.kind not in ("one", "tau", "phi", "z"):
            raise self._bad(g)
        n, m, j = g.params
        if j < 0:
            raise self._bad(g)
        origin = (n, m) == (0, 0)
        d = gcd(n, m)
        if g.kind in ("one", "phi") and j > 0 and not origin:
            raise ValueError(f"{g.kind} classes of block ({n},{m}) do not lift along c")
        if g.kind in ("tau", "z") and not origin and d == 1:
            raise ValueError(f"block ({n},{m}) has gcd 1: no {g.kind} class")
        order = 0 if origin or g.kind in ("one", "phi") else d
        degree = {"one": 0, "tau": 1, "phi": 1, "z": 2}[g.kind] + 2 * j
        rep = self._rep(g.kind, n, m)
        name = f"e({format_terms(rep.items())}){lift_suffix(j)}"
        return GenInfo(degree, order, name)

    def _block_gens(self, k: int, n: int, m: int) -> list:
        origin = (n, m) == (0, 0)
        big = origin or gcd(n, m) > 1
        out = []
        if k == 0:
            out.append(self.gen("one", n, m, 0))
        elif k % 2:
            j = (k - 1) // 2
            if big:
                out.append(self.gen("tau", n, m, j))
            if j == 0 or origin:
                out.append(self.gen("phi", n, m, j))
        else:
            j = (k - 2) // 2
            if big:
                out.append(self.gen("z", n, m, j))
            if origin:
                out.append(self.gen("one", 0, 0, k // 2))
        return out

    def table(self, k, window=None):
        window = self.default_window() if window is None else window
        return DegreeTable([g for n, m in window for g in self._block_gens(k, n, m)], [], 1)

    def erase(self, mo):
        n, m = mo.params
        if mo.family == "1":
            return [(self.gen("one", n, m, 0), 1)]
        origin = (n, m) == (0, 0)
        big = origin or gcd(n, m) > 1
        if mo.family == "z":
            return [(self.gen("z", n, m, 0), 1)] if big else []
        if origin:
            return [(self.gen("tau" if mo.family == "x" else "phi", 0, 0, 0), 1)]
        g, n1, m1, p, q = self.block_data(n, m)
        s = self.phi_sign(p, q)
        ct, cp = (p, s * m1) if mo.family == "x" else (q, -s * n1)
        out = [(self.gen("phi", n, m, 0), cp)]
        if big:
            out.append((self.gen("tau", n, m, 0), ct))
        return out

    def mark(self, g):
        n, m, j = g.params
        if j > 0:
            return self.loop_chain(())
        return bv_delta(self._rep(g.kind, n, m))

    def cap(self, g):
        n, m, j = g.params
        return [(self.gen(g.kind, n, m, j - 1), 1)] if j > 0 else []

    def lift(self, g):
        n, m, j = g.params
        return self.gen(g.kind, n, m, j + 1)


def _delta_matrix(src: list, dst: list) -> list:
    index = {k: i for i, k in enumerate(dst)}
    cols = []
    for k in src:
        col = [0] * len(dst)
        for t, c in bv_delta(LoopChain({k: 1}, TORUS)).items():
            col[index[t]] += c
        cols.append(col)
    return [[cols[j][i] for j in range(len(src))] for i in range(len(dst))]


def torus_block_homology(k: int, n: int, m: int) -> AbelianGroup:
    """``H_k^{S^1}`` of block ``(n, m)`` from the ``Δ`` complex alone.

    The Gysin sequence splits into short exact sequences
    ``0 -> coker(M) -> H_k -> ker(M) -> 0``; on the torus this yields
    ``H_0 = Z``, ``H_1 = coker Δ_0``, ``H_2 = coker Δ_1 ⊕ ker Δ_0`` and,
    for ``k >= 3``, ``H_k`` equal to ``ker Δ_1 / im Δ_0`` (odd ``k``) or ``H_2``
    (even ``k``).
    """
    if k < 0:
        raise ValueError("degree must be >= 0")
    L0 = [mono(TORUS, "1", n, m)]
    L1 = [mono(TORUS, "x", n, m), mono(TORUS, "y", n, m)]
    L2 = [mono(TORUS, "z", n, m)]
    d0 = _delta_matrix(L0, L1)  # 2x1
    d1 = _delta_matrix(L1, L2)  # 1x2
    if k == 0:
        return AbelianGroup((0,))
    if k == 1:
        return quotient(2, [[d0[0][0], d0[1][0]]]).group
    if k % 2 == 0:
        coker = quotient(1, [[d1[0][0]], [d1[0][1]]]).group
        ker_rank = 1 if d0[0][0] == 0 and d0[1][0] == 0 else 0
        return AbelianGroup(coker.orders + (0,) * ker_rank)
    return subquotient(2, d1, [[d0[0][0], d0[1][0]]])


def torus_string_homology(k: int, window=None) -> AbelianGroup:
    """Named direct sum over the blocks of ``window`` (default ``|n|,|m| <= 2``).

    Each block's named group is checked against ``torus_block_homology``.
    """
    cat = catalog(TORUS)
    window = cat.default_window() if window is None else list(window)
    if k < 0:
        raise ValueError("degree must be >= 0")
    orders, names = [], []
    for n, m in window:
        gens = cat._block_gens(k, n, m)
        named = AbelianGroup(tuple(g.order for g in gens))
        computed = torus_block_homology(k, n, m)
        if not named.isomorphic(computed):
            raise RuntimeError(f"block ({n},{m}) degree {k}: generators give {named}, "
                               f"Δ complex gives {computed}")
        orders += [g.order for g in gens]
        names += [g.name for g in gens]
    return AbelianGroup(tuple(orders), tuple(names))


def iter_torus_blocks(k: int, window):
    """Lazily yield ``((n, m), group)`` per block."""
    for n, m in window:
        yield (n, m), torus_block_homology(k, n, m)


def torus_gysin_block(n: int, m: int, max_degree: int = 7) -> ExactnessReport:
    """Exactness of the Gysin sequence restricted to block ``(n, m)``."""
    cap_ = max_degree_cap()
    if max_degree < 0 or max_degree > cap_:
        raise ValueError(f"max degree {max_degree} outside [0, {cap_}]")
    maps, labels = gysin_sequence(catalog(TORUS), max_degree, [(n, m)])
    return check_exact(maps, labels)


def _goldman_image(x: StringChain) -> TorusChain:
    terms = []
    for g, c in x.items():
        if g.kind != "one" or g.params[2] != 0:
            raise ValueError(f"{g} is not a degree-0 class e(1[n,m])")
        terms.append(((g.params[0], g.params[1]), c))
    from .goldman import TorusClass
    return TorusChain([(TorusClass(i, j), c) for (i, j), c in terms], "Z")


def torus_string_bracket(x: StringChain, y: StringChain) -> StringChain:
    """String bracket on the torus. In degree ``0 ⊗ 0`` the result is computed
    twice, through ``e(M(x) • M(y))`` and through the Goldman bracket under
    ``e(1[n,m]) <-> a^n b^m``, and the two must agree."""
    for v in (x, y):
        if v.space != TORUS:
            raise ValueError(f"expected torus chains, got {v.space}")
    result = string_bracket(x, y)
    if x and y and x.degrees() == {0} and y.degrees() == {0}:
        gold = goldman_bracket(_goldman_image(x), _goldman_image(y))
        via_goldman = StringChain([(catalog(TORUS).gen("one", c.i, c.j, 0), v)
                                   for c, v in gold.items()], TORUS)
        if via_goldman != result:
            raise RuntimeError(f"string bracket {result} disagrees with Goldman {via_goldman}")
    return result


def torus_center_membership(x: StringChain, cross_check: bool = True) -> bool:
    """Is ``x`` central in the torus string Lie algebra?

    Brackets vanish unless both degrees are at most one, so ``x`` is central
    iff its degree-0 part lives on block ``(0, 0)`` and its degree-1 part has
    ``M = 0``. With ``cross_check`` the answer is confirmed by bracketing with
    every degree <= 1 generator in a box around the support.
    """
    from .strings import marking
    if x.space != TORUS:
        raise ValueError(f"expected a torus chain, got {x.space}")
    deg0 = all(g.params[:2] == (0, 0) for g in x if g.degree == 0)
    deg1 = not marking(StringChain([(g, c) for g, c in x.items() if g.degree == 1], TORUS))
    answer = deg0 and deg1
    if cross_check:
        brute = torus_center_bruteforce(x)
        if brute != answer:
            raise RuntimeError(f"center test disagrees for {x}: closed form {answer}, "
                               f"brute force {brute}")
    return answer


def torus_center_bruteforce(x: StringChain, radius: int = None) -> bool:
    """Bracket ``x`` with every degree 0 and 1 generator of blocks in a box of
    the given radius (default: support radius + 2)."""
    cat = catalog(TORUS)
    if radius is None:
        radius = max((max(abs(g.params[0]), abs(g.params[1])) for g in x), default=0) + 2
    window = default_torus_window(radius)
    for k in (0, 1):
        for g in cat.table(k, window).gens:
            if torus_string_bracket(x, cat.chain({g: 1})):
                return False
    return True


# ---------------------------------------------------------------- genus g >= 2

def parse_class_list(text: str) -> list:
    """``g1:3,g2,e!`` to classes: ``token[:l]``; a trailing ``!`` (or the token
    ``e``) marks the identity class."""
    out = []
    for raw in text.split(","):
        raw = raw.strip()
        if not raw:
            continue
        ident = raw.endswith("!")
        raw = raw.rstrip("!")
        tok, _, l = raw.partition(":")
        ident = ident or tok == IDENTITY_CLASS.token
        out.append(SurfaceConjClass(tok, int(l) if l else 1, ident))
    return out


def _class_table(classes) -> dict:
    if classes is None:
        return {IDENTITY_CLASS.token: IDENTITY_CLASS}
    if isinstance(classes, dict):
        table = dict(classes)
    else:
        table = {c.token: c for c in classes}
    table.setdefault(IDENTITY_CLASS.token, IDENTITY_CLASS)
    return table


def parse_surface_monomial(cur: Cursor, space: Space, classes=None) -> LoopMonomial:
    table = _class_table(classes)

    def cls_token():
        cur.expect("[")
        start = cur.pos
        while cur.pos < len(cur.text) and cur.text[cur.pos] != "]":
            cur.pos += 1
        tok = cur.text[start:cur.pos].strip()
        cur.expect("]")
        if tok not in table:
            raise cur.error(f"unknown class token {tok!r}", start)
        return table[tok]

    if cur.peek() == "[":
        return mono(space, "pt", cls_token())
    if cur.take_word("beta") or cur.take("β"):
        return mono(space, "beta", cls_token())
    ch = cur.take("ab")
    if ch:
        return mono(space, ch, cur.integer())
    if cur.take("1"):
        return mono(space, "one")
    raise cur.error("expected [class], β[class], a<i>, b<i> or 1")


def parse_surface_chain(text: str, space: Space, classes=None) -> LoopChain:
    terms = parse_chain_terms(text, lambda cur: parse_surface_monomial(cur, space, classes),
                              unit=mono(space, "one"))
    return LoopChain(terms, space)


class SurfaceCatalog(Catalog):
    """Closed surface of genus ``g >= 2``: non-identity components are
    ``B Z/l_γ``-like, the identity component is ``Σ_g x CP^∞``."""

    def default_window(self):
        return [IDENTITY_CLASS]

    def parse_loop_chain(self, text, classes=None):
        return parse_surface_chain(text, self.space, classes)

    @staticmethod
    def identity(window) -> SurfaceConjClass:
        for c in window or ():
            if c.identity:
                return c
        return IDENTITY_CLASS

    def info(self, g):
        p = g.params
        gen_count = self.space.n
        if g.kind == "pt" and len(p) == 2 and p[1] >= 0:
            cls, j = p
            if j > 0 and not cls.identity:
                raise ValueError(f"e([{cls}]) does not lift along c")
            return GenInfo(2 * j, 0, f"e([{cls}]){lift_suffix(j)}")
        if g.kind in ("a", "b") and len(p) == 2 and 1 <= p[0] <= gen_count and p[1] >= 0:
            return GenInfo(1 + 2 * p[1], 0, f"e({g.kind}{p[0]}){lift_suffix(p[1])}")
        if g.kind == "beta" and len(p) == 2 and p[1] >= 0:
            cls, j = p
            if cls.identity or cls.l < 2:
                raise ValueError(f"e(β[{cls}]) is zero (l = {cls.l})")
            return GenInfo(1 + 2 * j, cls.l, f"e(β[{cls}]){lift_suffix(j)}")
        if g.kind == "one" and len(p) == 1 and p[0] >= 0:
            return GenInfo(2 + 2 * p[0], 0, f"e(1){lift_suffix(p[0])}")
        raise self._bad(g)

    def table(self, k, window=None):
        window = self.default_window() if window is None else list(window)
        if k == 0:
            return DegreeTable([self.gen("pt", c, 0) for c in window], [], 1)
        if k % 2:
            j = (k - 1) // 2
            gens = [self.gen(f, i, j) for i in range(1, self.space.n + 1) for f in ("a", "b")]
            gens += [self.gen("beta", c, j) for c in window if not c.identity and c.l >= 2]
            return DegreeTable(gens, [], 1)
        return DegreeTable([self.gen("one", (k - 2) // 2),
                            self.gen("pt", self.identity(window), k // 2)], [], 1)

    def loop_basis(self, k, window=None):
        window = self.default_window() if window is None else list(window)
        sp = self.space
        if k == 0:
            return [mono(sp, "pt", c) for c in window]
        if k == 1:
            out = [mono(sp, f, i) for i in range(1, sp.n + 1) for f in ("a", "b")]
            return out + [mono(sp, "beta", c) for c in window if not c.identity]
        if k == 2:
            return [mono(sp, "one")]
        return []

    def erase(self, mo):
        p = mo.params
        if mo.family == "pt":
            return [(self.gen("pt", p[0], 0), 1)]
        if mo.family in ("a", "b"):
            return [(self.gen(mo.family, p[0], 0), 1)]
        if mo.family == "beta":
            return [(self.gen("beta", p[0], 0), 1)] if p[0].l >= 2 else []
        return [(self.gen("one", 0), 1)]

    def mark(self, g):
        if g.kind == "pt" and g.params[1] == 0:
            return bv_delta(self.loop_chain({mono(self.space, "pt", g.params[0]): 1}))
        return self.loop_chain(())

    def cap(self, g):
        j = g.params[-1]
        return [(self.gen(g.kind, *g.params[:-1], j - 1), 1)] if j > 0 else []

    def lift(self, g):
        return self.gen(g.kind, *g.params[:-1], g.params[-1] + 1)


def sigma_g_string_homology(g: int, k: int, window=None) -> AbelianGroup:
    """``H_k^{S^1}(LΣ_g)`` restricted to the classes in ``window``.

    ``H_0 = Z`` per class, ``H_1 = Z^{2g} ⊕ ⊕ Z/l_γ``, ``H_2 = Z e(1) ⊕ Z s``
    with ``s = e([e])γ`` the lift of the identity component's point class,
    and degrees repeat with period two from there.
    """
    if g < 2:
        raise ValueError("genus must be >= 2; use the torus functions for genus 1")
    if k < 0:
        raise ValueError("degree must be >= 0")
    return catalog(Space.surface(g)).table(k, window).group()


def verify_surface_gysin(g: int, window, max_degree: int = 6) -> ExactnessReport:
    maps, labels = gysin_sequence(catalog(Space.surface(g)), max_degree, list(window))
    return check_exact(maps, labels)


class GoldmanOracle:
    """Degree-zero bracket table for ``Σ_g``: ``[c1, c2] = sum coef·c``.

    Loaded tables are checked for antisymmetry; missing reverse entries are
    filled in by negation.
    """

    def __init__(self, classes, table: dict):
        self.classes = _class_table(classes)
        self.table = {}
        for (a, b), value in table.items():
            for tok in (a, b, *value.keys()):
                if tok not in self.classes:
                    raise ValueError(f"oracle uses unknown class {tok!r}")
            clean = {t: c for t, c in value.items() if c}
            if a == b and clean:
                raise ValueError(f"oracle entry [{a}, {a}] must be zero, got {clean}")
            rev = table.get((b, a))
            if rev is not None:
                neg = {t: -c for t, c in rev.items() if c}
                if neg != clean:
                    raise ValueError(f"oracle is not antisymmetric on [{a}, {b}]: "
                                     f"{clean} vs -{dict(rev)}")
            self.table[(a, b)] = clean
            self.table.setdefault((b, a), {t: -c for t, c in clean.items()})

    def bracket(self, a: SurfaceConjClass, b: SurfaceConjClass) -> dict:
        key = (a.token, b.token)
        if a.identity or b.identity:
            return {}  # the trivial loop is central
        if key not in self.table:
            raise ValueError(f"Goldman oracle has no entry for [{a.token}, {b.token}]")
        return self.table[key]

    @classmethod
    def from_json(cls, data) -> "GoldmanOracle":
        classes = [SurfaceConjClass(c["token"], int(c.get("l", 1)), bool(c.get("identity", False)))
                   for c in data.get("classes", [])]
        table = {}
        for entry in data["brackets"]:
            value = {}
            for coef, tok in entry["value"]:
                value[tok] = value.get(tok, 0) + int(coef)
            table[(entry["left"], entry["right"])] = value
        known = {c.token for c in classes}
        for (a, b), v in table.items():
            for tok in (a, b, *v):
                if tok not in known:
                    classes.append(SurfaceConjClass(tok, 1, tok == IDENTITY_CLASS.token))
                    known.add(tok)
        return cls(classes, table)

    @classmethod
    def from_csv(cls, text: str) -> "GoldmanOracle":
        """Rows ``left,right,coef,result``; an empty ``result`` means zero."""
        table, tokens = {}, []
        for row in csv.DictReader(io.StringIO(text)):
            key = (row["left"].strip(), row["right"].strip())
            value = table.setdefault(key, {})
            res = (row.get("result") or "").strip()
            if res:
                value[res] = value.get(res, 0) + int(row["coef"])
                tokens.append(res)
            tokens += list(key)
        classes = [SurfaceConjClass(t, 1, t == IDENTITY_CLASS.token) for t in dict.fromkeys(tokens)]
        return cls(classes, table)

    @classmethod
    def load(cls, path) -> "GoldmanOracle":
        path = Path(path)
        text = path.read_text()
        if path.suffix.lower() == ".csv":
            return cls.from_csv(text)
        return cls.from_json(json.loads(text))


def sigma_g_string_bracket(x: StringChain, y: StringChain, oracle: GoldmanOracle) -> StringChain:
    """Only degree ``0 ⊗ 0`` brackets are nonzero; they are read from the oracle."""
    if x.space != y.space or x.space.family != "surface":
        raise ValueError("expected two chains on the same genus >= 2 surface")
    cat = catalog(x.space)
    out = []
    for g1, c1 in x.items():
        for g2, c2 in y.items():
            if g1.degree or g2.degree:
                continue
            for tok, c in oracle.bracket(g1.params[0], g2.params[0]).items():
                out.append((cat.gen("pt", oracle.classes[tok], 0), c1 * c2 * c))
    return StringChain(out, x.space)
