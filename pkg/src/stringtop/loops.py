"""Loop homology rings on their monomial presentations.

Degrees follow the loop grading ``H_{*+d}(LM)``:

* ``S^1``: ``Λ[a] ⊗ Z[x, x^-1]`` with ``|a| = -1``, ``|x| = 0``
* odd ``S^n``: ``Λ[a] ⊗ Z[u]`` with ``|a| = -n``, ``|u| = n - 1``
  (printed with ``α``, ``y`` for ``S^3``)
* even ``S^n``: ``Λ(b) ⊗ Z[a, v] / (a^2, ab, 2av)`` with ``|a| = -n``,
  ``|b| = -1``, ``|v| = 2n - 2``; additive basis ``v^k, b v^k, a, a v^k``
* torus: classes ``1, x, y, z`` over every ``(n, m)`` in degrees ``-2, -1, -1, 0``
* closed genus ``g >= 2`` surfaces: point classes ``[γ]``, ``a_i``, ``b_i``,
  ``β_γ`` and the unit ``1``

The torus ring is the tensor square of the circle ring. With
``ā x^n = a⊗x^n`` and ``x̄^n = 1⊗x^n`` in each factor the basis used here is::

    1[n,m] = -(ā x^n ⊗ ā x^m)     x[n,m] = -(x̄^n ⊗ ā x^m)
    y[n,m] = -(ā x^n ⊗ x̄^m)       z[n,m] =   x̄^n ⊗ x̄^m

which gives ``Δ1 = n x + m y``, ``Δx = m z``, ``Δy = -n z`` and
``x • y = 1``, ``y • x = -1``; ``z`` classes act as units up to translation.

>>> s3 = Space.sphere(3)
>>> str(bv_delta(LoopChain.parse("α⊗y^2", s3)))
'2·1⊗y'
>>> str(loop_product(LoopChain.parse("x[1,0]", Space.torus()), LoopChain.parse("y[0,1]", Space.torus())))
'1[1,1]'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .exact import FreeChain
from .parsing import Cursor, parse_chain_terms


@dataclass(frozen=True, order=True)
class SurfaceConjClass:
    """Conjugacy class token of a genus ``g >= 2`` surface group.

    ``l`` is the exponent with ``γ = κ^l`` for the centralizer generator ``κ``;
    the identity class has ``identity=True`` (its centralizer is everything).
    """

    token: str
    l: int = 1
    identity: bool = False

    def __post_init__(self):
        if self.l < 1:
            raise ValueError(f"centralizer exponent must be >= 1, got {self.l}")
        if not re.fullmatch(r"[A-Za-z0-9_.^+-]+", self.token):
            raise ValueError(f"bad class token {self.token!r}")

    def __str__(self) -> str:
        return self.token


IDENTITY_CLASS = SurfaceConjClass("e", 1, True)


@dataclass(frozen=True, order=True)
class Space:
    """``kind`` is ``"sphere"``, ``"torus"`` or ``"surface"``; ``n`` is the
    sphere dimension or the genus."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind == "sphere" and self.n < 1:
            raise ValueError("sphere dimension must be >= 1")
        if self.kind == "surface" and self.n < 2:
            raise ValueError("genus must be >= 2 (use the torus for genus 1)")
        if self.kind not in ("sphere", "torus", "surface"):
            raise ValueError(f"unknown space kind {self.kind!r}")

    @classmethod
    def sphere(cls, n: int) -> "Space":
        return cls("sphere", n)

    @classmethod
    def torus(cls) -> "Space":
        return cls("torus", 1)

    @classmethod
    def surface(cls, g: int) -> "Space":
        return cls("surface", g)

    @classmethod
    def parse(cls, text: str) -> "Space":
        t = text.strip().replace(" ", "")
        low = t.lower()
        if low in ("t", "t2", "t^2", "torus"):
            return cls.torus()
        m = re.fullmatch(r"s\^?\{?(\d+)\}?", low)
        if m:
            return cls.sphere(int(m.group(1)))
        m = re.fullmatch(r"(?:g|sigma_?|σ_?)\{?(\d+)\}?", low)
        if m:
            g = int(m.group(1))
            return cls.torus() if g == 1 else cls.surface(g)
        raise ValueError(f"unknown space {text!r} (try S1, S3, S4, T, g2)")

    @property
    def dim(self) -> int:
        return self.n if self.kind == "sphere" else 2

    @property
    def family(self) -> str:
        if self.kind != "sphere":
            return self.kind
        if self.n == 1:
            return "circle"
        return "odd" if self.n % 2 else "even"

    def __str__(self) -> str:
        if self.kind == "sphere":
            return f"S{self.n}"
        return "T" if self.kind == "torus" else f"g{self.n}"


FAMILIES = {
    "circle": ("a", "1"),
    "odd": ("a", "1"),
    "even": ("v", "b", "a"),
    "torus": ("1", "x", "y", "z"),
    "surface": ("pt", "a", "b", "beta", "one"),
}


@dataclass(frozen=True, order=True)
class LoopMonomial:
    """Additive generator of loop homology; ``params`` are exponents or block
    indices depending on the space."""

    family: str
    params: tuple
    space: Space = field(compare=True)

    def __post_init__(self):
        fam = self.space.family
        if self.family not in FAMILIES[fam]:
            raise ValueError(f"no family {self.family!r} for {self.space}")
        p = self.params
        if fam in ("odd", "even") and p[0] < 0:
            raise ValueError(f"exponent must be >= 0 on {self.space}")
        if fam == "surface" and self.family in ("a", "b") and not 1 <= p[0] <= self.space.n:
            raise ValueError(f"index {p[0]} out of range for genus {self.space.n}")
        if fam == "surface" and self.family == "beta" and p[0].identity:
            raise ValueError("the identity class has no β")

    @property
    def degree(self) -> int:
        fam, p, n = self.space.family, self.params, self.space.n
        if fam == "circle":
            return -1 if self.family == "a" else 0
        if fam == "odd":
            return (-n if self.family == "a" else 0) + p[0] * (n - 1)
        if fam == "even":
            return {"v": 0, "b": -1, "a": -n}[self.family] + p[0] * (2 * n - 2)
        if fam == "torus":
            return {"1": -2, "x": -1, "y": -1, "z": 0}[self.family]
        return {"pt": -2, "a": -1, "b": -1, "beta": -1, "one": 0}[self.family]

    @property
    def ordinary_degree(self) -> int:
        return self.degree + self.space.dim

    @property
    def order(self) -> int:
        """Additive order: 2 for ``a v^k`` (k >= 1) on even spheres, else 0."""
        if self.space.family == "even" and self.family == "a" and self.params[0] >= 1:
            return 2
        return 0

    def __str__(self) -> str:
        fam, p = self.space.family, self.params
        if fam in ("circle", "odd"):
            s3 = self.space.n == 3
            var = "x" if fam == "circle" else ("y" if s3 else "u")
            left = ("α" if s3 else "a") if self.family == "a" else "1"
            k = p[0]
            right = "1" if k == 0 else (var if k == 1 else f"{var}^{k}")
            return f"{left}⊗{right}"
        if fam == "even":
            k = p[0]
            power = "" if k == 0 else ("v" if k == 1 else f"v^{k}")
            if self.family == "v":
                return power or "1"
            return f"{self.family}*{power}" if power else self.family
        if fam == "torus":
            return f"{self.family}[{p[0]},{p[1]}]"
        if self.family == "pt":
            return f"[{p[0]}]"
        if self.family == "beta":
            return f"β[{p[0]}]"
        if self.family == "one":
            return "1"
        return f"{self.family}{p[0]}"

    def to_json(self) -> dict:
        params = [str(x) if isinstance(x, SurfaceConjClass) else x for x in self.params]
        return {"family": self.family, "params": params}


class LoopChain(FreeChain):
    """Integer chain of loop monomials of one space; ``a v^k`` is reduced mod 2."""

    __slots__ = ("space",)

    def __init__(self, terms=(), space: Space = None):
        if space is None:
            raise ValueError("LoopChain needs a space")
        self.space = space
        items = terms.items() if hasattr(terms, "items") else terms
        checked = []
        for k, c in items:
            if k.space != space:
                raise ValueError(f"monomial {k} belongs to {k.space}, not {space}")
            checked.append((k, c))
        super().__init__(checked)

    def _check_coefficient(self, c) -> None:
        if not isinstance(c, int) or isinstance(c, bool):
            raise TypeError(f"loop homology coefficients are integers, got {c!r}")

    def _reduce(self, key, c):
        return c % key.order if key.order else c

    def _context(self) -> dict:
        return {"space": self.space}

    @classmethod
    def parse(cls, text: str, space: Space) -> "LoopChain":
        terms = parse_chain_terms(text, lambda cur: parse_loop_monomial(cur, space),
                                  unit=unit_monomial(space))
        return cls(terms, space)


def mono(space: Space, family: str, *params) -> LoopMonomial:
    return LoopMonomial(family, tuple(params), space)


def chain(space: Space, family: str, *params, coef: int = 1) -> LoopChain:
    return LoopChain({mono(space, family, *params): coef}, space)


def unit_monomial(space: Space):
    fam = space.family
    if fam in ("circle", "odd"):
        return mono(space, "1", 0)
    if fam == "even":
        return mono(space, "v", 0)
    if fam == "surface":
        return mono(space, "one")
    return None  # torus units z[0,0] must be written explicitly


# ---------------------------------------------------------------- parsing

def _power(cur: Cursor, letters: str) -> int:
    cur.expect(letters)
    return cur.exponent() if cur.take("^") else 1


def _bracket_pair(cur: Cursor) -> tuple:
    if cur.take("["):
        n = cur.integer()
        cur.expect(",")
        m = cur.integer()
        cur.expect("]")
        return n, m
    if cur.take("_"):
        cur.expect("{")
        n = cur.integer()
        cur.expect(",")
        m = cur.integer()
        cur.expect("}")
        return n, m
    raise cur.error("expected [n,m]")


def parse_loop_monomial(cur: Cursor, space: Space) -> LoopMonomial:
    fam = space.family
    start = cur.pos
    if fam in ("circle", "odd"):
        var = "x" if fam == "circle" else "uy"
        cur.take("(")
        has_a = False
        if cur.take_word("alpha") or cur.take("aα"):
            has_a = True
        elif cur.peek() == "1":
            cur.pos += 1
        elif not (cur.peek() and cur.peek() in var):
            raise cur.error(f"expected monomial on {space}")
        cur.take("⊗*·")
        k = 0
        if cur.peek() and cur.peek() in var:
            k = _power(cur, var)
        elif cur.peek() == "1":
            cur.pos += 1
        cur.take(")")
        if fam == "odd" and k < 0:
            raise cur.error("negative exponent", start)
        return mono(space, "a" if has_a else "1", k)
    if fam == "even":
        seen_a = seen_b = False
        k = 0
        any_factor = False
        while True:
            ch = cur.peek()
            if ch == "a":
                cur.pos += 1
                if seen_a or seen_b:
                    raise cur.error("a^2 = ab = 0: monomial not representable", start)
                seen_a = any_factor = True
            elif ch == "b":
                cur.pos += 1
                if seen_b or seen_a:
                    raise cur.error("b^2 = ab = 0: monomial not representable", start)
                seen_b = any_factor = True
            elif ch == "v":
                k += _power(cur, "v")
                any_factor = True
            elif ch == "1" and not any_factor:
                cur.pos += 1
                any_factor = True
            else:
                break
            cur.take("*·")
        if not any_factor:
            raise cur.error(f"expected monomial on {space}")
        if k < 0:
            raise cur.error("negative exponent", start)
        return mono(space, "a" if seen_a else "b" if seen_b else "v", k)
    if fam == "torus":
        ch = cur.take("1xyz")
        if not ch:
            raise cur.error("expected 1[n,m], x[n,m], y[n,m] or z[n,m]")
        return mono(space, ch, *_bracket_pair(cur))
    raise cur.error(f"surface monomials are parsed with a class table ({space})")


# ---------------------------------------------------------------- products

def _mono_product(p: LoopMonomial, q: LoopMonomial) -> list:
    sp = p.space
    fam = sp.family
    if fam in ("circle", "odd"):
        if p.family == "a" and q.family == "a":
            return []
        fam_out = "a" if "a" in (p.family, q.family) else "1"
        return [(mono(sp, fam_out, p.params[0] + q.params[0]), 1)]
    if fam == "even":
        k = p.params[0] + q.params[0]
        fams = {p.family, q.family} - {"v"}
        if p.family != "v" and q.family != "v":
            return []  # a^2 = ab = b^2 = 0
        out = fams.pop() if fams else "v"
        return [(mono(sp, out, k), 1)]
    if fam == "torus":
        n, m = p.params[0] + q.params[0], p.params[1] + q.params[1]
        if p.family == "z":
            return [(mono(sp, q.family, n, m), 1)]
        if q.family == "z":
            return [(mono(sp, p.family, n, m), 1)]
        if (p.family, q.family) == ("x", "y"):
            return [(mono(sp, "1", n, m), 1)]
        if (p.family, q.family) == ("y", "x"):
            return [(mono(sp, "1", n, m), -1)]
        return []
    # surface
    if p.family == "one":
        return [(q, 1)]
    if q.family == "one":
        return [(p, 1)]
    if "pt" in (p.family, q.family):
        return []  # lands below degree -2
    if p.family in ("a", "b") and q.family in ("a", "b"):
        if p.family == q.family or p.params[0] != q.params[0]:
            return []
        sign = 1 if p.family == "a" else -1
        return [(mono(sp, "pt", IDENTITY_CLASS), sign)]
    raise ValueError(f"product {p} • {q} needs Goldman bracket data and is not implemented")


def loop_product(x: LoopChain, y: LoopChain) -> LoopChain:
    if x.space != y.space:
        raise ValueError(f"mixed spaces: {x.space} and {y.space}")
    out = []
    for p, c in x.items():
        for q, d in y.items():
            out.extend((r, c * d * e) for r, e in _mono_product(p, q))
    return LoopChain(out, x.space)


def _mono_delta(p: LoopMonomial) -> list:
    sp = p.space
    fam = sp.family
    if fam == "circle":
        return [(mono(sp, "1", p.params[0]), p.params[0])] if p.family == "a" else []
    if fam == "odd":
        i = p.params[0]
        return [(mono(sp, "1", i - 1), i)] if p.family == "a" and i > 0 else []
    if fam == "even":
        if p.family != "b":
            return []
        k = p.params[0]
        out = [(mono(sp, "v", k), 2 * k + 1)]
        if sp.n == 2:
            out.append((mono(sp, "a", k + 1), 1))
        return out
    if fam == "torus":
        n, m = p.params
        if p.family == "1":
            return [(mono(sp, "x", n, m), n), (mono(sp, "y", n, m), m)]
        if p.family == "x":
            return [(mono(sp, "z", n, m), m)]
        if p.family == "y":
            return [(mono(sp, "z", n, m), -n)]
        return []
    if p.family == "pt" and not p.params[0].identity:
        cls = p.params[0]
        return [(mono(sp, "beta", cls), cls.l)]
    return []


def bv_delta(x: LoopChain) -> LoopChain:
    """The BV operator, degree +1, extended linearly from the generator table."""
    out = []
    for p, c in x.items():
        out.extend((q, c * e) for q, e in _mono_delta(p))
    return LoopChain(out, x.space)


def loop_bracket(x: LoopChain, y: LoopChain) -> LoopChain:
    """``{x,y} = (-1)^|x| Δ(x•y) - (-1)^|x| Δ(x)•y - x•Δ(y)`` for homogeneous ``x``."""
    if x.space != y.space:
        raise ValueError(f"mixed spaces: {x.space} and {y.space}")
    if not x:
        return LoopChain((), x.space)
    s = -1 if x.homogeneous_degree() % 2 else 1
    return (s * bv_delta(loop_product(x, y)) - s * loop_product(bv_delta(x), y)
            - loop_product(x, bv_delta(y)))


# ---------------------------------------------------------------- enumeration

def loop_generators(space: Space, bound: int, classes=()) -> Iterator[LoopMonomial]:
    """Every additive generator with exponents (or block indices) up to ``bound``.

    Torus blocks run over ``|n|, |m| <= bound``; circle exponents over
    ``|k| <= bound``; surface generators over the supplied ``classes``.
    """
    fam = space.family
    if fam == "circle":
        for k in range(-bound, bound + 1):
            yield mono(space, "a", k)
            yield mono(space, "1", k)
    elif fam == "odd":
        for k in range(bound + 1):
            yield mono(space, "a", k)
            yield mono(space, "1", k)
    elif fam == "even":
        for k in range(bound + 1):
            yield mono(space, "v", k)
            yield mono(space, "b", k)
            yield mono(space, "a", k)
    elif fam == "torus":
        for n in range(-bound, bound + 1):
            for m in range(-bound, bound + 1):
                for f in FAMILIES["torus"]:
                    yield mono(space, f, n, m)
    else:
        yield mono(space, "one")
        for i in range(1, space.n + 1):
            yield mono(space, "a", i)
            yield mono(space, "b", i)
        yield mono(space, "pt", IDENTITY_CLASS)
        for cls in classes:
            if not cls.identity:
                yield mono(space, "pt", cls)
                yield mono(space, "beta", cls)


def loop_basis(space: Space, k: int, window=None) -> list:
    """Generators of ordinary degree ``k`` (that is ``H_k(LM)``), as monomials.

    ``window`` is a range of circle exponents for ``S^1`` or a list of
    ``(n, m)`` blocks for the torus.
    """
    fam, n, d = space.family, space.n, space.dim
    j = k - d  # loop degree
    out = []
    if fam == "circle":
        if j == -1:
            out = [mono(space, "a", e) for e in window]
        elif j == 0:
            out = [mono(space, "1", e) for e in window]
    elif fam == "odd":
        for f, base in (("a", -n), ("1", 0)):
            if (j - base) >= 0 and (j - base) % (n - 1) == 0:
                out.append(mono(space, f, (j - base) // (n - 1)))
    elif fam == "even":
        for f, base in (("v", 0), ("b", -1), ("a", -n)):
            if (j - base) >= 0 and (j - base) % (2 * n - 2) == 0:
                out.append(mono(space, f, (j - base) // (2 * n - 2)))
    elif fam == "torus":
        fams = {-2: ("1",), -1: ("x", "y"), 0: ("z",)}.get(j, ())
        out = [mono(space, f, bn, bm) for bn, bm in window for f in fams]
    else:
        raise ValueError("surface bases are built in the surfaces module")
    return out
