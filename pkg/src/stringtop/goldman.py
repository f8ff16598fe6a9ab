"""The Goldman Lie algebra of the closed torus.

Free homotopy classes of loops are pairs ``(i, j)`` standing for ``a^i b^j``
and the bracket is ``[a^i b^j, a^k b^l] = (il - jk) a^(i+k) b^(j+l)``.

>>> str(goldman_bracket(TorusChain.parse("a^2 b"), TorusChain.parse("b")))
'2·a^2 b^2'
>>> derived_membership(2, TorusClass(2, 4)), derived_membership(1, TorusClass(2, 4))
(True, False)
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

from .exact import Coefficient, FreeChain, coefficient_from_json, coefficient_to_json, format_coefficient
from .parsing import Cursor, ParseError, parse_chain_terms

RINGS = ("Z", "Q")


class TorusClass(NamedTuple):
    i: int
    j: int

    @property
    def degree(self) -> int:
        return 0

    def __str__(self) -> str:
        parts = []
        for letter, e in (("a", self.i), ("b", self.j)):
            if e == 1:
                parts.append(letter)
            elif e:
                parts.append(f"{letter}^{e}")
        return " ".join(parts) if parts else "1"

    def compact(self) -> str:
        return str(self).replace(" ", "")

    def to_json(self) -> list:
        return [self.i, self.j]

    @classmethod
    def parse(cls, text: str) -> "TorusClass":
        cur = Cursor(text)
        cls_ = parse_torus_class(cur)
        if not cur.at_end():
            raise cur.error("unexpected trailing input")
        return cls_


def parse_torus_class(cur: Cursor) -> TorusClass:
    """``1`` or a product of ``a^e``/``b^e`` factors (exponents may repeat)."""
    ch = cur.peek()
    if ch == "1":
        cur.pos += 1
        return TorusClass(0, 0)
    i = j = 0
    seen = False
    while cur.peek() in ("a", "b") and cur.peek():
        letter = cur.take("ab")
        e = 1
        if cur.take("^"):
            e = cur.exponent()
        if letter == "a":
            i += e
        else:
            j += e
        seen = True
        cur.take("·*")  # optional explicit product sign between factors
    if not seen:
        raise cur.error("expected torus class (a^i b^j or 1)")
    return TorusClass(i, j)


class TorusChain(FreeChain):
    """Integer or rational combination of torus classes."""

    __slots__ = ("ring",)

    def __init__(self, terms=(), ring: str = "Z"):
        if ring not in RINGS:
            raise ValueError(f"ring must be one of {RINGS}, got {ring!r}")
        self.ring = ring
        super().__init__(((TorusClass(*k), c) for k, c in
                          (terms.items() if hasattr(terms, "items") else terms)))

    def _reduce(self, key, c):
        if isinstance(c, Fraction):
            if c.denominator == 1:
                return c.numerator
            if self.ring == "Z":
                raise ValueError(f"non-integral coefficient {c} over Z")
        return c

    def _context(self) -> dict:
        return {"ring": self.ring}

    def _check_compatible(self, other) -> None:
        if isinstance(other, TorusChain) and other.ring != self.ring:
            raise ValueError(f"mixed rings: {self.ring} and {other.ring}")
        super()._check_compatible(other)

    def __rmul__(self, c):
        if self.ring == "Z" and isinstance(c, Fraction) and c.denominator != 1:
            raise ValueError(f"non-integral scalar {c} over Z")
        return super().__rmul__(c)

    __mul__ = __rmul__

    @classmethod
    def parse(cls, text: str, ring: str = "Z") -> "TorusChain":
        terms = parse_chain_terms(text, parse_torus_class, unit=TorusClass(0, 0))
        if ring == "Z":
            for key, c in terms:
                if isinstance(c, Fraction):
                    raise ParseError(f"rational coefficient {c} over Z", text, 0)
        return cls(terms, ring)

    @classmethod
    def from_json(cls, data) -> "TorusChain":
        return cls([(tuple(t["key"]), coefficient_from_json(t["coef"])) for t in data["terms"]],
                   data.get("ring", "Z"))


def torus(i: int, j: int, coef: Coefficient = 1, ring: str = "Z") -> TorusChain:
    return TorusChain({TorusClass(i, j): coef}, ring)


def goldman_bracket(x: TorusChain, y: TorusChain) -> TorusChain:
    """Bilinear extension of ``[a^i b^j, a^k b^l] = (il - jk) a^(i+k) b^(j+l)``."""
    if not isinstance(x, TorusChain) or not isinstance(y, TorusChain):
        raise TypeError("goldman_bracket takes two TorusChain values")
    if x.ring != y.ring:
        raise ValueError(f"mixed rings: {x.ring} and {y.ring}")
    out = []
    for (i, j), c in x.items():
        for (k, l), d in y.items():
            w = i * l - j * k
            if w:
                out.append(((i + k, j + l), w * c * d))
    return TorusChain(out, x.ring)


def jacobi_residual(x: TorusChain, y: TorusChain, z: TorusChain) -> TorusChain:
    br = goldman_bracket
    return br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y))


# ---------------------------------------------------------------- expressions

class BracketExpression:
    """Tree of brackets, scalar multiples and sums over torus classes.

    Every node is evaluated when it is built, so a malformed tree (mixed
    rings, non-integral scalars over Z) cannot be constructed.
    """

    __slots__ = ("value",)
    ring: str

    def evaluate(self) -> TorusChain:
        return self.value

    @property
    def depth(self) -> int:
        raise NotImplementedError

    def leaves(self) -> list:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_sexpr()

    def __eq__(self, other) -> bool:
        return isinstance(other, BracketExpression) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(self.to_sexpr())

    @staticmethod
    def from_json(data, ring: str = None) -> "BracketExpression":
        ring = data.get("ring", ring or "Z")
        op = data["op"]
        if op == "leaf":
            return Leaf(coefficient_from_json(data["coef"]), TorusClass(*data["class"]), ring)
        if op == "bracket":
            return Bracket(BracketExpression.from_json(data["left"], ring),
                           BracketExpression.from_json(data["right"], ring))
        if op == "scale":
            return Scale(coefficient_from_json(data["coef"]),
                         BracketExpression.from_json(data["expr"], ring))
        if op == "sum":
            return Sum([BracketExpression.from_json(t, ring) for t in data["terms"]], ring)
        raise ValueError(f"unknown node {op!r}")

    @staticmethod
    def parse(text: str, ring: str = "Z") -> "BracketExpression":
        cur = Cursor(text)
        expr = _parse_expr(cur, ring)
        if not cur.at_end():
            raise cur.error("unexpected trailing input")
        return expr


class Leaf(BracketExpression):
    __slots__ = ("coef", "cls", "ring")

    def __init__(self, coef: Coefficient, cls, ring: str = "Z"):
        self.coef, self.cls, self.ring = coef, TorusClass(*cls), ring
        self.value = TorusChain({self.cls: coef}, ring)

    @property
    def depth(self) -> int:
        return 0

    def leaves(self) -> list:
        return [self.cls]

    def to_sexpr(self) -> str:
        if self.coef == 1:
            return self.cls.compact()
        return f"(* {format_coefficient(self.coef)} {self.cls.compact()})"

    def to_json(self) -> dict:
        return {"op": "leaf", "coef": coefficient_to_json(self.coef), "class": list(self.cls),
                "ring": self.ring}


class Bracket(BracketExpression):
    __slots__ = ("left", "right", "ring")

    def __init__(self, left: BracketExpression, right: BracketExpression):
        if left.ring != right.ring:
            raise ValueError(f"mixed rings: {left.ring} and {right.ring}")
        self.left, self.right, self.ring = left, right, left.ring
        self.value = goldman_bracket(left.value, right.value)

    @property
    def depth(self) -> int:
        return 1 + max(self.left.depth, self.right.depth)

    def leaves(self) -> list:
        return self.left.leaves() + self.right.leaves()

    def to_sexpr(self) -> str:
        return f"[{self.left.to_sexpr()}, {self.right.to_sexpr()}]"

    def to_json(self) -> dict:
        return {"op": "bracket", "left": self.left.to_json(), "right": self.right.to_json()}


class Scale(BracketExpression):
    __slots__ = ("coef", "expr", "ring")

    def __init__(self, coef: Coefficient, expr: BracketExpression):
        self.coef, self.expr, self.ring = coef, expr, expr.ring
        self.value = coef * expr.value

    @property
    def depth(self) -> int:
        return self.expr.depth

    def leaves(self) -> list:
        return self.expr.leaves()

    def to_sexpr(self) -> str:
        return f"(* {format_coefficient(self.coef)} {self.expr.to_sexpr()})"

    def to_json(self) -> dict:
        return {"op": "scale", "coef": coefficient_to_json(self.coef), "expr": self.expr.to_json()}


class Sum(BracketExpression):
    __slots__ = ("terms", "ring")

    def __init__(self, terms, ring: str = None):
        self.terms = list(terms)
        if not self.terms and ring is None:
            raise ValueError("empty sum needs a ring")
        self.ring = ring or self.terms[0].ring
        total = TorusChain((), self.ring)
        for t in self.terms:
            total = total + t.value
        self.value = total

    @property
    def depth(self) -> int:
        return max((t.depth for t in self.terms), default=0)

    def leaves(self) -> list:
        return [leaf for t in self.terms for leaf in t.leaves()]

    def to_sexpr(self) -> str:
        return "(+ " + " ".join(t.to_sexpr() for t in self.terms) + ")"

    def to_json(self) -> dict:
        return {"op": "sum", "terms": [t.to_json() for t in self.terms], "ring": self.ring}


def _parse_expr(cur: Cursor, ring: str) -> BracketExpression:
    if cur.take("["):
        left = _parse_expr(cur, ring)
        cur.expect(",", "','")
        right = _parse_expr(cur, ring)
        cur.expect("]", "']'")
        return Bracket(left, right)
    if cur.take("("):
        op = cur.expect("*+", "'*' or '+'")
        if op == "*":
            start = cur.pos
            sign = -1 if cur.take("-−") else 1
            c = sign * cur.unsigned_rational()
            if ring == "Z" and isinstance(c, Fraction):
                raise cur.error("rational scalar over Z", start)
            if cur.peek() in ("[", "("):
                inner = _parse_expr(cur, ring)
                cur.expect(")", "')'")
                return Scale(c, inner)
            cls = parse_torus_class(cur)
            cur.expect(")", "')'")
            return Leaf(c, cls, ring)
        terms = []
        while cur.peek() != ")":
            if cur.at_end():
                raise cur.error("unterminated sum")
            terms.append(_parse_expr(cur, ring))
        cur.expect(")")
        return Sum(terms, ring)
    return Leaf(1, parse_torus_class(cur), ring)


# ---------------------------------------------------------------- generation over Q

SEEDS = (TorusClass(1, 0), TorusClass(0, 1), TorusClass(-1, 0), TorusClass(0, -1))


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


def _normalized(raw: BracketExpression, target: TorusClass) -> BracketExpression:
    c = raw.value.coefficient(target)
    if len(raw.value) != 1 or c == 0:
        raise RuntimeError(f"construction for {target} evaluated to {raw.value}")
    return raw if c == 1 else Scale(Fraction(1) / c, raw)


def _seed(cls: TorusClass) -> Leaf:
    return Leaf(1, cls, "Q")


def _line_a(n: int, eps: int) -> BracketExpression:
    """``a^n b^eps`` by repeated bracketing with ``a^(sign n)`` starting at ``b^eps``."""
    s = _sign(n)
    expr: BracketExpression = _seed(TorusClass(0, eps))
    for _ in range(abs(n)):
        expr = Bracket(_seed(TorusClass(s, 0)), expr)
    return _normalized(expr, TorusClass(n, eps))


def _line_b(eps: int, n: int) -> BracketExpression:
    s = _sign(n)
    expr: BracketExpression = _seed(TorusClass(eps, 0))
    for _ in range(abs(n)):
        expr = Bracket(_seed(TorusClass(0, s)), expr)
    return _normalized(expr, TorusClass(eps, n))


def _witness(t: TorusClass) -> BracketExpression:
    i, j = t
    if t in SEEDS:
        return _seed(t)
    if abs(j) == 1:
        return _line_a(i, j)
    if abs(i) == 1:
        return _line_b(i, j)
    if j == 0:
        # [b^-1, a^n b] = n a^n
        return _normalized(Bracket(_seed(TorusClass(0, -1)), _line_a(i, 1)), t)
    if i == 0:
        # [a^-1, a b^n] = -n b^n
        return _normalized(Bracket(_seed(TorusClass(-1, 0)), _line_b(1, j)), t)
    m = min(abs(i), abs(j))
    diag = TorusClass(_sign(i) * m, _sign(j) * m)
    # [a^p, b^q] = pq a^p b^q puts the diagonal part in place
    d_expr = _normalized(Bracket(_witness(TorusClass(diag.i, 0)), _witness(TorusClass(0, diag.j))), diag)
    rest = TorusClass(i - diag.i, j - diag.j)
    if rest == (0, 0):
        return d_expr
    # remaining axis part: coefficient diag.i*rest.j - diag.j*rest.i is nonzero
    return _normalized(Bracket(d_expr, _witness(rest)), t)


def generation_witness(target) -> BracketExpression:
    """Rational bracket expression over ``a, b, a^-1, b^-1`` evaluating to ``target``.

    Scalars are obtained by evaluating each bracket, never assumed. The
    contractible class is rejected: every bracket has coefficient ``il - jk = 0``
    on it, so it is not in the span of iterated brackets of the seeds.
    """
    t = TorusClass(*target)
    if t == (0, 0):
        raise ValueError("the contractible class 1 is not reachable: every bracket landing "
                         "on (0,0) has coefficient il - jk = 0 when i+k = j+l = 0")
    expr = _witness(t)
    if expr.value != TorusChain({t: 1}, "Q"):
        raise RuntimeError(f"witness for {t} evaluated to {expr.value}")
    if any(leaf not in SEEDS for leaf in expr.leaves()):
        raise RuntimeError("witness uses a non-seed leaf")
    return expr


# ---------------------------------------------------------------- over Z

def z_bracket_reachable(m: int, target) -> bool:
    """Whether ``m·a^n`` (or ``m·b^n``) is an integer sum of brackets: iff ``n | m``."""
    i, j = TorusClass(*target)
    if i and j or (i == 0 and j == 0):
        raise ValueError(f"target {TorusClass(i, j)} is not a nonzero power of a or b")
    n = i or j
    return m % n == 0


def derived_membership(c: int, cls) -> bool:
    """Whether ``c·a^i b^j`` lies in the derived subalgebra over Z.

    Iff ``gcd(i, j) | c``, with ``gcd(0, 0) = 0`` so only ``0·1`` qualifies.
    """
    i, j = TorusClass(*cls)
    d = math.gcd(i, j)
    return c == 0 if d == 0 else c % d == 0


def bezout(i: int, j: int) -> tuple:
    """``(d, x, y)`` with ``x*i + y*j = d = gcd(i, j)``.

    Among all solutions the one with least ``|y|`` is chosen, ties going to
    ``y >= 0``; when ``y`` is forced the same rule picks ``x``.
    """
    old_r, r = i, j
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    d, x, y = old_r, old_x, old_y
    if d < 0:
        d, x, y = -d, -x, -y
    if d == 0:
        return 0, 0, 0
    si, sj = i // d, j // d  # all solutions: (x + k*sj, y - k*si)

    def pick(base: int, step: int) -> int:
        k0 = base // step
        return min((k0 - 1, k0, k0 + 1), key=lambda k: (abs(base - k * step), base - k * step < 0))

    if si:
        k = pick(y, si)
        return d, x + k * sj, y - k * si
    k = pick(x, -sj)
    return d, x + k * sj, y


def _unit_member(cls: TorusClass, depth: int) -> BracketExpression:
    """Depth-``depth`` integer expression evaluating to ``1·cls`` (gcd 1)."""
    if depth == 0:
        return Leaf(1, cls, "Z")
    return _member(1, cls, depth)


def _member(c: int, cls: TorusClass, depth: int) -> BracketExpression:
    i, j = cls
    if (i, j) == (0, 0):
        a = TorusClass(1, 0)
        return Bracket(Leaf(1, a, "Z"), _unit_member(a, depth - 1))
    if j == 0:
        # [a^0 b^-1, a^n b] = n a^n
        return Bracket(Leaf(c // i, TorusClass(0, -1), "Z"), _unit_member(TorusClass(i, 1), depth - 1))
    if i == 0:
        # [a b^0, a^-1 b^n] = n b^n
        return Bracket(Leaf(c // j, TorusClass(1, 0), "Z"), _unit_member(TorusClass(-1, j), depth - 1))
    d, x, y = bezout(i, j)
    # [a^(i+y) b^(j-x), a^-y b^x] = (xi + yj) a^i b^j = d a^i b^j
    return Bracket(Leaf(c // d, TorusClass(i + y, j - x), "Z"),
                   _unit_member(TorusClass(-y, x), depth - 1))


def lcs_member_witness(c: int, cls, depth: int) -> BracketExpression:
    """Nested integer bracket of nesting depth ``depth`` evaluating to ``c·cls``.

    Exists exactly when ``derived_membership(c, cls)``; every term of the
    lower central series therefore agrees with the derived subalgebra.
    """
    cls = TorusClass(*cls)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not derived_membership(c, cls):
        raise ValueError(f"{c}·{cls} is not in the derived subalgebra "
                         f"(gcd {math.gcd(*cls)} does not divide {c})")
    expr = _member(c, cls, depth)
    expected = TorusChain({cls: c}, "Z")
    if expr.value != expected or expr.depth != depth:
        raise RuntimeError(f"lcs witness for {c}·{cls} evaluated to {expr.value} at depth {expr.depth}")
    return expr
