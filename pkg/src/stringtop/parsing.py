"""Small recursive-descent helpers shared by the textual formats.

Chains are written as signed terms ``c·m`` joined by ``+``/``-``; the
monomial grammar is supplied by the caller.
"""

from __future__ import annotations

from fractions import Fraction

MINUS = "-−"
TIMES = "·*"


class ParseError(ValueError):
    """Parse failure with a caret under the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        self.message, self.text, self.pos = message, text, pos
        super().__init__(f"{message} at position {pos}\n  {text}\n  {' ' * pos}^")


class Cursor:
    __slots__ = ("text", "pos")

    def __init__(self, text: str, pos: int = 0):
        self.text, self.pos = text, pos

    def error(self, message: str, pos: int = None) -> ParseError:
        return ParseError(message, self.text, self.pos if pos is None else pos)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_end(self) -> bool:
        return self.peek() == ""

    def take(self, chars: str) -> str:
        """Consume one character from ``chars`` if present."""
        ch = self.peek()
        if ch and ch in chars:
            self.pos += 1
            return ch
        return ""

    def expect(self, chars: str, what: str = None) -> str:
        ch = self.take(chars)
        if not ch:
            raise self.error(f"expected {what or repr(chars)}")
        return ch

    def startswith(self, word: str) -> bool:
        self.skip()
        return self.text.startswith(word, self.pos)

    def take_word(self, word: str) -> bool:
        if self.startswith(word):
            self.pos += len(word)
            return True
        return False

    def integer(self) -> int:
        self.skip()
        start = self.pos
        sign = -1 if self.take(MINUS) else 1
        if sign == 1:
            self.take("+")
        self.skip()
        digits_at = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits_at:
            raise self.error("expected integer", start)
        return sign * int(self.text[digits_at:self.pos])

    def unsigned_rational(self):
        """``n`` or ``n/m``; returns int when the value is integral."""
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected number")
        num = int(self.text[start:self.pos])
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            self.pos += 1
            d0 = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == d0:
                raise self.error("expected denominator")
            den = int(self.text[d0:self.pos])
            if den == 0:
                raise self.error("zero denominator", d0)
            f = Fraction(num, den)
            return f.numerator if f.denominator == 1 else f
        return num

    def exponent(self) -> int:
        """Exponent after ``^``: ``3``, ``-3``, ``{-3}`` or ``(-3)``."""
        if self.take("{"):
            v = self.integer()
            self.expect("}")
            return v
        if self.take("("):
            v = self.integer()
            self.expect(")")
            return v
        return self.integer()

    def number_ahead(self) -> bool:
        ch = self.peek()
        return ch.isdigit()


def _try_monomial(cur: Cursor, parse_monomial):
    """Monomials such as ``1[0,1]`` or ``1⊗x`` start with a digit; accept one
    only when it runs up to the next term boundary."""
    save = cur.pos
    try:
        key = parse_monomial(cur)
    except (ValueError, IndexError):
        key = None
    if key is not None:
        nxt = cur.peek()
        if nxt == "" or nxt in "+" + MINUS:
            return key
    cur.pos = save
    return None


def parse_chain_terms(text: str, parse_monomial, unit=None) -> list:
    """Parse ``[±] [c[·]] m (± [c[·]] m)*`` into ``[(key, coef), ...]``.

    ``parse_monomial(cursor)`` consumes one monomial. A bare number is a
    multiple of ``unit`` when one is given.
    """
    cur = Cursor(text)
    terms = []
    if cur.at_end():
        raise cur.error("empty input")
    if cur.peek() == "0":
        save = cur.pos
        cur.pos += 1
        if cur.at_end():
            return []
        cur.pos = save
    first = True
    while not cur.at_end():
        sign = 1
        if cur.take(MINUS):
            sign = -1
        elif not first:
            cur.expect("+" + MINUS, "'+' or '-'")
        elif cur.take("+"):
            pass
        first = False
        coef = 1
        start = cur.pos
        if cur.number_ahead():
            key = _try_monomial(cur, parse_monomial)
            if key is not None:
                terms.append((key, sign))
                continue
        if cur.number_ahead():
            coef = cur.unsigned_rational()
            had_times = bool(cur.take(TIMES))
            nxt = cur.peek()
            if not had_times and (nxt == "" or nxt in "+" + MINUS):
                if unit is None:
                    raise cur.error("expected monomial")
                terms.append((unit, sign * coef))
                continue
            if had_times and (nxt == "" or nxt in "+" + MINUS):
                raise cur.error("expected monomial after multiplication sign")
        try:
            key = parse_monomial(cur)
        except ParseError:
            raise
        except (ValueError, IndexError) as exc:
            raise cur.error(str(exc), start) from None
        terms.append((key, sign * coef))
    return terms
