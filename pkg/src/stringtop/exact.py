"""Exact integer algebra: sparse chains, Smith normal form, f.g. abelian groups.

Chains are immutable sparse maps from generator keys to nonzero coefficients:

>>> FreeChain({"g1": 2}) + FreeChain({"g1": 3})
FreeChain({'g1': 5})
>>> scale(0, FreeChain({"g1": 2}))
FreeChain({})

Invariant factors come from the Smith normal form:

>>> smith_normal_form([[2, 0], [0, 3]]).factors
(1, 6)

A group is a list of cyclic summands, ``0`` meaning infinite cyclic:

>>> str(cokernel(GroupMorphism(AbelianGroup((0,)), AbelianGroup((0, 0)), [[2], [4]])))
'Z/2 ⊕ Z'
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

Coefficient = Union[int, Fraction]
Matrix = list[list[int]]


# ---------------------------------------------------------------- coefficients

def coefficient_to_json(c: Coefficient) -> Union[int, str]:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return int(c)


def coefficient_from_json(v: Union[int, str]) -> Coefficient:
    if isinstance(v, bool):
        raise ValueError("boolean is not a coefficient")
    if isinstance(v, int):
        return v
    f = Fraction(str(v))
    return f.numerator if f.denominator == 1 else f


def format_coefficient(c: Coefficient) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


# ---------------------------------------------------------------- chains

class FreeChain:
    """Finite formal sum of generator keys with exact coefficients.

    Keys must be hashable and mutually orderable. Zero coefficients are never
    stored, so equality of chains is equality of their term maps. Subclasses
    attach context (ring, space) and may reduce coefficients of torsion keys
    through ``_reduce``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping, Iterable] = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, c in items:
            self._check_coefficient(c)
            acc[key] = acc.get(key, 0) + c
        clean = {}
        for key, c in acc.items():
            c = self._reduce(key, c)
            if c != 0:
                clean[key] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: kv[0]))

    # hooks for subclasses
    def _reduce(self, key, c: Coefficient) -> Coefficient:
        return c

    def _check_coefficient(self, c) -> None:
        if not isinstance(c, (int, Fraction)) or isinstance(c, bool):
            raise TypeError(f"coefficient must be int or Fraction, got {c!r}")

    def _context(self) -> dict:
        return {}

    def _spawn(self, terms) -> "FreeChain":
        return type(self)(terms, **self._context())

    def _check_compatible(self, other: "FreeChain") -> None:
        if type(other) is not type(self) or other._context() != self._context():
            raise ValueError(f"incompatible chains: {self._context()} vs {other._context()}")

    # mapping protocol
    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coefficient(self, key) -> Coefficient:
        return self._terms.get(key, 0)

    def __iter__(self):
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __contains__(self, key) -> bool:
        return key in self._terms

    # arithmetic
    def __add__(self, other: "FreeChain") -> "FreeChain":
        self._check_compatible(other)
        return self._spawn(list(self.items()) + list(other.items()))

    def __sub__(self, other: "FreeChain") -> "FreeChain":
        return self + (-1) * other

    def __neg__(self) -> "FreeChain":
        return (-1) * self

    def __rmul__(self, c: Coefficient) -> "FreeChain":
        self._check_coefficient(c)
        return self._spawn((k, c * v) for k, v in self.items())

    __mul__ = __rmul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeChain):
            return NotImplemented
        return (type(self) is type(other) and self._context() == other._context()
                and self._terms == other._terms)

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple(self._terms.items())))

    def __repr__(self) -> str:
        ctx = "".join(f", {k}={v!r}" for k, v in self._context().items())
        return f"{type(self).__name__}({self._terms!r}{ctx})"

    def __str__(self) -> str:
        return format_terms(self.items())

    # structure
    def degrees(self) -> set:
        return {key.degree for key in self._terms}

    def homogeneous_degree(self) -> int:
        """Degree of a homogeneous chain; raises for mixed degrees or zero."""
        ds = self.degrees()
        if len(ds) != 1:
            raise ValueError(f"chain is not homogeneous (degrees {sorted(ds)})")
        return ds.pop()

    def map_linear(self, fn) -> "FreeChain":
        """Extend ``fn: key -> chain`` linearly; result context comes from fn."""
        out = None
        for key, c in self.items():
            img = c * fn(key)
            out = img if out is None else out + img
        return out

    def to_json(self) -> dict:
        return {
            "terms": [
                {"key": key_to_json(k), "coef": coefficient_to_json(c),
                 "degree": getattr(k, "degree", None), "text": str(k)}
                for k, c in self.items()
            ],
            **{k: (str(v) if not isinstance(v, (int, str)) else v)
               for k, v in self._context().items()},
        }


def key_to_json(key) -> Any:
    if hasattr(key, "to_json"):
        return key.to_json()
    if isinstance(key, tuple):
        return list(key)
    return key


def format_terms(items: Iterable) -> str:
    """Render ``c·key`` terms joined by `` + `` / `` - ``; the empty sum is ``0``."""
    out = []
    for key, c in items:
        neg = c < 0
        mag = -c if neg else c
        body = str(key) if mag == 1 else f"{format_coefficient(mag)}·{key}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out) if out else "0"


def add(x: FreeChain, y: FreeChain) -> FreeChain:
    return x + y


def scale(c: Coefficient, x: FreeChain) -> FreeChain:
    return c * x


# ---------------------------------------------------------------- matrices

def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix, inner: int = None) -> Matrix:
    if inner is None:
        inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(a))]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def determinant(m: Matrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    """``U @ m @ V == diagonal`` with ``factors`` on the diagonal."""

    factors: tuple
    diagonal: Matrix
    U: Matrix
    V: Matrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.factors if d != 0)


def smith_normal_form(m: Sequence[Sequence[int]]) -> SmithForm:
    """Smith normal form over the integers with unimodular transforms.

    Factors are the ``min(rows, cols)`` diagonal entries: positive, each
    dividing the next, zeros last.
    """
    a = [[int(x) for x in row] for row in m]
    r = len(a)
    c = len(a[0]) if r else 0
    if any(len(row) != c for row in a):
        raise ValueError("ragged matrix")
    U, V = identity(r), identity(c)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(r, c)):
        pivot = None
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            done = True
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    factors = tuple(a[i][i] for i in range(min(r, c)))
    return SmithForm(factors, a, U, V)


def solve_in_lattice(columns: Sequence[Sequence[int]], y: Sequence[int], rows: int):
    """Integer ``z`` with ``sum z_j * columns[j] == y``, or ``None``."""
    if not columns:
        return [] if all(v == 0 for v in y) else None
    n = [[col[i] for col in columns] for i in range(rows)]
    snf = smith_normal_form(n)
    w = [sum(snf.U[i][k] * y[k] for k in range(rows)) for i in range(rows)]
    sol = [0] * len(columns)
    for i in range(rows):
        d = snf.factors[i] if i < len(snf.factors) else 0
        if d == 0:
            if w[i] != 0:
                return None
        elif w[i] % d:
            return None
        else:
            sol[i] = w[i] // d
    return [sum(snf.V[j][k] * sol[k] for k in range(len(columns))) for j in range(len(columns))]


def integer_kernel(m: Matrix, cols: int) -> list:
    """A basis of ``{x in Z^cols : m x = 0}`` as a list of vectors."""
    if not m:
        return [[int(i == j) for i in range(cols)] for j in range(cols)]
    snf = smith_normal_form(m)
    return [[snf.V[i][j] for i in range(cols)] for j in range(snf.rank, cols)]


# ---------------------------------------------------------------- groups

def _summand_text(order: int) -> str:
    return "Z" if order == 0 else f"Z/{order}"


@dataclass(frozen=True)
class AbelianGroup:
    """Direct sum of cyclic groups on an ordered list of generators.

    ``orders[i]`` is 0 for an infinite cyclic generator, otherwise at least 2.
    ``unresolved_order`` marks an extra torsion block whose total order is known
    but whose cyclic decomposition is not; it carries no generators of its own.
    """

    orders: tuple = ()
    names: tuple = ()
    unresolved_order: int = None
    unresolved_names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(o) for o in self.orders))
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "unresolved_names", tuple(self.unresolved_names))
        for o in self.orders:
            if o < 0 or o == 1:
                raise ValueError(f"cyclic order must be 0 or >= 2, got {o}")
        if self.names and len(self.names) != len(self.orders):
            raise ValueError("one name per generator required")
        if self.unresolved_order is not None and self.unresolved_order < 1:
            raise ValueError("unresolved_order must be positive")

    @classmethod
    def cyclic(cls, orders: Iterable[int], names: Iterable[str] = None,
               unresolved_order: int = None) -> "AbelianGroup":
        """Build from possibly signed orders; Z/0 is Z, Z/1 and Z/-1 are dropped."""
        orders = list(orders)
        names = list(names) if names is not None else [None] * len(orders)
        kept = [(abs(o), n) for o, n in zip(orders, names) if abs(o) != 1]
        ns = tuple(n for _, n in kept)
        if any(n is None for n in ns):
            ns = ()
        if unresolved_order == 1:
            unresolved_order = None
        return cls(tuple(o for o, _ in kept), ns, unresolved_order)

    @property
    def free_rank(self) -> int:
        return sum(1 for o in self.orders if o == 0)

    @property
    def torsion(self) -> tuple:
        return tuple(o for o in self.orders if o)

    @property
    def rank(self) -> int:
        return len(self.orders)

    def invariants(self) -> tuple:
        """``(free_rank, invariant factors)``: the isomorphism type, ignoring
        unresolved blocks."""
        tors = [o for o in self.orders if o]
        if not tors:
            return (self.free_rank, ())
        snf = smith_normal_form([[o if i == j else 0 for j in range(len(tors))]
                                 for i, o in enumerate(tors)])
        return (self.free_rank, tuple(d for d in snf.factors if d > 1))

    def isomorphic(self, other: "AbelianGroup") -> bool:
        return (self.invariants() == other.invariants()
                and (self.unresolved_order or 1) == (other.unresolved_order or 1))

    def reduce(self, vec: Sequence[int]) -> list:
        return [v % o if o else v for v, o in zip(vec, self.orders)]

    def is_zero(self, vec: Sequence[int]) -> bool:
        return all(v == 0 for v in self.reduce(vec))

    def element_text(self, vec: Sequence[int]) -> str:
        names = self.names or tuple(f"g{i}" for i in range(self.rank))
        return format_terms((n, v) for n, v in zip(names, self.reduce(vec)) if v)

    def __str__(self) -> str:
        parts = []
        for i, o in enumerate(self.orders):
            s = _summand_text(o)
            if self.names:
                s += f" ⟨{self.names[i]}⟩"
            parts.append(s)
        if self.unresolved_order and self.unresolved_order > 1:
            s = f"T({self.unresolved_order})"
            if self.unresolved_names:
                s += " ⟨" + ", ".join(self.unresolved_names) + "⟩"
            parts.append(s)
        return " ⊕ ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "unresolved_order": self.unresolved_order,
            "generators": [{"name": (self.names[i] if self.names else None), "order": o}
                           for i, o in enumerate(self.orders)],
            "unresolved_members": list(self.unresolved_names),
            "text": str(self),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "AbelianGroup":
        if "generators" in data:
            gens = data["generators"]
            orders = [g["order"] for g in gens]
            names = [g.get("name") for g in gens]
            names = () if any(n is None for n in names) else names
        else:
            orders = [0] * data.get("free_rank", 0) + list(data.get("torsion", []))
            names = ()
        return cls(tuple(orders), tuple(names), data.get("unresolved_order"),
                   tuple(data.get("unresolved_members", ())))


@dataclass(frozen=True)
class GroupMorphism:
    """Homomorphism given by the images of domain generators (matrix columns)."""

    domain: AbelianGroup
    codomain: AbelianGroup
    matrix: Matrix = field(default=None)

    def __post_init__(self):
        p, q = self.domain.rank, self.codomain.rank
        m = self.matrix if self.matrix is not None else zeros(q, p)
        if len(m) != q or any(len(row) != p for row in m):
            raise ValueError(f"matrix must be {q}x{p}")
        m = [[int(x) % o if o else int(x) for x in row] for row, o in zip(m, self.codomain.orders)]
        object.__setattr__(self, "matrix", m)
        for j, n in enumerate(self.domain.orders):
            if n and not self.codomain.is_zero([n * m[i][j] for i in range(q)]):
                raise ValueError(f"generator {j} has order {n} but its image does not")

    def __call__(self, vec: Sequence[int]) -> list:
        p = self.domain.rank
        return self.codomain.reduce([sum(row[j] * vec[j] for j in range(p)) for row in self.matrix])

    def column(self, j: int) -> list:
        return [row[j] for row in self.matrix]

    def compose(self, first: "GroupMorphism") -> "GroupMorphism":
        """``self ∘ first``."""
        if first.codomain.orders != self.domain.orders:
            raise ValueError("maps are not composable")
        m = matmul(self.matrix, first.matrix, self.domain.rank) if self.codomain.rank else []
        if not m:
            m = zeros(self.codomain.rank, first.domain.rank)
        return GroupMorphism(first.domain, self.codomain, m)

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(),
                "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, data: Mapping) -> "GroupMorphism":
        return cls(AbelianGroup.from_json(data["domain"]),
                   AbelianGroup.from_json(data["codomain"]),
                   [list(r) for r in data["matrix"]])


@dataclass(frozen=True)
class Quotient:
    """``Z^n / relations`` in cyclic normal form.

    ``project`` maps ambient coordinates to group coordinates; ``lift[k]`` is an
    ambient vector representing group generator ``k``.
    """

    group: AbelianGroup
    project: Matrix
    lift: list


def quotient(n: int, relations: Sequence[Sequence[int]], names: Sequence[str] = None) -> Quotient:
    rel = [list(r) for r in relations]
    if rel:
        snf = smith_normal_form([[r[i] for r in rel] for i in range(n)])
        U = snf.U
        factors = list(snf.factors) + [0] * (n - len(snf.factors))
    else:
        U = identity(n)
        factors = [0] * n
    Uinv = _unimodular_inverse(U)
    orders, project, lift = [], [], []
    for i, d in enumerate(factors):
        if d == 1:
            continue
        orders.append(d)
        project.append([x % d for x in U[i]] if d else list(U[i]))
        lift.append([Uinv[k][i] for k in range(n)])
    gen_names = None
    if names is not None:
        gen_names = [format_terms((names[k], v[k]) for k in range(n) if v[k]) for v in lift]
    return Quotient(AbelianGroup(tuple(orders), tuple(gen_names or ())), project, lift)


def _unimodular_inverse(u: Matrix) -> Matrix:
    n = len(u)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(u)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = [[row[n + j] for j in range(n)] for row in aug]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


def cokernel(f: GroupMorphism) -> AbelianGroup:
    """``codomain / image(f)`` via Smith normal form of the relation matrix."""
    q = f.codomain.rank
    rels = [f.column(j) for j in range(f.domain.rank)]
    rels += [[o if i == k else 0 for i in range(q)] for k, o in enumerate(f.codomain.orders) if o]
    names = f.codomain.names or None
    return quotient(q, rels, names).group


def subquotient(n: int, d_out: Matrix, image_cols: Sequence[Sequence[int]]) -> AbelianGroup:
    """``ker(d_out) / span(image_cols)`` inside ``Z^n``.

    The image columns must lie in the kernel (as for a chain complex).
    """
    basis = integer_kernel([list(r) for r in d_out], n) if d_out else integer_kernel([], n)
    rels = []
    for col in image_cols:
        z = solve_in_lattice(basis, list(col), n) if basis else ([] if not any(col) else None)
        if z is None:
            raise ValueError(f"image vector {list(col)} is not in the kernel")
        rels.append(z)
    return quotient(len(basis), rels).group


def kernel_generators(f: GroupMorphism) -> list:
    """Generators of ``ker f`` as domain vectors."""
    p, q = f.domain.rank, f.codomain.rank
    tors = [k for k, o in enumerate(f.codomain.orders) if o]
    m = [list(f.matrix[i]) + [f.codomain.orders[i] if k == i else 0 for k in tors] for i in range(q)]
    basis = integer_kernel(m, p + len(tors)) if q else integer_kernel([], p)
    gens = [f.domain.reduce(v[:p]) for v in basis]
    return [g for g in gens if any(g)]


def in_subgroup(group: AbelianGroup, gens: Sequence[Sequence[int]], y: Sequence[int]) -> bool:
    n = group.rank
    cols = [list(g) for g in gens]
    cols += [[o if i == k else 0 for i in range(n)] for k, o in enumerate(group.orders) if o]
    return solve_in_lattice(cols, list(y), n) is not None


# ---------------------------------------------------------------- exactness

@dataclass
class NodeResult:
    index: int
    label: str
    group: AbelianGroup
    status: str  # "pass", "fail" or "not checked"
    reason: str = None
    witness: list = None

    def to_json(self) -> dict:
        return {
            "index": self.index, "label": self.label, "group": str(self.group),
            "status": self.status, "reason": self.reason, "witness": self.witness,
            "witness_text": (self.group.element_text(self.witness)
                             if self.witness is not None else None),
        }


@dataclass
class ExactnessReport:
    nodes: list

    @property
    def exact(self) -> bool:
        return all(n.status != "fail" for n in self.nodes)

    @property
    def failures(self) -> list:
        return [n for n in self.nodes if n.status == "fail"]

    @property
    def checked(self) -> int:
        return sum(1 for n in self.nodes if n.status == "pass")

    def to_json(self) -> dict:
        return {"exact": self.exact, "checked": self.checked,
                "nodes": [n.to_json() for n in self.nodes]}

    def __str__(self) -> str:
        lines = []
        for n in self.nodes:
            line = f"{n.index:>3} {n.label or '':<24} {n.status:<11} {n.group}"
            if n.status == "fail":
                line += f"  [{n.reason}: {n.group.element_text(n.witness)}]"
            lines.append(line)
        lines.append("exact" if self.exact else f"NOT exact at {len(self.failures)} node(s)")
        return "\n".join(lines)


def check_exact(seq: Sequence[GroupMorphism], labels: Sequence[str] = None) -> ExactnessReport:
    """Decide ``im f_i == ker f_{i+1}`` at every interior node.

    Nodes are numbered ``0 .. len(seq)``; node ``i`` is the domain of ``seq[i]``
    (the last node is the final codomain). End nodes are "not checked".
    """
    seq = list(seq)
    if not seq:
        return ExactnessReport([])
    for i in range(len(seq) - 1):
        if seq[i].codomain.orders != seq[i + 1].domain.orders:
            raise ValueError(f"maps {i} and {i + 1} are not composable: "
                             f"{seq[i].codomain} vs {seq[i + 1].domain}")
    groups = [f.domain for f in seq] + [seq[-1].codomain]
    labels = list(labels) if labels is not None else [""] * len(groups)
    if len(labels) != len(groups):
        raise ValueError("one label per node required")
    nodes = [NodeResult(0, labels[0], groups[0], "not checked")]
    for k in range(1, len(seq)):
        f, g = seq[k - 1], seq[k]
        node = NodeResult(k, labels[k], groups[k], "pass")
        images = [f.column(j) for j in range(f.domain.rank)]
        for y in images:
            if not g.codomain.is_zero(g(y)):
                node.status, node.reason, node.witness = "fail", "image not in kernel", groups[k].reduce(y)
                break
        else:
            for x in kernel_generators(g):
                if not in_subgroup(groups[k], images, x):
                    node.status, node.reason, node.witness = "fail", "kernel not in image", x
                    break
        nodes.append(node)
    nodes.append(NodeResult(len(seq), labels[-1], groups[-1], "not checked"))
    return ExactnessReport(nodes)
