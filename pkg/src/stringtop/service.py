"""Request/response models and handlers shared by the CLI and the HTTP API.

Every handler takes a pydantic request and returns a ``Result``; ``text`` holds
the human-readable rendering and ``data`` the structured payload. Domain
errors raise ``ValueError`` (``ParseError`` for bad syntax); failed
verifications return a ``Result`` with ``exit_code == 2``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field

from .exact import ExactnessReport, GroupMorphism, check_exact
from .goldman import (TorusChain, TorusClass, derived_membership,
                      generation_witness, goldman_bracket, jacobi_residual, lcs_member_witness,
                      z_bracket_reachable)
from .loops import LoopChain, Space, bv_delta, loop_bracket, loop_product
from .parsing import ParseError
from .strings import (StringChain, cap, catalog, consistency_audit, erasing, marking,
                      string_bracket, string_homology, verify_gysin)
from .surfaces import (GoldmanOracle, parse_class_list, parse_surface_chain, parse_window,
                       sigma_g_string_bracket, torus_block_homology, torus_center_membership,
                       torus_gysin_block, torus_string_bracket, torus_string_homology,
                       verify_surface_gysin)

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2


# ---------------------------------------------------------------- payload models

class Term(BaseModel):
    key: Any
    coef: Union[int, str]
    degree: Optional[int] = None
    text: str


class Chain(BaseModel):
    text: str
    terms: list[Term]
    ring: Optional[str] = None
    space: Optional[str] = None


class Generator(BaseModel):
    name: Optional[str] = None
    order: int


class Group(BaseModel):
    text: str
    free_rank: int
    torsion: list[int]
    unresolved_order: Optional[int] = None
    generators: list[Generator]
    unresolved_members: list[str] = []


class Node(BaseModel):
    index: int
    label: Optional[str] = None
    group: str
    status: Literal["pass", "fail", "not checked"]
    reason: Optional[str] = None
    witness: Optional[list[int]] = None
    witness_text: Optional[str] = None


class BracketData(BaseModel):
    kind: Literal["goldman", "loop"]
    op: str
    space: Optional[str] = None
    operands: list[str]
    result: Chain


class WitnessData(BaseModel):
    target: str
    expression: str
    depth: int
    tree: dict
    value: Chain


class DerivedData(BaseModel):
    coefficient: int
    target: str
    member: bool
    rule: str


class LcsData(BaseModel):
    coefficient: int
    target: str
    depth: int
    expression: str
    tree: dict
    value: Chain


class BlockGroup(BaseModel):
    block: list[int]
    group: Group


class HomologyData(BaseModel):
    space: str
    degree: int
    group: Group
    blocks: Optional[list[BlockGroup]] = None


class StringBracketData(BaseModel):
    space: str
    op: str
    operands: list[str]
    result: Chain
    degree: Optional[int] = None


class VerifyData(BaseModel):
    target: str
    exact: bool
    checked: int
    nodes: list[Node]


class AuditRow(BaseModel):
    k: int
    degree: int
    block_order: int
    expected_order: int
    gysin_order: int
    torsion_order: int
    free_rank: int
    gysin_rank: int
    ok: bool


class AuditData(BaseModel):
    space: str
    ok: bool
    entries: list[AuditRow]


class CenterData(BaseModel):
    element: Chain
    central: bool
    degree0_on_origin: bool
    marking_vanishes: bool


class ErrorInfo(BaseModel):
    message: str
    position: Optional[int] = None


class Result(BaseModel):
    command: str
    ok: bool
    exit_code: int
    text: str
    data: Optional[Union[BracketData, WitnessData, DerivedData, LcsData, HomologyData,
                         StringBracketData, VerifyData, AuditData, CenterData]] = None
    error: Optional[ErrorInfo] = None


def error_result(command: str, exc: Exception) -> Result:
    pos = exc.pos if isinstance(exc, ParseError) else None
    msg = str(exc) if isinstance(exc, ParseError) else str(exc).splitlines()[0] if str(exc) else type(exc).__name__
    return Result(command=command, ok=False, exit_code=EXIT_DOMAIN, text=f"error: {msg}",
                  error=ErrorInfo(message=msg, position=pos))


def output_schema() -> dict:
    """JSON schema of every ``--format json`` document."""
    return Result.model_json_schema()


SCHEMA_PATH = Path(__file__).with_name("schemas") / "result.schema.json"


# ---------------------------------------------------------------- requests

class BracketRequest(BaseModel):
    operands: list[str] = Field(min_length=1, max_length=3)
    surface: Optional[str] = None
    space: Optional[str] = None
    ring: Literal["Z", "Q"] = "Z"
    op: Literal["bracket", "product", "delta", "jacobi"] = "bracket"
    classes: Optional[str] = None


class WitnessRequest(BaseModel):
    target: str
    ring: Literal["Z", "Q"] = "Q"


class DerivedRequest(BaseModel):
    coefficient: int
    target: str
    reachable: bool = False


class LcsRequest(BaseModel):
    coefficient: int
    target: str
    depth: int = Field(ge=1)


class HomologyRequest(BaseModel):
    space: Optional[str] = None
    surface: Optional[str] = None
    degree: int
    window: Optional[str] = None
    classes: Optional[str] = None
    oracle: Optional[str] = None
    blocks: bool = False


class StringBracketRequest(BaseModel):
    operands: list[str] = Field(min_length=1, max_length=2)
    space: str
    op: Literal["bracket", "marking", "erasing", "cap"] = "bracket"
    classes: Optional[str] = None
    oracle: Optional[str] = None


class VerifyRequest(BaseModel):
    gysin: Optional[str] = None
    torus: bool = False
    surface: Optional[str] = None
    exact: Optional[Union[str, list]] = None  # path or list of morphism JSON objects
    max_degree: int = 20
    window: Optional[str] = None
    classes: Optional[str] = None


class AuditRequest(BaseModel):
    space: str
    max_k: int = Field(ge=0)


class CenterRequest(BaseModel):
    element: str
    surface: str = "torus"
    cross_check: bool = True


# ---------------------------------------------------------------- helpers

def chain_model(x) -> Chain:
    data = x.to_json()
    return Chain(text=str(x), terms=[Term(**t) for t in data["terms"]],
                 ring=data.get("ring"), space=data.get("space"))


def group_model(g) -> Group:
    d = g.to_json()
    return Group(text=d["text"], free_rank=d["free_rank"], torsion=d["torsion"],
                 unresolved_order=d["unresolved_order"],
                 generators=[Generator(**x) for x in d["generators"]],
                 unresolved_members=d["unresolved_members"])


def _nodes(report: ExactnessReport, prefix: str = "") -> list:
    out = []
    for n in report.nodes:
        d = n.to_json()
        d["label"] = prefix + (d["label"] or "")
        out.append(Node(**d))
    return out


def _surface_space(name: Optional[str]) -> Space:
    if name is None:
        return Space.torus()
    return Space.parse(name)


def _classes(req_classes: Optional[str], oracle: Optional[GoldmanOracle] = None) -> list:
    out = parse_class_list(req_classes) if req_classes else []
    if oracle is not None:
        known = {c.token for c in out}
        out += [c for t, c in oracle.classes.items() if t not in known]
    return out


def _parse_loop(text: str, space: Space, classes=None) -> LoopChain:
    if space.family == "surface":
        return parse_surface_chain(text, space, classes)
    return LoopChain.parse(text, space)


def _exactness_result(command: str, target: str, reports: list) -> Result:
    nodes, checked, exact, lines = [], 0, True, []
    for prefix, rep in reports:
        nodes += _nodes(rep, prefix)
        checked += rep.checked
        exact = exact and rep.exact
        lines.append((prefix + "\n" if prefix else "") + str(rep))
    data = VerifyData(target=target, exact=exact, checked=checked, nodes=nodes)
    return Result(command=command, ok=exact, exit_code=EXIT_OK if exact else EXIT_VERIFY,
                  text="\n".join(lines), data=data)


# ---------------------------------------------------------------- handlers

def handle_bracket(req: BracketRequest) -> Result:
    ops = req.operands
    need = {"bracket": 2, "product": 2, "delta": 1, "jacobi": 3}[req.op]
    if len(ops) != need:
        raise ValueError(f"--op {req.op} takes {need} operand(s), got {len(ops)}")
    if req.space is None:
        if req.surface not in (None, "torus", "T", "t"):
            raise ValueError("Goldman brackets from words are only available on the torus")
        if req.op in ("product", "delta"):
            raise ValueError(f"--op {req.op} needs --space (loop homology)")
        xs = [TorusChain.parse(t, req.ring) for t in ops]
        res = goldman_bracket(*xs) if req.op == "bracket" else jacobi_residual(*xs)
        data = BracketData(kind="goldman", op=req.op, operands=ops, result=chain_model(res))
        return Result(command="bracket", ok=True, exit_code=EXIT_OK, text=str(res), data=data)
    space = Space.parse(req.space)
    classes = _classes(req.classes)
    xs = [_parse_loop(t, space, classes) for t in ops]
    if req.op == "jacobi":
        raise ValueError("--op jacobi applies to Goldman brackets (omit --space)")
    if req.op == "delta":
        res = bv_delta(xs[0])
    elif req.op == "product":
        res = loop_product(*xs)
    else:
        res = loop_bracket(*xs)
    data = BracketData(kind="loop", op=req.op, space=str(space), operands=ops,
                       result=chain_model(res))
    return Result(command="bracket", ok=True, exit_code=EXIT_OK, text=str(res), data=data)


def handle_witness(req: WitnessRequest) -> Result:
    if req.ring != "Q":
        raise ValueError("generation by a, b, a^-1, b^-1 needs rational coefficients; "
                         "over Z use `derived` or `lcs`")
    t = TorusClass.parse(req.target)
    expr = generation_witness(t)
    data = WitnessData(target=str(t), expression=expr.to_sexpr(), depth=expr.depth,
                       tree=expr.to_json(), value=chain_model(expr.value))
    return Result(command="witness", ok=True, exit_code=EXIT_OK,
                  text=f"{expr.to_sexpr()}  =  {expr.value}", data=data)


def handle_derived(req: DerivedRequest) -> Result:
    t = TorusClass.parse(req.target)
    if req.reachable:
        member = z_bracket_reachable(req.coefficient, t)
        rule = f"{abs(t.i or t.j)} | {req.coefficient}"
    else:
        member = derived_membership(req.coefficient, t)
        rule = (f"gcd({t.i},{t.j}) | {req.coefficient}" if (t.i, t.j) != (0, 0)
                else "only 0 on the contractible class")
    data = DerivedData(coefficient=req.coefficient, target=str(t), member=member, rule=rule)
    return Result(command="derived", ok=True, exit_code=EXIT_OK,
                  text="true" if member else "false", data=data)


def handle_lcs(req: LcsRequest) -> Result:
    t = TorusClass.parse(req.target)
    expr = lcs_member_witness(req.coefficient, t, req.depth)
    data = LcsData(coefficient=req.coefficient, target=str(t), depth=expr.depth,
                   expression=expr.to_sexpr(), tree=expr.to_json(), value=chain_model(expr.value))
    return Result(command="lcs", ok=True, exit_code=EXIT_OK,
                  text=f"{expr.to_sexpr()}  =  {expr.value}", data=data)


def handle_homology(req: HomologyRequest) -> Result:
    if (req.space is None) == (req.surface is None):
        raise ValueError("give exactly one of --space or --surface")
    space = Space.parse(req.space or req.surface)
    blocks = None
    if space.kind == "torus":
        window = parse_window(req.window) if req.window else None
        group = torus_string_homology(req.degree, window)
        if req.blocks:
            window = window or catalog(space).default_window()
            blocks = [BlockGroup(block=[n, m], group=group_model(torus_block_homology(req.degree, n, m)))
                      for n, m in window]
    elif space.kind == "surface":
        oracle = GoldmanOracle.load(req.oracle) if req.oracle else None
        classes = _classes(req.classes, oracle) or None
        group = string_homology(space, req.degree, classes)
    else:
        window = None
        if req.window:
            lo, _, hi = req.window.partition(":")
            window = range(int(lo), int(hi) + 1)
        group = string_homology(space, req.degree, window)
    data = HomologyData(space=str(space), degree=req.degree, group=group_model(group),
                        blocks=blocks)
    return Result(command="homology", ok=True, exit_code=EXIT_OK, text=str(group), data=data)


def handle_string_bracket(req: StringBracketRequest) -> Result:
    space = Space.parse(req.space)
    oracle = GoldmanOracle.load(req.oracle) if req.oracle else None
    classes = _classes(req.classes, oracle) or None
    ops = req.operands
    need = 2 if req.op == "bracket" else 1
    if len(ops) != need:
        raise ValueError(f"--op {req.op} takes {need} operand(s), got {len(ops)}")
    if req.op == "erasing":
        res = erasing(_parse_loop(ops[0], space, classes))
    else:
        xs = [StringChain.parse(t, space, classes) for t in ops]
        if req.op == "marking":
            res = marking(xs[0])
        elif req.op == "cap":
            res = cap(xs[0])
        elif space.kind == "torus":
            res = torus_string_bracket(*xs)
        elif space.kind == "surface":
            if oracle is None:
                raise ValueError("genus >= 2 brackets need --oracle")
            res = sigma_g_string_bracket(*xs, oracle)
        else:
            res = string_bracket(*xs)
    degree = res.homogeneous_degree() if res and len(res.degrees()) == 1 else None
    if degree is not None and isinstance(res, LoopChain):
        degree += space.dim  # report ordinary degrees throughout
    data = StringBracketData(space=str(space), op=req.op, operands=ops, result=chain_model(res),
                             degree=degree)
    return Result(command="string-bracket", ok=True, exit_code=EXIT_OK, text=str(res), data=data)


def _load_morphisms(source) -> list:
    if isinstance(source, str):
        source = json.loads(Path(source).read_text())
    if isinstance(source, dict):
        source = source.get("maps", source.get("sequence"))
    if not isinstance(source, list):
        raise ValueError("expected a list of morphisms (or {\"maps\": [...]})")
    return [GroupMorphism.from_json(m) for m in source]


def handle_verify(req: VerifyRequest) -> Result:
    chosen = [req.gysin is not None, req.torus, req.surface is not None, req.exact is not None]
    if sum(chosen) != 1:
        raise ValueError("give exactly one of --gysin, --torus, --surface or --exact")
    if req.exact is not None:
        maps = _load_morphisms(req.exact)
        return _exactness_result("verify", "sequence", [("", check_exact(maps))])
    if req.gysin is not None:
        space = Space.parse(req.gysin)
        window = None
        if req.window:
            lo, _, hi = req.window.partition(":")
            window = range(int(lo), int(hi) + 1)
        rep = verify_gysin(space, req.max_degree, window)
        return _exactness_result("verify", f"gysin {space}", [("", rep)])
    if req.torus:
        window = parse_window(req.window) if req.window else parse_window("-2:2,-2:2")
        reports = [(f"block ({n},{m})", torus_gysin_block(n, m, req.max_degree)) for n, m in window]
        return _exactness_result("verify", "torus blocks", reports)
    space = Space.parse(req.surface)
    if space.kind != "surface":
        raise ValueError("--surface expects a genus >= 2 surface such as g2")
    classes = _classes(req.classes) or catalog(space).default_window()
    rep = verify_surface_gysin(space.n, classes, req.max_degree)
    return _exactness_result("verify", f"gysin {space}", [("", rep)])


def handle_audit(req: AuditRequest) -> Result:
    rep = consistency_audit(Space.parse(req.space), req.max_k)
    data = AuditData(space=str(rep.space), ok=rep.ok,
                     entries=[AuditRow(**e.to_json()) for e in rep.entries])
    return Result(command="audit", ok=rep.ok, exit_code=EXIT_OK if rep.ok else EXIT_VERIFY,
                  text=str(rep), data=data)


def handle_center(req: CenterRequest) -> Result:
    space = Space.parse(req.surface)
    if space.kind != "torus":
        raise ValueError("center membership is implemented for the torus")
    x = StringChain.parse(req.element, space)
    central = torus_center_membership(x, cross_check=req.cross_check)
    deg0 = all(g.params[:2] == (0, 0) for g in x if g.degree == 0)
    deg1 = not marking(StringChain([(g, c) for g, c in x.items() if g.degree == 1], space))
    data = CenterData(element=chain_model(x), central=central, degree0_on_origin=deg0,
                      marking_vanishes=deg1)
    return Result(command="center", ok=True, exit_code=EXIT_OK,
                  text="true" if central else "false", data=data)


HANDLERS = {
    "bracket": (BracketRequest, handle_bracket),
    "witness": (WitnessRequest, handle_witness),
    "derived": (DerivedRequest, handle_derived),
    "lcs": (LcsRequest, handle_lcs),
    "homology": (HomologyRequest, handle_homology),
    "string-bracket": (StringBracketRequest, handle_string_bracket),
    "verify": (VerifyRequest, handle_verify),
    "audit": (AuditRequest, handle_audit),
    "center": (CenterRequest, handle_center),
}


def run(command: str, payload: dict) -> Result:
    """Validate ``payload`` for ``command`` and run it; domain errors become an
    error ``Result`` with exit code 1."""
    model, handler = HANDLERS[command]
    try:
        return handler(model(**payload))
    except (ValueError, KeyError, TypeError, OSError) as exc:
        return error_result(command, exc)
