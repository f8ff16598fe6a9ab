"""``stringtop`` command line: a thin argparse layer over :mod:`stringtop.service`.

Exit codes: 0 success, 1 bad input or domain error, 2 a verification or audit
that ran and failed (the JSON report is printed in that case).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import service

MONOMIAL_HELP = """\
monomial syntax by space:
  S1     a⊗x^k, 1⊗x^k     (ASCII: a*x^k, 1*x^-2)
  S3     α⊗y^i, 1⊗y^i     (ASCII: al*y^2 or a*y^2)
  S5...  a*u^i, 1*u^i
  S2n    b*v^k, v^k, a*v^k
  T      1[n,m], x[n,m], y[n,m], z[n,m]
  g2...  [tok], a1, b2, β[tok], 1  with classes from --classes
string classes: e(L), e(L)γ_j, (L)x_m (S3), γ_i, (a⊗1)γ_i
Goldman words (torus): a^i b^j, chains like 2·a^2 b - a^{-3}
"""


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS,
                   help="output format (default text)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stringtop", description="Goldman brackets, loop and string homology.",
        formatter_class=argparse.RawDescriptionHelpFormatter, epilog=MONOMIAL_HELP)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("bracket", help="Goldman bracket on the torus, or loop-homology operations")
    p.add_argument("operands", nargs="+", metavar="EXPR")
    p.add_argument("--surface", help="surface for Goldman brackets (torus)")
    p.add_argument("--space", help="compute in loop homology of S1, S3, S4, T, g2 ...")
    p.add_argument("--ring", choices=("Z", "Q"), default="Z")
    p.add_argument("--op", choices=("bracket", "product", "delta", "jacobi"), default="bracket")
    p.add_argument("--classes", help="surface classes, e.g. g1:3,g2:2")
    _common(p)

    p = sub.add_parser("witness", help="bracket expression in a, b, a^-1, b^-1 reaching a class (over Q)")
    p.add_argument("target")
    p.add_argument("--ring", choices=("Z", "Q"), default="Q")
    _common(p)

    p = sub.add_parser("derived", help="is C·CLASS in the derived subalgebra over Z")
    p.add_argument("coefficient", type=int)
    p.add_argument("target")
    p.add_argument("--reachable", action="store_true",
                   help="test C·a^n as an integer sum of brackets instead")
    _common(p)

    p = sub.add_parser("lcs", help="witness for C·CLASS in the lower central series term")
    p.add_argument("coefficient", type=int)
    p.add_argument("target")
    p.add_argument("--depth", type=int, required=True)
    _common(p)

    p = sub.add_parser("homology", help="string homology group in one degree")
    p.add_argument("--space")
    p.add_argument("--surface")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--window", help="k0:k1 for S1, n0:n1,m0:m1 for the torus")
    p.add_argument("--classes")
    p.add_argument("--oracle", help="Goldman table (JSON or CSV) supplying classes")
    p.add_argument("--blocks", action="store_true", help="also list torus blocks")
    _common(p)

    p = sub.add_parser("string-bracket", help="string bracket and Gysin maps")
    p.add_argument("operands", nargs="+", metavar="X")
    p.add_argument("--space", "--surface", dest="space", required=True)
    p.add_argument("--op", choices=("bracket", "marking", "erasing", "cap"), default="bracket")
    p.add_argument("--classes")
    p.add_argument("--oracle")
    _common(p)

    p = sub.add_parser("verify", help="check exactness of a Gysin sequence or a given sequence")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gysin", metavar="SPACE")
    g.add_argument("--torus", action="store_true", help="blockwise torus sequences")
    g.add_argument("--surface", metavar="gN")
    g.add_argument("--exact", metavar="FILE", help="JSON list of morphisms")
    p.add_argument("--max-degree", type=int, default=20)
    p.add_argument("--window")
    p.add_argument("--classes")
    _common(p)

    p = sub.add_parser("audit", help="order bookkeeping for unresolved blocks on S^n, n >= 5")
    p.add_argument("--space", required=True)
    p.add_argument("--max-k", type=int, required=True)
    _common(p)

    p = sub.add_parser("center", help="is a torus string class central")
    p.add_argument("element")
    p.add_argument("--surface", default="torus")
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false")
    _common(p)
    return parser


def _payload(args: argparse.Namespace) -> dict:
    skip = {"command", "format"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def run(argv=None, out=None, err=None) -> int:
    """Run the CLI on ``argv``; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    res = service.run(args.command, _payload(args))
    if args.format == "json" or res.exit_code == service.EXIT_VERIFY:
        print(json.dumps(res.model_dump(mode="json"), ensure_ascii=False, indent=2), file=out)
        if res.exit_code == service.EXIT_VERIFY and args.format != "json":
            print(res.text, file=err)
    elif res.error is not None:
        print(res.text, file=err)
    else:
        print(res.text, file=out)
    return res.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
