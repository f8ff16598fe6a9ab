"""Exact computations for string topology of spheres and surfaces.

Submodules:

* ``exact``: chains, Smith normal form, abelian groups, exactness checks
* ``goldman``: the Goldman Lie algebra of the closed torus
* ``loops``: loop homology rings with loop product and BV operator
* ``strings``: string homology of spheres, marking/erasing maps, string bracket
* ``surfaces``: string homology and brackets of the torus and of higher genus
* ``service`` / ``cli``: HTTP and command-line front ends
"""

from .exact import (
    AbelianGroup,
    ExactnessReport,
    FreeChain,
    GroupMorphism,
    add,
    check_exact,
    cokernel,
    scale,
    smith_normal_form,
)
from .goldman import (
    BracketExpression,
    TorusChain,
    TorusClass,
    derived_membership,
    generation_witness,
    goldman_bracket,
    jacobi_residual,
    lcs_member_witness,
    z_bracket_reachable,
)
from .loops import LoopChain, LoopMonomial, Space, bv_delta, loop_bracket, loop_product
from .strings import (
    StringChain,
    StringGen,
    consistency_audit,
    erasing,
    marking,
    string_bracket,
    string_homology,
    verify_gysin,
)
from .surfaces import (
    GoldmanOracle,
    SurfaceConjClass,
    sigma_g_string_bracket,
    sigma_g_string_homology,
    torus_center_membership,
    torus_string_bracket,
    torus_string_homology,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup", "ExactnessReport", "FreeChain", "GroupMorphism", "add", "check_exact",
    "cokernel", "scale", "smith_normal_form",
    "BracketExpression", "TorusChain", "TorusClass", "derived_membership", "generation_witness",
    "goldman_bracket", "jacobi_residual", "lcs_member_witness", "z_bracket_reachable",
    "LoopChain", "LoopMonomial", "Space", "bv_delta", "loop_bracket", "loop_product",
    "StringChain", "StringGen", "consistency_audit", "erasing", "marking", "string_bracket",
    "string_homology", "verify_gysin",
    "GoldmanOracle", "SurfaceConjClass", "sigma_g_string_bracket", "sigma_g_string_homology",
    "torus_center_membership", "torus_string_bracket", "torus_string_homology",
]
