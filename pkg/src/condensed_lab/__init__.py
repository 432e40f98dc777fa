"""condensed_lab: exact integer homological-algebra workbench.

Subpackages are organized by subject: exact_algebra (SNF engine, chain
complexes, abelian groups), simplicial (bar constructions and
Eilenberg-MacLane homology), breen_deligne (the explicit partial resolution),
noebeling (bases of continuous integer functions on cube subsets), cech
(finite hypercovers and torus cohomology), solid (symbolic tensor calculus
with truncated oracles), duality (boundary modules, Koszul complexes, P^1
Serre pairing), adic (rational cover combinatorics), and cli (front door).
"""

from .exact_algebra import (
    ChainComplex,
    FgAbGroup,
    FinAbGroup,
    IntMatrix,
    smith_normal_form,
    pontrjagin_dual_finite,
)

__all__ = [
    "ChainComplex",
    "FgAbGroup",
    "FinAbGroup",
    "IntMatrix",
    "smith_normal_form",
    "pontrjagin_dual_finite",
]

__version__ = "0.1.0"
