"""A workbench for the bilateral proof-and-refutation calculus.

Modules: syntax (formulas), calculus (derivations and checking), rewrite (normalisation),
bases (atomic bases), semantics (bounded support), completeness (simulation bases),
search (decision procedure) and cli.
"""

from .syntax import BOT, MINUS, PLUS, TOP, Formula, Sign, parse_formula, print_formula
from .calculus import check_derivation, end_judgment
from .rewrite import normalize
from .search import decide, prove

__all__ = ["BOT", "MINUS", "PLUS", "TOP", "Formula", "Sign", "check_derivation", "decide",
           "end_judgment", "normalize", "parse_formula", "print_formula", "prove"]
__version__ = "0.1.0"
