"""Grounding: from typed KBs and structures to finite ground theories."""

from .grounder import fact_expr, ground_theory
from .simplify import simplify
from .theory import GroundAssertion, GroundAtom, GroundTheory

__all__ = ["ground_theory", "fact_expr", "simplify", "GroundTheory",
           "GroundAtom", "GroundAssertion"]
