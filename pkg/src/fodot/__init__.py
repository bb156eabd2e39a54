"""fodot: a reasoning engine for FO-dot knowledge bases.

Parses knowledge bases, grounds them over finite domains, reduces
definitions to classical formulas, and answers reasoning tasks through an
external SMT solver speaking SMT-LIB 2 (a built-in solver ships with the
package; see fodot.smt).
"""

__version__ = "0.1.0"

from .lang import parse_kb, print_kb  # noqa: F401
