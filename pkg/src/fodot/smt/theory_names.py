"""Naming helpers shared between emission and model decoding."""

from __future__ import annotations

from ..lang.ast import TypeRef


def concept_sort_name(t: TypeRef) -> str:
    """Solver sort name for a parameterized Concept type."""
    return str(t)
