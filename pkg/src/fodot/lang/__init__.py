"""Concrete syntax, AST and pretty-printer for FO-dot knowledge bases."""

from .ast import KnowledgeBase
from .parser import parse_expr_text, parse_kb
from .printer import print_expr, print_kb

__all__ = ["KnowledgeBase", "parse_kb", "parse_expr_text", "print_kb", "print_expr"]
