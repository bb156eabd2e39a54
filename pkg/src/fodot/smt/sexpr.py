"""S-expression reading and writing for the SMT-LIB 2 textual protocol."""

from __future__ import annotations

import re

Sexpr = "str | list"

_SIMPLE = re.compile(r"^[A-Za-z0-9~!@$%^&*_\-+=<>.?/]+$")


def quote_symbol(name: str) -> str:
    """Quote a symbol with |...| when it is not a simple SMT-LIB symbol."""
    if _SIMPLE.match(name):
        return name
    if "|" in name or "\\" in name:
        name = name.replace("\\", "_").replace("|", "_")
    return f"|{name}|"


def format_sexpr(s) -> str:
    if isinstance(s, str):
        return s
    return "(" + " ".join(format_sexpr(x) for x in s) + ")"


class SexprReader:
    """Incremental reader: feed chunks, pop complete top-level expressions.

    Atoms come out as plain strings; |quoted symbols| are unquoted and
    "string literals" keep their quotes so errors can be told apart.
    """

    def __init__(self) -> None:
        self._buf = ""

    def feed(self, chunk: str) -> None:
        self._buf += chunk

    def ready(self) -> bool:
        expr, rest = _parse_one(self._buf)
        return expr is not None

    def pop(self):
        expr, rest = _parse_one(self._buf)
        if expr is None:
            return None
        self._buf = rest
        return expr


def _parse_one(text: str):
    """First complete sexpr in text, plus the remainder; (None, text) when
    incomplete."""
    tokens = []
    i, n = 0, len(text)
    depth = 0
    start = None
    while i < n:
        c = text[i]
        if c == ";":
            j = text.find("\n", i)
            if j < 0:
                return (None, text) if depth or start is None else _finish(tokens, text, i)
            i = j + 1
            continue
        if c.isspace():
            i += 1
            continue
        if start is None:
            start = i
        if c == "(":
            depth += 1
            tokens.append("(")
            i += 1
        elif c == ")":
            depth -= 1
            tokens.append(")")
            i += 1
            if depth == 0:
                return _finish(tokens, text, i)
            if depth < 0:
                raise ValueError("unbalanced ')' from solver")
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                return None, text
            tokens.append(("atom", text[i + 1:j]))
            i = j + 1
            if depth == 0:
                return _finish(tokens, text, i)
        elif c == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            else:
                return None, text
            tokens.append(("atom", text[i:j + 1]))
            i = j + 1
            if depth == 0:
                return _finish(tokens, text, i)
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()|;\"":
                j += 1
            if j == n and depth > 0:
                return None, text  # atom may continue in the next chunk
            tokens.append(("atom", text[i:j]))
            i = j
            if depth == 0:
                # a bare top-level atom is complete only once delimited
                if j < n:
                    return _finish(tokens, text, i)
                return None, text
    return None, text


def _finish(tokens, text, pos):
    expr, rest_tokens = _build(tokens)
    return expr, text[pos:]


def _build(tokens):
    tok = tokens[0]
    if tok == "(":
        items = []
        rest = tokens[1:]
        while rest and rest[0] != ")":
            item, rest = _build(rest)
            items.append(item)
        return items, rest[1:]
    return tok[1], tokens[1:]
