"""Tokenizer for the FO-dot concrete syntax."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import Diagnostic, ParseErrors, Span

KEYWORDS = {
    "vocabulary", "theory", "structure", "type",
    "true", "false", "if", "then", "else",
    "sum", "min", "max", "lambda", "in",
}

# longest first so maximal munch works with a linear scan
OPERATORS = [
    "<=>", "\\in",
    "=>", "=<", ">=", "~=", "<-", ":=", "..", "->",
    "(", ")", "{", "}", "[", "]", ",", ".", ":", ";",
    "*", "/", "+", "-", "=", "<", ">", "~", "!", "?", "#", "$", "`", "|", "&",
    "∈",
]

IDENT = "ident"
INT = "int"
DECIMAL = "decimal"
OP = "op"
KW = "kw"
EOF = "eof"


@dataclass
class Token:
    kind: str
    text: str
    span: Span

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}@{self.span})"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        span = Span(line, col)
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j + 1 < n and source[j] == "." and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
                tokens.append(Token(DECIMAL, source[i:j], span))
            else:
                tokens.append(Token(INT, source[i:j], span))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            tokens.append(Token(KW if text in KEYWORDS else IDENT, text, span))
            col += j - i
            i = j
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                text = "in" if op in ("\\in", "∈") else op
                kind = KW if text == "in" else OP
                tokens.append(Token(kind, text, span))
                i += len(op)
                col += len(op)
                break
        else:
            raise ParseErrors([Diagnostic(f"unexpected character {c!r}", span)])
    tokens.append(Token(EOF, "", Span(line, col)))
    return tokens
