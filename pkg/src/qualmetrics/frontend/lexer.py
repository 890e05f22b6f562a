"""Tokenizer for MiniOO source text."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

KEYWORDS = frozenset(
    """package import interface abstract class extends implements field
    call access assign if else while return""".split()
)
PUNCTUATION = frozenset(";{}(),.")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
    |(?P<newline>\n)
    |(?P<comment>//[^\n]*)
    |(?P<name>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<punct>[;{}(),.])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str  # "NAME", "EOF", or the keyword / punctuation text itself
    text: str
    line: int
    column: int


class Diagnostic(NamedTuple):
    path: str
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.path}:{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass
class LexResult:
    tokens: list[Token]
    diagnostics: list[Diagnostic]


def tokenize(text: str, path: str = "<string>") -> LexResult:
    """Split ``text`` into tokens, ending with an EOF token.

    Illegal characters are reported and skipped so that the parser still sees
    the rest of the file.
    """
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, line_start, pos = 1, 0, 0
    end_line, end_col = 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            diags.append(Diagnostic(path, line, col, f"illegal character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        if kind != "newline":
            end_line, end_col = line, col + len(value) - 1
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind == "name":
            tokens.append(Token(value if value in KEYWORDS else "NAME", value, line, col))
        elif kind == "punct":
            tokens.append(Token(value, value, line, col))
        pos = m.end()
    # EOF sits on the last character of the file, so it is always a real position
    tokens.append(Token("EOF", "", end_line, end_col))
    return LexResult(tokens, diags)
