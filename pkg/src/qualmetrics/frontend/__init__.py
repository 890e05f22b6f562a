"""MiniOO frontend: source files in, DesignModel out."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Union

from ..model import DesignModel
from .lexer import Diagnostic, Token, tokenize
from .lower import LowerError, classify_lines, lower
from .parser import ParseError, SourceUnit, parse_unit, unit_tokens, unparse

__all__ = [
    "Diagnostic",
    "LowerError",
    "ParseError",
    "SourceUnit",
    "Token",
    "classify_lines",
    "expand_sources",
    "load_model",
    "lower",
    "parse_files",
    "parse_unit",
    "tokenize",
    "unit_tokens",
    "unparse",
]

SOURCE_SUFFIX = ".moo"


def expand_sources(paths: Iterable[Union[str, Path]]) -> list[Path]:
    """Files named directly, plus every ``*.moo`` below each directory, sorted."""
    out = set()
    for p in map(Path, paths):
        if p.is_dir():
            out.update(f for f in p.rglob(f"*{SOURCE_SUFFIX}") if f.is_file())
        else:
            out.add(p)
    return sorted(out)


def parse_files(paths: Iterable[Union[str, Path]]) -> list[SourceUnit]:
    """Parse every file, raising one ParseError with the diagnostics of all of them."""
    units, diags = [], []
    for path in expand_sources(paths):
        text = path.read_text(encoding="utf-8")
        try:
            units.append(parse_unit(text, str(path)))
        except ParseError as exc:
            diags.extend(exc.diagnostics)
    if diags:
        raise ParseError(diags)
    return units


def load_model(paths: Iterable[Union[str, Path]]) -> DesignModel:
    return lower(parse_files(paths))
