"""Recursive descent parser for MiniOO.

Grammar::

    unit   := "package" path ";" import* decl*
    import := "import" path ";"
    decl   := "interface" NAME "{" sig* "}"
            | ["abstract"] "class" NAME ["extends" NAME]
              ["implements" NAME ("," NAME)*] "{" member* "}"
    sig    := NAME "(" params? ")" ";"
    member := "field" NAME ";" | NAME "(" params? ")" block
    block  := "{" stmt* "}"
    stmt   := "call" NAME "." NAME "(" args? ")" ";"
            | "access" NAME "." NAME ";"
            | "assign" NAME ";"
            | "if" "(" NAME ")" block ["else" block]
            | "while" "(" NAME ")" block
            | "return" ";"
    path   := NAME ("." NAME)*
    params := NAME ("," NAME)*
    args   := NAME ("," NAME)*
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .lexer import Diagnostic, Token, tokenize


class Pos(tuple):
    """(line, column), 1-based."""

    __slots__ = ()

    def __new__(cls, line: int, column: int):
        return super().__new__(cls, (line, column))

    @property
    def line(self) -> int:
        return self[0]

    @property
    def column(self) -> int:
        return self[1]


def _pos(tok: Token) -> Pos:
    return Pos(tok.line, tok.column)


# -- tree ---------------------------------------------------------------------


@dataclass(frozen=True)
class Call:
    target: str
    method: str
    args: tuple[str, ...]
    pos: Pos


@dataclass(frozen=True)
class Access:
    owner: str
    attr: str
    pos: Pos


@dataclass(frozen=True)
class Assign:
    name: str
    pos: Pos


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    open: Pos
    close: Pos


@dataclass(frozen=True)
class If:
    cond: str
    then: Block
    orelse: Optional[Block]
    pos: Pos


@dataclass(frozen=True)
class While:
    cond: str
    body: Block
    pos: Pos


@dataclass(frozen=True)
class Return:
    pos: Pos


Stmt = Union[Call, Access, Assign, If, While, Return]


@dataclass(frozen=True)
class FieldDecl:
    name: str
    pos: Pos


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[str, ...]
    body: Block
    pos: Pos


@dataclass(frozen=True)
class Signature:
    name: str
    params: tuple[str, ...]
    pos: Pos


@dataclass(frozen=True)
class InterfaceDecl:
    name: str
    sigs: tuple[Signature, ...]
    pos: Pos


@dataclass(frozen=True)
class ClassDecl:
    name: str
    abstract: bool
    extends: Optional[tuple[str, Pos]]
    implements: tuple[tuple[str, Pos], ...]
    members: tuple[Union[FieldDecl, MethodDecl], ...]
    pos: Pos


Decl = Union[InterfaceDecl, ClassDecl]


@dataclass(frozen=True)
class Import:
    path: str
    pos: Pos


@dataclass(frozen=True)
class SourceUnit:
    path: str
    package_decl: str
    imports: tuple[Import, ...]
    declarations: tuple[Decl, ...]
    text: str = field(default="", compare=False, repr=False)


class ParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class _Bail(Exception):
    pass


# -- parser -------------------------------------------------------------------

_STMT_START = {"call", "access", "assign", "if", "while", "return"}
_DECL_START = {"interface", "abstract", "class"}


class _Parser:
    def __init__(self, tokens: list[Token], path: str):
        self.tokens = tokens
        self.i = 0
        self.path = path
        self.diags: list[Diagnostic] = []

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, kind: str) -> bool:
        return self.tok.kind == kind

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        if self.tok.kind != kind:
            self.error(self.tok, f"expected {what or repr(kind)}")
        return self.advance()

    def error(self, tok: Token, message: str):
        found = "end of file" if tok.kind == "EOF" else repr(tok.text)
        self.diags.append(
            Diagnostic(self.path, tok.line, tok.column, f"{message}, found {found}")
        )
        raise _Bail

    def skip_past(self, stop: set[str]):
        """Drop tokens up to the next one in ``stop`` (not consumed)."""
        while not self.at("EOF") and self.tok.kind not in stop:
            self.advance()

    # grammar
    def unit(self) -> tuple[str, list[Import], list[Decl]]:
        package = ""
        try:
            self.expect("package")
            package = self.path_name()
            self.expect(";")
        except _Bail:
            self.skip_past({";"} | _DECL_START | {"import"})
            if self.at(";"):
                self.advance()
        imports = []
        while self.at("import"):
            start = self.advance()
            try:
                imports.append(Import(self.path_name(), _pos(start)))
                self.expect(";")
            except _Bail:
                self.skip_past({";"} | _DECL_START | {"import"})
                if self.at(";"):
                    self.advance()
        decls = []
        while not self.at("EOF"):
            try:
                decls.append(self.decl())
            except _Bail:
                # resynchronise on the next top-level declaration keyword
                self.advance()
                self.skip_past(_DECL_START)
        return package, imports, decls

    def path_name(self) -> str:
        parts = [self.expect("NAME", "a name").text]
        while self.at("."):
            self.advance()
            parts.append(self.expect("NAME", "a name").text)
        return ".".join(parts)

    def names(self, closer: str) -> tuple[str, ...]:
        out = []
        if not self.at(closer):
            out.append(self.expect("NAME", "a name").text)
            while self.at(","):
                self.advance()
                out.append(self.expect("NAME", "a name").text)
        return tuple(out)

    def decl(self) -> Decl:
        if self.at("interface"):
            start = self.advance()
            name = self.expect("NAME", "an interface name").text
            self.expect("{")
            sigs = []
            while not self.at("}") and not self.at("EOF"):
                try:
                    sigs.append(self.sig())
                except _Bail:
                    self.skip_past({";", "}"})
                    if self.at(";"):
                        self.advance()
            self.expect("}")
            return InterfaceDecl(name, tuple(sigs), _pos(start))
        start = self.tok
        abstract = False
        if self.at("abstract"):
            self.advance()
            abstract = True
        if not self.at("class"):
            self.error(self.tok, "expected a class or interface declaration")
        self.advance()
        name = self.expect("NAME", "a class name").text
        extends = None
        if self.at("extends"):
            self.advance()
            tok = self.expect("NAME", "a class name")
            extends = (tok.text, _pos(tok))
        implements = []
        if self.at("implements"):
            self.advance()
            tok = self.expect("NAME", "an interface name")
            implements.append((tok.text, _pos(tok)))
            while self.at(","):
                self.advance()
                tok = self.expect("NAME", "an interface name")
                implements.append((tok.text, _pos(tok)))
        self.expect("{")
        members = []
        while not self.at("}") and not self.at("EOF"):
            try:
                members.append(self.member())
            except _Bail:
                self.skip_past({";", "}"})
                if self.at(";"):
                    self.advance()
                elif self.at("}"):
                    # a broken method body: drop its closing brace too
                    self.advance()
        self.expect("}")
        return ClassDecl(name, abstract, extends, tuple(implements), tuple(members), _pos(start))

    def sig(self) -> Signature:
        tok = self.expect("NAME", "a method signature")
        self.expect("(")
        params = self.names(")")
        self.expect(")")
        self.expect(";")
        return Signature(tok.text, params, _pos(tok))

    def member(self):
        if self.at("field"):
            self.advance()
            tok = self.expect("NAME", "a field name")
            self.expect(";")
            return FieldDecl(tok.text, _pos(tok))
        tok = self.expect("NAME", "a field or method declaration")
        self.expect("(")
        params = self.names(")")
        self.expect(")")
        return MethodDecl(tok.text, params, self.block(), _pos(tok))

    def block(self) -> Block:
        open_tok = self.expect("{")
        stmts = []
        while not self.at("}") and not self.at("EOF"):
            try:
                stmts.append(self.stmt())
            except _Bail:
                self.skip_past({";", "}"} | _STMT_START)
                if self.at(";"):
                    self.advance()
        close_tok = self.expect("}")
        return Block(tuple(stmts), _pos(open_tok), _pos(close_tok))

    def stmt(self) -> Stmt:
        tok = self.tok
        kind = tok.kind
        if kind not in _STMT_START:
            self.error(tok, "expected a statement")
        self.advance()
        pos = _pos(tok)
        if kind == "call":
            target = self.expect("NAME", "a class name").text
            self.expect(".")
            method = self.expect("NAME", "a method name").text
            self.expect("(")
            args = self.names(")")
            self.expect(")")
            self.expect(";")
            return Call(target, method, args, pos)
        if kind == "access":
            owner = self.expect("NAME", "a class name").text
            self.expect(".")
            attr = self.expect("NAME", "an attribute name").text
            self.expect(";")
            return Access(owner, attr, pos)
        if kind == "assign":
            name = self.expect("NAME", "a name").text
            self.expect(";")
            return Assign(name, pos)
        if kind == "return":
            self.expect(";")
            return Return(pos)
        self.expect("(")
        cond = self.expect("NAME", "a condition name").text
        self.expect(")")
        body = self.block()
        if kind == "while":
            return While(cond, body, pos)
        orelse = None
        if self.at("else"):
            self.advance()
            orelse = self.block()
        return If(cond, body, orelse, pos)


def parse_unit(text: str, path: str = "<string>") -> SourceUnit:
    """Parse one MiniOO file.

    Raises ParseError carrying every diagnostic found; the parser recovers at
    statement, member and declaration boundaries so one bad line does not hide
    the next.
    """
    lexed = tokenize(text, path)
    parser = _Parser(lexed.tokens, path)
    package, imports, decls = parser.unit()
    diags = sorted(lexed.diagnostics + parser.diags, key=lambda d: (d.line, d.column))
    if diags:
        raise ParseError(diags)
    return SourceUnit(path, package, tuple(imports), tuple(decls), text)


# -- unparsing ----------------------------------------------------------------


def unit_tokens(unit: SourceUnit) -> list[str]:
    """Token texts of ``unit`` as the grammar would print it (no comments)."""
    out: list[str] = []

    def path(p):
        for i, part in enumerate(p.split(".")):
            if i:
                out.append(".")
            out.append(part)

    def names(ns):
        for i, n in enumerate(ns):
            if i:
                out.append(",")
            out.append(n)

    def block(b: Block):
        out.append("{")
        for s in b.stmts:
            stmt(s)
        out.append("}")

    def stmt(s):
        if isinstance(s, Call):
            out.extend(["call", s.target, ".", s.method, "("])
            names(s.args)
            out.extend([")", ";"])
        elif isinstance(s, Access):
            out.extend(["access", s.owner, ".", s.attr, ";"])
        elif isinstance(s, Assign):
            out.extend(["assign", s.name, ";"])
        elif isinstance(s, Return):
            out.extend(["return", ";"])
        elif isinstance(s, While):
            out.extend(["while", "(", s.cond, ")"])
            block(s.body)
        else:
            out.extend(["if", "(", s.cond, ")"])
            block(s.then)
            if s.orelse is not None:
                out.append("else")
                block(s.orelse)

    out.append("package")
    path(unit.package_decl)
    out.append(";")
    for imp in unit.imports:
        out.append("import")
        path(imp.path)
        out.append(";")
    for d in unit.declarations:
        if isinstance(d, InterfaceDecl):
            out.extend(["interface", d.name, "{"])
            for sig in d.sigs:
                out.extend([sig.name, "("])
                names(sig.params)
                out.extend([")", ";"])
            out.append("}")
            continue
        if d.abstract:
            out.append("abstract")
        out.extend(["class", d.name])
        if d.extends:
            out.extend(["extends", d.extends[0]])
        if d.implements:
            out.append("implements")
            names([n for n, _ in d.implements])
        out.append("{")
        for m in d.members:
            if isinstance(m, FieldDecl):
                out.extend(["field", m.name, ";"])
            else:
                out.extend([m.name, "("])
                names(m.params)
                out.append(")")
                block(m.body)
        out.append("}")
    return out


def unparse(unit: SourceUnit) -> str:
    return " ".join(unit_tokens(unit)).replace(" . ", ".")
