"""Lowering of parsed MiniOO units to a DesignModel."""
from __future__ import annotations

from typing import Iterable, Optional

from ..model import (
    Class,
    ClassKind,
    DesignModel,
    Method,
    MethodFacts,
    Package,
    Symbol,
)
from .lexer import Diagnostic
from .parser import (
    Access,
    Assign,
    Block,
    Call,
    ClassDecl,
    If,
    InterfaceDecl,
    MethodDecl,
    FieldDecl,
    Return,
    SourceUnit,
    While,
)


class LowerError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


def classify_lines(lines: Iterable[str]) -> tuple[int, int, int]:
    """Return (total, blank, comment) line counts.

    A line is a comment if it starts with ``//`` after indentation, blank if it
    is only whitespace; a code line with a trailing comment is code.
    """
    total = blank = comment = 0
    for line in lines:
        total += 1
        stripped = line.strip()
        if not stripped:
            blank += 1
        elif stripped.startswith("//"):
            comment += 1
    return total, blank, comment


class _Decl:
    """A declaration with the unit it came from and its resolved name."""

    def __init__(self, unit: SourceUnit, decl):
        self.unit = unit
        self.decl = decl
        self.fq = f"{unit.package_decl}.{decl.name}"
        self.is_interface = isinstance(decl, InterfaceDecl)
        self.attributes: dict[str, FieldDecl] = {}
        self.method_names: set[str] = set()
        if self.is_interface:
            self.method_names = {s.name for s in decl.sigs}
        else:
            for m in decl.members:
                if isinstance(m, FieldDecl):
                    self.attributes.setdefault(m.name, m)
                else:
                    self.method_names.add(m.name)


class _Lowerer:
    def __init__(self, units: list[SourceUnit]):
        self.units = units
        self.diags: list[Diagnostic] = []
        self.by_name: dict[str, _Decl] = {}
        self.point_counter = 0
        self.branch_counter = 0
        self.symbols: list[Symbol] = []

    def err(self, unit: SourceUnit, pos, message: str):
        self.diags.append(Diagnostic(unit.path, pos[0], pos[1], message))

    # -- name resolution ---------------------------------------------------

    def resolve(self, unit: SourceUnit, name: str, pos, what: str) -> Optional[_Decl]:
        d = self.by_name.get(name)
        if d is None:
            self.err(unit, pos, f"unresolved {what} {name}")
        return d

    def ancestors(self, d: _Decl) -> list[_Decl]:
        """``d`` followed by its extends chain (cycle-safe)."""
        chain = [d]
        while not chain[-1].is_interface and chain[-1].decl.extends:
            parent = self.by_name.get(chain[-1].decl.extends[0])
            if parent is None or parent in chain:
                break
            chain.append(parent)
        return chain

    def method_owner(self, d: _Decl, method: str) -> Optional[_Decl]:
        # class chain first, then the interfaces anywhere along it
        chain = self.ancestors(d)
        for c in chain:
            if method in c.method_names:
                return c
        for c in chain:
            if c.is_interface:
                continue
            for iface_name, _ in c.decl.implements:
                iface = self.by_name.get(iface_name)
                if iface is not None and iface.is_interface and method in iface.method_names:
                    return iface
        return None

    def attribute_owner(self, d: _Decl, attr: str) -> Optional[_Decl]:
        for c in self.ancestors(d):
            if attr in c.attributes:
                return c
        return None

    # -- passes ------------------------------------------------------------

    def collect(self):
        for unit in self.units:
            for decl in unit.declarations:
                d = _Decl(unit, decl)
                if decl.name in self.by_name:
                    other = self.by_name[decl.name]
                    self.err(
                        unit,
                        decl.pos,
                        f"duplicate class name {decl.name} (first declared in {other.unit.path} "
                        f"at {other.decl.pos[0]}:{other.decl.pos[1]})",
                    )
                    continue
                self.by_name[decl.name] = d

    def check_imports(self):
        packages = {u.package_decl for u in self.units}
        fq_classes = {d.fq for d in self.by_name.values()}
        for unit in self.units:
            for imp in unit.imports:
                if imp.path not in packages and imp.path not in fq_classes:
                    self.err(unit, imp.pos, f"unresolved import {imp.path}")

    def check_hierarchy(self, d: _Decl):
        if d.is_interface:
            return
        decl: ClassDecl = d.decl
        if decl.extends:
            name, pos = decl.extends
            parent = self.resolve(d.unit, name, pos, "extends target")
            if parent is not None and parent.is_interface:
                self.err(d.unit, pos, f"class {decl.name} cannot extend interface {name}")
        for name, pos in decl.implements:
            iface = self.resolve(d.unit, name, pos, "implements target")
            if iface is not None and not iface.is_interface:
                self.err(d.unit, pos, f"class {decl.name} implements {name}, which is not an interface")
        # extends cycle
        seen = [d]
        cur = d
        while cur.decl.extends:
            nxt = self.by_name.get(cur.decl.extends[0])
            if nxt is None or nxt.is_interface:
                break
            if nxt is d:
                self.err(
                    d.unit,
                    decl.pos,
                    "inheritance cycle: " + " -> ".join(x.decl.name for x in seen + [d]),
                )
                break
            if nxt in seen:
                break  # a cycle not through d; reported from its own members
            seen.append(nxt)
            cur = nxt

    def lower_class(self, d: _Decl) -> Class:
        decl = d.decl
        if d.is_interface:
            methods = []
            for sig in decl.sigs:
                methods.append(Method(sig.name, sig.params, None))
                self.symbols.append(
                    Symbol("method", f"{d.fq}.{sig.name}", f"{d.fq}.{sig.name}", d.unit.path, *sig.pos)
                )
            self.check_duplicates(d, [s for s in decl.sigs], "method")
            return Class(decl.name, ClassKind.INTERFACE, methods=tuple(methods))

        self.check_duplicates(d, [m for m in decl.members if isinstance(m, FieldDecl)], "field")
        self.check_duplicates(d, [m for m in decl.members if isinstance(m, MethodDecl)], "method")
        extends = None
        if decl.extends and decl.extends[0] in self.by_name:
            extends = self.by_name[decl.extends[0]].fq
        implements = frozenset(
            self.by_name[n].fq for n, _ in decl.implements if n in self.by_name
        )
        methods = tuple(
            self.lower_method(d, m) for m in decl.members if isinstance(m, MethodDecl)
        )
        return Class(
            decl.name,
            ClassKind.ABSTRACT if decl.abstract else ClassKind.CONCRETE,
            extends,
            implements,
            frozenset(d.attributes),
            methods,
        )

    def check_duplicates(self, d: _Decl, items, what: str):
        seen = set()
        for item in items:
            if item.name in seen:
                self.err(d.unit, item.pos, f"duplicate {what} {item.name} in {d.decl.name}")
            seen.add(item.name)

    def lower_method(self, d: _Decl, m: MethodDecl) -> Method:
        mfq = f"{d.fq}.{m.name}"
        unit = d.unit
        self.symbols.append(Symbol("method", mfq, mfq, unit.path, *m.pos))
        calls: list[tuple[str, str]] = []
        accesses: set[tuple[str, str]] = set()
        points: list[str] = []
        branches: list[tuple[str, int]] = []
        decisions = 0

        def visit(block: Block):
            nonlocal decisions
            for s in block.stmts:
                self.point_counter += 1
                pid = f"sp{self.point_counter}"
                points.append(pid)
                self.symbols.append(Symbol("point", pid, mfq, unit.path, *s.pos))
                if isinstance(s, (If, While)):
                    decisions += 1
                    self.branch_counter += 1
                    bid = f"br{self.branch_counter}"
                    branches.append((bid, 2))
                    self.symbols.append(Symbol("branch", bid, mfq, unit.path, *s.pos))
                if isinstance(s, Call):
                    target = self.resolve(unit, s.target, s.pos, "call target class")
                    if target is not None:
                        owner = self.method_owner(target, s.method)
                        if owner is None:
                            self.err(unit, s.pos, f"unresolved call target {s.target}.{s.method}")
                        else:
                            calls.append((owner.fq, s.method))
                elif isinstance(s, Access):
                    target = self.resolve(unit, s.owner, s.pos, "access target class")
                    if target is not None:
                        owner = self.attribute_owner(target, s.attr)
                        if owner is None:
                            self.err(unit, s.pos, f"unresolved attribute {s.owner}.{s.attr}")
                        else:
                            accesses.add((owner.fq, s.attr))
                elif isinstance(s, Assign):
                    # assigning a field of this class (or an ancestor) is an access;
                    # anything else is a local
                    owner = self.attribute_owner(d, s.name)
                    if owner is not None:
                        accesses.add((owner.fq, s.name))
                elif isinstance(s, If):
                    visit(s.then)
                    if s.orelse is not None:
                        visit(s.orelse)
                elif isinstance(s, While):
                    visit(s.body)
                else:
                    assert isinstance(s, Return)

        visit(m.body)
        lines = unit.text.splitlines()[m.body.open.line - 1 : m.body.close.line]
        total, blank, comment = classify_lines(lines)
        facts = MethodFacts(
            calls=tuple(calls),
            attribute_accesses=frozenset(accesses),
            decision_points=decisions,
            sequence_points=tuple(points),
            branches=tuple(branches),
            loc_total=total,
            loc_blank=blank,
            loc_comment=comment,
        )
        return Method(m.name, m.params, facts)

    def run(self) -> DesignModel:
        self.collect()
        self.check_imports()
        decls = sorted(self.by_name.values(), key=lambda d: d.fq)
        for d in decls:
            self.check_hierarchy(d)
        packages: dict[str, list[Class]] = {}
        for d in decls:
            packages.setdefault(d.unit.package_decl, []).append(self.lower_class(d))
        for unit in self.units:
            packages.setdefault(unit.package_decl, [])
        if self.diags:
            raise LowerError(sorted(self.diags))
        return DesignModel(
            tuple(Package(name, tuple(packages[name])) for name in sorted(packages)),
            tuple(self.symbols),
        )


def lower(units: Iterable[SourceUnit]) -> DesignModel:
    """Join parsed units into one closed DesignModel.

    Class, point and branch ids are assigned in order of fully qualified class
    name and then source order, so the result does not depend on the order of
    ``units``. Raises LowerError listing every unresolved or duplicate symbol.
    """
    units = sorted(units, key=lambda u: u.path)
    return _Lowerer(units).run()
