"""Design metrics over a DesignModel.

Class level: WMC, RFC, NOC, DIT, CBO, LCOM. Package level: efferent and
afferent coupling, instability, abstractness, and the dependency-inversion,
acyclic-dependency and encapsulation principle checks. Plus raw element counts
and lines of code.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .graph import DependencyGraph
from .model import ClassKind, DesignModel, NotApplicable, Ratio

WEIGHTINGS = ("cyclomatic", "unit")
LOC_MODES = ("total", "no_blank", "no_blank_no_comment")


def _cached(model: DesignModel, key: str, build):
    # DesignModel is frozen; stash derived tables beside its fields
    store = model.__dict__.setdefault("_design_cache", {})
    if key not in store:
        store[key] = build()
    return store[key]


def usage_refs(model: DesignModel) -> dict[str, frozenset[str]]:
    """Other classes each class uses through calls or attribute accesses."""

    def build():
        out = {}
        for fq, c in model.classes.items():
            targets = set()
            for m in c.methods:
                if m.body is None:
                    continue
                targets.update(t for t, _ in m.body.calls)
                targets.update(owner for owner, _ in m.body.attribute_accesses)
            targets.discard(fq)
            out[fq] = frozenset(targets)
        return out

    return _cached(model, "usage", build)


def all_refs(model: DesignModel) -> dict[str, frozenset[str]]:
    """Usage references plus extends / implements targets."""

    def build():
        out = {}
        for fq, c in model.classes.items():
            targets = set(usage_refs(model)[fq])
            if c.extends:
                targets.add(c.extends)
            targets.update(c.implements)
            targets.discard(fq)
            out[fq] = frozenset(targets)
        return out

    return _cached(model, "all", build)


# ---------------------------------------------------------------------------
# quantity
# ---------------------------------------------------------------------------


def model_counts(model: DesignModel) -> dict[str, int]:
    classes = model.classes.values()
    kinds = [c.kind for c in classes]
    bodies = [m.body for c in classes for m in c.methods if m.body is not None]
    return {
        "packages": len(model.packages),
        "classes": len(kinds),
        "concrete_classes": kinds.count(ClassKind.CONCRETE),
        "abstract_classes": kinds.count(ClassKind.ABSTRACT),
        "interfaces": kinds.count(ClassKind.INTERFACE),
        "subclasses": sum(c.extends is not None for c in classes),
        "superclasses": len({c.extends for c in classes if c.extends is not None}),
        "subclass_edges": sum(c.extends is not None for c in classes),
        "implements_edges": sum(len(c.implements) for c in classes),
        "call_edges": sum(len(set(b.calls)) for b in bodies),
        "access_edges": sum(len(b.attribute_accesses) for b in bodies),
        "methods": sum(len(c.methods) for c in classes),
        "attributes": sum(len(c.attributes) for c in classes),
    }


def loc(model: DesignModel, scope: str, scope_id: str, mode: str = "total") -> int:
    """Lines of code summed over a method, class or package.

    ``mode`` drops blank lines (``no_blank``) or blank and comment lines
    (``no_blank_no_comment``). A package covers only its own classes, not
    sub-packages.
    """
    if mode not in LOC_MODES:
        raise ValueError(f"unknown LOC mode {mode!r}")
    if scope == "method":
        if scope_id not in model.methods:
            raise LookupError(f"unknown method {scope_id!r}")
        methods = [model.methods[scope_id]]
    elif scope == "class":
        methods = list(model.cls(scope_id).methods)
    elif scope == "package":
        methods = [m for c in model.package(scope_id).classes for m in c.methods]
    else:
        raise ValueError(f"unknown scope kind {scope!r}")
    total = 0
    for m in methods:
        if m.body is None:
            continue
        f = m.body
        total += f.loc_total
        if mode != "total":
            total -= f.loc_blank
        if mode == "no_blank_no_comment":
            total -= f.loc_comment
    return total


# ---------------------------------------------------------------------------
# class metrics
# ---------------------------------------------------------------------------


def wmc(model: DesignModel, cls: str, weighting: str = "cyclomatic"):
    """Weighted methods per class over declared (not inherited) methods.

    ``cyclomatic`` weighs each method 1 + its decision points; ``unit`` weighs
    each method 1.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"unknown WMC weighting {weighting!r}")
    c = model.cls(cls)
    if c.kind is ClassKind.INTERFACE:
        return NotApplicable("interfaces have no method bodies")
    if weighting == "unit":
        return len(c.methods)
    return sum(1 + m.body.decision_points for m in c.methods)


def response_set(model: DesignModel, cls: str) -> frozenset[tuple[str, str]]:
    c = model.cls(cls)
    rs = {(cls, m.name) for m in c.methods}
    for m in c.methods:
        if m.body is not None:
            rs.update(m.body.calls)
    return frozenset(rs)


def rfc(model: DesignModel, cls: str) -> int:
    return len(response_set(model, cls))


def _children(model: DesignModel) -> dict[str, list[str]]:
    def build():
        kids = {fq: [] for fq in model.classes}
        for fq, c in model.classes.items():
            if c.extends is not None and c.extends in kids:
                kids[c.extends].append(fq)
        return kids

    return _cached(model, "children", build)


def noc(model: DesignModel, cls: str) -> int:
    model.cls(cls)
    return len(_children(model)[cls])


def dit(model: DesignModel, cls: str) -> int:
    depth = 0
    c = model.cls(cls)
    seen = {cls}
    while c.extends is not None:
        if c.extends in seen:
            raise ValueError(f"inheritance cycle through {c.extends}")
        seen.add(c.extends)
        c = model.cls(c.extends)
        depth += 1
    return depth


def cbo(model: DesignModel, cls: str, include_fan_in: bool = False) -> int:
    model.cls(cls)
    coupled = set(usage_refs(model)[cls])
    if include_fan_in:
        coupled.update(src for src, targets in usage_refs(model).items() if cls in targets)
    coupled.discard(cls)
    return len(coupled)


def own_attribute_sets(model: DesignModel, cls: str) -> list[frozenset[str]]:
    c = model.cls(cls)
    sets = []
    for m in c.methods:
        accessed = m.body.attribute_accesses if m.body is not None else ()
        sets.append(frozenset(a for owner, a in accessed if owner == cls and a in c.attributes))
    return sets


def lcom(model: DesignModel, cls: str) -> int:
    """Number of method pairs that share no attribute of this class."""
    return sum(1 for a, b in combinations(own_attribute_sets(model, cls), 2) if not a & b)


@dataclass(frozen=True)
class ClassMetrics:
    wmc_cyclomatic: object
    wmc_unit: object
    rfc: int
    noc: int
    dit: int
    cbo: int
    lcom: int


def class_metrics(model: DesignModel, cls: str, include_fan_in: bool = False) -> ClassMetrics:
    return ClassMetrics(
        wmc(model, cls, "cyclomatic"),
        wmc(model, cls, "unit"),
        rfc(model, cls),
        noc(model, cls),
        dit(model, cls),
        cbo(model, cls, include_fan_in),
        lcom(model, cls),
    )


# ---------------------------------------------------------------------------
# package metrics
# ---------------------------------------------------------------------------


def package_coupling(model: DesignModel, package: str) -> tuple[int, int]:
    """(Ce, Ca): outside classes this package uses, outside classes that use it."""
    model.package(package)
    pkg_of = model.package_of
    refs = all_refs(model)
    efferent = {
        t for s, targets in refs.items() if pkg_of[s] == package
        for t in targets if pkg_of[t] != package
    }
    afferent = {
        s for s, targets in refs.items() if pkg_of[s] != package
        if any(pkg_of[t] == package for t in targets)
    }
    return len(efferent), len(afferent)


def instability(ce: int, ca: int) -> Ratio:
    """Ce / (Ca + Ce); an isolated package is NotApplicable (fallback 0, stable)."""
    if ce < 0 or ca < 0:
        raise ValueError("coupling counts must be non-negative")
    if ce + ca == 0:
        return NotApplicable("package has no couplings", Fraction(0))
    return Fraction(ce, ce + ca)


def abstractness(model: DesignModel, package: str) -> Ratio:
    classes = model.package(package).classes
    if not classes:
        return NotApplicable("package has no classes")
    abstract = sum(c.kind is ClassKind.ABSTRACT for c in classes)
    interfaces = sum(c.kind is ClassKind.INTERFACE for c in classes)
    return Fraction(abstract + interfaces, len(classes))


def _outgoing_edges(model: DesignModel, package: str) -> list[tuple[str, str]]:
    pkg_of = model.package_of
    return sorted(
        (s, t)
        for s, targets in all_refs(model).items() if pkg_of[s] == package
        for t in targets if pkg_of[t] != package
    )


def dip(model: DesignModel, package: str) -> Ratio:
    """Share of cross-package class dependencies that target abstract classes or interfaces."""
    model.package(package)
    edges = _outgoing_edges(model, package)
    if not edges:
        return NotApplicable("package has no outgoing dependencies")
    abstract = sum(model.classes[t].is_abstract_entity for _, t in edges)
    return Fraction(abstract, len(edges))


def package_graph(model: DesignModel) -> DependencyGraph:
    pkg_of = model.package_of
    edges = [
        (pkg_of[s], pkg_of[t])
        for s, targets in all_refs(model).items()
        for t in targets
        if pkg_of[s] != pkg_of[t]
    ]
    return DependencyGraph.build((p.name for p in model.packages), edges)


def adp(model: DesignModel) -> tuple[bool, list[list[str]]]:
    """(acyclic, cycles) for the package dependency graph."""
    cycles = package_graph(model).cycles()
    return not cycles, cycles


def package_names(model: DesignModel) -> list[str]:
    """Declared packages plus the ancestors implied by their dotted paths."""
    names = set()
    for p in model.packages:
        parts = p.name.split(".")
        for i in range(1, len(parts) + 1):
            names.add(".".join(parts[:i]))
    return sorted(names)


def _in_subtree(name: str, root: str) -> bool:
    return name == root or name.startswith(root + ".")


def child_packages(model: DesignModel, package: str) -> list[str]:
    depth = package.count(".") + 1
    return [
        q for q in package_names(model)
        if q.startswith(package + ".") and q.count(".") == depth
    ]


def ep(model: DesignModel, package: str) -> Fraction:
    """Encapsulation percentage: 100 * share of child packages nobody outside uses.

    A child counts as used when a class anywhere in the child's subtree is
    referenced from a package outside ``package``'s subtree. No children gives 100.
    """
    if package not in package_names(model):
        raise LookupError(f"unknown package {package!r}")
    children = child_packages(model, package)
    if not children:
        return Fraction(100)
    pkg_of = model.package_of
    used = set()
    for s, targets in all_refs(model).items():
        if _in_subtree(pkg_of[s], package):
            continue
        for t in targets:
            for child in children:
                if _in_subtree(pkg_of[t], child):
                    used.add(child)
    return 100 * (1 - Fraction(len(used), len(children)))


@dataclass(frozen=True)
class PackageMetrics:
    ce: int
    ca: int
    instability: Ratio
    abstractness: Ratio
    dip: Ratio
    ep_percent: Fraction


def package_metrics(model: DesignModel, package: str) -> PackageMetrics:
    ce, ca = package_coupling(model, package)
    return PackageMetrics(
        ce, ca, instability(ce, ca), abstractness(model, package), dip(model, package),
        ep(model, package),
    )


def max_lcom(model: DesignModel) -> Optional[tuple[str, int]]:
    """Class with the highest LCOM (first by name on ties)."""
    best = None
    for fq in sorted(model.classes):
        value = lcom(model, fq)
        if best is None or value > best[1]:
            best = (fq, value)
    return best
