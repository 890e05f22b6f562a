"""Coverage ratios from execution traces, and the code-base checklist."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional

from .model import (
    Arm,
    BranchArm,
    CoverageTrace,
    DesignModel,
    MethodEntry,
    NotApplicable,
    Point,
    Ratio,
)


class CoverageError(LookupError):
    def __init__(self, message: str, run_id: str = "", line: Optional[int] = None):
        self.run_id = run_id
        self.line = line
        where = f"{run_id}:{line}: " if line is not None else (f"{run_id}: " if run_id else "")
        super().__init__(where + message)


# ---------------------------------------------------------------------------
# static inventory
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Inventory:
    """What can execute: methods with bodies, their points and branches."""

    method_class: Mapping[str, str]  # method fq -> class fq
    point_method: Mapping[str, str]
    branch_method: Mapping[str, str]
    point_order: Mapping[str, int] = field(repr=False)


def inventory(model: DesignModel) -> Inventory:
    store = model.__dict__.setdefault("_design_cache", {})
    if "inventory" in store:
        return store["inventory"]
    method_class, point_method, branch_method, order = {}, {}, {}, {}
    for cfq, c in model.classes.items():
        for m in c.methods:
            if m.body is None:
                continue
            mfq = f"{cfq}.{m.name}"
            method_class[mfq] = cfq
            for pid in m.body.sequence_points:
                point_method[pid] = mfq
                order[pid] = len(order)
            for bid, _ in m.body.branches:
                branch_method[bid] = mfq
    inv = Inventory(method_class, point_method, branch_method, order)
    store["inventory"] = inv
    return inv


class Scope(NamedTuple):
    kind: str  # model | package | class | method
    id: str = ""

    def __str__(self):
        return self.id if self.kind != "model" else "model"

    def holds(self, method_fq: str, class_fq: str, pkg: str) -> bool:
        if self.kind == "model":
            return True
        if self.kind == "package":
            return pkg == self.id
        if self.kind == "class":
            return class_fq == self.id
        if self.kind == "method":
            return method_fq == self.id
        raise ValueError(f"unknown scope kind {self.kind!r}")


MODEL_SCOPE = Scope("model")


@dataclass(frozen=True)
class Executed:
    """Union of several traces, with set semantics."""

    methods: frozenset[str]
    points: frozenset[str]
    arms: frozenset[tuple[str, Arm]]


def merge_traces(model: DesignModel, traces: Iterable[CoverageTrace]) -> Executed:
    inv = inventory(model)
    methods, points, arms = set(), set(), set()
    for trace in traces:
        for ev in trace.events:
            if isinstance(ev, MethodEntry):
                if ev.method not in inv.method_class:
                    raise CoverageError(f"unknown method {ev.method}", trace.run_id, ev.line)
                methods.add(ev.method)
            elif isinstance(ev, Point):
                if ev.point not in inv.point_method:
                    raise CoverageError(f"unknown sequence point {ev.point}", trace.run_id, ev.line)
                points.add(ev.point)
            elif isinstance(ev, BranchArm):
                if ev.branch not in inv.branch_method:
                    raise CoverageError(f"unknown branch {ev.branch}", trace.run_id, ev.line)
                arms.add((ev.branch, ev.arm))
            else:
                raise TypeError(f"not a trace event: {ev!r}")
    return Executed(frozenset(methods), frozenset(points), frozenset(arms))


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------


def _ratio(executed: int, total: int, what: str) -> Ratio:
    if total == 0:
        return NotApplicable(f"no {what} in scope")
    return Fraction(executed, total)


@dataclass(frozen=True)
class CoverageResult:
    scope: Scope
    points_executed: int
    points_total: int
    methods_executed: int
    methods_total: int
    arms_executed: int
    arms_total: int
    uncovered_points: tuple[str, ...] = ()

    @property
    def symbol_coverage(self) -> Ratio:
        return _ratio(self.points_executed, self.points_total, "sequence points")

    @property
    def method_coverage(self) -> Ratio:
        return _ratio(self.methods_executed, self.methods_total, "methods")

    @property
    def branch_coverage(self) -> Ratio:
        return _ratio(self.arms_executed, self.arms_total, "branches")


def coverage(
    model: DesignModel,
    traces: Iterable[CoverageTrace],
    scope: Scope = MODEL_SCOPE,
) -> CoverageResult:
    """Symbol, method and branch coverage of ``scope`` over the union of ``traces``.

    A method counts as executed only through a MethodEntry event. Each branch
    has two arms, so the branch denominator is twice the branch count.
    """
    return coverage_of(model, merge_traces(model, traces), scope)


def coverage_of(model: DesignModel, executed: Executed, scope: Scope = MODEL_SCOPE) -> CoverageResult:
    inv = inventory(model)
    pkg_of = model.package_of
    if scope.kind == "package":
        model.package(scope.id)
    elif scope.kind == "class":
        model.cls(scope.id)
    elif scope.kind == "method" and scope.id not in inv.method_class:
        raise LookupError(f"unknown method {scope.id!r}")

    def inside(mfq: str) -> bool:
        cfq = inv.method_class[mfq]
        return scope.holds(mfq, cfq, pkg_of[cfq])

    methods = [m for m in inv.method_class if inside(m)]
    points = [p for p, m in inv.point_method.items() if inside(m)]
    branches = [b for b, m in inv.branch_method.items() if inside(m)]
    uncovered = tuple(sorted((p for p in points if p not in executed.points), key=inv.point_order.get))
    arms_hit = sum((b, arm) in executed.arms for b in branches for arm in Arm)
    return CoverageResult(
        scope,
        len(points) - len(uncovered),
        len(points),
        sum(m in executed.methods for m in methods),
        len(methods),
        arms_hit,
        2 * len(branches),
        uncovered,
    )


def entry_warnings(model: DesignModel, executed: Executed) -> list[str]:
    """Methods whose points ran although no entry event was recorded for them."""
    inv = inventory(model)
    hit = sorted({inv.point_method[p] for p in executed.points} - executed.methods)
    return [f"{m}: sequence points executed without a method entry event" for m in hit]


# ---------------------------------------------------------------------------
# checklist
# ---------------------------------------------------------------------------

CATEGORIES = ("testable", "supportable", "maintainable", "portable")


class Check(NamedTuple):
    id: str
    category: str
    derived: bool
    description: str


_REGISTRY = (
    Check("testable.logging", "testable", False, "code has a logging facility"),
    Check("testable.scriptable_interface", "testable", False, "code exposes scriptable interfaces"),
    Check("testable.runtime_monitoring", "testable", False, "code supports real-time monitoring"),
    Check("supportable.error_messages", "supportable", False, "failures explain themselves to users and staff"),
    Check("supportable.comment_density", "supportable", True, "comment lines / total lines >= threshold"),
    Check("maintainable.modularity", "maintainable", True, "no package holds more than a set share of the classes"),
    Check("maintainable.reviewability", "maintainable", False, "code is reviewable"),
    Check("maintainable.accessibility", "maintainable", False, "system information is accessible to maintainers"),
    Check("portable.platform_independent", "portable", False, "no platform-specific dependencies"),
    Check("portable.deploy_documented", "portable", False, "deployment on other platforms is documented"),
)
CHECKS: Mapping[str, Check] = {c.id: c for c in _REGISTRY}


class ChecklistError(LookupError):
    pass


@dataclass(frozen=True)
class CheckOutcome:
    id: str
    category: str
    source: str  # declared | derived
    value: bool


@dataclass(frozen=True)
class CategoryScore:
    passed: int
    total: int

    @property
    def score(self) -> Fraction:
        return Fraction(self.passed, self.total)


@dataclass(frozen=True)
class ChecklistResult:
    checks: tuple[CheckOutcome, ...]
    categories: Mapping[str, CategoryScore]


def comment_density(model: DesignModel) -> Optional[Fraction]:
    total = comment = 0
    for m in model.methods.values():
        if m.body is not None:
            total += m.body.loc_total
            comment += m.body.loc_comment
    return Fraction(comment, total) if total else None


def largest_package_share(model: DesignModel) -> Optional[Fraction]:
    n = len(model.classes)
    if n == 0:
        return None
    return Fraction(max(len(p.classes) for p in model.packages), n)


def checklist(
    model: DesignModel,
    facts: Mapping[str, bool],
    comment_threshold: Fraction = Fraction(1, 10),
    modularity_fraction: Fraction = Fraction(1, 2),
    registry: Iterable[Check] = _REGISTRY,
) -> ChecklistResult:
    """Score each category as passed / total checks.

    Declared checks come from ``facts``; ``supportable.comment_density`` and
    ``maintainable.modularity`` are computed from the model. An empty model
    passes both derived checks.
    """
    registry = tuple(registry)
    known = {c.id: c for c in registry}
    unknown = sorted(set(facts) - set(known))
    if unknown:
        raise ChecklistError(f"unknown check ids: {', '.join(unknown)}")
    derived_given = sorted(k for k in facts if known[k].derived)
    if derived_given:
        raise ChecklistError(f"derived checks cannot be declared: {', '.join(derived_given)}")
    missing = sorted(c.id for c in registry if not c.derived and c.id not in facts)
    if missing:
        raise ChecklistError(f"missing checklist facts: {', '.join(missing)}")

    density = comment_density(model)
    share = largest_package_share(model)
    derived = {
        "supportable.comment_density": density is None or density >= Fraction(comment_threshold),
        "maintainable.modularity": share is None or share <= Fraction(modularity_fraction),
    }
    outcomes = []
    for c in registry:
        if c.derived:
            outcomes.append(CheckOutcome(c.id, c.category, "derived", derived[c.id]))
        else:
            outcomes.append(CheckOutcome(c.id, c.category, "declared", bool(facts[c.id])))
    categories = {}
    for cat in CATEGORIES:
        mine = [o for o in outcomes if o.category == cat]
        if mine:
            categories[cat] = CategoryScore(sum(o.value for o in mine), len(mine))
    return ChecklistResult(tuple(outcomes), categories)
