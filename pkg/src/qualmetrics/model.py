"""Immutable domain types shared by the analysis modules.

Everything here is a frozen dataclass built from tuples, frozensets and
read-only mappings, so two values with equal contents compare equal and give
identical analysis results.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Mapping, Optional, Union


def _frozen_map(mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class NotApplicable:
    """Marker for a metric whose denominator is empty.

    ``fallback`` carries the value a gate may still want to look at (for
    example ``Nv/N`` when no requirement is invalid).
    """

    reason: str
    fallback: Optional[Fraction] = None


Ratio = Union[Fraction, NotApplicable]


# --------------------------------------------------------------------------
# requirements
# --------------------------------------------------------------------------


class Validity(str, enum.Enum):
    VALID = "valid"
    NOT_YET_VALID = "notyetvalid"


class ChangeReason(str, enum.Enum):
    BUSINESS = "business"
    CLARIFICATION = "clarification"
    ERROR = "error"
    SCOPE = "scope"
    OTHER = "other"


@dataclass(frozen=True)
class Requirement:
    id: str
    text: str = ""
    validity: Validity = Validity.VALID
    reviewer_verdicts: Mapping[str, str] = field(default_factory=dict)
    changes: tuple[tuple[int, ChangeReason], ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("requirement id must be non-empty")
        object.__setattr__(self, "validity", Validity(self.validity))
        object.__setattr__(self, "reviewer_verdicts", _frozen_map(self.reviewer_verdicts))
        changes = tuple((int(seq), ChangeReason(reason)) for seq, reason in self.changes)
        for (prev, _), (cur, _) in zip(changes, changes[1:]):
            if cur <= prev:
                raise ValueError(
                    f"requirement {self.id}: change sequence {cur} does not follow {prev}"
                )
        object.__setattr__(self, "changes", changes)


@dataclass(frozen=True)
class EntityChecklist:
    required_services: frozenset[str]
    provided_services: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "required_services", frozenset(self.required_services))
        object.__setattr__(self, "provided_services", frozenset(self.provided_services))
        if not self.required_services:
            raise ValueError("an entity checklist needs at least one required service")


@dataclass(frozen=True)
class RequirementSet:
    requirements: tuple[Requirement, ...] = ()
    reviewers: frozenset[str] = frozenset()
    entity_checklists: Mapping[str, EntityChecklist] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "requirements", tuple(self.requirements))
        object.__setattr__(self, "reviewers", frozenset(self.reviewers))
        object.__setattr__(self, "entity_checklists", _frozen_map(self.entity_checklists))
        seen = set()
        for req in self.requirements:
            if req.id in seen:
                raise ValueError(f"duplicate requirement id {req.id}")
            seen.add(req.id)
            unknown = set(req.reviewer_verdicts) - self.reviewers
            if unknown:
                raise ValueError(
                    f"requirement {req.id}: verdict from undeclared reviewer(s) {sorted(unknown)}"
                )

    def __len__(self):
        return len(self.requirements)


# --------------------------------------------------------------------------
# use cases
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UseCase:
    name: str
    associated_actors: frozenset[str] = frozenset()
    messages: tuple[str, ...] = ()
    system_classes: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "associated_actors", frozenset(self.associated_actors))
        object.__setattr__(self, "messages", tuple(self.messages))
        object.__setattr__(self, "system_classes", frozenset(self.system_classes))


@dataclass(frozen=True)
class UseCaseModel:
    actors: frozenset[str] = frozenset()
    use_cases: tuple[UseCase, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "actors", frozenset(self.actors))
        object.__setattr__(self, "use_cases", tuple(self.use_cases))
        names = set()
        for uc in self.use_cases:
            if uc.name in names:
                raise ValueError(f"duplicate use case {uc.name}")
            names.add(uc.name)
            stray = uc.associated_actors - self.actors
            if stray:
                raise ValueError(f"use case {uc.name}: undeclared actor(s) {sorted(stray)}")

    def get(self, name: str) -> UseCase:
        for uc in self.use_cases:
            if uc.name == name:
                return uc
        raise LookupError(f"unknown use case {name!r}")


# --------------------------------------------------------------------------
# design model
# --------------------------------------------------------------------------


class ClassKind(str, enum.Enum):
    CONCRETE = "concrete"
    ABSTRACT = "abstract"
    INTERFACE = "interface"


@dataclass(frozen=True)
class MethodFacts:
    """What a method body does, as far as the metrics care.

    Class references are fully qualified (``pkg.Class``).
    """

    calls: tuple[tuple[str, str], ...] = ()
    attribute_accesses: frozenset[tuple[str, str]] = frozenset()
    decision_points: int = 0
    sequence_points: tuple[str, ...] = ()
    branches: tuple[tuple[str, int], ...] = ()
    loc_total: int = 0
    loc_blank: int = 0
    loc_comment: int = 0

    def __post_init__(self):
        object.__setattr__(self, "calls", tuple(tuple(c) for c in self.calls))
        object.__setattr__(
            self, "attribute_accesses", frozenset(tuple(a) for a in self.attribute_accesses)
        )
        object.__setattr__(self, "sequence_points", tuple(self.sequence_points))
        object.__setattr__(self, "branches", tuple(tuple(b) for b in self.branches))


@dataclass(frozen=True)
class Method:
    name: str
    params: tuple[str, ...] = ()
    # None for interface signatures, which have no body
    body: Optional[MethodFacts] = field(default_factory=MethodFacts)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))


@dataclass(frozen=True)
class Class:
    name: str
    kind: ClassKind = ClassKind.CONCRETE
    extends: Optional[str] = None
    implements: frozenset[str] = frozenset()
    attributes: frozenset[str] = frozenset()
    methods: tuple[Method, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassKind(self.kind))
        object.__setattr__(self, "implements", frozenset(self.implements))
        object.__setattr__(self, "attributes", frozenset(self.attributes))
        object.__setattr__(self, "methods", tuple(self.methods))

    @property
    def is_abstract_entity(self) -> bool:
        return self.kind is not ClassKind.CONCRETE


@dataclass(frozen=True)
class Package:
    name: str
    classes: tuple[Class, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))


@dataclass(frozen=True)
class Symbol:
    """Source position of a method, sequence point or branch."""

    kind: str  # method | point | branch
    id: str
    method: str
    path: str
    line: int
    column: int


@dataclass(frozen=True)
class DesignModel:
    packages: tuple[Package, ...] = ()
    symbols: tuple[Symbol, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "packages", tuple(self.packages))
        object.__setattr__(self, "symbols", tuple(self.symbols))

    @cached_property
    def classes(self) -> dict[str, Class]:
        """Fully qualified class name -> class, in model order."""
        return {f"{p.name}.{c.name}": c for p in self.packages for c in p.classes}

    @cached_property
    def package_of(self) -> dict[str, str]:
        return {f"{p.name}.{c.name}": p.name for p in self.packages for c in p.classes}

    @cached_property
    def methods(self) -> dict[str, Method]:
        """Fully qualified method name -> method."""
        return {f"{fq}.{m.name}": m for fq, c in self.classes.items() for m in c.methods}

    def package(self, name: str) -> Package:
        for p in self.packages:
            if p.name == name:
                return p
        raise LookupError(f"unknown package {name!r}")

    def cls(self, fq_name: str) -> Class:
        try:
            return self.classes[fq_name]
        except KeyError:
            raise LookupError(f"unknown class {fq_name!r}") from None


# --------------------------------------------------------------------------
# coverage traces
# --------------------------------------------------------------------------


class Arm(str, enum.Enum):
    TAKEN = "taken"
    NOT_TAKEN = "not_taken"


@dataclass(frozen=True)
class MethodEntry:
    method: str
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Point:
    point: str
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class BranchArm:
    branch: str
    arm: Arm
    line: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "arm", Arm(self.arm))


Event = Union[MethodEntry, Point, BranchArm]


@dataclass(frozen=True)
class CoverageTrace:
    run_id: str
    events: tuple[Event, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


def validate_model(model: DesignModel) -> list[str]:
    """Return every broken DesignModel invariant, sorted by element name.

    An empty list means the model is well-formed.
    """
    problems: list[tuple[str, str]] = []
    seen_simple: dict[str, str] = {}
    for pkg in model.packages:
        for c in pkg.classes:
            fq = f"{pkg.name}.{c.name}"
            if c.name in seen_simple:
                problems.append((fq, f"duplicate class name {c.name} ({seen_simple[c.name]}, {fq})"))
            else:
                seen_simple[c.name] = fq

    classes = model.classes
    for fq, c in classes.items():
        if c.extends is not None:
            target = classes.get(c.extends)
            if target is None:
                problems.append((fq, f"{fq} extends unknown class {c.extends}"))
            elif target.kind is ClassKind.INTERFACE:
                problems.append((fq, f"kind mismatch: {fq} extends interface {c.extends}"))
            if c.kind is ClassKind.INTERFACE:
                problems.append((fq, f"kind mismatch: interface {fq} uses extends"))
        for iface in sorted(c.implements):
            target = classes.get(iface)
            if target is None:
                problems.append((fq, f"{fq} implements unknown interface {iface}"))
            elif target.kind is not ClassKind.INTERFACE:
                problems.append(
                    (fq, f"kind mismatch: {fq} implements {iface} of kind {target.kind.value}")
                )

    # extends cycles: walk each chain, report each cycle once by its smallest member
    reported = set()
    for fq in classes:
        path = []
        cur = fq
        while cur is not None and cur in classes and cur not in path:
            path.append(cur)
            cur = classes[cur].extends
        if cur is not None and cur in path:
            cycle = path[path.index(cur):]
            key = min(cycle)
            if key not in reported:
                reported.add(key)
                problems.append((key, f"inheritance cycle: {' -> '.join(cycle + [cur])}"))

    points: dict[str, str] = {}
    branches: dict[str, str] = {}
    for mfq, m in model.methods.items():
        facts = m.body
        if facts is None:
            continue
        for pid in facts.sequence_points:
            if pid in points:
                problems.append((pid, f"sequence point {pid} in both {points[pid]} and {mfq}"))
            points.setdefault(pid, mfq)
        for bid, arms in facts.branches:
            if bid in branches:
                problems.append((bid, f"branch {bid} in both {branches[bid]} and {mfq}"))
            branches.setdefault(bid, mfq)
            if arms != 2:
                problems.append((bid, f"branch {bid} in {mfq} has {arms} arms, expected 2"))
        counts = (facts.loc_total, facts.loc_blank, facts.loc_comment, facts.decision_points)
        if min(counts) < 0:
            problems.append((mfq, f"{mfq} has a negative line or decision count"))
        if facts.loc_blank + facts.loc_comment > facts.loc_total:
            problems.append((mfq, f"{mfq}: blank + comment lines exceed total lines"))

    problems.sort()
    return [msg for _, msg in problems]
