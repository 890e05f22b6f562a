"""Readers (and writers) for the line-oriented input formats.

========  ===============================================================
``.req``  ``reviewer <id>``, ``req <id> "<text>" <valid|notyetvalid>``,
          ``verdict <req> <reviewer> "<label>"``,
          ``change <req> <seq> <reason>``,
          ``entity <name> requires|provides <svc>[,<svc>...]``
``.ucm``  ``actor``, ``usecase``, ``uses <uc> <actor>``,
          ``message <uc> <name>``, ``class <uc> <class>``
``.trc``  ``M <pkg.Class.method>``, ``S <point>``,
          ``B <branch> <taken|not_taken>``
``.chk``  ``<check-id> = <true|false>``
========  ===============================================================

Blank lines and ``#`` comment lines are skipped in every format.
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Union

from .model import (
    Arm,
    BranchArm,
    ChangeReason,
    CoverageTrace,
    DesignModel,
    EntityChecklist,
    MethodEntry,
    Point,
    Requirement,
    RequirementSet,
    UseCase,
    UseCaseModel,
    Validity,
)

PathLike = Union[str, Path]


class IngestError(Exception):
    """A problem in an input file, always tied to a 1-based line."""

    def __init__(self, path, line: int, message: str, kind: str = "format"):
        assert kind in ("format", "reference", "duplicate")
        self.path = str(path)
        self.line = line
        self.message = message
        self.kind = kind
        super().__init__(f"{self.path}:{line}: {kind} error: {message}")


def _lines(path: PathLike) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, shell-style words) for each meaningful line."""
    text = Path(path).read_text(encoding="utf-8")
    for n, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            words = shlex.split(stripped, comments=False, posix=True)
        except ValueError as exc:
            raise IngestError(path, n, f"cannot split line: {exc}") from None
        yield n, words


def _services(path, n, spec: str) -> frozenset[str]:
    svcs = [s.strip() for s in spec.split(",")]
    if not all(svcs):
        raise IngestError(path, n, f"empty service name in {spec!r}")
    return frozenset(svcs)


# ---------------------------------------------------------------------------
# requirements
# ---------------------------------------------------------------------------


@dataclass
class _ReqDraft:
    line: int
    text: str
    validity: Validity
    verdicts: dict
    changes: list


def read_requirements(path: PathLike) -> RequirementSet:
    reviewers: dict[str, int] = {}
    drafts: dict[str, _ReqDraft] = {}
    verdict_lines = []
    change_lines = []
    requires: dict[str, tuple[int, frozenset]] = {}
    provides: dict[str, tuple[int, frozenset]] = {}

    for n, words in _lines(path):
        key, args = words[0], words[1:]
        if key == "reviewer" and len(args) == 1:
            if args[0] in reviewers:
                raise IngestError(path, n, f"reviewer {args[0]} declared twice", "duplicate")
            reviewers[args[0]] = n
        elif key == "req" and len(args) == 3:
            rid, text, validity = args
            if rid in drafts:
                raise IngestError(
                    path, n, f"requirement {rid} already declared on line {drafts[rid].line}",
                    "duplicate",
                )
            try:
                v = Validity(validity)
            except ValueError:
                raise IngestError(path, n, f"validity must be valid|notyetvalid, got {validity!r}") from None
            drafts[rid] = _ReqDraft(n, text, v, {}, [])
        elif key == "verdict" and len(args) == 3:
            verdict_lines.append((n, *args))
        elif key == "change" and len(args) == 3:
            change_lines.append((n, *args))
        elif key == "entity" and len(args) == 3 and args[1] in ("requires", "provides"):
            name, mode, spec = args
            table = requires if mode == "requires" else provides
            if name in table:
                raise IngestError(path, n, f"entity {name} {mode} listed twice", "duplicate")
            table[name] = (n, _services(path, n, spec))
        else:
            raise IngestError(path, n, f"malformed line: {' '.join(words)}")

    # second pass so verdicts and changes may precede their requirement
    for n, rid, reviewer, label in verdict_lines:
        if rid not in drafts:
            raise IngestError(path, n, f"verdict for undeclared requirement {rid}", "reference")
        if reviewer not in reviewers:
            raise IngestError(path, n, f"verdict from undeclared reviewer {reviewer}", "reference")
        if reviewer in drafts[rid].verdicts:
            raise IngestError(path, n, f"second verdict from {reviewer} on {rid}", "duplicate")
        drafts[rid].verdicts[reviewer] = label
    for n, rid, seq, reason in change_lines:
        if rid not in drafts:
            raise IngestError(path, n, f"change for undeclared requirement {rid}", "reference")
        try:
            seq_no = int(seq)
            why = ChangeReason(reason)
        except ValueError:
            raise IngestError(path, n, f"bad change entry {seq} {reason}") from None
        prior = drafts[rid].changes
        if prior and seq_no <= prior[-1][0]:
            raise IngestError(
                path, n, f"change sequence {seq_no} for {rid} does not exceed {prior[-1][0]}"
            )
        prior.append((seq_no, why))

    for name, (n, _) in provides.items():
        if name not in requires:
            raise IngestError(path, n, f"entity {name} provides services but requires none", "reference")
    checklists = {
        name: EntityChecklist(svcs, provides.get(name, (0, frozenset()))[1])
        for name, (_, svcs) in requires.items()
    }
    reqs = [
        Requirement(rid, d.text, d.validity, d.verdicts, tuple(d.changes))
        for rid, d in drafts.items()
    ]
    return RequirementSet(tuple(reqs), frozenset(reviewers), checklists)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_requirements(reqs: RequirementSet) -> str:
    out = [f"reviewer {r}" for r in sorted(reqs.reviewers)]
    for r in reqs.requirements:
        out.append(f"req {r.id} {_quote(r.text)} {r.validity.value}")
        for reviewer, label in sorted(r.reviewer_verdicts.items()):
            out.append(f"verdict {r.id} {reviewer} {_quote(label)}")
        for seq, reason in r.changes:
            out.append(f"change {r.id} {seq} {reason.value}")
    for name, cl in sorted(reqs.entity_checklists.items()):
        out.append(f"entity {name} requires {','.join(sorted(cl.required_services))}")
        if cl.provided_services:
            out.append(f"entity {name} provides {','.join(sorted(cl.provided_services))}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# use cases
# ---------------------------------------------------------------------------


def read_usecases(path: PathLike) -> UseCaseModel:
    actors: dict[str, int] = {}
    cases: dict[str, dict] = {}
    links = []
    for n, words in _lines(path):
        key, args = words[0], words[1:]
        if key == "actor" and len(args) == 1:
            if args[0] in actors:
                raise IngestError(path, n, f"actor {args[0]} declared twice", "duplicate")
            actors[args[0]] = n
        elif key == "usecase" and len(args) == 1:
            if args[0] in cases:
                raise IngestError(path, n, f"use case {args[0]} declared twice", "duplicate")
            cases[args[0]] = {"actors": set(), "messages": [], "classes": set()}
        elif key in ("uses", "message", "class") and len(args) == 2:
            links.append((n, key, *args))
        else:
            raise IngestError(path, n, f"malformed line: {' '.join(words)}")
    for n, key, uc, name in links:
        if uc not in cases:
            raise IngestError(path, n, f"undeclared use case {uc}", "reference")
        if key == "uses":
            if name not in actors:
                raise IngestError(path, n, f"undeclared actor {name}", "reference")
            cases[uc]["actors"].add(name)
        elif key == "message":
            cases[uc]["messages"].append(name)
        else:
            cases[uc]["classes"].add(name)
    return UseCaseModel(
        frozenset(actors),
        tuple(
            UseCase(name, c["actors"], tuple(c["messages"]), c["classes"])
            for name, c in cases.items()
        ),
    )


def write_usecases(model: UseCaseModel) -> str:
    out = [f"actor {a}" for a in sorted(model.actors)]
    for uc in model.use_cases:
        out.append(f"usecase {uc.name}")
        out.extend(f"uses {uc.name} {a}" for a in sorted(uc.associated_actors))
        out.extend(f"message {uc.name} {m}" for m in uc.messages)
        out.extend(f"class {uc.name} {c}" for c in sorted(uc.system_classes))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


def read_trace(path: PathLike, run_id: str | None = None) -> CoverageTrace:
    events = []
    for n, words in _lines(path):
        key, args = words[0], words[1:]
        if key == "M" and len(args) == 1:
            events.append(MethodEntry(args[0], line=n))
        elif key == "S" and len(args) == 1:
            events.append(Point(args[0], line=n))
        elif key == "B" and len(args) == 2:
            try:
                arm = Arm(args[1])
            except ValueError:
                raise IngestError(path, n, f"branch arm must be taken|not_taken, got {args[1]!r}") from None
            events.append(BranchArm(args[0], arm, line=n))
        else:
            raise IngestError(path, n, f"malformed trace event: {' '.join(words)}")
    return CoverageTrace(run_id or Path(path).stem, tuple(events))


# ---------------------------------------------------------------------------
# checklist facts
# ---------------------------------------------------------------------------


def read_checklist_facts(path: PathLike) -> dict[str, bool]:
    from .coverage import CHECKS

    facts: dict[str, bool] = {}
    seen_at: dict[str, int] = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or value not in ("true", "false"):
            raise IngestError(path, n, f"expected '<check-id> = true|false', got {line!r}")
        if key in seen_at:
            raise IngestError(path, n, f"{key} already set on line {seen_at[key]}", "duplicate")
        check = CHECKS.get(key)
        if check is None:
            raise IngestError(path, n, f"unknown check id {key}", "reference")
        if check.derived:
            raise IngestError(path, n, f"{key} is computed from the model and cannot be declared", "reference")
        seen_at[key] = n
        facts[key] = value == "true"
    return facts


# ---------------------------------------------------------------------------
# symbol listing
# ---------------------------------------------------------------------------


def write_symbols(model: DesignModel) -> str:
    """One line per method / point / branch: ``kind id method path:line:col``."""
    rows = [
        f"{s.kind} {s.id} {s.method} {s.path}:{s.line}:{s.column}" for s in model.symbols
    ]
    return "\n".join(rows) + ("\n" if rows else "")
