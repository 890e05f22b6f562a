"""Requirement-phase metrics: use-case counts and requirement quality ratios."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .model import (
    ChangeReason,
    NotApplicable,
    Ratio,
    RequirementSet,
    UseCaseModel,
    Validity,
)


class UndefinedMetricError(ValueError):
    """The metric has no value for this input (empty denominator)."""


def nau(model: UseCaseModel, use_case: str) -> int:
    """Number of actors associated with the use case."""
    return len(model.get(use_case).associated_actors)


def nmu(model: UseCaseModel, use_case: str) -> int:
    # messages are a list: a message named twice is two messages
    return len(model.get(use_case).messages)


def nscu(model: UseCaseModel, use_case: str) -> int:
    return len(model.get(use_case).system_classes)


def identically_reviewed(req, reviewers) -> bool:
    """Every declared reviewer gave a verdict, and all verdicts agree."""
    verdicts = req.reviewer_verdicts
    if set(verdicts) != set(reviewers):
        return False
    return len(set(verdicts.values())) == 1


def qua(reqs: RequirementSet) -> Fraction:
    """Unambiguity: share of requirements all reviewers read the same way."""
    if len(reqs) == 0:
        raise UndefinedMetricError("unambiguity needs at least one requirement")
    if not reqs.reviewers:
        raise UndefinedMetricError("unambiguity needs at least one reviewer")
    agreed = sum(identically_reviewed(r, reqs.reviewers) for r in reqs.requirements)
    return Fraction(agreed, len(reqs))


def validity_counts(reqs: RequirementSet) -> tuple[int, int]:
    valid = sum(r.validity is Validity.VALID for r in reqs.requirements)
    return valid, len(reqs) - valid


def qc(reqs: RequirementSet) -> Ratio:
    """Correctness ``Nv / (Nnv * N)``.

    With no invalid requirement the formula divides by zero; the result is then
    NotApplicable with ``Nv / N`` as fallback.
    """
    n = len(reqs)
    if n == 0:
        raise UndefinedMetricError("correctness needs at least one requirement")
    valid, not_valid = validity_counts(reqs)
    if not_valid == 0:
        return NotApplicable("no requirement is still invalid", Fraction(valid, n))
    return Fraction(valid, not_valid * n)


def completeness(reqs: RequirementSet, entity: str) -> Fraction:
    try:
        checklist = reqs.entity_checklists[entity]
    except KeyError:
        raise LookupError(f"no service checklist for entity {entity!r}") from None
    required = checklist.required_services
    return Fraction(len(required & checklist.provided_services), len(required))


def volatility(reqs: RequirementSet) -> tuple[int, Ratio]:
    """Changes made for any reason other than a business change, and their rate per requirement."""
    count = sum(
        reason is not ChangeReason.BUSINESS
        for r in reqs.requirements
        for _, reason in r.changes
    )
    if len(reqs) == 0:
        return count, NotApplicable("no requirements")
    return count, Fraction(count, len(reqs))


@dataclass(frozen=True)
class UseCaseCounts:
    nau: int
    nmu: int
    nscu: int


@dataclass(frozen=True)
class RequirementMetrics:
    use_cases: Mapping[str, UseCaseCounts]
    qua: Ratio
    qc: Ratio
    completeness: Mapping[str, Fraction]
    volatility_count: int
    volatility_ratio: Ratio


def requirement_metrics(
    reqs: RequirementSet, use_cases: Optional[UseCaseModel] = None
) -> RequirementMetrics:
    """Everything at once; undefined set-level ratios come back as NotApplicable."""
    counts = {}
    if use_cases is not None:
        for uc in use_cases.use_cases:
            counts[uc.name] = UseCaseCounts(
                nau(use_cases, uc.name), nmu(use_cases, uc.name), nscu(use_cases, uc.name)
            )
    try:
        unambiguity: Ratio = qua(reqs)
    except UndefinedMetricError as exc:
        unambiguity = NotApplicable(str(exc))
    try:
        correctness = qc(reqs)
    except UndefinedMetricError as exc:
        correctness = NotApplicable(str(exc))
    count, ratio = volatility(reqs)
    return RequirementMetrics(
        counts,
        unambiguity,
        correctness,
        {e: completeness(reqs, e) for e in sorted(reqs.entity_checklists)},
        count,
        ratio,
    )
