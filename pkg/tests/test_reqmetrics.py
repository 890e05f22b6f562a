from fractions import Fraction

import pytest
from hypothesis import given, settings

from qualmetrics.ingest import read_requirements, read_usecases
from qualmetrics.model import (
    ChangeReason,
    EntityChecklist,
    NotApplicable,
    Requirement,
    RequirementSet,
    UseCase,
    UseCaseModel,
    Validity,
)
from qualmetrics.reqmetrics import (
    UndefinedMetricError,
    completeness,
    identically_reviewed,
    nau,
    nmu,
    nscu,
    qc,
    qua,
    requirement_metrics,
    volatility,
)

from strategies import requirement_sets

V, NV = Validity.VALID, Validity.NOT_YET_VALID


def _set(verdicts, reviewers=("a", "b"), validity=None):
    reqs = tuple(
        Requirement(f"R{i + 1}", "", (validity or {}).get(i, V), v) for i, v in enumerate(verdicts)
    )
    return RequirementSet(reqs, frozenset(reviewers))


def _validity_set(n, nv):
    return RequirementSet(tuple(Requirement(f"R{i}", "", V if i < nv else NV) for i in range(n)))


# -- use-case counts ------------------------------------------------------------


def test_use_case_counts():
    model = UseCaseModel(
        frozenset({"customer", "clerk"}),
        (
            UseCase("U", {"customer", "clerk"}, tuple(f"m{i}" for i in range(5)), {"Order", "Inventory", "Billing"}),
            UseCase("E"),
        ),
    )
    assert (nau(model, "U"), nmu(model, "U"), nscu(model, "U")) == (2, 5, 3)
    assert (nau(model, "E"), nmu(model, "E"), nscu(model, "E")) == (0, 0, 0)
    with pytest.raises(LookupError):
        nau(model, "missing")


def test_fixture_use_cases(f1_dir):
    # hand enumeration of shop.ucm: Audit lists one message twice and one class twice
    model = read_usecases(f1_dir / "shop.ucm")
    got = {uc.name: (nau(model, uc.name), nmu(model, uc.name), nscu(model, uc.name)) for uc in model.use_cases}
    assert got == {"Checkout": (1, 3, 3), "Cancel": (2, 2, 2), "Audit": (2, 2, 1)}
    raw_messages = [
        line for line in (f1_dir / "shop.ucm").read_text().splitlines() if line.startswith("message Audit ")
    ]
    assert nmu(model, "Audit") == len(raw_messages)


# -- unambiguity ---------------------------------------------------------------


def test_qua_three_of_four():
    s = _set([{"a": "x", "b": "x"}, {"a": "y", "b": "y"}, {"a": "z", "b": "z"}, {"a": "x", "b": "y"}])
    assert qua(s) == Fraction(3, 4)


def test_qua_all_agree():
    assert qua(_set([{"a": "x", "b": "x"}] * 3)) == 1


def test_qua_missing_verdict_and_disagreement():
    s = _set([
        {"a": "x", "b": "x"},
        {"a": "x"},
        {"a": "q", "b": "q"},
        {"a": "x", "b": "w"},
        {"a": "k", "b": "k"},
    ])
    # oracle: enumerate each verdict map
    agreed = [
        r.id for r in s.requirements
        if set(r.reviewer_verdicts) == {"a", "b"} and len(set(r.reviewer_verdicts.values())) == 1
    ]
    assert agreed == ["R1", "R3", "R5"]
    assert qua(s) == Fraction(3, 5)


def test_qua_undefined():
    with pytest.raises(UndefinedMetricError):
        qua(RequirementSet((), frozenset({"a"})))
    with pytest.raises(UndefinedMetricError):
        qua(RequirementSet((Requirement("R1"),)))


# -- correctness ---------------------------------------------------------------


@pytest.mark.parametrize("n, nv, expected", [(10, 8, Fraction(2, 5)), (3, 1, Fraction(1, 6))])
def test_qc_formula(n, nv, expected):
    assert qc(_validity_set(n, nv)) == expected


def test_qc_guard():
    result = qc(_validity_set(10, 10))
    assert isinstance(result, NotApplicable)
    assert result.fallback == 1
    with pytest.raises(UndefinedMetricError):
        qc(RequirementSet(()))


# -- completeness and volatility ------------------------------------------------


def test_list_completeness(f1_dir):
    reqs = read_requirements(f1_dir / "shop.req")
    assert completeness(reqs, "List") == Fraction(1, 2)


@pytest.mark.parametrize(
    "provided, expected",
    [({"add", "delete"}, Fraction(1, 2)), ({"add", "delete", "find", "size"}, 1), ({"add", "delete", "find", "size", "x"}, 1)],
)
def test_completeness(provided, expected):
    reqs = RequirementSet((), entity_checklists={"List": EntityChecklist({"add", "delete", "find", "size"}, provided)})
    assert completeness(reqs, "List") == expected
    with pytest.raises(LookupError):
        completeness(reqs, "Map")


def _changes(*reasons):
    return tuple((i + 1, ChangeReason(r)) for i, r in enumerate(reasons))


def test_volatility():
    reqs = RequirementSet((
        Requirement("R1", changes=_changes("business", "error")),
        Requirement("R2", changes=_changes("clarification")),
        Requirement("R3"),
    ))
    assert volatility(reqs) == (2, Fraction(2, 3))
    assert volatility(RequirementSet((Requirement("R1"),))) == (0, 0)
    all_business = RequirementSet((Requirement("R1", changes=_changes(*["business"] * 5)),))
    assert volatility(all_business) == (0, 0)
    count, ratio = volatility(RequirementSet(()))
    assert count == 0 and isinstance(ratio, NotApplicable)


def test_fixture_metrics(f1_dir):
    m = requirement_metrics(read_requirements(f1_dir / "shop.req"), read_usecases(f1_dir / "shop.ucm"))
    assert m.qua == Fraction(1, 2)
    assert m.qc == Fraction(3, 4)
    assert (m.volatility_count, m.volatility_ratio) == (2, Fraction(1, 2))
    assert m.completeness == {"List": Fraction(1, 2)}
    assert m.use_cases["Audit"].nscu == 1


# -- properties ----------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(requirement_sets)
def test_ranges(reqs):
    q = qua(reqs)
    assert 0 <= q <= 1
    assert (q == 1) == all(identically_reviewed(r, reqs.reviewers) for r in reqs.requirements)
    c = qc(reqs)
    if not isinstance(c, NotApplicable):
        assert 0 <= c <= 1
    for e in reqs.entity_checklists:
        assert 0 <= completeness(reqs, e) <= 1
    assert requirement_metrics(reqs) == requirement_metrics(reqs)


@settings(max_examples=100, deadline=None)
@given(requirement_sets)
def test_adding_agreed_requirement(reqs):
    old = qua(reqs)
    n = len(reqs)
    extra = Requirement("NEW", "", V, {r: "same" for r in reqs.reviewers})
    grown = RequirementSet(reqs.requirements + (extra,), reqs.reviewers, reqs.entity_checklists)
    assert qua(grown) == (old * n + 1) / (n + 1)
    assert qua(grown) >= old


@settings(max_examples=100, deadline=None)
@given(requirement_sets)
def test_completeness_monotone(reqs):
    for e, cl in reqs.entity_checklists.items():
        for svc in ("add", "delete", "find", "size", "clear", "extra"):
            more = dict(reqs.entity_checklists)
            more[e] = EntityChecklist(cl.required_services, cl.provided_services | {svc})
            bigger = RequirementSet(reqs.requirements, reqs.reviewers, more)
            assert completeness(bigger, e) >= completeness(reqs, e)
