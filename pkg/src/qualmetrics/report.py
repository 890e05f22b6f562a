"""Metric aggregation, threshold gates and report rendering."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from . import design
from .coverage import MODEL_SCOPE, ChecklistResult, Executed, Scope, coverage_of
from .model import DesignModel, NotApplicable
from .reqmetrics import RequirementMetrics

SECTIONS = ("requirements", "design", "coverage", "checklist")
SECTION_TITLES = {
    "requirements": "Requirement metrics",
    "design": "Design metrics",
    "coverage": "Coverage metrics",
    "checklist": "Checklist metrics",
}

Value = Union[int, Fraction, bool, tuple, None]


@dataclass(frozen=True)
class MetricValue:
    name: str
    scope: str
    value: Value
    status: str = "ok"  # ok | violation | not_applicable
    fallback: Optional[Fraction] = None


@dataclass(frozen=True)
class Violation:
    metric: str
    scope: str
    observed: Value
    threshold: Value


@dataclass(frozen=True)
class MetricsReport:
    sections: Mapping[str, tuple[MetricValue, ...]]
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def rows(self) -> list[MetricValue]:
        return [mv for name in SECTIONS for mv in self.sections.get(name, ())]


def metric(name: str, scope: str, value) -> MetricValue:
    """Wrap a raw metric result, turning NotApplicable into a valueless row."""
    if isinstance(value, NotApplicable):
        return MetricValue(name, scope, None, "not_applicable", value.fallback)
    return MetricValue(name, scope, value)


# ---------------------------------------------------------------------------
# section builders
# ---------------------------------------------------------------------------


def requirement_section(rm: RequirementMetrics) -> list[MetricValue]:
    rows = []
    for uc, counts in rm.use_cases.items():
        rows += [
            metric("nau", uc, counts.nau),
            metric("nmu", uc, counts.nmu),
            metric("nscu", uc, counts.nscu),
        ]
    rows.append(metric("qua", "requirements", rm.qua))
    rows.append(metric("qc", "requirements", rm.qc))
    for entity, value in rm.completeness.items():
        rows.append(metric("completeness", entity, value))
    rows.append(metric("volatility_count", "requirements", rm.volatility_count))
    rows.append(metric("volatility_ratio", "requirements", rm.volatility_ratio))
    return rows


def design_section(
    model: DesignModel, weighting: str = "cyclomatic", include_fan_in: bool = False
) -> list[MetricValue]:
    rows = [metric(f"count.{k}", "model", v) for k, v in design.model_counts(model).items()]
    for fq in sorted(model.classes):
        rows += [
            metric("wmc", fq, design.wmc(model, fq, weighting)),
            metric("wmc.cyclomatic", fq, design.wmc(model, fq, "cyclomatic")),
            metric("wmc.unit", fq, design.wmc(model, fq, "unit")),
            metric("rfc", fq, design.rfc(model, fq)),
            metric("noc", fq, design.noc(model, fq)),
            metric("dit", fq, design.dit(model, fq)),
            metric("cbo", fq, design.cbo(model, fq, include_fan_in)),
            metric("lcom", fq, design.lcom(model, fq)),
        ]
        rows += [metric(f"loc.{mode}", fq, design.loc(model, "class", fq, mode)) for mode in design.LOC_MODES]
    for pkg in model.packages:
        pm = design.package_metrics(model, pkg.name)
        rows += [
            metric("ce", pkg.name, pm.ce),
            metric("ca", pkg.name, pm.ca),
            metric("instability", pkg.name, pm.instability),
            metric("abstractness", pkg.name, pm.abstractness),
            metric("dip", pkg.name, pm.dip),
            metric("ep_percent", pkg.name, pm.ep_percent),
        ]
        rows += [
            metric(f"loc.{mode}", pkg.name, design.loc(model, "package", pkg.name, mode))
            for mode in design.LOC_MODES
        ]
    _, cycles = design.adp(model)
    rows.append(metric("adp", "model", tuple(tuple(c) for c in cycles)))
    return rows


def coverage_section(model: DesignModel, executed: Executed) -> list[MetricValue]:
    scopes = [MODEL_SCOPE]
    scopes += [Scope("package", p.name) for p in model.packages]
    scopes += [Scope("class", fq) for fq in sorted(model.classes)]
    rows = []
    for scope in scopes:
        res = coverage_of(model, executed, scope)
        rows += [
            metric("symbol_coverage", str(scope), res.symbol_coverage),
            metric("method_coverage", str(scope), res.method_coverage),
            metric("branch_coverage", str(scope), res.branch_coverage),
        ]
        if scope == MODEL_SCOPE:
            rows.append(metric("uncovered_points", "model", res.uncovered_points))
    return rows


def checklist_section(result: ChecklistResult) -> list[MetricValue]:
    rows = [metric("check", o.id, o.value) for o in result.checks]
    rows += [metric("checklist_score", cat, s.score) for cat, s in result.categories.items()]
    return rows


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


class ConfigError(ValueError):
    pass


UNIT = (Fraction(0), Fraction(1))
NON_NEGATIVE = (Fraction(0), None)
PERCENT = (Fraction(0), Fraction(100))

# config field -> (metric name, "min" | "max", allowed range)
GATES = {
    "min_qua": ("qua", "min", UNIT),
    "min_qc": ("qc", "min", UNIT),
    "min_completeness": ("completeness", "min", UNIT),
    "max_volatility_ratio": ("volatility_ratio", "max", NON_NEGATIVE),
    "max_wmc": ("wmc", "max", NON_NEGATIVE),
    "max_rfc": ("rfc", "max", NON_NEGATIVE),
    "max_dit": ("dit", "max", NON_NEGATIVE),
    "max_cbo": ("cbo", "max", NON_NEGATIVE),
    "max_lcom": ("lcom", "max", NON_NEGATIVE),
    "max_instability": ("instability", "max", UNIT),
    "min_abstractness": ("abstractness", "min", UNIT),
    "min_dip": ("dip", "min", UNIT),
    "min_ep_percent": ("ep_percent", "min", PERCENT),
    "min_symbol_coverage": ("symbol_coverage", "min", UNIT),
    "min_method_coverage": ("method_coverage", "min", UNIT),
    "min_branch_coverage": ("branch_coverage", "min", UNIT),
    "min_checklist_score": ("checklist_score", "min", UNIT),
}
FLAGS = ("require_acyclic", "fail_on_not_applicable")


@dataclass(frozen=True)
class ThresholdConfig:
    min_qua: Optional[Fraction] = None
    min_qc: Optional[Fraction] = None
    min_completeness: Optional[Fraction] = None
    max_volatility_ratio: Optional[Fraction] = None
    max_wmc: Optional[Fraction] = None
    max_rfc: Optional[Fraction] = None
    max_dit: Optional[Fraction] = None
    max_cbo: Optional[Fraction] = None
    max_lcom: Optional[Fraction] = None
    max_instability: Optional[Fraction] = None
    min_abstractness: Optional[Fraction] = None
    min_dip: Optional[Fraction] = None
    require_acyclic: bool = False
    min_ep_percent: Optional[Fraction] = None
    min_symbol_coverage: Optional[Fraction] = None
    min_method_coverage: Optional[Fraction] = None
    min_branch_coverage: Optional[Fraction] = None
    min_checklist_score: Optional[Fraction] = None
    fail_on_not_applicable: bool = False

    def __post_init__(self):
        for key, (_, _, (lo, hi)) in GATES.items():
            bound = getattr(self, key)
            if bound is None:
                continue
            bound = Fraction(bound)
            object.__setattr__(self, key, bound)
            if bound < lo or (hi is not None and bound > hi):
                upper = "inf" if hi is None else hi
                raise ConfigError(f"{key} = {bound} is outside [{lo}, {upper}]")


def parse_config(text: str, path: str = "<config>") -> ThresholdConfig:
    """Read ``key = value`` lines; keys are ThresholdConfig field names."""
    known = {f.name for f in fields(ThresholdConfig)}
    values: dict = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = (p.strip() for p in line.partition("="))
        if not sep:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{n}: {key} set twice")
        if key in FLAGS:
            if value not in ("true", "false"):
                raise ConfigError(f"{path}:{n}: {key} must be true or false")
            values[key] = value == "true"
        else:
            try:
                values[key] = Fraction(value)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"{path}:{n}: {key} needs a number, got {value!r}") from None
    try:
        return ThresholdConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def read_config(path) -> ThresholdConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), str(path))


def evaluate(
    sections: Mapping[str, Iterable[MetricValue]], config: ThresholdConfig = ThresholdConfig()
) -> MetricsReport:
    """Apply every configured bound to every row of the matching metric.

    NotApplicable rows never violate unless ``fail_on_not_applicable`` is set.
    """
    by_metric = {}
    for key, (name, direction, _) in GATES.items():
        bound = getattr(config, key)
        if bound is not None:
            by_metric[name] = (direction, bound)

    out: dict[str, tuple[MetricValue, ...]] = {}
    violations: list[Violation] = []
    for section in SECTIONS:
        if section not in sections:
            continue
        rows = []
        for mv in sections[section]:
            mv = replace(mv, status="not_applicable" if mv.status == "not_applicable" else "ok")
            gate = by_metric.get(mv.name)
            if mv.name == "adp" and config.require_acyclic:
                gate = ("acyclic", True)
            if gate is not None:
                direction, bound = gate
                if mv.status == "not_applicable":
                    if config.fail_on_not_applicable:
                        mv = replace(mv, status="violation")
                        violations.append(Violation(mv.name, mv.scope, "not_applicable", bound))
                else:
                    bad = (
                        bool(mv.value) if direction == "acyclic"
                        else mv.value < bound if direction == "min"
                        else mv.value > bound
                    )
                    if bad:
                        mv = replace(mv, status="violation")
                        violations.append(Violation(mv.name, mv.scope, mv.value, bound))
            rows.append(mv)
        out[section] = tuple(rows)
    for section in sections:
        if section not in SECTIONS:
            raise ValueError(f"unknown report section {section!r}")
    return MetricsReport(out, tuple(violations))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def format_decimal(value: Fraction, digits: int = 6) -> str:
    """Exact decimal rounding, half to even."""
    value = Fraction(value)
    sign = "-" if value < 0 else ""
    value = abs(value)
    scale = 10 ** digits
    q, r = divmod(value.numerator * scale, value.denominator)
    twice = 2 * r
    if twice > value.denominator or (twice == value.denominator and q % 2 == 1):
        q += 1
    if q == 0:
        sign = ""
    return f"{sign}{q // scale}.{q % scale:0{digits}d}"


def _json_value(value):
    if value is None or isinstance(value, (bool, int)):
        return value
    if isinstance(value, Fraction):
        return format_decimal(value)
    if isinstance(value, tuple):
        return [_json_value(v) for v in value]
    return str(value)


def text_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_decimal(value)
    if isinstance(value, tuple):
        return ";".join(text_value(v) if not isinstance(v, tuple) else ",".join(map(str, v)) for v in value)
    return str(value)


def render_json(report: MetricsReport) -> str:
    doc = {
        "verdict": report.verdict,
        "sections": {
            name: [
                {
                    "metric": mv.name,
                    "scope": mv.scope,
                    "value": _json_value(mv.value),
                    "status": mv.status,
                    **({"fallback": format_decimal(mv.fallback)} if mv.fallback is not None else {}),
                }
                for mv in rows
            ]
            for name, rows in report.sections.items()
        },
        "violations": [
            {
                "metric": v.metric,
                "scope": v.scope,
                "observed": _json_value(v.observed),
                "threshold": _json_value(v.threshold),
            }
            for v in report.violations
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def render_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "scope", "value", "status"])
    for mv in report.rows():
        writer.writerow([mv.name, mv.scope, text_value(mv.value), mv.status])
    return buf.getvalue()


def _md_cell(text: str) -> str:
    return text.replace("|", "\\|")


def render_markdown(report: MetricsReport) -> str:
    out = ["# Quality report", "", f"Verdict: **{report.verdict}**", ""]
    for name in SECTIONS:
        rows = report.sections.get(name)
        if rows is None:
            continue
        out += [f"## {SECTION_TITLES[name]}", "", "| metric | scope | value | status |", "|---|---|---|---|"]
        for mv in rows:
            cells = (mv.name, mv.scope, text_value(mv.value), mv.status)
            out.append("| " + " | ".join(_md_cell(c) for c in cells) + " |")
        out.append("")
    out += ["## Violations", ""]
    if report.violations:
        out += ["| metric | scope | observed | threshold |", "|---|---|---|---|"]
        for v in report.violations:
            cells = (v.metric, v.scope, text_value(v.observed), text_value(v.threshold))
            out.append("| " + " | ".join(_md_cell(c) for c in cells) + " |")
    else:
        out.append("None.")
    return "\n".join(out) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "markdown": render_markdown}


def render(report: MetricsReport, format: str = "json") -> bytes:
    try:
        renderer = RENDERERS[format]
    except KeyError:
        raise ValueError(f"unknown format {format!r}") from None
    return renderer(report).encode("utf-8")
