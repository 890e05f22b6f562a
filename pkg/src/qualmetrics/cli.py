"""Command-line driver.

Exit codes: 0 all gates pass, 1 gate violations, 2 input, parse or config error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from . import report as rpt
from .coverage import ChecklistError, CoverageError, checklist, entry_warnings, merge_traces
from .frontend import LowerError, ParseError, load_model
from .ingest import (
    IngestError,
    read_checklist_facts,
    read_requirements,
    read_trace,
    read_usecases,
    write_symbols,
)
from .model import validate_model
from .reqmetrics import requirement_metrics

log = logging.getLogger("qualmetrics")

EXIT_OK, EXIT_VIOLATIONS, EXIT_ERROR = 0, 1, 2


class InputError(Exception):
    """Anything that should end the run with exit code 2."""


@dataclass
class RunOptions:
    subcommand: str
    sources: list[Path] = field(default_factory=list)
    requirements: Optional[Path] = None
    usecases: Optional[Path] = None
    traces: list[Path] = field(default_factory=list)
    facts: Optional[Path] = None
    format: str = "json"
    config: Optional[Path] = None
    out: Optional[Path] = None
    symbols: Optional[Path] = None
    wmc_weight: str = "cyclomatic"
    cbo_fan_in: bool = False
    strict: bool = False


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qualmetrics", description="Software quality metrics and CI gates for MiniOO designs."
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, config_required=False):
        p.add_argument("--format", choices=sorted(rpt.RENDERERS), default="json")
        p.add_argument(
            "--config", type=Path, required=config_required, help="threshold config (key = value lines)"
        )
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        p.add_argument("--strict", action="store_true", help="not-applicable metrics with a bound fail the gate")

    def design_flags(p):
        p.add_argument("--wmc-weight", choices=["cyclomatic", "unit"], default="cyclomatic")
        p.add_argument("--cbo-fan-in", action="store_true", help="count classes that use this one too")

    p = sub.add_parser("analyze", help="design metrics for MiniOO sources")
    p.add_argument("inputs", nargs="+", type=Path, help=".moo files or directories")
    p.add_argument("--symbols", type=Path, help="symbol listing path (default: <out>.symbols)")
    common(p)
    design_flags(p)

    p = sub.add_parser("requirements", help="requirement and use-case metrics")
    p.add_argument("inputs", nargs=1, type=Path, metavar="REQ", help=".req file")
    p.add_argument("--ucm", type=Path, help=".ucm use-case model")
    common(p)

    p = sub.add_parser("coverage", help="coverage of MiniOO sources by traces")
    p.add_argument("inputs", nargs="+", type=Path, help=".moo files or directories")
    p.add_argument("--trace", action="append", type=Path, required=True, dest="traces")
    common(p)

    p = sub.add_parser("check", help="every metric the inputs allow, then the gates")
    p.add_argument("inputs", nargs="+", type=Path, help=".moo/.req/.ucm/.trc/.chk files or directories")
    p.add_argument("--trace", action="append", type=Path, default=[], dest="traces")
    p.add_argument("--symbols", type=Path, help="symbol listing path")
    common(p, config_required=True)
    design_flags(p)
    return parser


def _options(ns: argparse.Namespace) -> RunOptions:
    opts = RunOptions(
        ns.subcommand,
        format=ns.format,
        config=ns.config,
        out=ns.out,
        strict=ns.strict,
        symbols=getattr(ns, "symbols", None),
        wmc_weight=getattr(ns, "wmc_weight", "cyclomatic"),
        cbo_fan_in=getattr(ns, "cbo_fan_in", False),
        traces=list(getattr(ns, "traces", None) or []),
    )
    if ns.subcommand == "requirements":
        opts.requirements = ns.inputs[0]
        opts.usecases = ns.ucm
        return opts
    if ns.subcommand != "check":
        opts.sources = list(ns.inputs)
        return opts
    # check: sort inputs out by extension
    singles = {".req": "requirements", ".ucm": "usecases", ".chk": "facts"}
    for path in ns.inputs:
        suffix = path.suffix
        if path.is_dir() or suffix == ".moo":
            opts.sources.append(path)
        elif suffix == ".trc":
            opts.traces.append(path)
        elif suffix in singles:
            attr = singles[suffix]
            if getattr(opts, attr) is not None:
                raise InputError(f"more than one {suffix} input: {getattr(opts, attr)}, {path}")
            setattr(opts, attr, path)
        else:
            raise InputError(f"{path}: cannot tell what kind of input this is")
    if opts.traces and not opts.sources:
        raise InputError("traces need MiniOO sources to be measured against")
    if opts.facts and not opts.sources:
        raise InputError("checklist facts need MiniOO sources")
    return opts


def _symbols_path(opts: RunOptions) -> Optional[Path]:
    if opts.symbols is not None:
        return opts.symbols
    if opts.out is not None:
        return opts.out.with_name(opts.out.name + ".symbols")
    return None


def run(opts: RunOptions) -> rpt.MetricsReport:
    """Compute the sections the inputs allow and apply the configured gates."""
    config = rpt.ThresholdConfig()
    if opts.config is not None:
        config = rpt.read_config(opts.config)
    if opts.strict:
        config = replace(config, fail_on_not_applicable=True)

    sections = {}
    if opts.requirements is not None:
        reqs = read_requirements(opts.requirements)
        ucm = read_usecases(opts.usecases) if opts.usecases is not None else None
        sections["requirements"] = rpt.requirement_section(requirement_metrics(reqs, ucm))

    if opts.sources:
        model = load_model(opts.sources)
        problems = validate_model(model)
        if problems:
            raise InputError("inconsistent design model:\n  " + "\n  ".join(problems))
        if opts.subcommand in ("analyze", "check"):
            sections["design"] = rpt.design_section(model, opts.wmc_weight, opts.cbo_fan_in)
            sym_path = _symbols_path(opts)
            if sym_path is not None:
                sym_path.write_text(write_symbols(model), encoding="utf-8")
        if opts.traces:
            executed = merge_traces(model, [read_trace(t) for t in opts.traces])
            for warning in entry_warnings(model, executed):
                log.warning(warning)
            sections["coverage"] = rpt.coverage_section(model, executed)
        if opts.facts is not None:
            result = checklist(model, read_checklist_facts(opts.facts))
            sections["checklist"] = rpt.checklist_section(result)
    return rpt.evaluate(sections, config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    # own handler: basicConfig is a no-op when the host already configured logging
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.propagate = False
    try:
        return _main(argv)
    finally:
        log.removeHandler(handler)
        log.propagate = True


def _main(argv: Optional[Sequence[str]]) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        opts = _options(ns)
        report = run(opts)
    except (ParseError, LowerError) as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_ERROR
    except (IngestError, CoverageError, ChecklistError, rpt.ConfigError, InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    data = rpt.render(report, opts.format)
    if opts.out is not None:
        opts.out.write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    for v in report.violations:
        print(
            f"violation: {v.metric} {v.scope} observed {rpt.text_value(v.observed)} "
            f"bound {rpt.text_value(v.threshold)}",
            file=sys.stderr,
        )
    return EXIT_OK if report.passed else EXIT_VIOLATIONS


if __name__ == "__main__":
    sys.exit(main())
