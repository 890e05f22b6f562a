#!/usr/bin/env python3
"""Run ``qualmetrics check`` over every F1 input and print the report.

    python scripts/f1_report.py [--format markdown|json|csv] [--config PATH]

Defaults to markdown with the ``lcom_below_max.cfg`` gate, so the run ends
with one violation (shop.orders.Order) and exit code 1.
"""
import argparse
import sys
from pathlib import Path

from qualmetrics.cli import main as qualmetrics_main

F1 = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "f1"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--format", default="markdown", choices=["markdown", "json", "csv"])
    ap.add_argument("--config", type=Path, default=F1 / "lcom_below_max.cfg")
    args = ap.parse_args()
    inputs = [F1 / "src", F1 / "shop.req", F1 / "shop.ucm", F1 / "shop.chk"]
    inputs += sorted(F1.glob("*.trc"))
    argv = ["check", *map(str, inputs), "--config", str(args.config), "--format", args.format]
    return qualmetrics_main(argv)


if __name__ == "__main__":
    sys.exit(main())
