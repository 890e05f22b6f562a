#!/usr/bin/env python3
"""Brute-force oracle for the F1 fixture.

Works straight off the source text with regular expressions and brace
counting; it never imports the package's frontend, so it is an independent
route to WMC, RFC and LCOM. Writes tests/fixtures/f1/expected.json.

    python scripts/f1_oracle.py [--check]
"""
import argparse
import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
F1 = ROOT / "tests" / "fixtures" / "f1"

CLASS_RE = re.compile(
    r"(abstract\s+)?class\s+(\w+)(?:\s+extends\s+(\w+))?(?:\s+implements\s+([\w\s,]+?))?\s*\{"
)
IFACE_RE = re.compile(r"interface\s+(\w+)\s*\{")
METHOD_RE = re.compile(r"(\w+)\s*\([^)]*\)\s*\{")
SIG_RE = re.compile(r"(\w+)\s*\([^)]*\)\s*;")
FIELD_RE = re.compile(r"\bfield\s+(\w+)\s*;")


def matching_brace(text, open_at):
    depth = 0
    for i in range(open_at, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return i
    raise ValueError("unbalanced braces")


def scan(paths):
    classes = {}
    for path in paths:
        text = re.sub(r"//[^\n]*", "", path.read_text())
        package = re.search(r"package\s+([\w.]+)\s*;", text).group(1)
        pos = 0
        while True:
            cm, im = CLASS_RE.search(text, pos), IFACE_RE.search(text, pos)
            m = min((x for x in (cm, im) if x), key=lambda x: x.start(), default=None)
            if m is None:
                break
            close = matching_brace(text, m.end() - 1)
            body = text[m.end():close]
            if m is im:
                classes[m.group(1)] = dict(
                    package=package, interface=True, extends=None, implements=[],
                    fields=set(), methods={s.group(1): None for s in SIG_RE.finditer(body)},
                )
            else:
                methods = {}
                i = 0
                # methods are the top-level "name(...) {" groups of the class body
                while True:
                    mm = METHOD_RE.search(body, i)
                    if mm is None:
                        break
                    end = matching_brace(body, mm.end() - 1)
                    methods[mm.group(1)] = body[mm.end():end]
                    i = end + 1
                classes[m.group(2)] = dict(
                    package=package, interface=False, extends=m.group(3),
                    implements=[s.strip() for s in (m.group(4) or "").split(",") if s.strip()],
                    fields=set(FIELD_RE.findall(body)), methods=methods,
                )
            pos = close + 1
    return classes


def chain(classes, name):
    out = [name]
    while classes[out[-1]]["extends"]:
        out.append(classes[out[-1]]["extends"])
    return out


def method_owner(classes, name, method):
    for c in chain(classes, name):
        if method in classes[c]["methods"]:
            return c
    for c in chain(classes, name):
        for iface in classes[c]["implements"]:
            if method in classes[iface]["methods"]:
                return iface
    raise KeyError(f"{name}.{method}")


def attr_owner(classes, name, attr):
    for c in chain(classes, name):
        if attr in classes[c]["fields"]:
            return c
    return None


def fq(classes, name):
    return f"{classes[name]['package']}.{name}"


def oracle(classes):
    out = {}
    for name, c in classes.items():
        entry = {}
        if c["interface"]:
            entry["wmc_cyclomatic"] = entry["wmc_unit"] = None
        else:
            entry["wmc_unit"] = len(c["methods"])
            entry["wmc_cyclomatic"] = sum(
                1 + len(re.findall(r"\b(?:if|while)\s*\(", body)) for body in c["methods"].values()
            )
        response = {(name, m) for m in c["methods"]}
        own_sets = []
        for body in c["methods"].values():
            body = body or ""
            for target, method in re.findall(r"\bcall\s+(\w+)\.(\w+)\s*\(", body):
                response.add((method_owner(classes, target, method), method))
            attrs = set()
            for owner, attr in re.findall(r"\baccess\s+(\w+)\.(\w+)\s*;", body):
                if attr_owner(classes, owner, attr) == name:
                    attrs.add(attr)
            for attr in re.findall(r"\bassign\s+(\w+)\s*;", body):
                if attr_owner(classes, name, attr) == name:
                    attrs.add(attr)
            own_sets.append(attrs)
        entry["rfc"] = len(response)
        entry["lcom"] = sum(
            1
            for i in range(len(own_sets))
            for j in range(i + 1, len(own_sets))
            if not own_sets[i] & own_sets[j]
        )
        out[fq(classes, name)] = entry
    worst = max(sorted(out), key=lambda k: out[k]["lcom"])
    return {
        "classes": dict(sorted(out.items())),
        "max_lcom": {"class": worst, "value": out[worst]["lcom"]},
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare with the committed file instead of writing")
    args = ap.parse_args()
    result = oracle(scan(sorted((F1 / "src").glob("*.moo"))))
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    target = F1 / "expected.json"
    if args.check:
        same = target.read_text() == text
        print("expected.json up to date" if same else "expected.json differs from oracle output")
        return 0 if same else 1
    target.write_text(text)
    print(f"wrote {target.relative_to(ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
