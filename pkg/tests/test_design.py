import json
import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings

from qualmetrics.design import (
    abstractness,
    adp,
    cbo,
    child_packages,
    class_metrics,
    dip,
    dit,
    ep,
    instability,
    lcom,
    loc,
    max_lcom,
    model_counts,
    noc,
    package_coupling,
    package_metrics,
    rfc,
    wmc,
)
from qualmetrics.model import (
    Class,
    ClassKind,
    DesignModel,
    Method,
    MethodFacts,
    NotApplicable,
    Package,
)

from strategies import (
    class_with_attribute_sets,
    model_from_package_graph,
    models,
    random_attribute_sets,
    random_forest,
    random_model,
)

C, A, I = ClassKind.CONCRETE, ClassKind.ABSTRACT, ClassKind.INTERFACE


def body(calls=(), accesses=(), dp=0, loc=(1, 0, 0)):
    return MethodFacts(tuple(calls), frozenset(accesses), dp, (), (), *loc)


def m(name, **kw):
    return Method(name, (), body(**kw))


def one_package(*classes, name="p"):
    return DesignModel((Package(name, classes),))


# -- counts and LOC ------------------------------------------------------------


def test_empty_model_counts():
    assert set(model_counts(DesignModel()).values()) == {0}


def test_small_model_counts():
    model = DesignModel((
        Package("a", (Class("X"), Class("Y", extends="a.X"))),
        Package("b", (Class("Z"),)),
    ))
    counts = model_counts(model)
    assert (counts["packages"], counts["classes"], counts["subclass_edges"]) == (2, 3, 1)


def test_fixture_counts(f1_model):
    # tallied by hand from the three F1 source files
    assert model_counts(f1_model) == {
        "packages": 3, "classes": 6, "concrete_classes": 4, "abstract_classes": 1,
        "interfaces": 1, "subclasses": 2, "superclasses": 2, "subclass_edges": 2,
        "implements_edges": 1, "call_edges": 10, "access_edges": 13, "methods": 14,
        "attributes": 9,
    }


def test_loc_modes():
    model = one_package(Class("K", methods=(m("f", loc=(10, 2, 3)),)), Class("E"))
    assert [loc(model, "method", "p.K.f", mode) for mode in ("total", "no_blank", "no_blank_no_comment")] == [10, 8, 5]
    assert [loc(model, "class", "p.E", mode) for mode in ("total", "no_blank", "no_blank_no_comment")] == [0, 0, 0]
    with pytest.raises(LookupError):
        loc(model, "method", "p.K.g")


def test_loc_package_is_sum(f1_model):
    for mode in ("total", "no_blank", "no_blank_no_comment"):
        for p in f1_model.packages:
            assert loc(f1_model, "package", p.name, mode) == sum(
                loc(f1_model, "class", f"{p.name}.{c.name}", mode) for c in p.classes
            )
    assert loc(f1_model, "class", "shop.orders.Order") == 29
    assert loc(f1_model, "class", "shop.orders.Order", "no_blank_no_comment") == 27


# -- class metrics -------------------------------------------------------------


def test_wmc():
    model = one_package(Class("K", methods=(m("a"), m("b", dp=2))), Class("E"), Class("I", I, methods=(Method("s", (), None),)))
    assert wmc(model, "p.K") == 4
    assert wmc(model, "p.K", "unit") == 2
    assert wmc(model, "p.E") == 0
    assert isinstance(wmc(model, "p.I"), NotApplicable)


def test_rfc():
    model = one_package(
        Class("K", methods=(m("m1", calls=[("p.B", "x"), ("p.B", "y")]), m("m2", calls=[("p.B", "x"), ("p.K", "m1")]))),
        Class("B", methods=(m("x"), m("y"))),
    )
    assert rfc(model, "p.K") == 4
    assert rfc(model, "p.B") == 2


def test_noc():
    model = one_package(
        Class("A"), Class("B", extends="p.A"), Class("C", extends="p.A"), Class("D", extends="p.B"),
        Class("I", I), Class("X", implements={"p.I"}), Class("Y", implements={"p.I"}), Class("Z", implements={"p.I"}),
    )
    assert (noc(model, "p.A"), noc(model, "p.D"), noc(model, "p.I")) == (2, 0, 0)
    assert (dit(model, "p.A"), dit(model, "p.D"), dit(model, "p.I")) == (0, 2, 0)


def test_cbo():
    model = one_package(
        Class("A", methods=(m("f", calls=[("p.B", "m"), ("p.A", "f")], accesses=[("p.C", "x")]),)),
        Class("B", methods=(m("m"),)),
        Class("C", attributes={"x"}),
        Class("S", methods=(m("f", calls=[("p.S", "f")]),)),
    )
    assert cbo(model, "p.A") == 2
    assert cbo(model, "p.S") == 0
    assert cbo(model, "p.B") == 0
    assert cbo(model, "p.B", include_fan_in=True) == 1


def test_lcom_examples():
    shared = one_package(Class("K", attributes={"x"}, methods=(m("a", accesses=[("p.K", "x")]), m("b", accesses=[("p.K", "x")]))))
    assert lcom(shared, "p.K") == 0
    three = class_with_attribute_sets(["x", "y"], [frozenset({"x"}), frozenset({"y"}), frozenset()])
    assert lcom(three, "p.K") == 3


def _brute_lcom(model, fq):
    sets = []
    for meth in model.cls(fq).methods:
        acc = meth.body.attribute_accesses if meth.body else ()
        sets.append({a for o, a in acc if o == fq})
    return sum(not (sets[i] & sets[j]) for i in range(len(sets)) for j in range(len(sets)) if i < j)


def test_lcom_six_methods():
    sets = [frozenset(s) for s in ({"a"}, {"a", "b"}, {"c"}, set(), {"b", "c"}, {"d"})]
    model = class_with_attribute_sets(["a", "b", "c", "d"], sets)
    assert lcom(model, "p.K") == _brute_lcom(model, "p.K") == 12  # 15 pairs, 3 share


def test_lcom_ignores_foreign_attributes():
    sets = [frozenset(), frozenset()]
    model = class_with_attribute_sets([], sets, foreign={0, 1})
    # both methods touch p.Other.x, which is not this class's attribute
    assert lcom(model, "p.K") == 1


def _brute_fan(model):
    edges = set()
    for fq, c in model.classes.items():
        for meth in c.methods:
            if meth.body:
                edges |= {(fq, t) for t, _ in meth.body.calls if t != fq}
                edges |= {(fq, o) for o, _ in meth.body.attribute_accesses if o != fq}
    return edges


def test_fixture_cbo_fan_in(f1_model):
    edges = _brute_fan(f1_model)
    for fq in f1_model.classes:
        out = {t for s, t in edges if s == fq}
        into = {s for s, t in edges if t == fq}
        assert cbo(f1_model, fq) == len(out)
        assert cbo(f1_model, fq, include_fan_in=True) == len(out | into)


def test_fixture_against_oracle_file(f1_dir, f1_model):
    expected = json.loads((f1_dir / "expected.json").read_text())
    for fq, row in expected["classes"].items():
        cyc = wmc(f1_model, fq)
        assert (None if isinstance(cyc, NotApplicable) else cyc) == row["wmc_cyclomatic"]
        unit = wmc(f1_model, fq, "unit")
        assert (None if isinstance(unit, NotApplicable) else unit) == row["wmc_unit"]
        assert rfc(f1_model, fq) == row["rfc"]
        assert lcom(f1_model, fq) == row["lcom"]
    assert max_lcom(f1_model) == (expected["max_lcom"]["class"], expected["max_lcom"]["value"])


# -- package metrics ------------------------------------------------------------


def test_isolated_package():
    model = DesignModel((Package("p", (Class("A"),)),))
    assert package_coupling(model, "p") == (0, 0)
    i = instability(0, 0)
    assert isinstance(i, NotApplicable) and i.fallback == 0
    assert isinstance(dip(model, "p"), NotApplicable)


def test_coupling_example():
    model = DesignModel((
        Package("p1", (Class("A", methods=(m("f", calls=[("p2.B", "g"), ("p2.C", "g")]),)),)),
        Package("p2", (Class("B", methods=(m("g"),)), Class("C", methods=(m("g"),)))),
    ))
    assert package_coupling(model, "p1") == (2, 0)
    assert package_coupling(model, "p2") == (0, 1)


def test_instability_values():
    assert instability(2, 0) == 1
    assert instability(0, 5) == 0
    assert instability(2, 2) == Fraction(1, 2)


def test_abstractness():
    mixed = one_package(Class("I", I), Class("A", A), Class("X"), Class("Y"))
    assert abstractness(mixed, "p") == Fraction(1, 2)
    assert abstractness(one_package(Class("X")), "p") == 0
    assert abstractness(one_package(Class("I", I), Class("J", I)), "p") == 1
    assert isinstance(abstractness(one_package(), "p"), NotApplicable)


def _dip_model(kinds):
    targets = tuple(Class(f"T{i}", k, methods=(Method("g", (), None if k is I else body()),)) for i, k in enumerate(kinds))
    calls = [(f"q.T{i}", "g") for i in range(len(kinds))]
    return DesignModel((Package("p", (Class("S", methods=(m("f", calls=calls),)),)), Package("q", targets)))


def test_dip():
    assert dip(_dip_model([I, I, I]), "p") == 1
    assert dip(_dip_model([A, C, C, C]), "p") == Fraction(1, 4)
    assert isinstance(dip(_dip_model([]), "p"), NotApplicable)


def test_fixture_packages(f1_model):
    pm = {p.name: package_metrics(f1_model, p.name) for p in f1_model.packages}
    assert (pm["shop.billing"].ce, pm["shop.billing"].ca, pm["shop.billing"].instability) == (1, 1, Fraction(1, 2))
    assert (pm["shop.core"].ce, pm["shop.core"].ca, pm["shop.core"].instability) == (0, 2, 0)
    assert pm["shop.core"].abstractness == 1
    assert (pm["shop.orders"].ce, pm["shop.orders"].ca, pm["shop.orders"].dip) == (4, 1, Fraction(3, 5))
    assert adp(f1_model) == (False, [["shop.billing", "shop.orders"]])


def test_adp_examples():
    chain = model_from_package_graph(["p1", "p2", "p3"], [("p1", "p2"), ("p2", "p3")])
    assert adp(chain) == (True, [])
    loop = model_from_package_graph(["p1", "p2"], [("p1", "p2"), ("p2", "p1")])
    assert adp(loop) == (False, [["p1", "p2"]])


def _ep_model(n_children, used):
    pkgs = [Package("ext", (Class("User", methods=(m("f", calls=[(f"app.c{i}.K{i}", "g") for i in used]),)),))]
    pkgs.append(Package("app", (Class("Root", methods=(m("f", calls=[(f"app.c{i}.K{i}", "g") for i in range(n_children)]),)),)))
    pkgs += [Package(f"app.c{i}", (Class(f"K{i}", methods=(m("g"),)),)) for i in range(n_children)]
    return DesignModel(tuple(pkgs))


def test_ep():
    assert ep(_ep_model(2, []), "app") == 100
    assert ep(_ep_model(2, [0, 1]), "app") == 0
    assert ep(_ep_model(4, [2]), "app") == 75
    assert ep(_ep_model(0, []), "app") == 100
    assert child_packages(_ep_model(2, []), "app") == ["app.c0", "app.c1"]


def test_ep_grandchild_use_counts_for_child():
    model = DesignModel((
        Package("ext", (Class("U", methods=(m("f", calls=[("app.c.d.K", "g")]),)),)),
        Package("app.c.d", (Class("K", methods=(m("g"),)),)),
        Package("app.e", (Class("L"),)),
    ))
    # "app" and "app.c" are implied by the dotted paths
    assert ep(model, "app") == 50
    assert ep(model, "app.c") == 0


# -- properties ----------------------------------------------------------------


def test_dit_noc_on_random_forests():
    rng = random.Random(11)
    for _ in range(100):
        model = random_forest(rng, 30)
        edges = [(fq, c.extends) for fq, c in model.classes.items() if c.extends]
        assert sum(noc(model, fq) for fq in model.classes) == len(edges)
        for child, parent in edges:
            assert dit(model, child) == dit(model, parent) + 1
        for fq in model.classes:
            hops, cur = 0, model.classes[fq]
            while cur.extends:
                hops, cur = hops + 1, model.classes[cur.extends]
            assert dit(model, fq) == hops


def test_lcom_random_against_brute_force():
    rng = random.Random(5)
    for _ in range(100):
        attrs, sets = random_attribute_sets(rng)
        foreign = {i for i in range(len(sets)) if rng.random() < 0.3}
        model = class_with_attribute_sets(attrs, sets, foreign)
        assert lcom(model, "p.K") == _brute_lcom(model, "p.K")


def _brute_coupling(model):
    edges = set()
    for fq, c in model.classes.items():
        refs = set()
        for meth in c.methods:
            if meth.body:
                refs |= {t for t, _ in meth.body.calls} | {o for o, _ in meth.body.attribute_accesses}
        if c.extends:
            refs.add(c.extends)
        refs |= set(c.implements)
        edges |= {(fq, t) for t in refs}
    pkg = model.package_of
    cross = {(s, t) for s, t in edges if pkg[s] != pkg[t]}
    out = {}
    for p in model.packages:
        ce = len({t for s, t in cross if pkg[s] == p.name})
        ca = len({s for s, t in cross if pkg[t] == p.name})
        out[p.name] = (ce, ca)
    return out, cross


@settings(max_examples=80, deadline=None)
@given(models)
def test_coupling_against_edge_scan(model):
    expected, cross = _brute_coupling(model)
    for p in model.packages:
        ce, ca = package_coupling(model, p.name)
        assert (ce, ca) == expected[p.name]
        i = instability(ce, ca)
        if ca == 0 and ce > 0:
            assert i == 1
        if ce == 0 and ca > 0:
            assert i == 0
    # every (source package, target class) pair is seen once from each side
    pkg = model.package_of
    from_sources = sum(len({t for s, t in cross if pkg[s] == p.name}) for p in model.packages)
    from_targets = sum(
        len({(pkg[s], t) for s, t in cross if pkg[t] == p.name}) for p in model.packages
    )
    assert from_sources == from_targets


def _rename(model, mapping):
    def fq(name):
        pkg, _, simple = name.rpartition(".")
        return f"{pkg}.{mapping[simple]}"

    def facts(b):
        if b is None:
            return None
        return replace(
            b,
            calls=tuple((fq(t), n) for t, n in b.calls),
            attribute_accesses=frozenset((fq(o), a) for o, a in b.attribute_accesses),
        )

    packages = []
    for p in model.packages:
        classes = tuple(
            replace(
                c,
                name=mapping[c.name],
                extends=fq(c.extends) if c.extends else None,
                implements=frozenset(fq(t) for t in c.implements),
                methods=tuple(replace(x, body=facts(x.body)) for x in c.methods),
            )
            for c in p.classes
        )
        packages.append(Package(p.name, classes))
    return DesignModel(tuple(packages))


def test_rename_invariance():
    rng = random.Random(2)
    for _ in range(30):
        model = random_model(rng)
        names = [c.name for p in model.packages for c in p.classes]
        fresh = [f"Z{i}" for i in range(len(names))]
        rng.shuffle(fresh)
        mapping = dict(zip(names, fresh))
        renamed = _rename(model, mapping)
        for old_fq in model.classes:
            pkg, _, simple = old_fq.rpartition(".")
            assert class_metrics(model, old_fq, True) == class_metrics(renamed, f"{pkg}.{mapping[simple]}", True)
        for p in model.packages:
            assert package_metrics(model, p.name) == package_metrics(renamed, p.name)
        assert adp(model) == adp(renamed)
        assert model_counts(model) == model_counts(renamed)


def test_isolated_class_moves_nothing_else():
    rng = random.Random(4)
    for _ in range(30):
        model = random_model(rng)
        target = rng.choice(model.packages).name
        grown = DesignModel(tuple(
            Package(p.name, p.classes + ((Class("Lonely"),) if p.name == target else ())) for p in model.packages
        ))
        for fq in model.classes:
            assert class_metrics(model, fq, True) == class_metrics(grown, fq, True)
        for p in model.packages:
            before, after = package_metrics(model, p.name), package_metrics(grown, p.name)
            if p.name == target:
                assert replace(before, abstractness=None) == replace(after, abstractness=None)
            else:
                assert before == after
        assert adp(model) == adp(grown)
        assert model_counts(grown)["classes"] == model_counts(model)["classes"] + 1


def test_ranges_on_random_models():
    rng = random.Random(9)
    for _ in range(50):
        model = random_model(rng)
        for p in model.packages:
            pm = package_metrics(model, p.name)
            for v in (pm.instability, pm.abstractness, pm.dip):
                if not isinstance(v, NotApplicable):
                    assert 0 <= v <= 1
            assert 0 <= pm.ep_percent <= 100
        for fq in model.classes:
            cm = class_metrics(model, fq)
            assert min(cm.rfc, cm.noc, cm.dit, cm.cbo, cm.lcom) >= 0
            n = len(model.classes[fq].methods)
            assert cm.lcom <= n * (n - 1) // 2
