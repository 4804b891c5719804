"""Acceptance criteria, one printed PASS/FAIL line each, all exact.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""
import random
import time
from itertools import product
from math import comb

from _helpers import (
    leibniz_failures, module_axiom_failures, random_algebras, random_homogeneous,
    random_module_element, sign_coherence_exhaustive, single, small_algebras,
)
from opcohom.based import homology_dims, truncate_to_based
from opcohom.cohomology import (
    betti, compare, der_complex_dr, gs_complex, hochschild_complex, kunneth_check, modext_complex,
)
from opcohom.diagram import (
    DiagramData, arrow_category, bar_cobar, compose_diagram, diagram_basis, diagram_inputs,
    diagram_unit, dual_numbers, face, nerve, point_category, square_category, unital_k, zero_k,
)
from opcohom.free_operad import (
    FreeElement, adjoin_derivation, ass_infty, check_d_squared, compose_free, enumerate_trees,
)
from opcohom.inputs import KUNNETH_EXAMPLES, kunneth_example
from opcohom.modules import (
    check_module_d_squared, mda_dimension_oracle, mr, olmdr, olmdr_homology,
)
from opcohom.trees import vertex_count

RESULTS = {}


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def test_criterion_1_d_squared_certificates():
    t0 = time.perf_counter()
    failures = {}
    c, d, _ = ass_infty(8)
    failures["Ass_infty<=8"] = len(check_d_squared(c, d, 8))
    c6, d6, _ = ass_infty(6)
    dr, ddr, _ = adjoin_derivation(c6, d6)
    failures["DR<=6"] = len(check_d_squared(dr, ddr, 6))
    _, gens, dol = olmdr(8)
    failures["olMDR<=8"] = len(check_module_d_squared(dol, gens))
    for name, cat in (("arrow", arrow_category()), ("square", square_category())):
        g, dm = mr(cat, 5)
        failures[f"MR[{name}]<=5"] = len(check_module_d_squared(dm, g))
    for name, cat in (("point", point_category()), ("arrow", arrow_category()),
                      ("square", square_category())):
        coll, db, _ = bar_cobar(cat, 4)
        failures[f"barcobar[{name}]<=4"] = len(check_d_squared(coll, db, 1))
    secs = time.perf_counter() - t0
    ok = not any(failures.values()) and secs < 60
    detail = ", ".join(f"{k} {v} failures" for k, v in failures.items())
    assert report(1, ok, f"{detail}; {secs:.1f} s (limit 60 s)")


def test_criterion_2_dr_homology():
    x, dx, _ = ass_infty(4)
    coll, d, _ = adjoin_derivation(x, dx)
    o = truncate_to_based(coll, d, 4, max_weight=2)
    bad = []
    for n, w in product(range(1, 5), range(3)):
        want = comb(w + n - 1, n - 1) if n >= 2 else 1
        dims = [homology_dims(o, ("c", ("c",) * n), k, w) for k in range(n + w)]
        if dims != [want] + [0] * (len(dims) - 1):
            bad.append((n, w, dims, want))
    detail = f"12 bigraded pieces (n<=4, w<=2), {len(bad)} off the binomial table"
    assert report(2, not bad, detail + (f" {bad}" if bad else ", all concentrated in degree 0"))


def test_criterion_3_olmdr_homology():
    rows = []
    ok = True
    for n in range(1, 7):
        h = olmdr_homology(n)
        oracle = mda_dimension_oracle(n)
        rows.append(f"n={n}: H0={h[0]} oracle={oracle}")
        ok &= h[0] == oracle == n and all(v == 0 for k, v in h.items() if k > 0)
    assert report(3, ok, "; ".join(rows) + ("; higher homology zero" if ok else ""))


def test_criterion_4_gs_equals_module_resolution():
    inputs = {
        "point k[x]/x^2": DiagramData(point_category(), {"c": dual_numbers()}),
        "arrow k -> k": DiagramData(arrow_category(), {"a": unital_k(), "b": unital_k()}, {"f": [[1]]}),
        "arrow k[x]/x^2 -> k": DiagramData(arrow_category(), {"a": dual_numbers(), "b": unital_k()},
                                          {"f": [[1, 0]]}),
    }
    parts, ok = [], True
    for name, data in inputs.items():
        t0 = time.perf_counter()
        gs, me = gs_complex(data, 4), modext_complex(data, 4)
        r = compare(gs, me)
        b1, b2 = betti(gs), betti(me)
        secs = time.perf_counter() - t0
        ok &= b1 == b2 and r.verdict in ("identical", "diagonal") and secs < 300
        parts.append(f"{name}: {r.verdict}, betti {tuple(b1.values())} vs {tuple(b2.values())}, {secs:.1f} s")
    assert report(4, ok, "; ".join(parts))


def test_criterion_5_hochschild_recovery():
    algs = random_algebras(10, seed=2026)
    verdicts = []
    for alg in algs:
        data = single(alg)
        verdicts.append(compare(hochschild_complex(data, 5), der_complex_dr(data, 5)).verdict)
    ident = sum(v == "identical" for v in verdicts)
    tables = {}
    for name, alg, want in (("unital k", unital_k(), (1, 0, 0, 0, 0)),
                            ("zero k", zero_k(), (1, 1, 1, 1, 1))):
        data = single(alg)
        got_h = tuple(betti(hochschild_complex(data, 4)).values())
        got_d = tuple(betti(der_complex_dr(data, 4)).values())
        tables[name] = (want, got_h, got_d)
    tables_ok = all(w == h == d for w, h, d in tables.values())
    ok = ident == 10 and tables_ok
    tab = "; ".join(f"{k}: expected {w}, hochschild {h}, der-complex {d}" for k, (w, h, d) in tables.items())
    assert report(5, ok, f"{ident}/10 random algebras (dim <= 3, degree <= 5) identical; {tab}")


def test_criterion_6_gs_collapse():
    algs = small_algebras()
    names = ["k", "zero1", "dual", "k x k", "k[x]/x^3", "triangular"]
    bad = []
    for name in names:
        data = single(algs[name])
        if betti(gs_complex(data, 4)) != betti(hochschild_complex(data, 4)):
            bad.append(name)
    assert report(6, not bad, f"one-object GS vs Hochschild, degrees 0..4, {len(names) - len(bad)}/{len(names)} "
                              f"algebras agree {bad or ''}".rstrip())


def test_criterion_7_kunneth():
    parts, ok = [], True
    for name in KUNNETH_EXAMPLES:
        p, q, bounds = kunneth_example(name)
        r = kunneth_check(p, q, **bounds)
        ok &= not r["report"] and bounds["max_arity"] <= 3 and bounds["max_degree"] <= 2
        parts.append(f"{name}: {len(r['report'])} mismatches over {len(r['dims'])} pieces")
    assert report(7, ok, "; ".join(parts) + " (arity <= 3, degree <= 2)")


def _operad_axioms():
    c, d, _ = ass_infty(3)
    dr, _, _ = adjoin_derivation(c, d)
    pool = [FreeElement.tree(t) for t, *_ in enumerate_trees(dr, 3, max_arity=4)]

    def nv(e):
        return vertex_count(next(iter(e.terms)))

    def ar(e):
        return len(next(iter(e.signatures()))[1])

    cases = fails = 0
    unit = FreeElement.unit("c")
    for a in pool:
        cases += 1 + ar(a)
        fails += compose_free(unit, 1, a) != a
        fails += sum(compose_free(a, i, unit) != a for i in range(1, ar(a) + 1))
    small = [e for e in pool if nv(e) <= 2]
    for a, b, cc in product(small, repeat=3):
        if nv(a) + nv(b) + nv(cc) > 3:
            continue
        for i in range(1, ar(a) + 1):
            ab = compose_free(a, i, b)
            for j in range(1, ar(b) + 1):
                cases += 1
                fails += compose_free(ab, i + j - 1, cc) != compose_free(a, i, compose_free(b, j, cc))
            for k in range(i + 1, ar(a) + 1):
                cases += 1
                sign = -1 if (b.degree() * cc.degree()) & 1 else 1
                fails += compose_free(ab, k + ar(b) - 1, cc) != sign * compose_free(compose_free(a, k, cc), i, b)
    # the diagram operad, exhaustively to arity 2 on the square
    cat = square_category()
    els = [e for cobj in cat.objects for n in (1, 2) for ins in product(cat.objects, repeat=n)
           for e in diagram_basis(cat, cobj, ins)]
    for a, b, cc in product(els, repeat=3):
        ia, ib = diagram_inputs(cat, a), diagram_inputs(cat, b)
        for i in range(1, a.arity + 1):
            if ia[i - 1] != b.out:
                continue
            ab = compose_diagram(cat, a, i, b)
            for j in range(1, b.arity + 1):
                if ib[j - 1] == cc.out:
                    cases += 1
                    fails += compose_diagram(cat, ab, i + j - 1, cc) != \
                        compose_diagram(cat, a, i, compose_diagram(cat, b, j, cc))
    for a in els:
        cases += 1
        fails += compose_diagram(cat, diagram_unit(cat, a.out), 1, a) != a
    return cases, fails


def _module_axioms(count=240):
    rng = random.Random(11)
    cats = [arrow_category(), square_category(), point_category()]
    built = [(cat, *mr(cat, 3)) for cat in cats]
    cases = fails = 0
    while cases < count:
        cat, gens, d = rng.choice(built)
        m = random_module_element(cat, gens, rng.choice, rng.randint)
        if not m:
            continue
        cases += 1
        fails += bool(module_axiom_failures(cat, d, m, rng.choice, rng.randint))
    return cases, fails


def _leibniz(count=240):
    rng = random.Random(12)
    c, d, _ = ass_infty(4)
    dr, ddr, s = adjoin_derivation(c, d)
    pool = [t for t, *_ in enumerate_trees(dr, 3, max_arity=4)]
    cases = fails = 0
    while cases < count:
        a = random_homogeneous(pool, rng.choice, rng.randint)
        b = random_homogeneous(pool, rng.choice, rng.randint)
        if not a or not b:
            continue
        cases += 1
        i = rng.randint(1, len(next(iter(a.signatures()))[1]))
        fails += bool(leibniz_failures((ddr, s), a, i, b))
    return cases, fails


def _faces():
    cases = fails = 0
    for cat in (point_category(), arrow_category(), square_category()):
        for p in range(2, 5):
            for sigma in nerve(cat, p):
                for j in range(p + 1):
                    for i in range(j):
                        cases += 1
                        fails += face(cat, face(cat, sigma, j), i) != face(cat, face(cat, sigma, i), j - 1)
    return cases, fails


def test_criterion_8_axiom_suites():
    suites = {
        "operad associativity/units (<=3-vertex trees)": _operad_axioms(),
        "module axioms (random)": _module_axioms(),
        "Leibniz for derive (random)": _leibniz(),
        "simplicial face identities (length <= 4)": _faces(),
    }
    cases, failures = sign_coherence_exhaustive(4, arities=(0, 1, 2, 3))
    suites["tree_compose sign coherence (<=4-vertex trees)"] = (cases, len(failures))
    ok = all(f == 0 for _, f in suites.values())
    ok &= suites["module axioms (random)"][0] >= 200 and suites["Leibniz for derive (random)"][0] >= 200
    detail = "; ".join(f"{k}: {f} failures in {n} cases" for k, (n, f) in suites.items())
    assert report(8, ok, detail)
