from fractions import Fraction
from itertools import product
from math import comb

import pytest

from opcohom.based import (
    ComplementError, MarginError, count_free_product, free_product, homology_dims,
    reduced_homology_collection, truncate_to_based,
)
from opcohom.free_operad import (
    DerivationRule, FreeElement, Generator, GeneratorCollection, adjoin_derivation, ass_infty,
)
from opcohom.inputs import kunneth_example


def sig(n):
    return ("c", ("c",) * n)


@pytest.fixture(scope="module")
def dr4():
    x, dx, _ = ass_infty(4)
    coll, d, _ = adjoin_derivation(x, dx)
    return truncate_to_based(coll, d, 4, max_weight=2)


@pytest.mark.parametrize("n,w", list(product(range(1, 5), range(3))))
def test_dr_homology_concentrated_in_degree_zero(dr4, n, w):
    expected = comb(w + n - 1, n - 1) if n >= 2 else 1
    dims = [homology_dims(dr4, sig(n), k, w) for k in range(n + w)]
    assert dims == [expected] + [0] * (n + w - 1)


def test_ass_infty_truncation():
    x, dx, _ = ass_infty(4)
    o = truncate_to_based(x, dx, 4)
    assert [len(o.piece(sig(4), k)) for k in range(3)] == [5, 5, 1]
    assert o.check_complement() == []
    for n in range(2, 5):
        dims = [homology_dims(o, sig(n), k) for k in range(n - 1)]
        assert dims == [1] + [0] * (n - 2)


def test_margin_error():
    x, dx, _ = ass_infty(4)
    o = truncate_to_based(x, dx, 4, max_degree=1)
    assert homology_dims(o, sig(4), 0) == 1
    with pytest.raises(MarginError, match="degree 2"):
        homology_dims(o, sig(4), 1)


def test_unary_generators_need_a_vertex_bound():
    e = Generator("e", "c", ("c",), 1)
    with pytest.raises(ValueError, match="vertex bound"):
        truncate_to_based(GeneratorCollection([e]), DerivationRule({e: FreeElement()}, -1), 2)


def _free_binary(name):
    b = Generator(name, "c", ("c", "c"), 0)
    o = truncate_to_based(GeneratorCollection([b], ["c"]), DerivationRule({b: FreeElement()}, -1), 3, 3)
    o.name = f"free({name})"
    return o


def test_free_product_of_free_operads_is_free():
    fp = free_product(_free_binary("b"), _free_binary("c"), 3, 3, 4)
    # free on {b, c}: 2 planar binary trees with 3 leaves, 2^2 decorations each
    assert len(fp.piece(sig(3), 0)) == 8
    assert len(fp.piece(sig(2), 0)) == 2
    # the same count from the dimension-only enumeration
    ha = reduced_homology_collection(_free_binary("b"), 2)
    counts = count_free_product(ha, ha, ("c",), 4, 3, 2)
    assert counts[(sig(3), 0)] == 8 and counts[(sig(1), 0)] == 1


def _lin_compose(structure, x, i, y):
    out = {}
    for t1, c1 in x.items():
        for t2, c2 in y.items():
            for r, v in structure.compose(t1, i, t2).items():
                w = out.get(r, 0) + c1 * c2 * v
                if w:
                    out[r] = w
                else:
                    out.pop(r)
    return out


def test_free_product_associativity():
    p, q, _ = kunneth_example("ass-infty-units")
    e = Generator("e", "c", ("c",), 1)
    q = truncate_to_based(GeneratorCollection([e], ["c"]), DerivationRule({e: FreeElement()}, -1),
                          1, 3, max_vertices=2)
    fp = free_product(p, q, 3, 3, 4)
    st = fp.structure
    pool = [t for t in fp.items if len(fp.items[t].ins) <= 2]
    checked = 0
    for a, b, c in product(pool, repeat=3):
        na, nb, nc = (len(fp.items[t].ins) for t in (a, b, c))
        if na + nb + nc - 2 > 3:
            continue
        for i in range(1, na + 1):
            ab = st.compose(a, i, b)
            for j in range(1, nb + 1):
                lhs = _lin_compose(st, ab, i + j - 1, {c: Fraction(1)})
                rhs = _lin_compose(st, {a: Fraction(1)}, i, st.compose(b, j, c))
                assert lhs == rhs
                checked += 1
            for k in range(i + 1, na + 1):
                lhs = _lin_compose(st, ab, k + nb - 1, {c: Fraction(1)})
                sign = -1 if (fp.items[b].degree * fp.items[c].degree) & 1 else 1
                rhs = _lin_compose(st, st.compose(a, k, c), i, {b: Fraction(1)})
                assert lhs == {r: sign * v for r, v in rhs.items()}
                checked += 1
    assert checked > 100


def test_free_product_differential_squares_to_zero():
    p, q, bounds = kunneth_example("acyclic-unary")
    fp = free_product(p, q, bounds["max_arity"], bounds["max_degree"] + 1, bounds["max_vertices"])
    for t, img in fp.diff.items():
        dd = {}
        for s, c in img.items():
            for r, v in fp.diff.get(s, {}).items():
                dd[r] = dd.get(r, 0) + c * v
        assert not any(dd.values()), fp.fmt(t)


def test_complement_error():
    u = Generator("u", "c", ("c",), 1)
    bad = truncate_to_based(GeneratorCollection([u]), DerivationRule({u: FreeElement.unit("c")}, -1),
                            1, 2, max_vertices=1)
    assert bad.check_complement()
    with pytest.raises(ComplementError, match="hits a unit"):
        free_product(bad, _free_binary("b"), 3, 2, 3)
