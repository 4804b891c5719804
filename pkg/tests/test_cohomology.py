import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _helpers import (
    gs_oracle, hochschild_oracle_matrix, random_algebras, random_basis_change, relabel, single,
    small_algebras, square_diagram,
)
from opcohom.based import MarginError
from opcohom.cohomology import (
    CochainComplex, InvalidDataError, betti, compare, der_complex_dr, gs_complex,
    hochschild_complex, kunneth_check, modext_complex, olmdr_complex,
)
from opcohom.diagram import (
    Algebra, DiagramData, arrow_category, dual_numbers, unital_k, zero_k,
)
from opcohom.inputs import KUNNETH_EXAMPLES, kunneth_example
from opcohom.linalg import ExactMatrix, NotAComplexError, rank_and_kernel

ALGS = small_algebras()


def arrow_quotient():
    return DiagramData(arrow_category(), {"a": dual_numbers(), "b": unital_k()}, {"f": [[1, 0]]})


@pytest.mark.parametrize("name", sorted(ALGS))
def test_hochschild_matrix_against_brute_force(name):
    alg = random_basis_change(ALGS[name], random.Random(name))
    c = hochschild_complex(single(alg), 1)
    for n in range(2 if alg.dim <= 2 else 1):
        rows, cols, dense = hochschild_oracle_matrix(alg, n + 1)
        m = c.matrix(n)
        rpos = {lab: r for r, lab in enumerate(c.labels[n + 1])}
        cpos = {lab: k for k, lab in enumerate(c.labels[n])}
        for (j, k), line in zip(rows, dense):
            r = rpos[(("hoch", n + 2), j, k)]
            for (jj, kk), v in zip(cols, line):
                assert m.get(r, cpos[(("hoch", n + 1), jj, kk)]) == v


# augmented tables (no C^{-1}): H^0 = Der(A), H^n = HH^{n+1}(A) classically
KNOWN = {
    "dual": [1, 1, 1, 1],          # HH^n(k[x]/x^2) = k in char 0
    "k[x]/x^3": [2, 2, 2, 2],      # HH^n(k[x]/x^3) = k^2 in char 0
    "k x k": [0, 0, 0, 0],         # separable
    "k^3": [0, 0, 0, 0],
    "triangular": [2, 0, 0, 0],    # hereditary, all derivations inner: dim A - dim Z
    "zero1": [1, 1, 1, 1],         # zero differential, C^n = k
    "zero2": [4, 8, 16, 32],       # zero differential, dim C^n = 2^(n+2)
    "k": [0, 0, 0, 0],             # see the unital-k entry in the decisions ledger
}


@pytest.mark.parametrize("name", sorted(KNOWN))
def test_known_hochschild_tables(name):
    alg = random_basis_change(ALGS[name], random.Random(7))
    b = betti(hochschild_complex(single(alg), 3))
    assert [b[n] for n in range(4)] == KNOWN[name]


def _derivation_dim(alg):
    """dim of {D : D(xy) = D(x) y + x D(y)} solved directly over the basis."""
    n = alg.dim
    m = ExactMatrix(n ** 3, n * n)
    # unknown D[k][i] at column k * n + i: D(e_i) = sum_k D[k][i] e_k
    row = 0
    for i in range(n):
        for j in range(n):
            eij = alg.mult[i][j]
            for k in range(n):
                for t in range(n):
                    if eij[t]:
                        m.add(row + k, k * n + t, eij[t])
                for t in range(n):
                    # D(e_i) e_j and e_i D(e_j)
                    m.add(row + k, t * n + i, -alg.mul(alg.basis(t), alg.basis(j))[k])
                    m.add(row + k, t * n + j, -alg.mul(alg.basis(i), alg.basis(t))[k])
            row += n
    r, _ = rank_and_kernel(m)
    return n * n - r


@pytest.mark.parametrize("seed", range(6))
def test_degree_zero_is_the_derivation_space(seed):
    alg = random_algebras(1, seed=seed)[0]
    c = hochschild_complex(single(alg), 1)
    assert betti(c)[0] == _derivation_dim(alg)
    r, ker = rank_and_kernel(c.matrix(0))
    assert len(ker) == _derivation_dim(alg)


@pytest.mark.parametrize("seed", range(4))
def test_der_complex_equals_hochschild(seed):
    alg = random_algebras(1, seed=100 + seed)[0]
    data = single(alg)
    h, dr = hochschild_complex(data, 3), der_complex_dr(data, 3)
    assert compare(h, dr).verdict == "identical"


def test_olmdr_complex_is_minus_hochschild():
    data = single(dual_numbers())
    h = hochschild_complex(data, 3)
    o = relabel(olmdr_complex(data, 3), lambda lab: (("hoch", lab[0][1]), lab[1], lab[2]))
    for a, b in zip(h.d, o.d):
        assert a == -b
    assert compare(h, o).verdict == "diagonal"


@pytest.mark.parametrize("name", ["dual", "zero1", "k", "triangular"])
def test_gs_collapses_on_one_object(name):
    data = single(random_basis_change(ALGS[name], random.Random(3)))
    gs = gs_complex(data, 3)
    h = hochschild_complex(data, 3)
    assert betti(gs) == betti(h)


def test_gs_dims_on_point_zero_algebra():
    gs = gs_complex(single(zero_k()), 4)
    assert gs.dims() == [1, 2, 3, 4, 5, 6]


DIAGRAMS = {
    "point-dual": lambda: single(dual_numbers()),
    "arrow-unital": lambda: DiagramData(arrow_category(), {"a": unital_k(), "b": unital_k()},
                                        {"f": [[1]]}),
    "arrow-quotient": arrow_quotient,
    "square": square_diagram,
}


@pytest.mark.parametrize("name", sorted(DIAGRAMS))
def test_gs_matches_module_resolution(name):
    data = DIAGRAMS[name]()
    deg = 2 if name == "square" else 3
    gs, me = gs_complex(data, deg), modext_complex(data, deg)
    r = compare(gs, me)
    assert r.verdict == "identical"


_GS_CACHE = {}


@pytest.mark.parametrize("name", ["arrow-quotient", "square"])
@settings(max_examples=15)
@given(seed=st.integers(0, 10 ** 6))
def test_gs_against_bicomplex_formulas(name, seed):
    data = DIAGRAMS[name]()
    gs = _GS_CACHE.setdefault(name, gs_complex(data, 2))
    rng = random.Random(seed)
    n = rng.randrange(gs.top)
    theta = {lab: Fraction(rng.randint(-3, 3)) for lab in gs.labels[n]}
    vec = [theta[lab] for lab in gs.labels[n]]
    got = gs.matrix(n).apply(vec)
    for r, lab in enumerate(gs.labels[n + 1]):
        assert got.get(r, 0) == gs_oracle(data, theta, lab), lab


def test_known_diagram_tables():
    assert betti(gs_complex(arrow_quotient(), 4)) == {n: 1 for n in range(5)}
    assert betti(gs_complex(DIAGRAMS["arrow-unital"](), 4)) == {n: 0 for n in range(5)}


def _toy():
    labels = [["a"], ["b", "c"], ["d"]]
    d0 = ExactMatrix.from_dense([[1], [1]])
    d1 = ExactMatrix.from_dense([[1, -1]])
    return CochainComplex(labels, [d0, d1])


def test_compare_verdicts():
    c = _toy()
    assert compare(c, c).verdict == "identical"
    flipped = CochainComplex(c.labels, [ExactMatrix.from_dense([[1], [-1]]),
                                        ExactMatrix.from_dense([[1, 1]])])
    r = compare(c, flipped)
    assert r.verdict == "diagonal"
    assert {lab for (n, lab), s in r.intertwiner.items() if s < 0} in ({"c"}, {"a", "b", "d"})
    scaled = CochainComplex(c.labels, [ExactMatrix.from_dense([[2], [2]]),
                                       ExactMatrix.from_dense([[1, -1]])])
    assert compare(c, scaled).verdict == "betti_only"
    zero = CochainComplex(c.labels, [ExactMatrix(2, 1), ExactMatrix(1, 2)])
    r = compare(c, zero)
    assert r.verdict == "mismatch" and r.detail.startswith("H^0")


def test_permuted_labels_are_aligned():
    c = _toy()
    swapped = CochainComplex([["a"], ["c", "b"], ["d"]],
                             [ExactMatrix.from_dense([[1], [1]]), ExactMatrix.from_dense([[-1, 1]])])
    assert compare(c, swapped).verdict == "identical"


def test_complex_errors():
    with pytest.raises(NotAComplexError, match="at a"):
        CochainComplex([["a"], ["b"], ["c"]], [ExactMatrix.from_dense([[1]]), ExactMatrix.from_dense([[1]])])
    with pytest.raises(MarginError):
        betti(_toy(), 2)
    bad = DiagramData(arrow_category(), {"a": dual_numbers(), "b": unital_k()}, {"f": [[0, 1]]})
    with pytest.raises(InvalidDataError, match="not multiplicative"):
        gs_complex(bad, 2)
    with pytest.raises(InvalidDataError):
        hochschild_complex(arrow_quotient(), 2)


def test_thread_setting_does_not_change_results(monkeypatch):
    data = arrow_quotient()
    monkeypatch.setenv("OPCOHOM_THREADS", "1")
    one = betti(gs_complex(data, 3))
    monkeypatch.setenv("OPCOHOM_THREADS", "4")
    assert betti(gs_complex(data, 3)) == one


@pytest.mark.parametrize("name", KUNNETH_EXAMPLES)
def test_kunneth_examples(name):
    p, q, bounds = kunneth_example(name)
    r = kunneth_check(p, q, **bounds)
    assert r["report"] == []
    assert r["dims"]


def test_kunneth_reports_a_disagreement(monkeypatch):
    from opcohom import cohomology
    real = cohomology.reduced_homology_collection

    def inflated(o, max_degree):
        dims = real(o, max_degree)
        return {k: v + 1 for k, v in dims.items()}

    monkeypatch.setattr(cohomology, "reduced_homology_collection", inflated)
    p, q, bounds = kunneth_example("zero-differentials")
    report = kunneth_check(p, q, **bounds)["report"]
    assert report and all(v["product"] < v["expected"] for v in report)


def test_non_unital_algebra_accepted():
    alg = Algebra(1, [[[0]]])
    assert betti(der_complex_dr(single(alg), 2)) == {0: 1, 1: 1, 2: 1}
