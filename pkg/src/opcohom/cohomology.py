"""Cochain complexes of the three pipelines, Betti tables and comparison."""
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product
from typing import NamedTuple

from .based import MarginError, count_free_product, free_product, homology_dims, reduced_homology_collection
from .diagram import MultiMap, alpha_eval, chain_composite, compose_multimaps, face, nerve, validate
from .free_operad import adjoin_derivation, ass_infty
from .linalg import DimensionError, ExactMatrix, NotAComplexError, check_composable, rank
from .modules import mr, olmdr
from .trees import LEAF


class InvalidDataError(ValueError):
    pass


def _threads():
    try:
        return max(1, int(os.environ.get("OPCOHOM_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


class CochainComplex:
    """``labels[n]`` is the basis of C^n, ``d[n]`` the matrix C^n -> C^{n+1}.

    A complex assembled through degree ``top`` carries differentials
    d^0..d^{top-1}; Betti numbers are available in degrees 0..top-1.
    """

    def __init__(self, labels, d, name="complex", check=True):
        self.labels = [list(ls) for ls in labels]
        self.d = list(d)
        self.name = name
        if len(self.d) != len(self.labels) - 1:
            raise DimensionError("need one differential between consecutive degrees")
        for n, m in enumerate(self.d):
            if m.cols != len(self.labels[n]) or m.rows != len(self.labels[n + 1]):
                raise DimensionError(f"d^{n} has shape {m.rows}x{m.cols}, labels say "
                                     f"{len(self.labels[n + 1])}x{len(self.labels[n])}")
        if check:
            self.check()

    @property
    def top(self):
        return len(self.labels) - 1

    def dims(self):
        return [len(ls) for ls in self.labels]

    def check(self):
        for n in range(len(self.d) - 1):
            try:
                check_composable(self.d[n], self.d[n + 1])
            except NotAComplexError as e:
                raise NotAComplexError(e.column, f"{self.name}: d^{n + 1} d^{n} != 0 at "
                                                 f"{self.labels[n][e.column]}") from None

    def matrix(self, n):
        return self.d[n]


def betti(c, max_degree=None):
    """Betti table {degree: dim}; degree n needs the complex through n+1."""
    avail = c.top - 1
    if max_degree is None:
        max_degree = avail
    if max_degree > avail:
        raise MarginError(f"H^{max_degree} needs C^{max_degree + 1}; the complex stops at C^{c.top}")
    ranks = _pmap(rank, c.d)
    out = {}
    for n in range(max_degree + 1):
        r_out = ranks[n]
        r_in = ranks[n - 1] if n > 0 else 0
        out[n] = len(c.labels[n]) - r_out - r_in
    return out


# ------------------------------------------------------------------ evaluation kernel

def identity_map(dim):
    tensor = {}
    for i in range(dim):
        v = [Fraction(0)] * dim
        v[i] = Fraction(1)
        tensor[(i,)] = v
    return MultiMap(None, (None,), tensor)


def matrix_map(m, src_dim):
    tensor = {(i,): [row[i] for row in m] for i in range(src_dim)}
    return MultiMap(None, (None,), tensor)


def mult_map(alg, left=None, right=None):
    """(a, b) -> L(a) R(b) with optional matrices applied to the inputs."""
    lcols = [alg_col(left, i, alg.dim) for i in range(_src_dim(left, alg.dim))]
    rcols = [alg_col(right, i, alg.dim) for i in range(_src_dim(right, alg.dim))]
    tensor = {}
    for i, u in enumerate(lcols):
        for j, v in enumerate(rcols):
            tensor[(i, j)] = alg.mul(u, v)
    return MultiMap(None, (None, None), tensor)


def _src_dim(m, default):
    return default if m is None else (len(m[0]) if m else 0)


def alg_col(m, i, dim):
    if m is None:
        v = [Fraction(0)] * dim
        v[i] = Fraction(1)
        return v
    return [row[i] for row in m]


def _arity(mm):
    return len(next(iter(mm.tensor))) if mm.tensor else len(mm.ins)


def _in_dims(mm):
    n = _arity(mm)
    dims = [0] * n
    for idx in mm.tensor:
        for k in range(n):
            if idx[k] >= dims[k]:
                dims[k] = idx[k] + 1
    return dims


def _out_dim(mm):
    return len(next(iter(mm.tensor.values())))


def contribute(acc, coeff, top, slot, comp, bottoms, theta_out_dim):
    """Add ``coeff * top o_slot (theta_comp o (bottoms))`` as a linear map of theta.

    ``acc[(idx, k)][(comp, j, m)]`` collects the coefficient of theta_comp's
    entry (input multi-index j, output basis m) in output (idx, k).
    """
    tdims = _in_dims(top)
    pre_d, post_d = tdims[:slot - 1], tdims[slot:]
    bdims = [_in_dims(b) for b in bottoms]
    mid_d = [d for bd in bdims for d in bd]
    bsupp = []
    for b in bottoms:
        bsupp.append({idx: [(t, x) for t, x in enumerate(v) if x] for idx, v in b.tensor.items()})
    cuts = []
    pos = 0
    for bd in bdims:
        cuts.append((pos, pos + len(bd)))
        pos += len(bd)
    for pre in product(*(range(d) for d in pre_d)):
        for post in product(*(range(d) for d in post_d)):
            topvecs = [top.tensor[pre + (m,) + post] for m in range(theta_out_dim)]
            topsupp = [[(k, x) for k, x in enumerate(v) if x] for v in topvecs]
            if not any(topsupp):
                continue
            for mid in product(*(range(d) for d in mid_d)):
                choices = [bsupp[l][mid[a:b]] for l, (a, b) in enumerate(cuts)]
                if not all(choices):
                    continue
                idx = pre + mid + post
                for combo in product(*choices):
                    c = coeff
                    for _, x in combo:
                        c *= x
                    j = tuple(t for t, _ in combo)
                    for m, supp in enumerate(topsupp):
                        for k, x in supp:
                            row = acc.setdefault((idx, k), {})
                            key = (comp, j, m)
                            v = row.get(key, 0) + c * x
                            if v:
                                row[key] = v
                            else:
                                del row[key]


def _assemble(labels, builders, name):
    """``builders[n](acc)`` fills row dicts for C^{n+1} keyed like labels[n+1]."""
    mats = []

    def build(n):
        acc = {}
        builders[n](acc)
        rows_index = {lab: r for r, lab in enumerate(labels[n + 1])}
        cols_index = {lab: c for c, lab in enumerate(labels[n])}
        m = ExactMatrix(len(labels[n + 1]), len(labels[n]))
        for rlab, row in acc.items():
            r = rows_index[rlab]
            for clab, v in row.items():
                m.add(r, cols_index[clab], v)
        return m

    mats = _pmap(build, range(len(labels) - 1))
    return CochainComplex(labels, mats, name=name)


def _component_labels(comp, in_dims, out_dim):
    return [(comp, j, m) for j in product(*(range(d) for d in in_dims)) for m in range(out_dim)]


# ------------------------------------------------------------------ hom complexes

def _require_valid(data):
    bad = validate(data.cat, data)
    if bad:
        raise InvalidDataError("; ".join(bad))


def hom_complex(gens, d, data, max_degree, name="hom"):
    """Hom over the diagram operad from a free resolution into End_A, delta(theta) = theta o d.

    ``gens`` must contain every generator of degree <= max_degree + 1.
    """
    _require_valid(data)
    top = max_degree + 1
    have = max((g.degree for g in gens), default=-1)
    if have < top:
        raise MarginError(f"generators stop at degree {have}, degree {top} is needed")
    by_deg = [[g for g in gens if g.degree == n] for n in range(top + 1)]

    def comp(g):
        return (str(g.sigma), g.n)

    labels = []
    for n in range(top + 1):
        ls = []
        for g in by_deg[n]:
            ls.extend(_component_labels(comp(g), [data.dim(c) for c in g.ins], data.dim(g.out)))
        labels.append(ls)

    def builder(n):
        def fill(acc):
            for g in by_deg[n + 1]:
                gacc = {}
                for t, c in d.image(g).terms.items():
                    bottoms = [alpha_eval(b, data) for b in t.bottoms]
                    contribute(gacc, c, alpha_eval(t.top, data), t.slot, comp(t.gen), bottoms,
                               data.dim(t.gen.out))
                for (idx, k), row in gacc.items():
                    if row:
                        acc[(comp(g), idx, k)] = row
        return fill

    return _assemble(labels, [builder(n) for n in range(top)], name)


def modext_complex(data, max_degree):
    """Hom_A(MR, End_A) for a diagram of algebras."""
    gens, d = mr(data.cat, max_degree + 1)
    return hom_complex(gens, d, data, max_degree, name="modext")


def olmdr_complex(data, max_degree):
    """Hom over Ass from olMDR into End_A for a single algebra."""
    _single(data)
    cat, gens, d = olmdr(max_degree + 2)
    if data.cat.objects != cat.objects:
        raise InvalidDataError("olMDR expects the one-object category")
    return hom_complex(gens, d, data, max_degree, name="olmdr")


def _single(data):
    cat = data.cat
    if len(cat.objects) != 1 or len(cat.morphisms) != 1:
        raise InvalidDataError("a single algebra (one object, identity only) is required")


# ------------------------------------------------------------------ GS and Hochschild

def _hoch_terms(acc, comp, m, sign, alg_in, alg_out, u, dim_in):
    """Signed Hochschild coboundary of components with m inputs, A_in -> A_out bimodule via u."""
    s1 = -1 if (m + 1) & 1 else 1
    ident = identity_map(dim_in)
    lm = mult_map(alg_out, left=u)
    rm = mult_map(alg_out, right=u)
    contribute(acc, sign * s1, lm, 2, comp, [ident] * m, alg_out.dim)
    mu_in = mult_map(alg_in)
    for k in range(1, m + 1):
        sk = -1 if (m + 1 - k) & 1 else 1
        bots = [ident] * (k - 1) + [mu_in] + [ident] * (m - k)
        contribute(acc, sign * sk, identity_map(alg_out.dim), 1, comp, bots, alg_out.dim)
    contribute(acc, sign, rm, 1, comp, [ident] * m, alg_out.dim)


def gs_complex(data, max_degree):
    """Totalised bicomplex C^{p,q} = prod_sigma Hom(A_in^{q+1}, A_out), delta_V + delta_H."""
    _require_valid(data)
    cat = data.cat
    top = max_degree + 1
    chains = {p: nerve(cat, p) for p in range(top + 1)}
    labels = []
    for n in range(top + 1):
        ls = []
        for m in range(1, n + 2):
            p = n - (m - 1)
            for sigma in chains[p]:
                ls.extend(_component_labels((str(sigma), m), [data.dim(sigma.start)] * m,
                                            data.dim(sigma.end)))
        labels.append(ls)

    def builder(n):
        def fill(acc):
            for m in range(1, n + 3):
                p = n + 1 - (m - 1)
                for sigma in chains[p]:
                    gacc = {}
                    a_in, a_out = data.algebras[sigma.start], data.algebras[sigma.end]
                    # vertical: sigma keeps its chain, q grows by one
                    if m >= 2:
                        u = data.matrix(chain_composite(cat, sigma))
                        sp = -1 if p & 1 else 1
                        _hoch_terms(gacc, (str(sigma), m - 1), m - 1, sp, a_in, a_out, u, a_in.dim)
                    # horizontal: sigma has length p >= 1, components of length p - 1
                    if p >= 1:
                        f1, fp = sigma.maps[0], sigma.maps[-1]
                        sp = -1 if p & 1 else 1
                        s0 = face(cat, sigma, 0)
                        fmap = matrix_map(data.matrix(f1), a_in.dim)
                        contribute(gacc, sp, identity_map(a_out.dim), 1, (str(s0), m),
                                   [fmap] * m, a_out.dim)
                        for i in range(1, p):
                            si = face(cat, sigma, i)
                            contribute(gacc, -1 if (p - i) & 1 else 1, identity_map(a_out.dim), 1,
                                       (str(si), m), [identity_map(a_in.dim)] * m, a_out.dim)
                        sl = face(cat, sigma, p)
                        mid = data.algebras[sl.end]
                        contribute(gacc, 1, matrix_map(data.matrix(fp), mid.dim), 1, (str(sl), m),
                                   [identity_map(a_in.dim)] * m, mid.dim)
                    for (idx, k), row in gacc.items():
                        if row:
                            acc[((str(sigma), m), idx, k)] = row
        return fill

    return _assemble(labels, [builder(n) for n in range(top)], "gs")


def hochschild_complex(data, max_degree):
    """C^n = Hom(A^{n+1}, A) with the augmented Hochschild coboundary."""
    _require_valid(data)
    _single(data)
    c = data.cat.objects[0]
    alg = data.algebras[c]
    top = max_degree + 1
    labels = [_component_labels(("hoch", n + 1), [alg.dim] * (n + 1), alg.dim) for n in range(top + 1)]

    def builder(n):
        def fill(acc):
            gacc = {}
            _hoch_terms(gacc, ("hoch", n + 1), n + 1, 1, alg, alg, None, alg.dim)
            for (idx, k), row in gacc.items():
                if row:
                    acc[(("hoch", n + 2), idx, k)] = row
        return fill

    return _assemble(labels, [builder(n) for n in range(top)], "hochschild")


def _eval_tree(t, alg, mu):
    """Evaluate an X-decorated tree with at most one weighted (theta) vertex.

    x^2 acts as ``mu`` and x^n (n >= 3) as zero.  Returns None for zero,
    ``(map, None)`` without a theta vertex, or ``(top, (slot, h, bottoms))``.
    """
    if t is LEAF:
        return identity_map(alg.dim), None
    g, kids = t
    if g.weight:
        bottoms = []
        for kid in kids:
            r = _eval_tree(kid, alg, mu)
            if r is None:
                return None
            if r[1] is not None:
                raise ValueError("term carries more than one theta vertex")
            bottoms.append(r[0])
        return identity_map(alg.dim), (1, g, bottoms)
    if g.arity != 2:
        return None
    parts = []
    for kid in kids:
        r = _eval_tree(kid, alg, mu)
        if r is None:
            return None
        parts.append(r)
    acc = mu
    for pos in range(len(parts), 0, -1):
        if parts[pos - 1][0] is not None:
            acc = compose_multimaps(acc, pos, parts[pos - 1][0])
    info = None
    offset = 0
    for sub, sub_info in parts:
        if sub_info is not None:
            if info is not None:
                raise ValueError("term carries more than one theta vertex")
            slot, h, bottoms = sub_info
            info = (offset + slot, h, bottoms)
        offset += _arity(sub)
    return acc, info


def der_complex_dr(data, max_degree):
    """Augmented derivation complex read off the resolution DR(Ass_infty).

    x^2 acts as the product, x^n (n >= 3) as zero; phi carries C^0 and
    xbar^{n+1} carries C^n.  The differential is -(theta o d_DR).
    """
    _require_valid(data)
    _single(data)
    alg = data.algebras[data.cat.objects[0]]
    top = max_degree + 1
    x_coll, dx, _ = ass_infty(top + 2)
    coll, d_dr, _ = adjoin_derivation(x_coll, dx)
    mu = mult_map(alg)
    slots = {}
    for g in coll:
        if g.weight:
            slots[g] = ("hoch", g.arity)
    by_deg = {n: [g for g in slots if g.degree == n] for n in range(top + 1)}
    labels = []
    for n in range(top + 1):
        ls = []
        for g in sorted(by_deg[n], key=lambda g: g.arity):
            ls.extend(_component_labels(slots[g], [alg.dim] * g.arity, alg.dim))
        labels.append(ls)

    def builder(n):
        def fill(acc):
            for g in by_deg[n + 1]:
                gacc = {}
                for t, c in d_dr.image(g).terms.items():
                    r = _eval_tree(t, alg, mu)
                    if r is None:
                        continue
                    top_map, (slot, h, bottoms) = r
                    contribute(gacc, -c, top_map, slot, slots[h], bottoms, alg.dim)
                for (idx, k), row in gacc.items():
                    if row:
                        acc[(slots[g], idx, k)] = row
        return fill

    return _assemble(labels, [builder(n) for n in range(top)], "der-complex")


# ------------------------------------------------------------------ comparison

class CompareResult(NamedTuple):
    verdict: str
    intertwiner: dict
    betti1: dict
    betti2: dict
    detail: str


def _aligned(c1, c2):
    if c1.top != c2.top:
        raise DimensionError(f"complexes stop at degrees {c1.top} and {c2.top}")
    perms = []
    for n in range(c1.top + 1):
        if sorted(c1.labels[n], key=repr) != sorted(c2.labels[n], key=repr):
            raise DimensionError(f"basis labels differ in degree {n}")
        pos = {lab: k for k, lab in enumerate(c2.labels[n])}
        perms.append([pos[lab] for lab in c1.labels[n]])
    mats = []
    for n, m in enumerate(c2.d):
        rinv = {old: new for new, old in enumerate(perms[n + 1])}
        cinv = {old: new for new, old in enumerate(perms[n])}
        out = ExactMatrix(m.rows, m.cols)
        for (r, c), v in m.entries.items():
            out.add(rinv[r], cinv[c], v)
        mats.append(out)
    return mats


def compare(c1, c2):
    """identical | diagonal (a +-1 intertwiner) | betti_only | mismatch."""
    mats2 = _aligned(c1, c2)
    if all(a == b for a, b in zip(c1.d, mats2)):
        return CompareResult("identical", {}, {}, {}, "")
    # sign constraints s(row) * s(col) = c1 / c2 on each nonzero entry
    edges = {}
    ok = True
    for n, (a, b) in enumerate(zip(c1.d, mats2)):
        ea, eb = a.entries, b.entries
        for key in sorted(set(ea) | set(eb)):
            x, y = ea.get(key, 0), eb.get(key, 0)
            if x == y:
                s = 1
            elif x == -y:
                s = -1
            else:
                ok = False
                break
            r, c = key
            u, v = (n + 1, r), (n, c)
            edges.setdefault(u, []).append((v, s))
            edges.setdefault(v, []).append((u, s))
        if not ok:
            break
    sign = {}
    if ok:
        for start in sorted(edges):
            if start in sign:
                continue
            sign[start] = 1
            queue = deque([start])
            while queue and ok:
                u = queue.popleft()
                for v, s in edges[u]:
                    want = sign[u] * s
                    if v not in sign:
                        sign[v] = want
                        queue.append(v)
                    elif sign[v] != want:
                        ok = False
                        break
            if not ok:
                break
    b1, b2 = betti(c1), betti(c2)
    if ok:
        inter = {}
        for n in range(c1.top + 1):
            for k, lab in enumerate(c1.labels[n]):
                inter[(n, lab)] = sign.get((n, k), 1)
        return CompareResult("diagonal", inter, b1, b2, "")
    if b1 == b2:
        return CompareResult("betti_only", {}, b1, b2, "")
    first = next(n for n in b1 if b1[n] != b2.get(n))
    return CompareResult("mismatch", {}, b1, b2, f"H^{first}: {b1[first]} vs {b2.get(first)}")


# ------------------------------------------------------------------ Kunneth

def kunneth_check(p, q, max_arity, max_degree, max_vertices):
    """Compare graded dims of H(p * q) with those of H(p) * H(q) within bounds."""
    for op in (p, q):
        if op.max_degree is not None and op.max_degree < max_degree + 1:
            raise MarginError(f"{op.name} is truncated at degree {op.max_degree}, "
                              f"{max_degree + 1} is needed")
    fp = free_product(p, q, max_arity, max_degree + 1, max_vertices)
    lhs = {}
    for sig in fp.signatures():
        if len(sig[1]) > max_arity:
            continue
        for deg in range(max_degree + 1):
            h = homology_dims(fp, sig, deg)
            if h:
                lhs[(sig, deg)] = h
    hp = reduced_homology_collection(p, max_degree)
    hq = reduced_homology_collection(q, max_degree)
    rhs = count_free_product(hp, hq, fp.colours, max_vertices, max_arity, max_degree)
    rhs = {k: v for k, v in rhs.items() if v}
    report = []
    for key in sorted(set(lhs) | set(rhs), key=str):
        if lhs.get(key, 0) != rhs.get(key, 0):
            (out, ins), deg = key
            report.append({"signature": [str(out), [str(c) for c in ins]], "degree": deg,
                           "product": lhs.get(key, 0), "expected": rhs.get(key, 0)})
    return {"report": report, "dims": {f"{k[0][0]}<-{','.join(map(str, k[0][1]))}|{k[1]}": v
                                       for k, v in sorted(lhs.items(), key=lambda kv: str(kv[0]))}}


__all__ = [
    "CochainComplex", "betti", "hom_complex", "modext_complex", "olmdr_complex", "gs_complex",
    "hochschild_complex", "der_complex_dr", "compare", "CompareResult", "kunneth_check",
    "InvalidDataError", "contribute",
]
