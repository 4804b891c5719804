"""Finite truncations of dg-operads with an explicit basis, and free products."""
from fractions import Fraction
from typing import NamedTuple

from .free_operad import UnitTree, compose_trees, derive_tree, enumerate_trees, tree_str
from .linalg import ExactMatrix, betti_at
from .trees import LEAF


class BasisItem(NamedTuple):
    out: object
    ins: tuple
    degree: int
    weight: int = 0

    @property
    def sig(self):
        return self.out, self.ins


class MarginError(ValueError):
    pass


class ComplementError(ValueError):
    pass


class BasedOperad:
    """An operad truncated to a finite basis.

    ``compose(a, i, b)`` returns a dict ``label -> Fraction`` (terms outside
    the basis are dropped), ``diff[label]`` is the differential of a basis
    element.  ``max_degree=None`` means the truncation is complete in the
    degree direction.
    """

    def __init__(self, colours, items, units, compose, diff, max_degree=None, name=None, fmt=str):
        self.colours = tuple(colours)
        self.items = dict(items)
        self.units = dict(units)
        self._compose = compose
        self.diff = diff
        self.max_degree = max_degree
        self.name = name or "operad"
        self.fmt = fmt
        self._cache = {}
        self._pieces = {}
        for lab, it in self.items.items():
            self._pieces.setdefault((it.sig, it.degree, it.weight), []).append(lab)
        for key in self._pieces:
            self._pieces[key].sort(key=self.fmt)

    def compose(self, a, i, b):
        key = (a, i, b)
        res = self._cache.get(key)
        if res is None:
            ia, ib = self.items[a], self.items[b]
            if not 1 <= i <= len(ia.ins):
                raise IndexError(f"input {i} out of range")
            if ia.ins[i - 1] != ib.out:
                raise ValueError(f"colour mismatch: {ia.ins[i - 1]} vs {ib.out}")
            if a == self.units.get(ia.out):
                res = {b: Fraction(1)}
            elif b == self.units.get(ib.out):
                res = {a: Fraction(1)}
            else:
                res = {k: v for k, v in self._compose(a, i, b).items() if k in self.items}
            self._cache[key] = res
        return res

    def is_unit(self, label):
        it = self.items[label]
        return self.units.get(it.out) == label

    def nonunits(self):
        return [lab for lab in self.items if not self.is_unit(lab)]

    def signatures(self):
        return sorted({it.sig for it in self.items.values()}, key=str)

    def piece(self, sig, degree, weight=None):
        if weight is None:
            out = []
            for (s, d, w), labs in self._pieces.items():
                if s == sig and d == degree:
                    out.extend(labs)
            return sorted(out, key=self.fmt)
        return list(self._pieces.get((sig, degree, weight), []))

    def check_complement(self):
        """Units must be d-closed and no differential may hit a unit."""
        bad = []
        for c, u in self.units.items():
            if self.diff.get(u):
                bad.append(f"d(1[{c}]) != 0")
        unit_set = set(self.units.values())
        for lab, img in self.diff.items():
            hit = unit_set.intersection(img)
            if hit:
                bad.append(f"d({self.fmt(lab)}) hits a unit")
        return bad

    def differential_matrix(self, sig, degree, weight=None):
        """Matrix of d from the degree piece to the degree-1 piece."""
        src = self.piece(sig, degree, weight)
        tgt = self.piece(sig, degree - 1, weight)
        index = {lab: k for k, lab in enumerate(tgt)}
        m = ExactMatrix(len(tgt), len(src))
        for j, lab in enumerate(src):
            for t, c in self.diff.get(lab, {}).items():
                if t in index:
                    m.add(index[t], j, c)
        return m


def truncate_to_based(gens, d, max_arity, max_degree=None, max_vertices=None, max_weight=None):
    """Basis trees of a free dg-operad within the given bounds, plus units."""
    if max_vertices is None:
        unary = [g for g in gens if g.arity <= 1]
        if not unary:
            max_vertices = max(max_arity - 1, 1)
        elif max_weight is not None and all(g.weight > 0 for g in unary):
            max_vertices = max(max_arity - 1, 0) + max_weight
        else:
            raise ValueError("arity <= 1 generators need an explicit vertex bound")
    items = {}
    for t, sig, deg, w in enumerate_trees(gens, max_vertices, max_arity, max_degree, max_weight):
        if len(sig[1]) > max_arity:
            continue
        if max_degree is not None and deg > max_degree:
            continue
        if max_weight is not None and w > max_weight:
            continue
        items[t] = BasisItem(sig[0], sig[1], deg, w)
    units = {}
    for c in gens.colours:
        u = UnitTree(c)
        items[u] = BasisItem(c, (c,), 0, 0)
        units[c] = u

    def compose(a, i, b):
        s, t = compose_trees(a, i, b)
        return {t: Fraction(s)}

    diff = {}
    for t in items:
        if isinstance(t, UnitTree):
            continue
        img = derive_tree(d, t)
        kept = {k: v for k, v in img.terms.items() if k in items}
        if kept:
            diff[t] = kept
    return BasedOperad(gens.colours, items, units, compose, diff, max_degree,
                       name="free", fmt=tree_str)


def homology_dims(o, sig, degree, weight=None):
    """Dimension of the homology of one graded piece."""
    if o.max_degree is not None and degree + 1 > o.max_degree:
        raise MarginError(
            f"degree {degree} needs the truncation to reach degree {degree + 1}, "
            f"it stops at {o.max_degree}")
    d_out = o.differential_matrix(sig, degree, weight)
    d_in = o.differential_matrix(sig, degree + 1, weight)
    return betti_at(d_in, d_out)


# ---------------------------------------------------------------- free products

def _fp_nodes(t, path=()):
    """Preorder list of (path, node)."""
    out = [(path, t)]
    for j, c in enumerate(t[1], 1):
        if c is not LEAF:
            out.extend(_fp_nodes(c, path + (j,)))
    return out


def _fp_get(t, path):
    for j in path:
        t = t[1][j - 1]
    return t


def _fp_set(t, path, new):
    if not path:
        return new
    j = path[0]
    kids = list(t[1])
    kids[j - 1] = _fp_set(kids[j - 1], path[1:], new)
    return (t[0], tuple(kids))


class FreeProduct:
    """Helpers for the free product of two based operads ``A`` and ``B``."""

    def __init__(self, a, b):
        self.ops = {"A": a, "B": b}

    def fmt(self, t):
        if isinstance(t, UnitTree):
            return f"1[{t.colour}]"
        side, lab = t[0]
        head = f"{side}:{self.ops[side].fmt(lab)}"
        if not t[1]:
            return head
        return head + "(" + ",".join("_" if c is LEAF else self.fmt(c) for c in t[1]) + ")"

    def item(self, dec):
        side, lab = dec
        return self.ops[side].items[lab]

    def deg(self, t):
        if t is LEAF or isinstance(t, UnitTree):
            return 0
        return self.item(t[0]).degree + sum(self.deg(c) for c in t[1])

    def signature(self, t):
        if isinstance(t, UnitTree):
            return t.colour, (t.colour,)
        it = self.item(t[0])
        ins = []
        for c, col in zip(t[1], it.ins):
            if c is LEAF:
                ins.append(col)
            else:
                ins.extend(self.signature(c)[1])
        return it.out, tuple(ins)

    def leaf_tail_degree(self, t, i):
        """Total degree of the vertices after leaf ``i`` in preorder."""
        seen = 0
        tail = 0
        found = False

        def walk(s):
            nonlocal seen, tail, found
            for c in s[1]:
                if c is LEAF:
                    seen += 1
                    if seen == i:
                        found = True
                elif found:
                    tail += self.deg(c)
                else:
                    walk(c)

        walk(t)
        return tail

    def graft(self, t1, i, t2):
        seen = [0]

        def walk(s):
            kids = []
            for c in s[1]:
                if c is LEAF:
                    seen[0] += 1
                    kids.append(t2 if seen[0] == i else LEAF)
                elif seen[0] >= i:
                    kids.append(c)
                else:
                    kids.append(walk(c))
            return (s[0], tuple(kids))

        return walk(t1)

    def reduce(self, t):
        """Contract same-side edges and delete unit vertices."""
        if isinstance(t, UnitTree):
            return {t: Fraction(1)}
        for path, node in _fp_nodes(t):
            side, lab = node[0]
            op = self.ops[side]
            if op.is_unit(lab):
                child = node[1][0]
                if not path:
                    new = UnitTree(op.items[lab].out) if child is LEAF else child
                else:
                    new = _fp_set(t, path, child)
                return self.reduce(new)
            for leg, child in enumerate(node[1], 1):
                if child is LEAF or child[0][0] != side:
                    continue
                between = sum(self.deg(c) for c in node[1][:leg - 1])
                sign = -1 if (between * op.items[child[0][1]].degree) & 1 else 1
                out = {}
                kids_before, kids_after = node[1][:leg - 1], node[1][leg:]
                for lab2, c in op.compose(lab, leg, child[0][1]).items():
                    merged = ((side, lab2), kids_before + child[1] + kids_after)
                    for r, v in self.reduce(_fp_set(t, path, merged)).items():
                        w = out.get(r, 0) + sign * c * v
                        if w:
                            out[r] = w
                        else:
                            out.pop(r, None)
                return out
        return {t: Fraction(1)}

    def compose(self, t1, i, t2):
        if isinstance(t1, UnitTree):
            return {t2: Fraction(1)}
        if isinstance(t2, UnitTree):
            return {t1: Fraction(1)}
        sign = -1 if (self.leaf_tail_degree(t1, i) * self.deg(t2)) & 1 else 1
        return {k: sign * v for k, v in self.reduce(self.graft(t1, i, t2)).items()}

    def differential(self, t):
        if isinstance(t, UnitTree):
            return {}
        out = {}
        before = 0
        for path, node in _fp_nodes(t):
            side, lab = node[0]
            op = self.ops[side]
            sign = -1 if before & 1 else 1
            for lab2, c in op.diff.get(lab, {}).items():
                new = _fp_set(t, path, ((side, lab2), node[1]))
                w = out.get(new, 0) + sign * c
                if w:
                    out[new] = w
                else:
                    out.pop(new, None)
            before += op.items[lab].degree
        return out


def alternating_trees(decorations, colours, max_vertices, max_arity, max_degree):
    """Trees whose vertices carry ``(side, key)`` with adjacent sides distinct.

    ``decorations`` maps side -> {key: BasisItem}.
    """
    by_out = {}
    for side, decs in decorations.items():
        for key, it in decs.items():
            by_out.setdefault(it.out, []).append(((side, key), it))
    for lst in by_out.values():
        lst.sort(key=lambda kv: (kv[0][0], str(kv[0][1])))
    prune = all(it.ins for decs in decorations.values() for it in decs.values())
    memo = {}

    def build(col, v, avoid):
        key = (col, v, avoid)
        if key in memo:
            return memo[key]
        res = []
        for dec, it in by_out.get(col, ()):
            if dec[0] == avoid:
                continue
            if prune and len(it.ins) > max_arity:
                continue
            for kids in fill(it.ins, v - 1, dec[0]):
                res.append((dec, kids))
        memo[key] = res
        return res

    def fill(cols, budget, side):
        if not cols:
            if budget == 0:
                yield ()
            return
        head, rest = cols[0], cols[1:]
        for k in range(budget + 1):
            firsts = [LEAF] if k == 0 else build(head, k, side)
            for f in firsts:
                for tail in fill(rest, budget - k, side):
                    yield (f,) + tail

    for v in range(1, max_vertices + 1):
        for col in colours:
            yield from build(col, v, None)


def free_product(p, q, max_arity, max_degree, max_vertices):
    """Free product ``p * q`` truncated to alternating trees within bounds."""
    for op in (p, q):
        bad = op.check_complement()
        if bad:
            raise ComplementError(f"{op.name}: " + "; ".join(bad))
    fp = FreeProduct(p, q)
    decs = {"A": {lab: p.items[lab] for lab in p.nonunits()},
            "B": {lab: q.items[lab] for lab in q.nonunits()}}
    colours = tuple(dict.fromkeys(p.colours + q.colours))
    items = {}
    for t in alternating_trees(decs, colours, max_vertices, max_arity, max_degree):
        sig = fp.signature(t)
        deg = fp.deg(t)
        if len(sig[1]) > max_arity or (max_degree is not None and deg > max_degree):
            continue
        items[t] = BasisItem(sig[0], sig[1], deg, 0)
    units = {}
    for c in colours:
        u = UnitTree(c)
        items[u] = BasisItem(c, (c,), 0, 0)
        units[c] = u
    diff = {}
    for t in items:
        img = {k: v for k, v in fp.differential(t).items() if k in items}
        if img:
            diff[t] = img
    md = max_degree
    for op in (p, q):
        if op.max_degree is not None:
            md = op.max_degree if md is None else min(md, op.max_degree)
    out = BasedOperad(colours, items, units, fp.compose, diff, md, name=f"{p.name}*{q.name}", fmt=fp.fmt)
    out.structure = fp
    return out


def reduced_homology_collection(o, max_degree):
    """dims of H of the non-unit part, as {(sig, degree): dim}."""
    out = {}
    unit_set = set(o.units.values())
    sigs = {it.sig for lab, it in o.items.items() if lab not in unit_set}
    for sig in sorted(sigs, key=str):
        for deg in range(0, max_degree + 1):
            d_out = _reduced_matrix(o, sig, deg, unit_set)
            d_in = _reduced_matrix(o, sig, deg + 1, unit_set)
            h = betti_at(d_in, d_out)
            if h:
                out[(sig, deg)] = h
    return out


def _reduced_matrix(o, sig, degree, unit_set):
    src = [x for x in o.piece(sig, degree) if x not in unit_set]
    tgt = [x for x in o.piece(sig, degree - 1) if x not in unit_set]
    index = {lab: k for k, lab in enumerate(tgt)}
    m = ExactMatrix(len(tgt), len(src))
    for j, lab in enumerate(src):
        for t, c in o.diff.get(lab, {}).items():
            if t in index:
                m.add(index[t], j, c)
    return m


def count_free_product(dims_a, dims_b, colours, max_vertices, max_arity, max_degree):
    """Graded dims of the free product of two collections given by dims.

    Returns {(sig, degree): dim}, units included.
    """
    decs = {}
    mult = {}
    for side, dims in (("A", dims_a), ("B", dims_b)):
        decs[side] = {}
        for (sig, deg), n in dims.items():
            key = (sig, deg)
            decs[side][key] = BasisItem(sig[0], tuple(sig[1]), deg, 0)
            mult[(side, key)] = n
    out = {}
    for t in alternating_trees(decs, colours, max_vertices, max_arity, max_degree):
        sig, deg, m = _count_info(t, decs, mult)
        if len(sig[1]) > max_arity or deg > max_degree:
            continue
        out[(sig, deg)] = out.get((sig, deg), 0) + m
    for c in colours:
        key = ((c, (c,)), 0)
        out[key] = out.get(key, 0) + 1
    return out


def _count_info(t, decs, mult):
    side, key = t[0]
    it = decs[side][key]
    ins = []
    deg = it.degree
    m = mult[(side, key)]
    for c, col in zip(t[1], it.ins):
        if c is LEAF:
            ins.append(col)
        else:
            s2, d2, m2 = _count_info(c, decs, mult)
            ins.extend(s2[1])
            deg += d2
            m *= m2
    return (it.out, tuple(ins)), deg, m
