"""Free coloured dg-operads on finite generator collections.

Basis trees are nested tuples from :mod:`trees` whose labels are
:class:`Generator` values; the vertex order is always the canonical one,
so a tree stands for ``T(x_1, ..., x_n)`` composed in preorder.
"""
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from . import trees
from .trees import LEAF


class Generator(NamedTuple):
    name: str
    out: object
    ins: tuple
    degree: int
    weight: int = 0

    @property
    def arity(self):
        return len(self.ins)

    def __str__(self):
        return self.name


class UnitTree(NamedTuple):
    colour: object


class GeneratorCollection:
    def __init__(self, generators, colours=None):
        self.generators = list(generators)
        self.by_name = {}
        for g in self.generators:
            if g.name in self.by_name:
                raise ValueError(f"duplicate generator name {g.name!r}")
            self.by_name[g.name] = g
        used = {g.out for g in self.generators} | {c for g in self.generators for c in g.ins}
        self.colours = tuple(colours) if colours is not None else tuple(sorted(used, key=str))
        missing = used - set(self.colours)
        if missing:
            raise ValueError(f"undeclared colours {sorted(map(str, missing))}")

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, name):
        return self.by_name[name]

    def __add__(self, other):
        cols = list(self.colours) + [c for c in other.colours if c not in self.colours]
        return GeneratorCollection(self.generators + other.generators, cols)


@lru_cache(maxsize=None)
def tree_degree(t):
    if isinstance(t, UnitTree):
        return 0
    return t[0].degree + sum(tree_degree(c) for c in t[1] if c is not LEAF)


@lru_cache(maxsize=None)
def tree_weight(t):
    if isinstance(t, UnitTree):
        return 0
    return t[0].weight + sum(tree_weight(c) for c in t[1] if c is not LEAF)


@lru_cache(maxsize=None)
def tree_signature(t):
    """(output colour, input colours) of a basis tree."""
    if isinstance(t, UnitTree):
        return t.colour, (t.colour,)
    ins = []
    for c, col in zip(t[1], t[0].ins):
        if c is LEAF:
            ins.append(col)
        else:
            ins.extend(tree_signature(c)[1])
    return t[0].out, tuple(ins)


@lru_cache(maxsize=None)
def _degrees_from_leaf(t, i):
    k = trees.vertices_before_leaf(t, i)
    return sum(g.degree for g in trees.labels(t)[k:])


@lru_cache(maxsize=None)
def compose_trees(t1, i, t2):
    """``t1 o_i t2`` as ``(sign, tree)`` in canonical order."""
    if isinstance(t1, UnitTree):
        return 1, t2
    if isinstance(t2, UnitTree):
        return 1, t1
    tail = _degrees_from_leaf(t1, i)
    sign = -1 if (tail * tree_degree(t2)) & 1 else 1
    return sign, trees.graft(t1, i, t2)


def tree_str(t):
    if isinstance(t, UnitTree):
        return f"1[{t.colour}]"
    if not t[1]:
        return t[0].name
    kids = ",".join("_" if c is LEAF else tree_str(c) for c in t[1])
    return f"{t[0].name}({kids})"


def _fmt_coef(c, first):
    if c == 1:
        return "" if first else " + "
    if c == -1:
        return "-" if first else " - "
    if c < 0:
        return f"{c}*" if first else f" - {-c}*"
    return f"{c}*" if first else f" + {c}*"


class FreeElement:
    """Exact linear combination of canonical basis trees."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {t: Fraction(c) for t, c in (terms or {}).items() if c}

    @classmethod
    def generator(cls, g):
        return cls({trees.corolla(g, g.arity): 1})

    @classmethod
    def unit(cls, colour):
        return cls({UnitTree(colour): 1})

    @classmethod
    def tree(cls, t, coef=1):
        return cls({t: coef})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, FreeElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for t, c in other.terms.items():
            v = out.get(t, 0) + c
            if v:
                out[t] = v
            else:
                out.pop(t, None)
        res = FreeElement()
        res.terms = out
        return res

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        res = FreeElement()
        res.terms = {t: -c for t, c in self.terms.items()}
        return res

    def __rmul__(self, k):
        k = Fraction(k)
        if not k:
            return FreeElement()
        res = FreeElement()
        res.terms = {t: k * c for t, c in self.terms.items()}
        return res

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def degrees(self):
        return {tree_degree(t) for t in self.terms}

    def degree(self):
        ds = self.degrees()
        if len(ds) != 1:
            raise ValueError("element is zero or not homogeneous")
        return ds.pop()

    def signatures(self):
        return {tree_signature(t) for t in self.terms}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: tree_str(kv[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, (t, c) in enumerate(self.sorted_terms()):
            parts.append(_fmt_coef(c, k == 0) + tree_str(t))
        return "".join(parts)


class CompositionError(ValueError):
    pass


def compose_free(a, i, b):
    """Bilinear partial composition ``a o_i b``."""
    out = {}
    for t1, c1 in a.terms.items():
        ins = tree_signature(t1)[1]
        if not 1 <= i <= len(ins):
            raise CompositionError(f"input index {i} out of range 1..{len(ins)}")
        for t2, c2 in b.terms.items():
            if tree_signature(t2)[0] != ins[i - 1]:
                raise CompositionError(
                    f"colour mismatch: input {i} is {ins[i - 1]}, output is {tree_signature(t2)[0]}")
            s, t = compose_trees(t1, i, t2)
            v = out.get(t, 0) + s * c1 * c2
            if v:
                out[t] = v
            else:
                out.pop(t, None)
    res = FreeElement()
    res.terms = out
    return res


def _signature_of(e):
    sigs = e.signatures()
    if len(sigs) != 1:
        raise CompositionError("decoration is zero or of mixed signature")
    return next(iter(sigs))


def substitute(t, decorations):
    """Tree composition of FreeElements along the canonical order of ``t``."""
    return trees.tree_compose(trees.canonical_order(t), decorations, compose_free)


class DerivationRule(NamedTuple):
    images: dict
    degree: int

    def image(self, g):
        try:
            return self.images[g]
        except KeyError:
            raise KeyError(f"no image for generator {g.name}") from None


class RuleError(ValueError):
    pass


def validate_rule(rule, gens=None):
    """Images must have the generator's signature and shifted degree."""
    problems = []
    items = rule.images.items() if gens is None else ((g, rule.images.get(g)) for g in gens)
    for g, img in items:
        if img is None:
            problems.append(f"{g.name}: missing image")
            continue
        for t in img.terms:
            if tree_signature(t) != (g.out, g.ins):
                problems.append(f"{g.name}: image term {tree_str(t)} has the wrong signature")
            if tree_degree(t) != g.degree + rule.degree:
                problems.append(
                    f"{g.name}: image term {tree_str(t)} has degree {tree_degree(t)}, "
                    f"expected {g.degree + rule.degree}")
    return problems


def derive_tree(rule, t):
    if isinstance(t, UnitTree):
        return FreeElement()
    labs = trees.labels(t)
    corollas = [FreeElement.generator(g) for g in labs]
    out = FreeElement()
    before = 0
    for j, g in enumerate(labs):
        img = rule.image(g)
        if img:
            decs = corollas[:j] + [img] + corollas[j + 1:]
            term = substitute(t, decs)
            if (rule.degree * before) & 1:
                term = -term
            out = out + term
        before += g.degree
    return out


def derive(rule, e):
    """Extend ``rule`` from generators to ``e`` by the Leibniz rule."""
    out = FreeElement()
    for t, c in e.terms.items():
        out = out + c * derive_tree(rule, t)
    return out


def check_d_squared(gens, d, max_arity):
    """Generators whose d(d(g)) survives; an empty list certifies d^2 = 0."""
    if d.degree != -1:
        raise RuleError(f"a differential has degree -1, got {d.degree}")
    todo = [g for g in gens if g.arity <= max_arity]
    problems = validate_rule(d, todo)
    if problems:
        raise RuleError("; ".join(problems))
    report = []
    for g in todo:
        dd = derive(d, derive(d, FreeElement.generator(g)))
        if dd:
            report.append({"generator": g.name, "terms": repr(dd)})
    return report


def enumerate_trees(gens, max_vertices, max_arity=None, max_degree=None, max_weight=None):
    """All canonical trees within the bounds, grouped by output colour.

    Yields ``(tree, signature, degree, weight)``; leaf counts are pruned
    only when no arity-0 generator exists.
    """
    prune = all(g.arity > 0 for g in gens)
    by_out = {}
    for g in gens:
        by_out.setdefault(g.out, []).append(g)
    memo = {}

    def build(col, v):
        # trees with root colour col and exactly v vertices
        key = (col, v)
        if key in memo:
            return memo[key]
        res = []
        for g in by_out.get(col, ()):
            if prune and max_arity is not None and g.arity > max_arity:
                continue
            for kids in _fill(g.ins, v - 1):
                t = (g, kids)
                sig = tree_signature(t)
                if prune and max_arity is not None and len(sig[1]) > max_arity:
                    continue
                deg = tree_degree(t)
                if max_degree is not None and deg > max_degree and all(x.degree >= 0 for x in gens):
                    continue
                w = tree_weight(t)
                if max_weight is not None and w > max_weight:
                    continue
                res.append(t)
        memo[key] = res
        return res

    def _fill(cols, budget):
        if not cols:
            if budget == 0:
                yield ()
            return
        head, rest = cols[0], cols[1:]
        for k in range(budget + 1):
            firsts = [LEAF] if k == 0 else build(head, k)
            for f in firsts:
                for tail in _fill(rest, budget - k):
                    yield (f,) + tail

    for v in range(1, max_vertices + 1):
        for col in sorted(by_out, key=str):
            for t in build(col, v):
                yield t, tree_signature(t), tree_degree(t), tree_weight(t)


def enumerate_basis(gens, sig, degree, max_vertices, weight=None):
    """Canonical trees of a given signature and degree, sorted."""
    out_col, ins = sig
    res = []
    for t, s, d, w in enumerate_trees(gens, max_vertices, max_arity=len(ins),
                                      max_degree=degree, max_weight=weight):
        if s == (out_col, tuple(ins)) and d == degree and (weight is None or w == weight):
            res.append(t)
    return sorted(set(res), key=tree_str)


COLOUR = "c"


def ass_infty(max_arity, colour=COLOUR):
    """Generators x^n (2 <= n <= max_arity), their differential and augmentation.

    The augmentation is returned as the coefficient of the arity-n
    associative operation: x^2 -> 1 (the product), x^n -> 0 otherwise.
    """
    gens = [Generator(f"x{n}", colour, (colour,) * n, n - 2) for n in range(2, max_arity + 1)]
    coll = GeneratorCollection(gens, [colour])
    images = {}
    for n, g in enumerate(gens, 2):
        e = FreeElement()
        for i in range(2, n):
            j = n + 1 - i
            for k in range(1, i + 1):
                sign = -1 if (i + (k + 1) * (j + 1)) & 1 else 1
                e = e + sign * compose_free(FreeElement.generator(coll[f"x{i}"]), k,
                                            FreeElement.generator(coll[f"x{j}"]))
        images[g] = e
    rho = {g: (1 if g.arity == 2 else 0) for g in gens}
    return coll, DerivationRule(images, -1), rho


def phi_name(colour, single):
    return "phi" if single else f"phi[{colour}]"


def bar_name(name):
    return name + "~"


def adjoin_derivation(gens, d, colours=None):
    """Generators X + Phi + Xbar and the differential of the resolution DR.

    Returns ``(collection, d_DR, s)``; ``s`` is the degree +1 suspension
    derivation ``x -> xbar`` (zero on Phi and Xbar).  Phi and Xbar carry
    weight 1.
    """
    colours = tuple(colours if colours is not None else gens.colours)
    single = len(colours) == 1
    phis = {c: Generator(phi_name(c, single), c, (c,), 0, 1) for c in colours}
    bars = {g: Generator(bar_name(g.name), g.out, g.ins, g.degree + 1, 1) for g in gens}
    coll = GeneratorCollection(list(gens) + list(phis.values()) + list(bars.values()), colours)
    s_images = {g: FreeElement.generator(bars[g]) for g in gens}
    for x in list(phis.values()) + list(bars.values()):
        s_images[x] = FreeElement()
    s = DerivationRule(s_images, 1)
    images = {}
    for g in gens:
        images[g] = d.image(g)
    for c, p in phis.items():
        images[p] = FreeElement()
    for g in gens:
        x = FreeElement.generator(g)
        e = compose_free(FreeElement.generator(phis[g.out]), 1, x)
        for i, col in enumerate(g.ins, 1):
            e = e - compose_free(x, i, FreeElement.generator(phis[col]))
        e = e - derive(s, d.image(g))
        images[bars[g]] = e
    return coll, DerivationRule(images, -1), s
