"""Small categories, nerves, the diagram operad and its action on a diagram of algebras."""
from fractions import Fraction
from itertools import product
from typing import NamedTuple

from .free_operad import DerivationRule, FreeElement, Generator, GeneratorCollection, compose_free
from .linalg import to_rational


class CategoryError(ValueError):
    pass


class SmallCategory:
    """Finite category given by an explicit composition table.

    ``composition[(g, f)]`` is the name of ``g o f`` (first f, then g).
    Identities are created as ``id_<object>`` when not supplied, and their
    composites are filled in.
    """

    def __init__(self, objects, morphisms, composition=None, identities=None):
        self.objects = tuple(objects)
        self.morphisms = {}
        for name, (s, t) in dict(morphisms).items():
            self.morphisms[name] = (s, t)
        self.identities = dict(identities or {})
        for c in self.objects:
            if c not in self.identities:
                name = f"id_{c}"
                if name in self.morphisms and self.morphisms[name] != (c, c):
                    raise CategoryError(f"{name} is not an endomorphism of {c}")
                self.identities[c] = name
            self.morphisms.setdefault(self.identities[c], (c, c))
        self.composition = dict(composition or {})
        for f, (s, t) in self.morphisms.items():
            self.composition.setdefault((self.identities[t], f), f)
            self.composition.setdefault((f, self.identities[s]), f)
        self._order = {name: k for k, name in enumerate(self.morphism_names())}

    def morphism_names(self):
        ids = [self.identities[c] for c in self.objects]
        rest = sorted(m for m in self.morphisms if m not in set(ids))
        return ids + rest

    def src(self, f):
        return self.morphisms[f][0]

    def tgt(self, f):
        return self.morphisms[f][1]

    def identity(self, c):
        return self.identities[c]

    def is_identity(self, f):
        return f == self.identities.get(self.src(f))

    def compose(self, g, f):
        if self.src(g) != self.tgt(f):
            raise CategoryError(f"{g} o {f} is not composable")
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise CategoryError(f"composition table has no entry for ({g}, {f})") from None

    def key(self, f):
        return self._order[f]

    def validate(self):
        bad = []
        for c in self.objects:
            if self.morphisms.get(self.identities[c]) != (c, c):
                bad.append(f"identity of {c} is not an endomorphism")
        for f, (s, t) in self.morphisms.items():
            if s not in self.objects or t not in self.objects:
                bad.append(f"morphism {f} has an unknown endpoint")
        if bad:
            return bad
        names = self.morphism_names()
        for g in names:
            for f in names:
                if self.src(g) != self.tgt(f):
                    if (g, f) in self.composition:
                        bad.append(f"composition entry ({g}, {f}) is not composable")
                    continue
                h = self.composition.get((g, f))
                if h is None:
                    bad.append(f"missing composition ({g}, {f})")
                elif h not in self.morphisms:
                    bad.append(f"composition ({g}, {f}) = {h} is not a morphism")
                elif self.morphisms[h] != (self.src(f), self.tgt(g)):
                    bad.append(f"composition ({g}, {f}) = {h} has the wrong src/tgt")
        if bad:
            return bad
        for h in names:
            for g in names:
                if self.src(h) != self.tgt(g):
                    continue
                for f in names:
                    if self.src(g) != self.tgt(f):
                        continue
                    if self.compose(self.compose(h, g), f) != self.compose(h, self.compose(g, f)):
                        bad.append(f"composition not associative on ({h}, {g}, {f})")
        for f in names:
            s, t = self.morphisms[f]
            if self.compose(self.identities[t], f) != f or self.compose(f, self.identities[s]) != f:
                bad.append(f"identities are not neutral for {f}")
        return bad


def arrow_category():
    return SmallCategory(["a", "b"], {"f": ("a", "b")})


def point_category():
    return SmallCategory(["c"], {})


def square_category():
    """Commutative square 00 -> 01, 00 -> 10, 01 -> 11, 10 -> 11 as a poset."""
    objs = ["00", "01", "10", "11"]
    morph = {"u": ("00", "01"), "v": ("00", "10"), "r": ("01", "11"), "s": ("10", "11"),
             "w": ("00", "11")}
    comp = {("r", "u"): "w", ("s", "v"): "w"}
    return SmallCategory(objs, morph, comp)


class NerveChain(NamedTuple):
    """Composable chain ``f_p <- ... <- f_1`` stored as ``maps = (f_1, ..., f_p)``."""
    start: object
    end: object
    maps: tuple

    @property
    def length(self):
        return len(self.maps)

    @property
    def inp(self):
        return self.start

    @property
    def out(self):
        return self.end

    def __str__(self):
        if not self.maps:
            return str(self.start)
        return "(" + "<".join(reversed(self.maps)) + ")"


def object_chain(c):
    return NerveChain(c, c, ())


def chain(cat, maps):
    maps = tuple(maps)
    if not maps:
        raise CategoryError("use object_chain for length 0")
    for a, b in zip(maps, maps[1:]):
        if cat.tgt(a) != cat.src(b):
            raise CategoryError(f"{b} <- {a} is not composable")
    return NerveChain(cat.src(maps[0]), cat.tgt(maps[-1]), maps)


def nerve(cat, p):
    """All composable chains of length p, identities included."""
    if p < 0:
        raise ValueError("negative chain length")
    if p == 0:
        return [object_chain(c) for c in cat.objects]
    out = []
    names = cat.morphism_names()

    def extend(acc):
        if len(acc) == p:
            out.append(NerveChain(cat.src(acc[0]), cat.tgt(acc[-1]), tuple(acc)))
            return
        for g in names:
            if not acc or cat.src(g) == cat.tgt(acc[-1]):
                extend(acc + [g])

    extend([])
    return out


def face(cat, sigma, i):
    """i-th face: drop f_1 (i=0), compose f_{i+1} f_i, or drop f_p (i=p)."""
    p = sigma.length
    if p < 1:
        raise IndexError("objects have no faces")
    if not 0 <= i <= p:
        raise IndexError(f"face index {i} out of range 0..{p}")
    maps = sigma.maps
    if i == 0:
        rest = maps[1:]
        return NerveChain(cat.tgt(maps[0]), sigma.end, rest) if rest else object_chain(sigma.end)
    if i == p:
        rest = maps[:-1]
        return NerveChain(sigma.start, cat.src(maps[-1]), rest) if rest else object_chain(sigma.start)
    joined = cat.compose(maps[i], maps[i - 1])
    return NerveChain(sigma.start, sigma.end, maps[:i - 1] + (joined,) + maps[i + 1:])


def chain_composite(cat, sigma):
    if not sigma.maps:
        return cat.identity(sigma.start)
    acc = sigma.maps[0]
    for g in sigma.maps[1:]:
        acc = cat.compose(g, acc)
    return acc


class DiagramBasisElement(NamedTuple):
    """``mu^(n) o (f_1, ..., f_n)`` in output colour ``out``; n = 1 is a bare morphism."""
    out: object
    maps: tuple

    @property
    def arity(self):
        return len(self.maps)

    def __str__(self):
        return f"{self.out}[{','.join(self.maps)}]"


def diagram_unit(cat, c):
    return DiagramBasisElement(c, (cat.identity(c),))


def diagram_mu(cat, c, n=2):
    return DiagramBasisElement(c, (cat.identity(c),) * n)


def morphism_element(cat, f):
    return DiagramBasisElement(cat.tgt(f), (f,))


def diagram_inputs(cat, e):
    return tuple(cat.src(f) for f in e.maps)


def compose_diagram(cat, a, i, b):
    if not 1 <= i <= a.arity:
        raise IndexError(f"input {i} out of range 1..{a.arity}")
    f = a.maps[i - 1]
    if cat.src(f) != b.out:
        raise CategoryError(f"colour mismatch: input {i} is {cat.src(f)}, output is {b.out}")
    mid = tuple(cat.compose(f, g) for g in b.maps)
    return DiagramBasisElement(a.out, a.maps[:i - 1] + mid + a.maps[i:])


def diagram_basis(cat, out, ins):
    """All basis elements with the given output and input colours."""
    choices = []
    for c in ins:
        choices.append([f for f in cat.morphism_names() if cat.src(f) == c and cat.tgt(f) == out])
    return [DiagramBasisElement(out, tuple(fs)) for fs in product(*choices)]


# ------------------------------------------------------------------ algebras

class Algebra:
    """Finite-dimensional algebra: ``mult[i][j]`` is the vector e_i e_j."""

    def __init__(self, dim, mult):
        self.dim = dim
        self.mult = [[[to_rational(x) for x in vec] for vec in row] for row in mult]
        if len(self.mult) != dim or any(len(r) != dim or any(len(v) != dim for v in r) for r in self.mult):
            raise ValueError(f"multiplication constants must be {dim}x{dim}x{dim}")

    def mul(self, u, v):
        out = [Fraction(0)] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            row = self.mult[i]
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in enumerate(row[j]):
                    if c:
                        out[k] += ab * c
        return out

    def basis(self, i):
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v


def unital_k():
    return Algebra(1, [[[1]]])


def zero_k():
    return Algebra(1, [[[0]]])


def dual_numbers():
    # basis 1, x with x^2 = 0
    return Algebra(2, [[[1, 0], [0, 1]], [[0, 1], [0, 0]]])


def apply_matrix(m, v):
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in m]


def identity_matrix(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a, b):
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
            for i in range(len(a))]


class DiagramData:
    """A functor from a small category to finite-dimensional algebras."""

    def __init__(self, cat, algebras, functor=None):
        self.cat = cat
        self.algebras = dict(algebras)
        self.functor = {}
        for f, m in (functor or {}).items():
            self.functor[f] = [[to_rational(x) for x in row] for row in m]
        for c in cat.objects:
            ident = cat.identity(c)
            if ident not in self.functor and c in self.algebras:
                self.functor[ident] = identity_matrix(self.algebras[c].dim)
        self._alpha = {}

    def dim(self, c):
        return self.algebras[c].dim

    def matrix(self, f):
        return self.functor[f]

    def apply(self, f, v):
        return apply_matrix(self.functor[f], v)

    def column(self, f, i):
        return [row[i] for row in self.functor[f]]

    def validate(self):
        return validate(self.cat, self)


def validate(cat, data):
    """List of violations; empty means the diagram is a valid functor."""
    bad = list(cat.validate())
    if bad:
        return bad
    for c in cat.objects:
        if c not in data.algebras:
            bad.append(f"object {c} has no algebra")
    if bad:
        return bad
    for c in cat.objects:
        alg = data.algebras[c]
        n = alg.dim
        for i, j, k in product(range(n), repeat=3):
            ei, ej, ek = alg.basis(i), alg.basis(j), alg.basis(k)
            if alg.mul(alg.mul(ei, ej), ek) != alg.mul(ei, alg.mul(ej, ek)):
                bad.append(f"algebra {c} is not associative on basis triple ({i}, {j}, {k})")
    for f in cat.morphism_names():
        s, t = cat.morphisms[f]
        m = data.functor.get(f)
        if m is None:
            bad.append(f"morphism {f} has no matrix")
            continue
        if len(m) != data.dim(t) or any(len(r) != data.dim(s) for r in m):
            bad.append(f"matrix of {f} must be {data.dim(t)}x{data.dim(s)}")
            continue
        if cat.is_identity(f) and m != identity_matrix(data.dim(s)):
            bad.append(f"identity {f} is not sent to the identity matrix")
        A, B = data.algebras[s], data.algebras[t]
        for i, j in product(range(A.dim), repeat=2):
            lhs = apply_matrix(m, A.mul(A.basis(i), A.basis(j)))
            rhs = B.mul(data.column(f, i), data.column(f, j))
            if lhs != rhs:
                bad.append(f"F({f}) is not multiplicative on the pair ({i}, {j})")
    if bad:
        return bad
    names = cat.morphism_names()
    for g in names:
        for f in names:
            if cat.src(g) != cat.tgt(f):
                continue
            h = cat.compose(g, f)
            if matmul(data.functor[g], data.functor[f]) != data.functor[h]:
                bad.append(f"F({g}) F({f}) != F({h})")
    return bad


class MultiMap(NamedTuple):
    """Multilinear map: ``tensor[(i_1, ..., i_n)]`` is the image of basis inputs."""
    out: object
    ins: tuple
    tensor: dict

    def __call__(self, *vectors):
        dim = len(next(iter(self.tensor.values())))
        out = [Fraction(0)] * dim
        for idx, vec in self.tensor.items():
            c = Fraction(1)
            for v, i in zip(vectors, idx):
                c *= v[i]
                if not c:
                    break
            if c:
                for k, x in enumerate(vec):
                    if x:
                        out[k] += c * x
        return out


def alpha_eval(e, data):
    """Multilinear map of a basis element: (a_1..a_n) -> F(f_1)a_1 ... F(f_n)a_n."""
    cached = data._alpha.get(e)
    if cached is not None:
        return cached
    cat = data.cat
    ins = diagram_inputs(cat, e)
    alg = data.algebras[e.out]
    cols = [[data.column(f, i) for i in range(data.dim(cat.src(f)))] for f in e.maps]
    tensor = {}
    for idx in product(*(range(data.dim(c)) for c in ins)):
        acc = cols[0][idx[0]]
        for k in range(1, len(idx)):
            acc = alg.mul(acc, cols[k][idx[k]])
        tensor[idx] = acc
    mm = MultiMap(e.out, ins, tensor)
    data._alpha[e] = mm
    return mm


def compose_multimaps(a, i, b):
    """Partial composition in the endomorphism operad."""
    n_b = len(b.ins)
    tensor = {}
    dim_mid = len(next(iter(b.tensor.values())))
    dims_a = _input_dims(a)
    dims_b = _input_dims(b)
    for idx in product(*[range(d) for d in dims_a[:i - 1] + dims_b + dims_a[i:]]):
        pre, mid, post = idx[:i - 1], idx[i - 1:i - 1 + n_b], idx[i - 1 + n_b:]
        v = b.tensor[mid]
        out = None
        for k in range(dim_mid):
            if not v[k]:
                continue
            w = a.tensor[pre + (k,) + post]
            if out is None:
                out = [v[k] * x for x in w]
            else:
                out = [o + v[k] * x for o, x in zip(out, w)]
        if out is None:
            out = [Fraction(0)] * len(next(iter(a.tensor.values())))
        tensor[idx] = out
    return MultiMap(a.out, a.ins[:i - 1] + b.ins + a.ins[i:], tensor)


def _input_dims(m):
    n = len(m.ins)
    dims = [0] * n
    for idx in m.tensor:
        for k in range(n):
            dims[k] = max(dims[k], idx[k] + 1)
    return dims


# ------------------------------------------------------------------ bar-cobar

def chain_generator_name(sigma):
    return "[" + "<".join(reversed(sigma.maps)) + "]"


def bar_cobar(cat, max_chain_length):
    """Free operad on chains of length 1..bound with its cobar differential."""
    if max_chain_length < 1:
        raise ValueError("bound must be at least 1")
    gens = {}
    order = []
    for n in range(1, max_chain_length + 1):
        for sigma in nerve(cat, n):
            g = Generator(chain_generator_name(sigma), sigma.end, (sigma.start,), n - 1)
            gens[sigma] = g
            order.append(g)
    coll = GeneratorCollection(order, cat.objects)
    images = {}
    for sigma, g in gens.items():
        n = sigma.length
        e = FreeElement()
        for i in range(1, n):
            upper = NerveChain(cat.tgt(sigma.maps[i - 1]), sigma.end, sigma.maps[i:])
            lower = NerveChain(sigma.start, cat.tgt(sigma.maps[i - 1]), sigma.maps[:i])
            sign = -1 if (i + n + 1) & 1 else 1
            e = e + sign * compose_free(FreeElement.generator(gens[upper]), 1,
                                        FreeElement.generator(gens[lower]))
        for i in range(1, n):
            sign = -1 if (n - i) & 1 else 1
            e = e + sign * FreeElement.generator(gens[face(cat, sigma, i)])
        images[g] = e
    return coll, DerivationRule(images, -1), gens
