"""Free operadic modules over the diagram operad and the resolutions olMDR and MR.

A basis term of a free module is ``(top, slot, gen, bottoms)`` standing for
``top o_slot (gen o (bottoms))``; ``top`` and each bottom are
:class:`DiagramBasisElement` normal forms (units allowed).  The diagram
operad is concentrated in degree 0, so its actions carry no Koszul signs.
"""
from fractions import Fraction
from typing import NamedTuple

from .diagram import (
    DiagramBasisElement, NerveChain, chain_composite, compose_diagram, diagram_inputs,
    diagram_mu, diagram_unit, face, morphism_element, nerve, point_category,
)
from .linalg import ExactMatrix, betti_at, rank


class ModuleError(ValueError):
    pass


class ModuleGenerator(NamedTuple):
    name: str
    out: object
    ins: tuple
    degree: int
    # chain the generator is attached to, and its arity (x^1 = phi)
    sigma: object
    n: int

    @property
    def arity(self):
        return len(self.ins)

    def __str__(self):
        return self.name


class Term(NamedTuple):
    top: DiagramBasisElement
    slot: int
    gen: ModuleGenerator
    bottoms: tuple


def term_inputs(cat, t):
    top_in = diagram_inputs(cat, t.top)
    mid = tuple(c for b in t.bottoms for c in diagram_inputs(cat, b))
    return top_in[:t.slot - 1] + mid + top_in[t.slot:]


def term_str(t):
    bots = ",".join(str(b) for b in t.bottoms)
    return f"{t.top}<{t.slot}:{t.gen.name}({bots})>"


class FreeModuleElement:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {t: Fraction(c) for t, c in (terms or {}).items() if c}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, FreeModuleElement):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for t, c in other.terms.items():
            v = out.get(t, 0) + c
            if v:
                out[t] = v
            else:
                out.pop(t, None)
        return FreeModuleElement(out)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, k):
        if not k:
            return FreeModuleElement()
        return FreeModuleElement({t: k * c for t, c in self.terms.items()})

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for t, c in sorted(self.terms.items(), key=lambda tc: term_str(tc[0])):
            parts.append(f"{c}*{term_str(t)}")
        return " + ".join(parts)


def module_generator(cat, g):
    bots = tuple(diagram_unit(cat, c) for c in g.ins)
    return FreeModuleElement({Term(diagram_unit(cat, g.out), 1, g, bots): 1})


def module_compose(cat, a, i, m):
    """Left action ``a o_i m`` of a diagram basis element."""
    out = {}
    for t, c in m.terms.items():
        top = compose_diagram(cat, a, i, t.top)
        key = Term(top, t.slot + i - 1, t.gen, t.bottoms)
        out[key] = out.get(key, 0) + c
    return FreeModuleElement(out)


def module_compose_right(cat, m, j, a):
    """Right action ``m o_j a``: composes into the top or into a bottom."""
    out = {}
    for t, c in m.terms.items():
        top_ar = t.top.arity
        pre = t.slot - 1
        mids = [b.arity for b in t.bottoms]
        total = pre + sum(mids) + (top_ar - t.slot)
        if not 1 <= j <= total:
            raise IndexError(f"input {j} out of range 1..{total}")
        if j <= pre:
            key = Term(compose_diagram(cat, t.top, j, a), t.slot + a.arity - 1, t.gen, t.bottoms)
        elif j > pre + sum(mids):
            key = Term(compose_diagram(cat, t.top, j - sum(mids) + 1, a), t.slot, t.gen, t.bottoms)
        else:
            r = j - pre
            bots = list(t.bottoms)
            for l, ar in enumerate(mids):
                if r <= ar:
                    bots[l] = compose_diagram(cat, bots[l], r, a)
                    break
                r -= ar
            key = Term(t.top, t.slot, t.gen, tuple(bots))
        out[key] = out.get(key, 0) + c
    return FreeModuleElement(out)


def compose_bottoms(cat, m, bottoms):
    """``m o (b_1, ..., b_k)`` for an element whose terms all have k inputs."""
    for l in range(len(bottoms), 0, -1):
        m = module_compose_right(cat, m, l, bottoms[l - 1])
    return m


class ModuleDifferential:
    """Derivation of a free module determined by its values on generators."""

    def __init__(self, cat, images, degree=-1):
        self.cat = cat
        self.images = dict(images)
        self.degree = degree

    def image(self, g):
        try:
            return self.images[g]
        except KeyError:
            raise ModuleError(f"no image for generator {g.name}") from None

    def __call__(self, m):
        out = FreeModuleElement()
        for t, c in m.terms.items():
            img = compose_bottoms(self.cat, self.image(t.gen), t.bottoms)
            out = out + c * module_compose(self.cat, t.top, t.slot, img)
        return out


def check_module_d_squared(d, gens):
    """Generators whose d(d(g)) survives; empty means d^2 = 0 on them."""
    report = []
    for g in gens:
        img = d.image(g)
        for t in img.terms:
            if t.gen.degree != g.degree + d.degree:
                report.append({"generator": g.name, "terms": f"degree of {term_str(t)} is off"})
                break
        dd = d(img)
        if dd:
            report.append({"generator": g.name, "terms": repr(dd)})
    return report


# ------------------------------------------------------------------ olMDR

def olmdr(max_arity):
    """Generators phi^1..phi^max_arity over Ass and the resolution differential."""
    cat = point_category()
    colour = cat.objects[0]
    gens = [ModuleGenerator(f"phi{n}", colour, (colour,) * n, n - 1, colour, n)
            for n in range(1, max_arity + 1)]
    mu = diagram_mu(cat, colour)
    images = {gens[0]: FreeModuleElement()}
    for n in range(2, max_arity + 1):
        prev = module_generator(cat, gens[n - 2])
        e = -((-1) ** n) * module_compose(cat, mu, 2, prev)
        for k in range(1, n):
            e = e - ((-1) ** (n - k)) * module_compose_right(cat, prev, k, mu)
        e = e - module_compose(cat, mu, 1, prev)
        images[gens[n - 1]] = e
    return cat, gens, ModuleDifferential(cat, images)


def _module_basis(cat, gens, arity):
    """Basis terms of arity ``arity`` on one colour (identity-only case)."""
    c = cat.objects[0]
    ident = cat.identity(c)
    out = []
    for g in gens:
        free = arity - g.arity
        if free < 0:
            continue
        # top arity k, bottoms of arities b_l >= 1 with (k-1) + sum b = arity
        for k in range(1, free + 2):
            rest = arity - (k - 1)
            for bots in _compositions(rest, g.arity):
                for s in range(1, k + 1):
                    top = DiagramBasisElement(c, (ident,) * k)
                    bt = tuple(DiagramBasisElement(c, (ident,) * b) for b in bots)
                    out.append(Term(top, s, g, bt))
    return out


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def olmdr_homology(n, max_arity=None):
    """Homology dimensions of olMDR in arity n, by degree."""
    cat, gens, d = olmdr(max_arity or n + 1)
    by_deg = {}
    for t in _module_basis(cat, gens, n):
        by_deg.setdefault(t.gen.degree, []).append(t)
    index = {deg: {t: k for k, t in enumerate(ts)} for deg, ts in by_deg.items()}
    top = max(by_deg) if by_deg else 0

    def matrix(deg):
        src = by_deg.get(deg, [])
        tgt = index.get(deg - 1, {})
        m = ExactMatrix(len(tgt), len(src))
        for j, t in enumerate(src):
            img = d(FreeModuleElement({t: 1}))
            for s, c in img.terms.items():
                m.add(tgt[s], j, c)
        return m

    mats = {deg: matrix(deg) for deg in range(0, top + 2)}
    return {deg: betti_at(mats[deg + 1], mats[deg]) for deg in range(0, top + 1)}


def mda_dimension_oracle(n):
    """dim of MDA(n) for Ass: free span modulo the Leibniz relator submodule."""
    if n < 1:
        raise ValueError("arity must be at least 1")
    cat = point_category()
    c = cat.objects[0]
    ident = cat.identity(c)
    phi = ModuleGenerator("phi", c, (c,), 0, c, 1)
    basis = _module_basis(cat, [phi], n)
    index = {t: k for k, t in enumerate(basis)}
    mu = diagram_mu(cat, c)
    g = module_generator(cat, phi)
    relator = (module_compose_right(cat, g, 1, mu) - module_compose(cat, mu, 1, g)
               - module_compose(cat, mu, 2, g))
    rels = []
    for ka in range(1, n):
        for u in range(1, n + 1):
            v = n - (ka - 1) - u
            if v < 1:
                continue
            a = DiagramBasisElement(c, (ident,) * ka)
            b1 = DiagramBasisElement(c, (ident,) * u)
            b2 = DiagramBasisElement(c, (ident,) * v)
            r = compose_bottoms(cat, relator, (b1, b2))
            for i in range(1, ka + 1):
                rels.append(module_compose(cat, a, i, r))
    m = ExactMatrix(len(basis), len(rels))
    for j, r in enumerate(rels):
        for t, x in r.terms.items():
            m.add(index[t], j, x)
    return len(basis) - rank(m)


# ------------------------------------------------------------------ MR

def _chain_label(sigma):
    return str(sigma)


def mr_generator(sigma, n):
    deg = n - 1 + sigma.length
    ins = (sigma.start,) * n
    name = f"phi_{_chain_label(sigma)}" if n == 1 else f"x{n}_{_chain_label(sigma)}"
    return ModuleGenerator(name, sigma.end, ins, deg, sigma, n)


def mr_generators(cat, degree_bound):
    """phi_sigma (|sigma| <= bound) and x^n_sigma (n >= 2, n - 1 + |sigma| <= bound)."""
    if degree_bound < 0:
        raise ValueError("negative degree bound")
    chains = {p: nerve(cat, p) for p in range(degree_bound + 1)}
    out = []
    for deg in range(degree_bound + 1):
        for n in range(1, deg + 2):
            p = deg - (n - 1)
            for sigma in chains[p]:
                out.append(mr_generator(sigma, n))
    return out


def mr_differential(cat, g):
    """Vertical Hochschild-type part plus horizontal simplicial part."""
    sigma, n = g.sigma, g.n
    p = sigma.length
    sp = -1 if p & 1 else 1
    e = FreeModuleElement()
    if n >= 2:
        pre = module_generator(cat, mr_generator(sigma, n - 1))
        dx = n - 2
        ul = chain_composite(cat, sigma)
        idt = cat.identity(sigma.end)
        left = DiagramBasisElement(sigma.end, (ul, idt))
        right = DiagramBasisElement(sigma.end, (idt, ul))
        mu_in = diagram_mu(cat, sigma.start)
        v = ((-1) ** dx) * module_compose(cat, left, 2, pre)
        for i in range(1, n):
            v = v + ((-1) ** (dx - i)) * module_compose_right(cat, pre, i, mu_in)
        v = v + module_compose(cat, right, 1, pre)
        e = e + sp * v
    if p >= 1:
        maps = sigma.maps
        f1 = morphism_element(cat, maps[0])
        x0 = module_generator(cat, mr_generator(face(cat, sigma, 0), n))
        e = e + sp * compose_bottoms(cat, x0, (f1,) * n)
        for i in range(1, p):
            e = e + ((-1) ** (p - i)) * module_generator(cat, mr_generator(face(cat, sigma, i), n))
        xp = module_generator(cat, mr_generator(face(cat, sigma, p), n))
        e = e + module_compose(cat, morphism_element(cat, maps[-1]), 1, xp)
    return e


def mr(cat, degree_bound):
    gens = mr_generators(cat, degree_bound)
    images = {g: mr_differential(cat, g) for g in gens}
    # the faces of a generator of degree <= bound stay inside the list
    for g in list(images):
        for t in images[g].terms:
            images.setdefault(t.gen, mr_differential(cat, t.gen))
    return gens, ModuleDifferential(cat, images)


def mda_normal_form(cat, m, is_phi):
    """Image in MDA: each ``top o_s (phi o b)`` becomes sum_j ``(top o_s b) o_{s+j-1} phi``.

    Keys are (diagram basis element, input position carrying phi).
    """
    out = {}
    for t, c in m.terms.items():
        if not is_phi(t.gen):
            continue
        b = t.bottoms[0]
        e = compose_diagram(cat, t.top, t.slot, b)
        for j in range(1, b.arity + 1):
            key = (e, t.slot + j - 1)
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key)
    return out


def rho_check(cat, degree_bound):
    """Generators g with rho(d(g)) != 0 in MDA; rho keeps only phi_c, c an object."""
    gens, d = mr(cat, degree_bound)

    def is_phi(g):
        return g.n == 1 and g.sigma.length == 0

    bad = []
    for g in gens:
        nf = mda_normal_form(cat, d.image(g), is_phi)
        if nf:
            bad.append({"generator": g.name,
                        "terms": " + ".join(f"{c}*{e}@{pos}" for (e, pos), c in
                                            sorted(nf.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])))})
    return bad


def olmdr_mr_intertwiner(max_arity):
    """Check d_MR(x^n) and d_olMDR(phi^n) agree under x^n -> (-1)^(n-1) phi^n.

    Returns the list of arities where the signed identification fails.
    """
    cat, ol_gens, d_ol = olmdr(max_arity)
    c = cat.objects[0]
    sigma = NerveChain(c, c, ())
    ol_by_n = {g.n: g for g in ol_gens}
    eps = {n: (-1) ** (n - 1) for n in ol_by_n}

    def transport(m):
        out = {}
        for t, k in m.terms.items():
            n = t.gen.n
            key = Term(t.top, t.slot, ol_by_n[n], t.bottoms)
            out[key] = out.get(key, 0) + eps[n] * k
        return FreeModuleElement(out)

    bad = []
    for n in range(1, max_arity + 1):
        lhs = transport(mr_differential(cat, mr_generator(sigma, n)))
        rhs = eps[n] * d_ol.image(ol_by_n[n])
        if lhs != rhs:
            bad.append(n)
    return bad


__all__ = [
    "ModuleError", "ModuleGenerator", "Term", "FreeModuleElement", "ModuleDifferential",
    "module_generator", "module_compose", "module_compose_right", "compose_bottoms",
    "check_module_d_squared", "olmdr", "olmdr_homology", "mda_dimension_oracle",
    "mr_generator", "mr_generators", "mr_differential", "mr", "mda_normal_form", "rho_check",
    "olmdr_mr_intertwiner", "term_inputs", "term_str",
]
