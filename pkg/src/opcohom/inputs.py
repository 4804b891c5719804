"""JSON input documents, bundled example diagrams and named operad pairs."""
import json
from pathlib import Path

from .diagram import Algebra, DiagramData, SmallCategory
from .linalg import to_rational


class InputError(ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _rational(x, path):
    try:
        return to_rational(x)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise InputError(path, f"not a rational ({e})") from None


def _require(doc, key, kind, path):
    if key not in doc:
        raise InputError(path, f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise InputError(f"{path}.{key}" if path else key, f"expected {kind.__name__}")
    return val


def parse_document(doc):
    """Turn a decoded JSON document into ``(SmallCategory, DiagramData)``.

    Structural problems raise :class:`InputError` with a field path; the
    mathematical checks are left to :func:`diagram.validate`.
    """
    if not isinstance(doc, dict):
        raise InputError("", "the document must be a JSON object")
    extra = set(doc) - {"category", "algebras", "functor"}
    if extra:
        raise InputError("", f"unknown top-level fields {sorted(extra)}")
    cat_doc = _require(doc, "category", dict, "")
    objects = _require(cat_doc, "objects", list, "category")
    if not objects or not all(isinstance(o, str) for o in objects):
        raise InputError("category.objects", "expected a nonempty list of names")
    if len(set(objects)) != len(objects):
        raise InputError("category.objects", "duplicate object")
    morphisms = {}
    for k, m in enumerate(cat_doc.get("morphisms", [])):
        path = f"category.morphisms[{k}]"
        if not isinstance(m, dict):
            raise InputError(path, "expected an object with name, src, tgt")
        name = _require(m, "name", str, path)
        src = _require(m, "src", str, path)
        tgt = _require(m, "tgt", str, path)
        for end, val in (("src", src), ("tgt", tgt)):
            if val not in objects:
                raise InputError(f"{path}.{end}", f"unknown object {val!r}")
        if name in morphisms:
            raise InputError(f"{path}.name", f"duplicate morphism {name!r}")
        morphisms[name] = (src, tgt)
    composition = {}
    for k, entry in enumerate(cat_doc.get("composition", [])):
        path = f"category.composition[{k}]"
        if not (isinstance(entry, list) and len(entry) == 3 and all(isinstance(x, str) for x in entry)):
            raise InputError(path, "expected [g, f, g o f]")
        g, f, h = entry
        composition[(g, f)] = h
    identities = cat_doc.get("identities")
    if identities is not None and not isinstance(identities, dict):
        raise InputError("category.identities", "expected an object")
    cat = SmallCategory(objects, morphisms, composition, identities)
    for (g, f), h in composition.items():
        for name in (g, f, h):
            if name not in cat.morphisms:
                raise InputError("category.composition", f"unknown morphism {name!r}")

    alg_doc = _require(doc, "algebras", dict, "")
    algebras = {}
    for c, a in alg_doc.items():
        path = f"algebras.{c}"
        if c not in objects:
            raise InputError(path, "unknown object")
        if not isinstance(a, dict):
            raise InputError(path, "expected an object with dim and mult")
        dim = _require(a, "dim", int, path)
        if isinstance(dim, bool) or dim < 1:
            raise InputError(f"{path}.dim", "expected a positive integer")
        mult = _require(a, "mult", list, path)
        if len(mult) != dim:
            raise InputError(f"{path}.mult", f"expected {dim} rows")
        rows = []
        for i, row in enumerate(mult):
            if not isinstance(row, list) or len(row) != dim:
                raise InputError(f"{path}.mult[{i}]", f"expected {dim} entries")
            vecs = []
            for j, vec in enumerate(row):
                if not isinstance(vec, list) or len(vec) != dim:
                    raise InputError(f"{path}.mult[{i}][{j}]", f"expected a vector of length {dim}")
                vecs.append([_rational(x, f"{path}.mult[{i}][{j}][{k}]") for k, x in enumerate(vec)])
            rows.append(vecs)
        algebras[c] = Algebra(dim, rows)
    for c in objects:
        if c not in algebras:
            raise InputError("algebras", f"object {c!r} has no algebra")

    fun_doc = doc.get("functor", {})
    if not isinstance(fun_doc, dict):
        raise InputError("functor", "expected an object")
    functor = {}
    for f, m in fun_doc.items():
        path = f"functor.{f}"
        if f not in cat.morphisms:
            raise InputError(path, "unknown morphism")
        s, t = cat.morphisms[f]
        if not isinstance(m, list) or len(m) != algebras[t].dim:
            raise InputError(path, f"expected {algebras[t].dim} rows")
        rows = []
        for i, row in enumerate(m):
            if not isinstance(row, list) or len(row) != algebras[s].dim:
                raise InputError(f"{path}[{i}]", f"expected {algebras[s].dim} entries")
            rows.append([_rational(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
        functor[f] = rows
    return cat, DiagramData(cat, algebras, functor)


def load(path):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(str(p), f"cannot read ({e.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(str(p), f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_document(doc)


def dump_diagram(cat, data):
    """Inverse of :func:`parse_document` (identities omitted, rationals as strings)."""
    ids = set(cat.identities.values())

    def q(x):
        return str(x)

    return {
        "category": {
            "objects": list(cat.objects),
            "morphisms": [{"name": m, "src": s, "tgt": t}
                          for m, (s, t) in sorted(cat.morphisms.items()) if m not in ids],
            "composition": [[g, f, h] for (g, f), h in sorted(cat.composition.items())
                            if g not in ids and f not in ids],
        },
        "algebras": {c: {"dim": a.dim, "mult": [[[q(x) for x in v] for v in row] for row in a.mult]}
                     for c, a in data.algebras.items()},
        "functor": {f: [[q(x) for x in row] for row in m]
                    for f, m in sorted(data.functor.items()) if f not in ids},
    }


# ------------------------------------------------------------------ named operad pairs

KUNNETH_EXAMPLES = ("zero-differentials", "acyclic-unary", "ass-infty-units")


def kunneth_example(name):
    """``(p, q, bounds)`` for one of the named free-product checks."""
    from .based import truncate_to_based
    from .free_operad import DerivationRule, FreeElement, Generator, GeneratorCollection, ass_infty

    bounds = {"max_arity": 3, "max_degree": 2, "max_vertices": 7}
    b = Generator("b", "c", ("c", "c"), 0)
    free_b = truncate_to_based(GeneratorCollection([b], ["c"]),
                               DerivationRule({b: FreeElement()}, -1), 3, 3)
    free_b.name = "free(b)"
    if name == "zero-differentials":
        e = Generator("e", "c", ("c",), 1)
        q = truncate_to_based(GeneratorCollection([e], ["c"]),
                              DerivationRule({e: FreeElement()}, -1), 1, 3, max_vertices=3)
        q.name = "free(e)"
        return free_b, q, dict(bounds, max_vertices=6)
    if name == "acyclic-unary":
        u = Generator("u", "c", ("c",), 1)
        v = Generator("v", "c", ("c",), 0)
        # words of length 1 form a subcomplex, d(u) = v
        p = truncate_to_based(GeneratorCollection([u, v], ["c"]),
                              DerivationRule({u: FreeElement.generator(v), v: FreeElement()}, -1),
                              1, 3, max_vertices=1)
        p.name = "free(u,v; du=v)"
        return p, free_b, bounds
    if name == "ass-infty-units":
        coll, dx, _ = ass_infty(3)
        p = truncate_to_based(coll, dx, 3, 3)
        p.name = "Ass_infty<=3"
        units = truncate_to_based(GeneratorCollection([], ["c"]), DerivationRule({}, -1), 3, 3,
                                  max_vertices=1)
        units.name = "units"
        return p, units, dict(bounds, max_vertices=3)
    raise KeyError(f"unknown example {name!r}; choose from {', '.join(KUNNETH_EXAMPLES)}")
