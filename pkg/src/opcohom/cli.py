"""Command line interface: ``opcohom {validate|gs|modext|compare|hochschild|verify|kunneth}``."""
import argparse
import json
import sys
import time

from . import __version__
from .based import MarginError, ComplementError
from .cohomology import (
    InvalidDataError, betti, compare, der_complex_dr, gs_complex, hochschild_complex,
    kunneth_check, modext_complex,
)
from .diagram import arrow_category, bar_cobar, point_category, square_category, validate
from .free_operad import RuleError, adjoin_derivation, ass_infty, check_d_squared
from .inputs import KUNNETH_EXAMPLES, InputError, kunneth_example, load
from .linalg import BACKEND, DimensionError, NotAComplexError
from .modules import check_module_d_squared, mr, olmdr, rho_check

EXIT_OK, EXIT_INPUT, EXIT_MATH = 0, 1, 2

CONVENTIONS = {
    "cochain_degree": "homological degree of the supporting generator",
    "faces": "shorten chains (Sigma^n -> Sigma^{n-1})",
    "hochschild_index": "sign exponent uses the arity of the cochain",
    "hom_differential": "delta(theta) = theta o d",
    "der_complex_differential": "delta(theta) = -(theta o d_DR)",
    "gs_horizontal_copies": "q+1 copies of f_1 on a C^q cochain",
}

CATEGORIES = {"point": point_category, "arrow": arrow_category, "square": square_category}


class MathFailure(Exception):
    def __init__(self, report):
        self.report = report
        super().__init__("invariant violated")


def _table(b):
    return {str(k): v for k, v in sorted(b.items())}


def _load_valid(path):
    cat, data = load(path)
    bad = validate(cat, data)
    if bad:
        raise InvalidDataError("; ".join(bad))
    return cat, data


def cmd_validate(args):
    cat, data = load(args.input)
    bad = validate(cat, data)
    res = {"valid": not bad, "violations": bad,
           "objects": list(cat.objects), "morphisms": len(cat.morphisms)}
    return res, (EXIT_OK if not bad else EXIT_INPUT)


def _degree(args):
    if args.max_degree < 0:
        raise InputError("--max-degree", "must be >= 0")
    return args.max_degree


def cmd_gs(args):
    _, data = _load_valid(args.input)
    c = gs_complex(data, _degree(args))
    return {"betti": _table(betti(c)), "dims": c.dims(), "d_squared": "pass"}, EXIT_OK


def cmd_modext(args):
    _, data = _load_valid(args.input)
    c = modext_complex(data, _degree(args))
    return {"betti": _table(betti(c)), "dims": c.dims(), "d_squared": "pass"}, EXIT_OK


def _compare_result(r, c1):
    negated = sorted(_label_str(lab) for (n, lab), s in r.intertwiner.items() if s < 0)
    out = {"verdict": r.verdict}
    if r.verdict == "identical":
        b = _table(betti(c1))
        out.update(betti_first=b, betti_second=b)
    else:
        out.update(betti_first=_table(r.betti1), betti_second=_table(r.betti2))
    if r.verdict == "diagonal":
        out["negated_components"] = negated
    if r.detail:
        out["detail"] = r.detail
    return out


def _label_str(lab):
    (comp, n), j, m = lab
    return f"{comp}/{n}[{','.join(map(str, j))}->{m}]"


def cmd_compare(args):
    _, data = _load_valid(args.input)
    d = _degree(args)
    gs = gs_complex(data, d)
    me = modext_complex(data, d)
    r = compare(gs, me)
    res = _compare_result(r, gs)
    res["dims"] = gs.dims()
    return res, (EXIT_MATH if r.verdict == "mismatch" else EXIT_OK)


def cmd_hochschild(args):
    cat, data = _load_valid(args.input)
    if len(cat.objects) != 1 or len(cat.morphisms) != 1:
        raise InputError(args.input, "hochschild needs a single algebra (one object, no morphisms)")
    d = _degree(args)
    res = {}
    code = EXIT_OK
    direct = hochschild_complex(data, d) if args.via in ("direct", "both") else None
    via_dr = der_complex_dr(data, d) if args.via in ("der-complex", "both") else None
    main = direct if direct is not None else via_dr
    res["betti"] = _table(betti(main))
    res["dims"] = main.dims()
    if args.via == "both":
        r = compare(direct, via_dr)
        res["matrices"] = r.verdict
        res["betti_der_complex"] = _table(betti(via_dr))
        if r.verdict != "identical":
            code = EXIT_MATH
    return res, code


def _category_for(args):
    if args.input:
        cat, _ = load(args.input)
        bad = cat.validate()
        if bad:
            raise InvalidDataError("; ".join(bad))
        return cat, args.input
    return CATEGORIES[args.category](), args.category


def cmd_verify(args):
    t0 = time.perf_counter()
    target = args.target
    res = {"target": target}
    if target == "ass-infty":
        n = args.max_arity or 8
        coll, d, _ = ass_infty(n)
        viol = check_d_squared(coll, d, n)
        res.update(max_arity=n, generators=len(coll))
    elif target == "dr":
        n = args.max_arity or 6
        x, dx, _ = ass_infty(n)
        coll, d, _ = adjoin_derivation(x, dx)
        viol = check_d_squared(coll, d, n)
        res.update(max_arity=n, generators=len(coll))
    elif target == "olmdr":
        n = args.max_arity or 8
        _, gens, d = olmdr(n)
        viol = check_module_d_squared(d, gens)
        res.update(max_arity=n, generators=len(gens))
    elif target == "mr":
        cat, label = _category_for(args)
        deg = 5 if args.max_degree is None else args.max_degree
        gens, d = mr(cat, deg)
        viol = check_module_d_squared(d, gens)
        rho = rho_check(cat, deg)
        res.update(category=label, max_degree=deg, generators=len(gens),
                   rho_d={"status": "pass" if not rho else "fail", "violations": rho})
        viol = viol + [dict(v, check="rho_d") for v in rho]
    elif target == "barcobar":
        cat, label = _category_for(args)
        n = args.max_length or 4
        coll, d, _ = bar_cobar(cat, n)
        viol = check_d_squared(coll, d, 1)
        res.update(category=label, max_length=n, generators=len(coll))
    else:  # pragma: no cover - argparse restricts the choices
        raise InputError("--target", f"unknown target {target!r}")
    res["d_squared"] = {"status": "pass" if not viol else "fail", "violations": viol}
    if not args.json:
        res["seconds"] = round(time.perf_counter() - t0, 3)
    return res, (EXIT_OK if not viol else EXIT_MATH)


def cmd_kunneth(args):
    names = KUNNETH_EXAMPLES if args.example == "all" else (args.example,)
    out = {}
    code = EXIT_OK
    for name in names:
        p, q, bounds = kunneth_example(name)
        if args.max_arity:
            bounds["max_arity"] = args.max_arity
        if args.max_degree is not None:
            bounds["max_degree"] = args.max_degree
        r = kunneth_check(p, q, **bounds)
        out[name] = {"operads": [p.name, q.name], "bounds": bounds,
                     "status": "pass" if not r["report"] else "fail",
                     "violations": r["report"], "dims": r["dims"]}
        if r["report"]:
            code = EXIT_MATH
    return {"examples": out}, code


def build_parser():
    ap = argparse.ArgumentParser(prog="opcohom", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, degree=True):
        p.add_argument("--json", action="store_true", help="print the JSON report only")
        if degree:
            p.add_argument("--max-degree", type=int, default=4, help="highest reported degree (default 4)")

    p = sub.add_parser("validate", help="check that the input is a diagram of algebras")
    p.add_argument("input")
    common(p, degree=False)
    p.set_defaults(func=cmd_validate)
    for name, fn, hlp in (("gs", cmd_gs, "Betti table of the bicomplex of the diagram"),
                          ("modext", cmd_modext, "Betti table of Hom from the module resolution"),
                          ("compare", cmd_compare, "compare the two complexes")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("input")
        common(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("hochschild", help="augmented Hochschild cohomology of one algebra")
    p.add_argument("input")
    p.add_argument("--via", choices=("direct", "der-complex", "both"), default="direct")
    common(p)
    p.set_defaults(func=cmd_hochschild)
    p = sub.add_parser("verify", help="d^2 = 0 certificates")
    p.add_argument("--target", required=True, choices=("ass-infty", "dr", "olmdr", "mr", "barcobar"))
    p.add_argument("--max-arity", type=int)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--max-length", type=int, help="chain length bound for barcobar (default 4)")
    p.add_argument("--category", choices=sorted(CATEGORIES), default="arrow",
                   help="built-in category when no input is given")
    p.add_argument("input", nargs="?")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("kunneth", help="free product homology check on a named pair")
    p.add_argument("example", choices=KUNNETH_EXAMPLES + ("all",))
    p.add_argument("--max-arity", type=int)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_kunneth)
    return ap


def _config(args):
    skip = {"func", "json", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _human(report, out):
    res = report["result"]
    print(f"opcohom {report['command']}", file=out)
    for k, v in report["config"].items():
        print(f"  {k}: {v}", file=out)
    for key in ("betti", "betti_first", "betti_second", "betti_der_complex"):
        if key in res:
            row = res[key]
            print(f"{key}:", file=out)
            print("  degree " + " ".join(f"{d:>4}" for d in row), file=out)
            print("  dim    " + " ".join(f"{v:>4}" for v in row.values()), file=out)
    for key, v in res.items():
        if key.startswith("betti"):
            continue
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        print(f"{key}: {v}", file=out)
    if "backend" in report:
        print(f"backend: {report['backend']}", file=out)


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        result, code = args.func(args)
    except (InputError, InvalidDataError, MarginError, ComplementError, DimensionError,
            RuleError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        report = {"command": args.command, "error": msg, "exit_code": EXIT_INPUT}
        _emit(report, args, error=True)
        return EXIT_INPUT
    except NotAComplexError as e:
        report = {"command": args.command, "error": str(e), "exit_code": EXIT_MATH}
        _emit(report, args, error=True)
        return EXIT_MATH
    report = {"command": args.command, "config": _config(args), "result": result,
              "conventions": CONVENTIONS, "exit_code": code}
    if not args.json:
        report["backend"] = BACKEND
    _emit(report, args)
    return code


def _emit(report, args, error=False):
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    elif error:
        print(f"error: {report['error']}", file=sys.stderr)
    else:
        _human(report, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
