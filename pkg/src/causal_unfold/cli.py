"""Command-line front end.

Exit status: 0 success, 1 validation failure, 2 unreadable input, 3 a cap
was exceeded.
"""

import argparse
import json
import sys

from . import caps as caps_mod
from . import oracle
from .constructions import (
    check_ax,
    hide,
    is_stable_ef,
    pr,
    product_ef,
    pseudo_pullback_edc,
    pseudo_pullback_ef,
    pullback_edc,
    pullback_ef,
    restrict_to_ax,
    unamb,
)
from .dot import export_dot
from .errors import ConfigExplosion, EventStructureError, SearchExplosion
from .events import show, sort_events
from .realisations import enumerate_extremals, enumerate_prime_extremals, enumerate_realisations, \
    is_extremal, is_extremal_by_definition
from .serialize import ParseError, load, to_obj
from .structures import (
    Category,
    Ese,
    GeneralES,
    PrimeES,
    StructureMap,
    as_family,
    validate_map,
    validate_structure,
)
from .unfolding import check_structural_axioms, col, er

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_CAP = 0, 1, 2, 3


class Invalid(Exception):
    """Raised by a subcommand whose input failed validation."""

    def __init__(self, payload):
        super().__init__("validation failed")
        self.payload = payload


def _emit(args, payload, structure=None):
    if args.dot and structure is not None:
        args.out.write(export_dot(structure))
        return
    args.out.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def _violations(vs):
    return [{"axiom": v.axiom, "detail": str(v)} for v in vs]


def _load_valid(path):
    s = load(path)
    if isinstance(s, StructureMap):
        return s
    vs = validate_structure(s)
    if vs:
        raise Invalid({"file": path, "valid": False, "violations": _violations(vs)})
    return s


def _family(path):
    return as_family(_load_valid(path))


def _table(m):
    return {show(a): show(b) for a, b in m.items()}


def _map_category(m):
    if isinstance(m.source, GeneralES):
        return Category.GENERAL
    if isinstance(m.source, (Ese, PrimeES)) and isinstance(m.target, (Ese, PrimeES)):
        return Category.ESE
    return Category.FAMILY


# -- subcommands --------------------------------------------------------------


def cmd_validate(args):
    s = load(args.file)
    if isinstance(s, StructureMap):
        cat = Category.parse(args.category) if args.category else _map_category(s)
        vs = validate_map(s, cat)
    else:
        vs = validate_structure(s)
    payload = {"file": args.file, "kind": to_obj(s)["kind"], "valid": not vs, "violations": _violations(vs)}
    if vs:
        raise Invalid(payload)
    _emit(args, payload)


def cmd_configs(args):
    f = _family(args.file)
    _emit(args, {"configs": [[show(e) for e in sort_events(x)] for x in f.sorted_configs()]}, f)


def cmd_unfold(args):
    u = er(_family(args.file))
    payload = to_obj(u.ese)
    if args.histories:
        payload["histories"] = {show(n): to_obj(u.prime_table[n]) for n in u.names}
    _emit(args, payload, u.ese)


def cmd_collapse(args):
    g = col(_family(args.file))
    _emit(args, to_obj(g), g)


def cmd_extremals(args):
    f = _family(args.file)
    rs = enumerate_prime_extremals(f) if args.prime else enumerate_extremals(f)
    _emit(args, {"count": len(rs), "extremals": [to_obj(r) for r in rs]})


def cmd_hide(args):
    p = _load_valid(args.file)
    q = hide(p, [e.strip() for e in args.visible.split(",") if e.strip()])
    _emit(args, to_obj(q), q)


def cmd_restrict_ax(args):
    q = restrict_to_ax(_load_valid(args.file), args.level)
    _emit(args, to_obj(q), q)


def cmd_check_axioms(args):
    p = _load_valid(args.file)
    payload = {}
    if not isinstance(p, (Ese, PrimeES)):
        p = er(as_family(p)).ese
        payload["of"] = "unfolding"
    ax = check_ax(p)
    report = check_structural_axioms(p)
    payload.update({"ax0": ax.ax0, "ax1": ax.ax1, "ax2": ax.ax2, "level": ax.level()})
    payload.update(report.as_dict())
    payload["witnesses"] = {k: _witness(w) for k, w in sorted(report.witnesses.items())}
    _emit(args, payload)


def _witness(w):
    out = []
    for part in w:
        if isinstance(part, (set, frozenset)):
            out.append([show(e) for e in sort_events(part)])
        else:
            out.append(show(part))
    return out


def cmd_stable(args):
    f = _family(args.file)
    rep = is_stable_ef(f)
    if args.pr:
        q = pr(f)
        return _emit(args, to_obj(q), q)
    if args.unamb:
        u = unamb(f)
        return _emit(args, to_obj(u), u)
    witnesses = []
    for w in rep.witnesses:
        witnesses.append([w[0]] + _witness(w[1:]))
    _emit(args, {"stable": rep.stable, "witnesses": witnesses})


def _span_payload(span):
    return {"apex": to_obj(span.obj), "left": _table(span.left), "right": _table(span.right)}


def cmd_product(args):
    span = product_ef(_family(args.left), _family(args.right))
    _emit(args, _span_payload(span), span.obj)


def _pullback(args, pseudo):
    m1, m2 = load(args.left), load(args.right)
    for m in (m1, m2):
        if not isinstance(m, StructureMap):
            raise ParseError(f"expected a map file, got {type(m).__name__}")
    cat = args.category
    if cat == "edc":
        span = (pseudo_pullback_edc if pseudo else pullback_edc)(m1, m2)
        payload = _span_payload(span)
    else:
        fm = [StructureMap(as_family(m.source), as_family(m.target), dict(m.table)) for m in (m1, m2)]
        span = (pseudo_pullback_ef if pseudo else pullback_ef)(*fm)
        if cat == "family":
            payload = _span_payload(span)
        else:
            # among ese's only the unfolding of the family construction is available, a bipullback
            u = er(span.obj)
            left = {n: a.left for n, a in u.counit.items()}
            right = {n: a.right for n, a in u.counit.items()}
            payload = {"apex": to_obj(u.ese), "left": {show(a): show(b) for a, b in sorted(left.items())},
                       "right": {show(a): show(b) for a, b in sorted(right.items())},
                       "note": "unfolding of the family construction; a bipullback of ese's"}
            span = span._replace(obj=u.ese)
    _emit(args, payload, span.obj)


def cmd_pullback(args):
    _pullback(args, False)


def cmd_pseudo_pullback(args):
    _pullback(args, True)


def cmd_check_map(args):
    m = load(args.file)
    if not isinstance(m, StructureMap):
        raise ParseError(f"{args.file}: not a map file")
    cat = Category.parse(args.category) if args.category else _map_category(m)
    vs = validate_map(m, cat)
    payload = {"category": cat.value, "valid": not vs, "total": m.is_total(), "violations": _violations(vs)}
    if vs:
        raise Invalid(payload)
    _emit(args, payload)


def cmd_oracle(args):
    check = args.check
    if check == "maps":
        s, t = _load_valid(args.files[0]), _load_valid(args.files[1])
        ms = oracle.enumerate_maps(s, t, args.category or "ese")
        return _emit(args, {"count": len(ms), "maps": [_table(m) for m in ms]})
    if check == "counit":
        f = _family(args.files[0])
        rep = oracle.check_counit_universal(f, [_load_valid(p) for p in args.files[1:]])
    elif check == "unit":
        g = _load_valid(args.files[0])
        rep = oracle.check_unit_universal(g, [_family(p) for p in args.files[1:]])
    elif check == "extremality":
        f = _family(args.files[0])
        rs = enumerate_realisations(f, args.max_nodes)
        rep = oracle.UniversalCheckReport("extremality")
        for r in rs:
            rep.instances_checked += 1
            a, b = is_extremal(r, f), is_extremal_by_definition(r, f)
            if a != b:
                rep.failures.append({"realisation": to_obj(r), "local": a, "definition": b})
    else:
        raise ParseError(f"unknown oracle check {check!r}")
    payload = rep.as_dict()
    if not rep.passed:
        raise Invalid(payload)
    _emit(args, payload)


def cmd_replay(args):
    log = oracle.replay_appendix_b(args.variant)
    if args.json:
        payload = log.as_dict()
        if not log.passed:
            raise Invalid(payload)
        return _emit(args, payload)
    for line in log.lines():
        args.out.write(line + "\n")
    if not log.passed:
        raise Invalid(None)


def cmd_export_dot(args):
    s = load(args.file)
    if isinstance(s, StructureMap):
        raise ParseError("maps cannot be drawn; draw their source or target")
    args.out.write(export_dot(s))


# -- argument parsing ---------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="causal-unfold",
                                     description="Causal unfoldings of event structures with parallel causes.")
    parser.add_argument("--cap-events", type=int, help="largest structure handled by enumerations")
    parser.add_argument("--cap-configs", type=int, help="most configurations enumerated")
    parser.add_argument("--cap-maps", type=int, help="most maps enumerated by the oracle")
    parser.add_argument("--cap-search", type=int, help="most search nodes visited")
    parser.add_argument("--cap-oracle-events", type=int, help="largest structure the oracle enumerates maps on")
    parser.add_argument("--dot", action="store_true", help="print DOT instead of JSON where a structure results")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *files):
        p = sub.add_parser(name, help=help_text)
        for f in files:
            p.add_argument(f)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a structure or map file", "file")
    p.add_argument("--category", choices=["family", "ese", "prime", "general"])
    add("configs", cmd_configs, "list configurations", "file")
    p = add("unfold", cmd_unfold, "causal unfolding of a structure", "file")
    p.add_argument("--histories", action="store_true", help="include the prime extremal behind each event")
    add("collapse", cmd_collapse, "collapse to a general event structure", "file")
    p = add("extremals", cmd_extremals, "extremal realisations", "file")
    p.add_argument("--prime", action="store_true", help="only the prime extremals")
    p = add("hide", cmd_hide, "project onto visible events", "file")
    p.add_argument("--visible", required=True, help="comma-separated events")
    p = add("restrict-ax", cmd_restrict_ax, "largest part satisfying an axiom", "file")
    p.add_argument("--level", type=int, choices=[0, 1, 2], required=True)
    add("check-axioms", cmd_check_axioms, "Ax0-Ax2 and (A)-(D) of an ese", "file")
    p = add("stable", cmd_stable, "stability of an equivalence family", "file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--pr", action="store_true", help="print the edc of prime configurations")
    g.add_argument("--unamb", action="store_true", help="print the unambiguous configurations")
    add("product", cmd_product, "product of two families", "left", "right")
    for name, func in (("pullback", cmd_pullback), ("pseudo-pullback", cmd_pseudo_pullback)):
        p = add(name, func, f"{name} of two total maps with a common target", "left", "right")
        p.add_argument("--category", choices=["ese", "edc", "family"], default="edc")
    p = add("check-map", cmd_check_map, "validate a map file", "file")
    p.add_argument("--category", choices=["family", "ese", "prime", "general"])
    p = add("oracle", cmd_oracle, "brute-force checks: maps, counit, unit, extremality")
    p.add_argument("check", choices=["maps", "counit", "unit", "extremality"])
    p.add_argument("files", nargs="+")
    p.add_argument("--category", choices=["family", "ese", "prime", "general"])
    p.add_argument("--max-nodes", type=int, default=4)
    p = add("replay-appendix-b", cmd_replay, "re-check the pullback counterexample step by step")
    p.add_argument("--variant", choices=["ese", "edc", "identity-equiv"], default="ese")
    p.add_argument("--json", action="store_true")
    add("export-dot", cmd_export_dot, "draw a structure", "file")
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    args.out = out
    overrides = {"events": args.cap_events, "configs": args.cap_configs, "maps": args.cap_maps,
                 "search": args.cap_search, "oracle_events": args.cap_oracle_events}
    try:
        with caps_mod.caps_override(**overrides):
            args.func(args)
    except Invalid as exc:
        if exc.payload is not None:
            out.write(json.dumps(exc.payload, indent=2, ensure_ascii=False) + "\n")
            for v in (exc.payload or {}).get("violations", []):
                err.write(f"invalid: {v['detail']}\n")
        return EXIT_INVALID
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (ConfigExplosion, SearchExplosion) as exc:
        err.write(f"cap exceeded: {exc}\n")
        return EXIT_CAP
    except EventStructureError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
