"""Worked examples shipped with the package.

The Python builders below are the reference; ``write_files`` regenerates the
JSON copies under ``fixtures/`` and the test suite checks they agree.
"""

import os

from .realisations import Realisation
from .structures import Ese, GeneralES, PrimeES, StructureMap


def _ges(events, enablings):
    return GeneralES.build(events, enabling=[(tuple(x), e) for x, e in enablings])


def docs():
    """Two concurrent treatments, either of which enables the cure ``d``."""
    return _ges("abd", [((), "a"), ((), "b"), (("a",), "d"), (("b",), "d")])


def e0():
    return _ges("abcd", [((), "a"), ((), "b"), (("a",), "c"), (("b",), "c"), (("a", "b", "c"), "d")])


def f0():
    return _ges("abcd", [((), "a"), ((), "b"), (("a",), "c"), (("b",), "c"), (("b", "c"), "d")])


def noninj():
    return _ges("abcdef", [((), "a"), ((), "b"), (("a",), "c"), (("b",), "c"),
                           (("c",), "d"), (("c",), "e"), (("d", "e"), "f")])


def e1():
    """Prime extremal of E0: ``a < c < d`` and ``b < d``."""
    return PrimeES.build("abcd", [("a", "c"), ("c", "d"), ("b", "d")])


def e2():
    """Prime extremal of E0: ``b < c < d`` and ``a < d``."""
    return PrimeES.build("abcd", [("b", "c"), ("c", "d"), ("a", "d")])


def realisation_of(p):
    """An injective realisation read off a prime event structure named by labels."""
    events = list(p.events)
    pos = {e: i for i, e in enumerate(events)}
    return Realisation(tuple(events), tuple(frozenset(pos[d] for d in p.below[e]) for e in events))


def ex53():
    """The unfolding of E0 as drawn: two ways to reach ``c``, two ways to reach ``d``."""
    return Ese.build(
        ["a", "b", "c1", "c2", "d1", "d2"],
        [("a", "c1"), ("c1", "d1"), ("b", "d1"), ("b", "c2"), ("c2", "d2"), ("a", "d2")],
        equiv=[{"c1", "c2"}, {"d1", "d2"}],
    )


# -- the pullback counterexample ----------------------------------------------

_AB_EQUIV = [{"a1", "a2"}, {"b1", "b2"}, {"c1", "c2"}]


def appb_a():
    return Ese.build(["a1", "a2", "b1", "b2", "c1", "c2", "d", "e"],
                     [("d", "c1"), ("c1", "b1"), ("c1", "a1"), ("e", "c2"), ("c2", "b2"), ("c2", "a2")],
                     equiv=_AB_EQUIV)


def appb_b():
    return Ese.build("abcde", [("b", "a")])


def appb_c():
    return Ese.build("abcde")


def appb_p():
    return Ese.build(["a1", "a2", "b1", "b2", "c1", "c2", "d", "e"],
                     [("d", "c1"), ("c1", "b1"), ("b1", "a1"), ("e", "c2"), ("c2", "b2"), ("b2", "a2")],
                     equiv=_AB_EQUIV)


def appb_d():
    return Ese.build(["a1", "b1", "b2", "c1", "c2", "d", "e"],
                     [("d", "c1"), ("c1", "b1"), ("c1", "a1"), ("b2", "a1"), ("e", "c2"), ("c2", "b2")],
                     equiv=[{"b1", "b2"}, {"c1", "c2"}])


def appb_bp():
    return Ese.build(["a1", "a2'", "a1'", "a2", "b1", "b2", "c1", "c2", "d", "e"],
                     [("d", "c1"), ("c1", "b1"), ("e", "c2"), ("c2", "b2"),
                      ("b1", "a1"), ("b1", "a2'"), ("c2", "a2'"),
                      ("b2", "a1'"), ("c1", "a1'"), ("b2", "a2")],
                     equiv=[{"a1", "a2'", "a1'", "a2"}, {"b1", "b2"}, {"c1", "c2"}])


def appb_e():
    return Ese.build(["a1", "b1", "b2", "c1", "c2", "d", "e"],
                     [("d", "c1"), ("c1", "b1"), ("b1", "a1"), ("b2", "a1"), ("e", "c2"), ("c2", "b2")],
                     equiv=[{"b1", "b2"}, {"c1", "c2"}])


def appb_f():
    return Ese.build(["a1", "b1", "b2", "c1", "c2", "d", "e"],
                     [("d", "c1"), ("c1", "b1"), ("b1", "a1"), ("e", "c2"), ("c2", "b2")],
                     equiv=[{"b1", "b2"}, {"c1", "c2"}])


def letter(e):
    """The letter of an event name: ``a2'`` and ``a1`` both give ``a``."""
    return e[0]


def lettering(src, tgt):
    """Map each event to the target event with the same letter (targets must be unambiguous)."""
    by_letter = {letter(e): e for e in tgt.events}
    return StructureMap(src, tgt, {e: by_letter[letter(e)] for e in src.events})


def same_names(src, tgt, rename=lambda e: e):
    return StructureMap(src, tgt, {e: rename(e) for e in src.events})


def appendix_b():
    """All objects and maps of the counterexample, keyed by name."""
    A, B, C, P, D, bP, E, F = (appb_a(), appb_b(), appb_c(), appb_p(), appb_d(), appb_bp(), appb_e(), appb_f())
    strip = lambda e: e.rstrip("'")  # noqa: E731
    return {
        "A": A, "B": B, "C": C, "P": P, "D": D, "bP": bP, "E": E, "F": F,
        "f": lettering(A, C),
        "g": lettering(B, C),
        "P_A": same_names(P, A), "P_B": lettering(P, B),
        "D_A": same_names(D, A), "D_B": lettering(D, B),
        "E_A": same_names(E, A), "E_B": lettering(E, B),
        "F_A": same_names(F, A), "F_B": lettering(F, B),
        "bP_A": same_names(bP, A, strip), "bP_B": lettering(bP, B),
        "k_D": same_names(E, D), "k_F": same_names(E, F),
    }


STRUCTURES = {
    "docs.ges.json": docs,
    "e0.ges.json": e0,
    "f0.ges.json": f0,
    "noninj.ges.json": noninj,
    "e1.prime.json": e1,
    "e2.prime.json": e2,
    "ex53.ese.json": ex53,
    "appb_a.ese.json": appb_a,
    "appb_b.ese.json": appb_b,
    "appb_c.ese.json": appb_c,
    "appb_p.ese.json": appb_p,
    "appb_d.ese.json": appb_d,
    "appb_bp.ese.json": appb_bp,
    "appb_e.ese.json": appb_e,
    "appb_f.ese.json": appb_f,
}

# map fixtures: file -> (name in appendix_b(), source file, target file)
MAPS = {
    "appb_f.map.json": ("f", "appb_a.ese.json", "appb_c.ese.json"),
    "appb_g.map.json": ("g", "appb_b.ese.json", "appb_c.ese.json"),
    "appb_kd.map.json": ("k_D", "appb_e.ese.json", "appb_d.ese.json"),
    "appb_kf.map.json": ("k_F", "appb_e.ese.json", "appb_f.ese.json"),
}

GENERAL = ("docs", "e0", "f0", "noninj")


def fixture_families():
    """Every shipped fixture as an equivalence family, keyed by short name."""
    out = {name: globals()[name]().family for name in GENERAL}
    out["e1"] = e1().family
    out["e2"] = e2().family
    out["ex53"] = ex53().family
    for key in ("A", "B", "C", "P", "D", "bP", "E", "F"):
        out[f"appb_{key}"] = appendix_b()[key].family
    return out


def write_files(directory):
    """Regenerate the JSON fixture files."""
    import json

    from .serialize import dumps

    os.makedirs(directory, exist_ok=True)
    for fname, build in STRUCTURES.items():
        with open(os.path.join(directory, fname), "w", encoding="utf-8") as fh:
            fh.write(dumps(build()))
    objs = appendix_b()
    for fname, (key, src, tgt) in MAPS.items():
        m = objs[key]
        body = {"kind": "map", "source": src, "target": tgt, "table": {a: b for a, b in m.items()}}
        with open(os.path.join(directory, fname), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(body, indent=2) + "\n")
