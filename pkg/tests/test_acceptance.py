"""Acceptance criteria 1-10, one test each, with one summary line per criterion.

Two criteria cannot be met as literally worded; each has a scoped test that
must pass plus a strict xfail test recording the literal wording. Run as a
script (python3 tests/test_acceptance.py) to print only the summary lines.
"""

import itertools
import random

import pytest

from causal_unfold import fixtures as fx
from causal_unfold import randomgen
from causal_unfold.constructions import (
    Span,
    check_ax,
    forget_equiv,
    is_stable_ef,
    pr,
    pullback_edc,
    restrict_to_ax,
    stable_pullback_ef,
    unamb,
)
from causal_unfold.errors import SearchExplosion
from causal_unfold.oracle import (
    check_counit_universal,
    check_span_universal,
    check_unit_universal,
    find_isomorphism,
    replay_appendix_b,
)
from causal_unfold.realisations import (
    enumerate_prime_extremals,
    enumerate_realisations,
    extremal_order,
    is_extremal,
    is_extremal_by_definition,
    isomorphic,
)
from causal_unfold.structures import (
    Category,
    Ese,
    StructureMap,
    configurations_ese,
    configurations_prime,
    identity_map,
    irreducibles,
    is_isomorphism,
    is_replete,
    map_equiv,
)
from causal_unfold.unfolding import (
    causal_unfolding,
    check_structural_axioms,
    col,
    collapse_counit,
    er,
    fam,
    rebuild_iso,
    unit_iso_ese,
)

RESULTS = {}

# criteria checked in a narrower form than worded; see the strict xfails
SCOPE = {
    6: "scoped to identity equivalence",
    8: "scoped; <= 7 nodes only for injective labels",
}

TITLES = {
    1: "doctors unfolding",
    2: "prime extremals and irreducibles of E0/F0",
    3: "non-injective prime and Ax1",
    4: "causal unfolding of E0",
    5: "pullback counterexample replay",
    6: "axioms (A)-(D) and rebuild",
    7: "adjunction laws",
    8: "extremality oracle equivalence",
    9: "extremal order is prime-algebraic",
    10: "stable layer",
}


def record(n, status, detail):
    RESULTS[n] = f"criterion {n:2d} ({TITLES[n]}): {status} - {detail}"


def run_criterion(n, check):
    try:
        detail = check()
    except BaseException as exc:
        record(n, "FAIL", f"{type(exc).__name__}: {exc}")
        raise
    record(n, f"PASS ({SCOPE[n]})" if n in SCOPE else "PASS", detail)


def note(n, text):
    if n in RESULTS:
        RESULTS[n] += "; " + text


def summary_lines():
    return [RESULTS[n] for n in sorted(RESULTS)]


# -- 1 ------------------------------------------------------------------------


def criterion_1():
    f = fx.docs().family
    u = er(f)
    expected = Ese.build(["a", "b", "d_a", "d_b"], [("a", "d_a"), ("b", "d_b")],
                         [["a", "b", "d_a", "d_b"]], [["d_a", "d_b"]])
    label = {"a": "a", "b": "b", "d_a": "d", "d_b": "d"}
    cands = {e: [x for x in u.ese.events if u.counit.table[x] == label[e]] for e in expected.events}
    iso = find_isomorphism(expected, u.ese, Category.ESE, cands)
    assert iso is not None, "er(DOCS) differs from the expected 4-event ese"
    every = frozenset(u.ese.events)
    assert u.ese.consistent(every)
    return f"er(DOCS) = {{a, b, d_a, d_b}} via {dict(iso.items())}; all {2 ** len(every)} subsets consistent"


def test_criterion_1():
    run_criterion(1, criterion_1)


# -- 2 ------------------------------------------------------------------------


def criterion_2():
    e0 = fx.e0().family
    tops_d = [r for r in enumerate_prime_extremals(e0) if r.labels[r.top()] == "d"]
    assert len(tops_d) == 2, f"{len(tops_d)} prime extremals with top d"
    shapes = [fx.realisation_of(fx.e1()), fx.realisation_of(fx.e2())]
    for s in shapes:
        assert sum(isomorphic(r, s) for r in tops_d) == 1
    assert frozenset("abcd") in irreducibles(e0)
    f0 = fx.f0().family
    full = [r for r in enumerate_prime_extremals(f0) if frozenset(r.labels) == frozenset("abcd")]
    assert full, "F0 has no prime extremal with image {a,b,c,d}"
    assert frozenset("abcd") not in irreducibles(f0)
    return (f"E0: 2 prime extremals over d (E1, E2), {{a,b,c,d}} irreducible; "
            f"F0: {len(full)} prime extremal(s) with image {{a,b,c,d}}, not irreducible")


def test_criterion_2():
    run_criterion(2, criterion_2)


# -- 3 ------------------------------------------------------------------------


def criterion_3():
    u = causal_unfolding(fx.noninj())
    big = [e for e in u.ese.events if u.history(e).n == 7 and u.history(e).labels.count("c") == 2]
    assert big, "no 7-node prime with two c's"
    assert not check_ax(u.ese).ax1
    r = restrict_to_ax(u.ese, 1)
    assert not set(big) & set(r.events)
    assert check_ax(r).ax1
    return f"prime(s) {', '.join(big)} have 7 nodes and two c's; ax1 false; restriction to Ax1 drops them"


def test_criterion_3():
    run_criterion(3, criterion_3)


# -- 4 ------------------------------------------------------------------------


def criterion_4():
    u = causal_unfolding(fx.e0())
    iso = find_isomorphism(u.ese, fx.ex53(), Category.ESE)
    assert iso is not None
    assert len(u.ese.events) == 6
    return f"isomorphic to the 6-event fixture via {dict(iso.items())}"


def test_criterion_4():
    run_criterion(4, criterion_4)


# -- 5 ------------------------------------------------------------------------


def _span(b, name):
    return Span(b[name], b[f"{name}_A"], b[f"{name}_B"])


def criterion_5():
    b = fx.appendix_b()
    legs = (b["f"], b["g"])
    span = pullback_edc(*legs)
    cands = {d: [q for q in b["P"].events
                 if b["P_A"].table.get(q) == span.left.table.get(d)
                 and b["P_B"].table.get(q) == span.right.table.get(d)]
             for d in span.obj.events}
    assert find_isomorphism(span.obj, b["P"], Category.ESE, cands) is not None
    rep_p = check_span_universal("pullback", _span(b, "P"), legs, [_span(b, "D")])
    assert [f["problem"] for f in rep_p.failures] == ["no mediator"]
    rep_bp = check_span_universal("pullback", _span(b, "bP"), legs, [_span(b, "E")])
    assert len(rep_bp.failures) == 1
    meds = rep_bp.failures[0]["mediators"]
    assert len(meds) == 2 and map_equiv(meds[0], meds[1])
    log = replay_appendix_b()
    assert log.passed
    return (f"pullback_edc(f,g) = P over the projections; P vs D: no mediator; "
            f"bP vs E: 2 equivalent mediators; replay {len(log.steps)}/{len(log.steps)} steps")


def test_criterion_5():
    run_criterion(5, criterion_5)


# -- 6 ------------------------------------------------------------------------
# The forward direction holds for families with the identity equivalence;
# with a nontrivial equivalence the unfolding can fail (A)-(D) (see the
# strict xfail below and the notes kept with the project).


def _families(seed, count, merge):
    rng = random.Random(seed)
    return [randomgen.random_family(rng, rng.randint(1, 6), merge=merge) for _ in range(count)]


def criterion_6():
    d_agree = 0
    for f in _families(6, 100, 0.0):
        p = er(f).ese
        rep = check_structural_axioms(p)
        assert rep.all_hold(), rep.witnesses
        assert rep.D == rep.D_prime
        d_agree += 1
        assert is_isomorphism(rebuild_iso(p), Category.ESE)
    rng = random.Random(66)
    for _ in range(100):
        p = randomgen.random_axiomatic_ese(rng, rng.randint(1, 6))
        rep = check_structural_axioms(p)
        assert rep.D == rep.D_prime
        d_agree += 1
        assert is_isomorphism(rebuild_iso(p), Category.ESE)
    return (f"100 identity-equivalence families (<= 6 events) satisfy (A)-(D) and rebuild; "
            f"100 perturbed ese's rebuild; (D) <=> (D') on {d_agree} instances")


def test_criterion_6():
    run_criterion(6, criterion_6)


@pytest.mark.xfail(strict=True, reason="unfoldings of families with a nontrivial equivalence can violate (A)-(D)")
def test_criterion_6_literal_for_arbitrary_equivalence():
    bad = 0
    for f in _families(60, 100, 0.3):
        rep = check_structural_axioms(er(f).ese)
        if not rep.all_hold() or rep.D != rep.D_prime:
            bad += 1
    note(6, f"literal wording with random equivalences: {bad}/100 families fail, xfail")
    assert bad == 0


# -- 7 ------------------------------------------------------------------------


def criterion_7():
    rng = random.Random(7)
    for _ in range(100):
        p = randomgen.random_ese(rng, rng.randint(0, 6))
        assert is_isomorphism(unit_iso_ese(p), Category.ESE)
    replete = [fx.docs(), fx.e0(), fx.f0()] + [col(randomgen.random_family(rng, 4)) for _ in range(20)]
    for g in replete:
        assert is_replete(g)
        assert is_isomorphism(collapse_counit(g), Category.GENERAL)
    assert not is_replete(fx.noninj())
    assert not is_isomorphism(collapse_counit(fx.noninj()), Category.GENERAL)
    counit_n = unit_n = 0
    for _ in range(200):
        f = randomgen.random_family(rng, rng.randint(0, 3))
        qs = [randomgen.random_ese(rng, rng.randint(0, 3)) for _ in range(2)]
        rep = check_counit_universal(f, qs)
        assert rep.passed, rep.failures[:1]
        counit_n += rep.instances_checked
        g = randomgen.random_ges(rng, rng.randint(1, 3))
        rep = check_unit_universal(g, [randomgen.random_family(rng, rng.randint(0, 3)), fam(g)])
        assert rep.passed, rep.failures[:1]
        unit_n += rep.instances_checked
    return (f"unit iso on 100 ese's; col(fam(g)) = g on {len(replete)} replete g, not for NONINJ; "
            f"counit {counit_n} and unit {unit_n} instances over 200 random families")


def test_criterion_7():
    run_criterion(7, criterion_7)


# -- 8 ------------------------------------------------------------------------
# Realisations may repeat labels, so those with <= 7 nodes are too many to
# enumerate (DOCS alone passes 300000). The scoped check covers every
# realisation with <= 4 nodes, every injectively labelled one with <= 7
# nodes, and 500 random ones with <= 7 nodes.


def _agree(f, rs):
    for r in rs:
        assert is_extremal(r, f) == is_extremal_by_definition(r, f), r.describe()
    return len(rs)


def criterion_8():
    fams = fx.fixture_families()
    small = inj = 0
    for f in fams.values():
        small += _agree(f, enumerate_realisations(f, 4))
        inj += _agree(f, enumerate_realisations(f, 7, injective=True))
    rng = random.Random(8)
    names = sorted(fams)
    rand = 0
    while rand < 500:
        f = fams[rng.choice(names)] if rng.random() < 0.5 else randomgen.random_family(rng, rng.randint(1, 5))
        r = randomgen.random_realisation(rng, f, 7)
        if r is not None:
            rand += _agree(f, [r])
    return (f"agreement on all {small} realisations with <= 4 nodes and all {inj} injective ones "
            f"with <= 7 nodes over {len(fams)} fixtures, plus {rand} random ones")


def test_criterion_8():
    run_criterion(8, criterion_8)


@pytest.mark.xfail(strict=True, raises=SearchExplosion,
                   reason="all realisations with <= 7 nodes are too many to enumerate")
def test_criterion_8_literal_seven_nodes():
    f = fx.docs().family
    note(8, "literal <= 7 nodes on DOCS exceeds a 20000-realisation cap, xfail")
    _agree(f, enumerate_realisations(f, 7, cap=20000))


# -- 9 ------------------------------------------------------------------------


def criterion_9():
    fams = fx.fixture_families()
    for name, f in fams.items():
        order = extremal_order(f)
        assert order.prime_algebraic_problems() == [], name
        tops = {i for i, r in enumerate(order.elements) if r.top() is not None}
        assert set(order.complete_primes()) == tops, name
    primes = [fx.e1(), fx.e2(), forget_equiv(fx.ex53()), forget_equiv(fx.appb_p())]
    for p in primes:
        order = extremal_order(configurations_prime(p))
        images = [frozenset(r.labels) for r in order.elements]
        configs = configurations_prime(p).configs
        assert set(images) == set(configs) and len(images) == len(configs)
        for i, j in itertools.product(range(len(images)), repeat=2):
            assert order.leq[i][j] == (images[i] <= images[j])
    return (f"prime-algebraic with primes = top-element extremals on {len(fams)} fixtures; "
            f"order-isomorphic to configurations on {len(primes)} prime event structures")


def test_criterion_9():
    run_criterion(9, criterion_9)


# -- 10 -----------------------------------------------------------------------


def _family_map(m):
    return StructureMap(configurations_ese(m.source), configurations_ese(m.target), dict(m.table))


def _unamb_map(m):
    return StructureMap(unamb(m.source), unamb(m.target), dict(m.table))


def criterion_10():
    rep = is_stable_ef(fx.docs().family)
    assert not rep.stable
    assert ("intersection", frozenset("ad"), frozenset("bd"), frozenset("abd")) in rep.witnesses
    rng = random.Random(10)
    for _ in range(50):
        p = randomgen.random_edc(rng, rng.randint(0, 6))
        assert find_isomorphism(pr(configurations_ese(p)), p, Category.ESE) is not None
    b = fx.appendix_b()
    spans = [(b["f"], b["g"])]
    for p in (fx.e1(), fx.appb_a(), fx.appb_p()):
        spans.append((identity_map(p), identity_map(p)))
    spans.append((b["P_A"], b["P_A"]))
    for m1, m2 in spans:
        f1, f2 = _family_map(m1), _family_map(m2)
        lhs = unamb(stable_pullback_ef(f1, f2).obj).configs
        rhs = stable_pullback_ef(_unamb_map(f1), _unamb_map(f2)).obj.configs
        assert lhs == rhs
    return (f"DOCS unstable with witness ({{a,d}},{{b,d}},{{a,b,d}}); pr . configurations = id on 50 edc's; "
            f"unamb commutes with pullback on {len(spans)} fixture spans")


def test_criterion_10():
    run_criterion(10, criterion_10)


if __name__ == "__main__":
    checks = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
              6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}
    for n, check in checks.items():
        try:
            run_criterion(n, check)
        except Exception:
            pass
        print(RESULTS[n])
