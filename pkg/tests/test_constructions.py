import random

import pytest

from causal_unfold import fixtures as fx
from causal_unfold import randomgen
from causal_unfold.constructions import (
    PairEvent,
    check_ax,
    factor_partial_map,
    forget_equiv,
    hide,
    is_stable_ef,
    pr,
    product_ef,
    pseudo_pullback_edc,
    pseudo_pullback_ef,
    pullback_edc,
    pullback_ef,
    restrict_to_ax,
    stable_product_ef,
    stable_pullback_ef,
    unamb,
    with_identity_equiv,
)
from causal_unfold.errors import NotEquivClosed, NotStable
from causal_unfold.oracle import find_isomorphism
from causal_unfold.structures import (
    Category,
    Ese,
    EquivFamily,
    PrimeES,
    StructureMap,
    compose,
    configurations_ese,
    configurations_prime,
    identity_map,
    validate_map,
)
from causal_unfold.unfolding import causal_unfolding, er


def docs_unfolding():
    return er(fx.docs().family).ese


def sets(*xs):
    return {frozenset(x) for x in xs}


def test_hide_examples():
    p = docs_unfolding()
    assert hide(p, p.events) == p
    assert hide(p, ()).events == ()
    q = hide(p, {"d#1", "d#2"})
    assert q.events == ("d#1", "d#2")
    assert not q.le and q.consistent({"d#1", "d#2"}) and q.same("d#1", "d#2")
    with pytest.raises(NotEquivClosed):
        hide(p, {"d#1"})


def test_factor_partial_map():
    p = Ese.build("ab")
    t = Ese.build("x")
    m = StructureMap(p, t, {"a": "x"})
    proj, defined = factor_partial_map(m)
    assert proj.target.events == ("a",)
    assert compose(defined, proj).table == m.table
    proj, defined = factor_partial_map(StructureMap(p, t, {}))
    assert proj.target.events == () and defined.table == {}
    ident = identity_map(p)
    proj, defined = factor_partial_map(ident)
    assert proj.target == p and defined.table == ident.table


def test_check_ax_examples():
    r = check_ax(docs_unfolding())
    assert (r.ax0, r.ax1, r.ax2) == (False, True, True)
    r = check_ax(fx.e1())
    assert r.ax0 and r.ax1 and r.ax2
    assert not check_ax(causal_unfolding(fx.noninj()).ese).ax1


def test_restrict_to_ax():
    p = docs_unfolding()
    q = restrict_to_ax(p, 0)
    assert q.events == p.events
    assert not q.consistent({"d#1", "d#2"})
    assert check_ax(q).ax0
    assert restrict_to_ax(p, 1) == p
    n = causal_unfolding(fx.noninj())
    r = restrict_to_ax(n.ese, 1)
    assert check_ax(r).ax1
    dropped = set(n.ese.events) - set(r.events)
    assert dropped and all(n.history(e).n == 7 for e in dropped)
    with pytest.raises(ValueError):
        restrict_to_ax(p, 3)


def test_equiv_round_trip():
    p = fx.e1()
    assert forget_equiv(with_identity_equiv(p)) == p
    q = forget_equiv(docs_unfolding())
    assert isinstance(q, PrimeES)
    assert q.consistent({"d#1", "d#2"})
    r = check_ax(with_identity_equiv(fx.e2()))
    assert r.ax0 and r.ax1 and r.ax2


def test_stability():
    rep = is_stable_ef(fx.docs().family)
    assert not rep.stable
    assert ("intersection", frozenset("ad"), frozenset("bd"), frozenset("abd")) in rep.witnesses
    assert is_stable_ef(EquivFamily.build([set(), {"a"}]))
    for p in (fx.e1(), restrict_to_ax(docs_unfolding(), 1), fx.appendix_b()["P"]):
        assert is_stable_ef(configurations_ese(p))


def test_unamb():
    f = configurations_prime(fx.e1())
    assert unamb(f).configs == f.configs
    got = unamb(configurations_ese(docs_unfolding())).configs
    assert got == {x for x in configurations_ese(docs_unfolding()).configs
                   if not {"d#1", "d#2"} <= x}
    assert unamb(EquivFamily.build([set()])).configs == sets(())
    with pytest.raises(NotStable):
        unamb(fx.docs().family)


def test_pr_examples():
    p = fx.e1()
    assert find_isomorphism(pr(configurations_prime(p)), Ese.from_prime(p), "ese") is not None
    u = docs_unfolding()
    assert find_isomorphism(pr(configurations_ese(u)), u, "ese") is not None
    assert len(pr(EquivFamily.build([set(), {"a"}])).events) == 1


def test_pr_round_trip_on_random_edcs():
    rng = random.Random(11)
    for _ in range(20):
        p = randomgen.random_edc(rng, rng.randint(1, 5))
        assert find_isomorphism(pr(configurations_ese(p)), p, "ese") is not None


def test_product_small():
    s = product_ef(EquivFamily.build([set(), {"a"}]), EquivFamily.build([set(), {"b"}]))
    a, b, ab = PairEvent("a", None), PairEvent(None, "b"), PairEvent("a", "b")
    assert set(s.obj.events) == {a, b, ab}
    assert s.obj.configs == {frozenset(), frozenset({a}), frozenset({b}), frozenset({ab}), frozenset({a, b})}
    assert validate_map(s.left, Category.FAMILY) == []
    assert validate_map(s.right, Category.FAMILY) == []


def test_product_with_trivial_family():
    f = fx.docs().family
    s = product_ef(f, EquivFamily.build([set()]))
    assert all(d.right is None for d in s.obj.events)
    assert {frozenset(d.left for d in x) for x in s.obj.configs} == set(f.configs)


def test_stable_product_is_product_of_unambiguous_parts():
    fa = configurations_prime(PrimeES.build("ab", [("a", "b")]))
    fb = configurations_prime(PrimeES.build("c"))
    s = stable_product_ef(fa, fb)
    direct = stable_product_ef(unamb(fa), unamb(fb))
    assert unamb(s.obj).configs == direct.obj.configs


def test_pullback_along_identities_is_diagonal():
    f = configurations_prime(fx.e1())
    ident = identity_map(f)
    s = pullback_ef(ident, ident)
    assert all(d.left == d.right for d in s.obj.events)
    assert len(s.obj.configs) == len(f.configs)
    assert len(pullback_edc(identity_map(fx.e1()), identity_map(fx.e1())).obj.events) == len(fx.e1().events)


def test_pullback_over_one_event():
    one = EquivFamily.build([set(), {"x"}])
    m1 = StructureMap(EquivFamily.build([set(), {"a"}]), one, {"a": "x"})
    m2 = StructureMap(EquivFamily.build([set(), {"b"}]), one, {"b": "x"})
    assert pullback_ef(m1, m2).obj.events == (PairEvent("a", "b"),)


def test_pseudo_pullback():
    plain = EquivFamily.build([set(), {"x"}, {"y"}, {"x", "y"}])
    two = EquivFamily.build(plain.configs, [{"x", "y"}])
    left = EquivFamily.build([set(), {"a"}])
    right = EquivFamily.build([set(), {"b"}])
    m1 = StructureMap(left, two, {"a": "x"})
    m2 = StructureMap(right, two, {"b": "y"})
    assert len(pseudo_pullback_ef(m1, m2).obj.events) > len(pullback_ef(m1, m2).obj.events)
    n1 = StructureMap(left, plain, {"a": "x"})
    n2 = StructureMap(right, plain, {"b": "x"})
    assert pseudo_pullback_ef(n1, n2) == pullback_ef(n1, n2)


def test_appendix_b_edc_pullback_is_p():
    b = fx.appendix_b()
    span = pullback_edc(b["f"], b["g"])
    iso = find_isomorphism(span.obj, b["P"], "ese")
    assert iso is not None
    assert compose(b["P_A"], iso).table == span.left.table
    assert compose(b["P_B"], iso).table == span.right.table


def test_edc_pullback_over_prime_target_is_pseudo():
    p = fx.e1()
    ident = identity_map(p)
    a = pullback_edc(ident, ident)
    b = pseudo_pullback_edc(ident, ident)
    assert find_isomorphism(a.obj, b.obj, "ese") is not None


def test_unamb_commutes_with_pullback_on_fixture_spans():
    b = fx.appendix_b()
    def fam(m):
        return StructureMap(configurations_ese(m.source), configurations_ese(m.target), dict(m.table))

    f, g = fam(b["f"]), fam(b["g"])
    left = unamb(stable_pullback_ef(f, g).obj).configs
    uf = StructureMap(unamb(f.source), unamb(f.target), dict(f.table))
    ug = StructureMap(unamb(g.source), unamb(g.target), dict(g.table))
    assert left == stable_pullback_ef(uf, ug).obj.configs
