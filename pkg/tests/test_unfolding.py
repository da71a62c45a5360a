import random

import pytest

from causal_unfold import fixtures as fx
from causal_unfold import randomgen
from causal_unfold.constructions import restrict_to_ax
from causal_unfold.errors import AxiomsFailed
from causal_unfold.oracle import find_isomorphism
from causal_unfold.structures import (
    Category,
    Ese,
    EquivFamily,
    GeneralES,
    PrimeES,
    StructureMap,
    compose,
    configurations,
    configurations_ese,
    fam_to_ges,
    is_isomorphism,
    is_replete,
    map_equiv,
    validate_map,
)
from causal_unfold.unfolding import (
    causal_unfolding,
    check_structural_axioms,
    col,
    collapse_counit,
    counit_check,
    er,
    fam,
    factor_through_counit,
    factor_through_unit,
    rebuild_iso,
    unit,
    unit_iso_ese,
)


def test_docs_unfolding_shape():
    u = er(fx.docs().family)
    p = u.ese
    assert p.events == ("a", "b", "d#1", "d#2")
    assert p.le == {("a", "d#1"), ("b", "d#2")}
    assert p.con == (frozenset(p.events),)
    assert frozenset({"d#1", "d#2"}) in p.equiv
    assert u.counit.table == {"a": "a", "b": "b", "d#1": "d", "d#2": "d"}
    assert u.history("d#1").describe() == "{a, d} a<d"


def test_empty_family_unfolds_to_empty_ese():
    u = er(EquivFamily.build([set()]))
    assert u.ese.events == ()
    assert counit_check(EquivFamily.build([set()]), u)


def test_e0_unfolds_to_ex53():
    u = causal_unfolding(fx.e0())
    assert find_isomorphism(u.ese, fx.ex53(), "ese") is not None


@pytest.mark.parametrize("name", ["docs", "e0", "f0", "noninj"])
def test_counit_is_a_map(name):
    f = getattr(fx, name)().family
    assert counit_check(f, er(f))


def test_factor_through_counit_on_docs():
    f = fx.docs().family
    q = PrimeES.build("abd", [("a", "d"), ("b", "d")])
    m = StructureMap(q, f, {e: e for e in "abd"})
    u = er(f)
    h = factor_through_counit(q, f, m, u)
    assert h.table["d"] in ("d#1", "d#2")
    assert compose(u.counit, h).table == m.table
    assert validate_map(h, Category.ESE) == []


def test_factor_counit_against_itself_is_identity_up_to_equiv():
    f = fx.docs().family
    u = er(f)
    h = factor_through_counit(u.ese, f, u.counit, u)
    ident = StructureMap(u.ese, u.ese, {e: e for e in u.ese.events})
    assert map_equiv(h, ident)


def test_factor_through_counit_from_empty():
    f = fx.docs().family
    q = Ese.build([])
    h = factor_through_counit(q, f, StructureMap(q, f, {}))
    assert h.table == {}


def test_unit_iso_on_prime_es_and_unfoldings():
    for p in (fx.e1(), fx.e2(), er(fx.docs().family).ese, Ese.build([])):
        assert is_isomorphism(unit_iso_ese(p), Category.ESE)


def test_unfolding_configurations_collapse_to_docs():
    u = er(fx.docs().family)
    g = col(configurations_ese(u.ese))
    assert set(g.events) == {"a", "b", "d#1"}
    rename = {"a": "a", "b": "b", "d#1": "d"}
    got = {frozenset(rename[e] for e in x) for x in configurations(g).configs}
    assert got == set(fx.docs().family.configs)


def test_col_of_identity_family_is_fam_to_ges():
    f = fx.docs().family
    assert configurations(col(f)).configs == configurations(fam_to_ges(f)).configs


def test_col_of_e0_unfolding_is_replete_with_e0_configurations():
    g = col(configurations_ese(causal_unfolding(fx.e0()).ese))
    assert is_replete(g)
    assert len(configurations(g).configs) == len(fx.e0().family.configs)


def test_fam_examples():
    assert len(fam(fx.docs()).configs) == 7
    assert fam(GeneralES.build([])).configs == {frozenset()}
    assert "e" not in fam(GeneralES.build("ae", enabling=[((), "a"), (("e",), "e")])).events


def test_unit_factorisation():
    f = fx.docs().family
    eta = unit(f)
    k = factor_through_unit(f, col(f), eta)
    assert all(a == b for a, b in k.table.items())
    m = StructureMap(f, f, {})
    assert factor_through_unit(f, f, m).table == {}


def test_unit_factorisation_reproduces_lettering():
    f = er(fx.docs().family).ese.family
    target = fx.docs().family
    m = StructureMap(f, target, {"a": "a", "b": "b", "d#1": "d", "d#2": "d"})
    k = factor_through_unit(f, target, m)
    assert compose(k, unit(f)).table == m.table


def test_collapse_counit_iso_exactly_for_replete():
    assert is_isomorphism(collapse_counit(fx.docs()), Category.GENERAL)
    nonreplete = GeneralES.build("ae", enabling=[((), "a")])
    assert not is_isomorphism(collapse_counit(nonreplete), Category.GENERAL)


def test_noninj_unfolding_has_ax1_violating_prime():
    u = causal_unfolding(fx.noninj())
    big = [e for e in u.ese.events if u.history(e).n == 7]
    assert big
    assert u.history(big[0]).labels.count("c") == 2


@pytest.mark.parametrize("name", ["docs", "e0", "f0", "noninj"])
def test_unfoldings_satisfy_axioms(name):
    rep = check_structural_axioms(causal_unfolding(getattr(fx, name)()).ese)
    assert rep.all_hold()
    assert rep.D_prime == rep.D


def test_axiom_b_failure():
    p = Ese.build("ab", equiv=[{"a", "b"}])
    rep = check_structural_axioms(p)
    assert not rep.B
    with pytest.raises(AxiomsFailed) as err:
        rebuild_iso(p)
    assert err.value.axiom == "B"


def test_edc_image_of_general_es_satisfies_d1():
    for name in ("docs", "e0", "noninj"):
        p = restrict_to_ax(causal_unfolding(getattr(fx, name)()).ese, 1)
        assert check_structural_axioms(p).D1


def test_rebuild_iso_on_fixtures():
    for p in (er(fx.docs().family).ese, fx.e1(), fx.ex53(), causal_unfolding(fx.noninj()).ese):
        assert is_isomorphism(rebuild_iso(p), Category.ESE)


def test_random_unfoldings_rebuild():
    rng = random.Random(7)
    for _ in range(30):
        f = randomgen.random_family(rng, rng.randint(1, 5), merge=0.0)
        p = er(f).ese
        assert check_structural_axioms(p).all_hold()
        assert is_isomorphism(rebuild_iso(p), Category.ESE)
