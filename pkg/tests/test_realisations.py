import itertools
import random

from hypothesis import given, strategies as st

from causal_unfold import fixtures as fx
from causal_unfold import randomgen
from causal_unfold.realisations import (
    Realisation,
    RealisationMap,
    coarsen_to_extremal,
    coarsen_with_map,
    compose_maps,
    enumerate_extremals,
    enumerate_prime_extremals,
    enumerate_realisation_maps,
    enumerate_realisations,
    extremal_order,
    factor_realisation_map,
    is_extremal,
    is_extremal_by_definition,
    is_realisation,
    isomorphic,
    map_between_extremals,
    prime_extremal_table,
    swap_factorisation,
    validate_realisation_map,
)
from causal_unfold.structures import EquivFamily, configurations_prime
from causal_unfold.unfolding import er

R = Realisation


def test_realisation_checks_over_docs(docs_family):
    assert is_realisation(R.build("a"), docs_family)
    assert is_realisation(R.chain("abd"), docs_family)
    assert not is_realisation(R.build("d"), docs_family)


def test_extremality_examples(e0_family):
    e1 = fx.realisation_of(fx.e1())
    assert is_extremal(e1, e0_family)
    assert is_extremal_by_definition(e1, e0_family)
    assert is_extremal(R.build("a"), e0_family)
    assert is_extremal_by_definition(R.build("a"), e0_family)
    # a and b both below c: a alone already enables c
    both = R.build("abcd", [(0, 2), (1, 2), (2, 3)])
    assert is_realisation(both, e0_family)
    assert not is_extremal(both, e0_family)
    assert not is_extremal_by_definition(both, e0_family)


def test_coarsening_docs_chain(docs_family):
    r = coarsen_to_extremal(R.chain("abd"), docs_family)
    assert is_extremal(r, docs_family)
    d = r.labels.index("d")
    assert len(r.below[d]) == 1
    assert {r.labels[i] for i in r.below[d]} <= {"a", "b"}
    other = ({"a", "b"} - {r.labels[i] for i in r.below[d]}).pop()
    k = r.labels.index(other)
    assert not r.below[k] and not r.above[k]


def test_coarsening_e0_gives_e1_or_e2(e0_family):
    both = R.build("abcd", [(0, 2), (1, 2), (2, 3)])
    r = coarsen_to_extremal(both, e0_family)
    shapes = [fx.realisation_of(fx.e1()), fx.realisation_of(fx.e2())]
    assert any(isomorphic(r, s) for s in shapes)


def test_coarsen_keeps_extremal_unchanged(e0_family):
    e1 = fx.realisation_of(fx.e1())
    assert isomorphic(coarsen_to_extremal(e1, e0_family), e1)


def test_coarsen_with_map_is_a_total_map(docs_family):
    r = R.chain("abd")
    out, m = coarsen_with_map(r, docs_family)
    assert m.is_total()
    assert validate_realisation_map(m) == []
    assert m.target == out


def test_factorisation_composes_back():
    r = R.build("abd", [(0, 2), (1, 2)])
    target = R.build("ad", [(0, 1)])
    m = RealisationMap(r, target, {0: 0, 2: 1})
    assert validate_realisation_map(m) == []
    proj, total = factor_realisation_map(m)
    assert proj.is_projection() and total.is_total()
    assert compose_maps(total, proj).table == m.table


def test_total_map_factorisation_is_trivial():
    r = R.chain("ab")
    m = RealisationMap(r, r, {0: 0, 1: 1})
    proj, total = factor_realisation_map(m)
    assert proj.table == {0: 0, 1: 1}
    assert total.table == m.table


def test_swap_on_non_down_closed_projection():
    r = R.chain("ab")
    r0 = R.build("b")
    proj = RealisationMap(r, r0, {1: 0})
    ident = RealisationMap(r0, r0, {0: 0})
    g2, g1 = swap_factorisation(proj, ident)
    assert g2.is_total() and g1.is_projection()
    assert compose_maps(g1, g2).table == compose_maps(ident, proj).table
    # the total part flattens the chain, so it is not an isomorphism
    assert g2.target.order_size() < r.order_size()


def test_swap_preserves_composite_on_docs():
    r = R.build("abd", [(0, 2), (1, 2)])
    r0, new = r.restrict([0, 2])
    proj = RealisationMap(r, r0, new)
    target = R.build("ad", [(0, 1)])
    total = RealisationMap(r0, target, {new[0]: 0, new[2]: 1})
    g2, g1 = swap_factorisation(proj, total)
    assert compose_maps(g1, g2).table == compose_maps(total, proj).table
    assert validate_realisation_map(g2) == [] and validate_realisation_map(g1) == []


def test_prime_extremals_of_docs(docs_family):
    shapes = sorted(r.describe() for r in enumerate_prime_extremals(docs_family))
    assert shapes == ["{a, d} a<d", "{a}", "{b, d} b<d", "{b}"]


def test_prime_extremals_of_a_prime_es_are_its_histories():
    p = fx.e1()
    got = {frozenset(r.labels) for r in enumerate_prime_extremals(p.family)}
    assert got == {p.down({e}) for e in p.events}


def test_noninjective_prime_extremal():
    primes = enumerate_prime_extremals(fx.noninj().family)
    big = [r for r in primes if r.n == 7]
    assert big and big[0].labels.count("c") == 2


def test_at_most_one_map_between_extremals():
    for f in (fx.docs().family, fx.e0().family, fx.ex53().family):
        ex = enumerate_extremals(f)
        for r1, r2 in itertools.product(ex, repeat=2):
            maps = enumerate_realisation_maps(r1, r2)
            assert len(maps) <= 1
            assert (len(maps) == 1) == (map_between_extremals(r1, r2) is not None)


def test_identity_between_equal_extremals(e0_family):
    e1 = fx.realisation_of(fx.e1()).canonical()
    m = map_between_extremals(e1, e1)
    assert m is not None and all(a == b for a, b in m.table.items())


def test_no_map_between_e1_and_e2():
    e1, e2 = fx.realisation_of(fx.e1()), fx.realisation_of(fx.e2())
    assert map_between_extremals(e1, e2) is None
    assert map_between_extremals(e2, e1) is None


def test_dropping_top_is_a_map():
    assert map_between_extremals(R.build("ad", [(0, 1)]), R.build("a")) is not None


def test_extremal_order_of_docs_matches_unfolding(docs_family):
    order = extremal_order(docs_family)
    u = er(docs_family)
    assert len(order.elements) == len(u.ese.family.configs)
    assert order.prime_algebraic_problems() == []


def test_extremal_order_of_prime_es_is_configuration_order():
    p = fx.e1()
    order = extremal_order(p.family)
    images = [frozenset(r.labels) for r in order.elements]
    assert set(images) == set(configurations_prime(p).configs)
    assert len(set(images)) == len(images)
    for i, j in itertools.product(range(len(images)), repeat=2):
        assert order.leq[i][j] == (images[i] <= images[j])


def test_one_point_order():
    order = extremal_order(EquivFamily.build([set()]))
    assert len(order.elements) == 1 and order.prime_algebraic_problems() == []


def test_injective_and_twin_free_enumeration_are_subsets(docs_family):
    everything = {r.code for r in enumerate_realisations(docs_family, 4)}
    twin_free = {r.code for r in enumerate_realisations(docs_family, 4, twin_free=True)}
    injective = {r.code for r in enumerate_realisations(docs_family, 4, injective=True)}
    assert injective <= twin_free <= everything
    assert len(everything) == 518


def test_prime_table_matches_extremals_with_top():
    for f in (fx.docs().family, fx.e0().family, fx.noninj().family):
        pt = prime_extremal_table(f)
        tops = {r.code for r in enumerate_extremals(f) if r.top() is not None}
        assert set(pt.codes) == tops


@st.composite
def labelled_orders(draw):
    n = draw(st.integers(1, 6))
    labels = draw(st.lists(st.sampled_from("abc"), min_size=n, max_size=n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))
    return R.build(labels, [(i, j) for i, j in pairs if i < j])


@given(labelled_orders(), st.randoms(use_true_random=False))
def test_canonical_code_is_invariant_under_renumbering(r, rnd):
    perm = list(range(r.n))
    rnd.shuffle(perm)
    labels = [None] * r.n
    for i in range(r.n):
        labels[perm[i]] = r.labels[i]
    below = [None] * r.n
    for i in range(r.n):
        below[perm[i]] = frozenset(perm[j] for j in r.below[i])
    assert R(tuple(labels), tuple(below)).code == r.code


@given(labelled_orders())
def test_canonical_form_is_isomorphic_and_idempotent(r):
    c = r.canonical()
    assert c.code == r.code
    assert c.canonical() == c


def test_random_extremality_agreement():
    rng = random.Random(2024)
    checked = 0
    while checked < 100:
        f = randomgen.random_family(rng, rng.randint(1, 5))
        r = randomgen.random_realisation(rng, f, 6)
        if r is None:
            continue
        assert is_extremal(r, f) == is_extremal_by_definition(r, f)
        checked += 1
