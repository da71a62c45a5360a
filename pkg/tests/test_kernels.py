import random

import pytest
from hypothesis import given, strategies as st

from causal_unfold import _kernels_py as py
from causal_unfold import kernels

try:
    from causal_unfold import _speedups as cy
except ImportError:  # extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")


@st.composite
def posets(draw, max_nodes=7):
    n = draw(st.integers(0, max_nodes))
    below = [0] * n
    for j in range(n):
        for i in range(j):
            if draw(st.booleans()) and draw(st.booleans()):
                below[j] |= (1 << i) | below[i]
    labels = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    fam = draw(st.sets(st.integers(0, 15), max_size=12))
    return below, [1 << k for k in labels], fam | {0}


def test_selected_backend():
    assert kernels.BACKEND in ("cython", "python")


def test_down_sets_of_chain_and_antichain():
    assert sorted(py.down_sets([0, 1, 3], 7)) == [0, 1, 3, 7]
    assert sorted(py.down_sets([0, 0, 0], 7)) == list(range(8))
    assert py.down_sets([], 0) == [0]


def test_clause_i():
    # a < d over a family where d is also enabled alone
    fam = {0, 1, 2, 3}
    assert not py.clause_i_ok([0, 1], [1, 2], fam)
    assert py.clause_i_ok([0, 1], [1, 2], {0, 1, 3})


def test_union_violations():
    assert py.union_violations([1, 2, 7], {0, 1, 2, 7}) == [(0, 1)]
    assert py.union_violations([1, 2, 3], {0, 1, 2, 3}) == []


@needs_ext
@given(posets())
def test_compiled_matches_pure(case):
    below, lbits, fam = case
    n = len(below)
    full = (1 << n) - 1
    fs_py, fs_cy = py.MaskSet(fam), cy.MaskSet(fam)
    assert sorted(cy.down_sets(below, full)) == sorted(py.down_sets(below, full))
    assert sorted(cy.downset_images(below, lbits, full)) == sorted(py.downset_images(below, lbits, full))
    assert cy.images_all_in(below, lbits, full, fs_cy) == py.images_all_in(below, lbits, full, fs_py)
    assert cy.clause_i_ok(below, lbits, fs_cy) == py.clause_i_ok(below, lbits, fs_py)
    configs = sorted(fam)
    assert cy.union_violations(configs, fs_cy) == py.union_violations(configs, fs_py)


@needs_ext
def test_wide_masks_fall_back():
    rng = random.Random(3)
    masks = [rng.getrandbits(80) for _ in range(5)] + [0]
    fam = cy.MaskSet(masks)
    assert masks[0] in fam and len(fam) == len(set(masks))
    assert cy.union_violations(masks, fam) == py.union_violations(masks, py.MaskSet(masks))
