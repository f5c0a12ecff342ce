import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from phiopt import (
    CAUSE, EFFECT, Repertoire, UndefinedRepertoireError, cause_repertoire, effect_repertoire, emd, expand_repertoire,
    members, nodeset, unconstrained_repertoire,
)
from phiopt.repertoire import dual_vertices, hamming_emd, product_distribution, product_emd

import oracles
from helpers import basic_rows, distributions, prob_rows


@st.composite
def network_case(draw, n_min=1, n_max=3):
    rows = draw(prob_rows(n_min, n_max))
    n = rows.shape[1]
    state = tuple(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    mech = draw(st.integers(0, 2 ** n - 1))
    purview = draw(st.integers(0, 2 ** n - 1))
    return rows, state, mech, purview


def test_nodeset_and_members():
    assert nodeset(0, 2) == 0b101
    assert members(0b1011) == (0, 1, 3)
    assert members(0) == ()


@settings(max_examples=200, deadline=None)
@given(network_case())
def test_cause_repertoire_matches_loop_oracle(case):
    rows, state, mech, purview = case
    want = oracles.cause_repertoire(rows, state, mech, purview)
    if not want.any():
        with pytest.raises(UndefinedRepertoireError):
            cause_repertoire(rows, state, mech, purview)
        return
    got = cause_repertoire(rows, state, mech, purview)
    assert got.purview == purview
    assert np.allclose(got.probabilities, want, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(network_case())
def test_full_purview_cause_is_bayes_posterior(case):
    rows, state, mech, _ = case
    n = rows.shape[1]
    assume(mech and oracles.cause_repertoire(rows, state, mech, 2 ** n - 1).any())
    got = cause_repertoire(rows, state, mech, 2 ** n - 1).probabilities
    assert np.allclose(got, oracles.bayes_inversion(rows, state, mech), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(network_case())
def test_effect_repertoire_matches_loop_oracle(case):
    rows, state, mech, purview = case
    got = effect_repertoire(rows, state, mech, purview).probabilities
    assert np.allclose(got, oracles.effect_repertoire(rows, state, mech, purview), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(network_case(), st.sampled_from([CAUSE, EFFECT]))
def test_repertoires_are_normalized(case, direction):
    rows, state, mech, purview = case
    fn = cause_repertoire if direction == CAUSE else effect_repertoire
    try:
        probs = fn(rows, state, mech, purview).probabilities
    except UndefinedRepertoireError:
        assert direction == CAUSE
        return
    assert probs.shape == (2 ** bin(purview).count("1"),)
    assert np.all(probs >= 0)
    assert abs(probs.sum() - 1) < 1e-12


def test_unreachable_mechanism_state_is_undefined():
    rows = np.zeros((2, 1))
    with pytest.raises(UndefinedRepertoireError):
        cause_repertoire(rows, (1,), 1, 1)


COPY = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)  # each node copies the other


def test_copy_network_examples():
    assert cause_repertoire(COPY, (1, 0), 0b01, 0b10).probabilities.tolist() == [0, 1]
    assert effect_repertoire(COPY, (1, 0), 0b10, 0b01).probabilities.tolist() == [1, 0]
    assert cause_repertoire(COPY, (1, 0), 0, 0b11).probabilities.tolist() == [0.25] * 4
    const_on = np.ones((4, 2))
    assert effect_repertoire(const_on, (1, 1), 0, 0b01).probabilities.tolist() == [0, 1]


def test_expand_point_mass_with_uniform():
    rep = Repertoire(0b01, np.array([1.0, 0.0]))
    full = expand_repertoire(rep, 0b11, COPY, (1, 0), CAUSE)
    assert full.probabilities.tolist() == [0.5, 0, 0.5, 0]
    assert expand_repertoire(rep, 0b01, COPY, (1, 0), CAUSE) == rep


def test_empty_purview_and_mechanism():
    rows = basic_rows()
    state = (1, 0, 0)
    assert cause_repertoire(rows, state, 0b11, 0).probabilities.tolist() == [1.0]
    assert effect_repertoire(rows, state, 0b11, 0).probabilities.tolist() == [1.0]
    assert np.allclose(cause_repertoire(rows, state, 0, 0b111).probabilities, 1 / 8)
    uncon = unconstrained_repertoire(rows, state, 0b111, EFFECT).probabilities
    assert np.allclose(uncon, oracles.effect_repertoire(rows, state, 0, 0b111))


def test_known_basic_network_repertoire():
    # node A (OR of B, C) is ON: the past excludes B = C = 0
    rep = cause_repertoire(basic_rows(), (1, 0, 0), nodeset(0), nodeset(1, 2))
    assert np.allclose(rep.probabilities, [0, 1 / 3, 1 / 3, 1 / 3])


def test_node_sets_outside_network_rejected():
    with pytest.raises(ValueError):
        cause_repertoire(basic_rows(), (0, 0, 0), 0b1000, 1)
    with pytest.raises(ValueError):
        effect_repertoire(basic_rows(), (0, 0, 0), 1, 0b1000)


@settings(max_examples=100, deadline=None)
@given(network_case(2, 3), st.sampled_from([CAUSE, EFFECT]))
def test_expand_repertoire_marginalizes_back(case, direction):
    rows, state, mech, purview = case
    n = rows.shape[1]
    fn = cause_repertoire if direction == CAUSE else effect_repertoire
    assume(direction == EFFECT or oracles.cause_repertoire(rows, state, mech, purview).any())
    rep = fn(rows, state, mech, purview)
    full = expand_repertoire(rep, 2 ** n - 1, rows, state, direction)
    assert abs(full.probabilities.sum() - 1) < 1e-12
    arr = full.probabilities.reshape([2] * n, order="F")
    drop = tuple(i for i in range(n) if not (purview >> i) & 1)
    back = arr.sum(axis=drop).reshape(-1, order="F") if drop else arr.reshape(-1, order="F")
    assert np.allclose(back, rep.probabilities, atol=1e-12)


# ---- EMD

@pytest.mark.parametrize("n, count", [(1, 2), (2, 6), (3, 38), (4, 990)])
def test_dual_vertex_counts(n, count):
    verts = dual_vertices(n)
    assert len(verts) == count
    # every vertex is 1-Lipschitz on the cube
    for x in range(2 ** n):
        for b in range(n):
            assert np.all(np.abs(verts[:, x] - verts[:, x ^ (1 << b)]) <= 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(distributions(n), distributions(n))))
def test_emd_matches_transport_lp(pair):
    p, q = pair
    assert abs(hamming_emd(p, q) - oracles.lp_emd(p, q)) < 1e-9


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.tuples(distributions(n), distributions(n), distributions(n))))
def test_emd_metric_axioms(triple):
    p, q, r = triple
    assert hamming_emd(p, p) == 0
    assert abs(hamming_emd(p, q) - hamming_emd(q, p)) < 1e-12
    assert hamming_emd(p, r) <= hamming_emd(p, q) + hamming_emd(q, r) + 1e-12
    if not np.allclose(p, q, atol=1e-9):
        assert hamming_emd(p, q) > 0


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(distributions(n), distributions(n))))
def test_emd_matches_brute_force_dual(pair):
    p, q = pair
    assert abs(hamming_emd(p, q) - oracles.dual_emd(p, q)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0, 1), min_size=n, max_size=n),
    st.lists(st.floats(0, 1), min_size=n, max_size=n))))
def test_product_emd_equals_full_emd(pair):
    a, b = pair
    full = oracles.dual_emd(product_distribution(a), product_distribution(b))
    assert abs(product_emd(a, b) - full) < 1e-12


def test_emd_requires_same_purview():
    with pytest.raises(ValueError):
        emd(Repertoire(1, np.array([0.5, 0.5])), Repertoire(2, np.array([0.5, 0.5])))
    with pytest.raises(ValueError):
        hamming_emd([0.2, 0.3, 0.5], [0.2, 0.3, 0.5])


def test_emd_single_flip_costs_one():
    assert hamming_emd([1, 0, 0, 0], [0, 1, 0, 0]) == pytest.approx(1)
    assert hamming_emd([1, 0, 0, 0], [0, 0, 0, 1]) == pytest.approx(2)
