import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from majoq.majorization import (
    DimensionError,
    ProbDist,
    Relation,
    birkhoff_decomposition,
    compare,
    doubly_stochastic_witness,
    natural_majorization_check,
    permutation_sum,
    shannon_entropy,
    sorted_cumulants,
)


def lp_majorized(p, q) -> bool:
    """Oracle: is there a doubly stochastic D with p = D q? Solved as an LP."""
    d = len(p)
    rows, rhs = [], []
    for i in range(d):  # row sums
        r = np.zeros((d, d)); r[i, :] = 1; rows.append(r.ravel()); rhs.append(1)
    for j in range(d):  # column sums
        r = np.zeros((d, d)); r[:, j] = 1; rows.append(r.ravel()); rhs.append(1)
    for i in range(d):  # (D q)_i = p_i
        r = np.zeros((d, d)); r[i, :] = q; rows.append(r.ravel()); rhs.append(p[i])
    res = linprog(np.zeros(d * d), A_eq=np.array(rows), b_eq=np.array(rhs),
                  bounds=[(0, None)] * (d * d), method="highs")
    return res.status == 0


def dists(d):
    return st.lists(st.floats(0, 1, allow_nan=False), min_size=d, max_size=d).filter(
        lambda v: sum(v) > 1e-3).map(lambda v: np.array(v) / sum(v))


def test_probdist_validation():
    with pytest.raises(ValueError):
        ProbDist([0.5, 0.6])
    with pytest.raises(ValueError):
        ProbDist([1.2, -0.2])
    p = ProbDist([0.5, 0.5 + 1e-12, -1e-12])
    assert p.values.min() >= 0
    assert ProbDist([0.1, 0.1], normalized=False).total == pytest.approx(0.2)


def test_sorted_cumulants_known():
    c = sorted_cumulants([0.1, 0.6, 0.3]).sums
    np.testing.assert_allclose(c, [0.6, 0.9, 1.0])


def test_compare_directions():
    delta, unif = ProbDist.delta(3, 1), ProbDist.uniform(3)
    assert compare(unif, delta).relation is Relation.MAJORIZES
    assert compare(delta, unif).relation is Relation.REVERSELY_MAJORIZES
    assert compare(unif, unif).relation is Relation.EQUAL
    v = compare([0.6, 0.2, 0.2, 0], [0.5, 0.4, 0.1, 0])
    assert v.relation is Relation.INCOMPARABLE


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        compare([1.0, 0.0], [1.0, 0.0, 0.0])


def test_gap_sign_and_tolerance():
    p, q = [0.5, 0.5], [0.5 + 1e-7, 0.5 - 1e-7]
    assert compare(p, q, 1e-9).relation is Relation.MAJORIZES
    assert compare(p, q, 1e-6).relation is Relation.EQUAL
    assert compare(q, p, 1e-9).max_cumulant_gap < 0


@pytest.mark.parametrize("seed", range(5))
def test_compare_matches_lp(seed):
    rng = np.random.default_rng(seed)
    for _ in range(40):
        d = int(rng.integers(2, 6))
        p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d) * 0.5)
        rel = compare(p, q, 1e-9).relation
        assert (rel in (Relation.MAJORIZES, Relation.EQUAL)) == lp_majorized(p, q)
        assert (rel in (Relation.REVERSELY_MAJORIZES, Relation.EQUAL)) == lp_majorized(q, p)


@settings(max_examples=200, deadline=None)
@given(dists(4), dists(4))
def test_witness_reconstructs(p, q):
    w = doubly_stochastic_witness(p, q)
    if compare(p, q).majorizing:
        assert w is not None
        assert w.is_doubly_stochastic()
        assert np.abs(w.matrix @ q - p).max() <= 1e-9
    else:
        assert w is None


@settings(max_examples=100, deadline=None)
@given(dists(5), st.permutations(range(5)))
def test_permutation_invariance(p, perm):
    assert compare(p, p[list(perm)]).relation is Relation.EQUAL


@settings(max_examples=100, deadline=None)
@given(dists(4))
def test_extremes(p):
    assert compare(ProbDist.uniform(4), p).majorizing
    assert compare(ProbDist.delta(4, 2), p).reversing
    assert shannon_entropy(p) <= 2 + 1e-12


def test_birkhoff_round_trip():
    rng = np.random.default_rng(3)
    for d in (2, 3, 4, 6):
        perms = [rng.permutation(d) for _ in range(4)]
        weights = rng.dirichlet(np.ones(4))
        D = sum(w * np.eye(d)[pm] for w, pm in zip(weights, perms))
        terms = birkhoff_decomposition(D)
        assert sum(t[0] for t in terms) == pytest.approx(1.0)
        np.testing.assert_allclose(permutation_sum(terms, d), D, atol=1e-12)


def test_witness_with_birkhoff_terms():
    p, q = [0.3, 0.3, 0.4], [0.7, 0.2, 0.1]
    w = doubly_stochastic_witness(p, q, birkhoff=True)
    np.testing.assert_allclose(permutation_sum(w.terms, 3), w.matrix, atol=1e-12)


def test_lattice_d3_exhaustive():
    grid = [np.array(v) / 6 for v in itertools.product(range(7), repeat=3) if sum(v) == 6]
    for p, q in itertools.product(grid, repeat=2):
        ok = compare(p, q).majorizing
        w = doubly_stochastic_witness(p, q)
        assert ok == (w is not None)


def test_natural_check_hadamard():
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    before = np.array([1, 1]) / np.sqrt(2)
    after = H @ before
    chk = natural_majorization_check(before, after, H)
    assert chk.natural_majorization and not chk.natural_reverse
    back = natural_majorization_check(after, before, H.conj().T)
    assert back.natural_reverse


def test_natural_check_rejects_inconsistent():
    with pytest.raises(ValueError):
        natural_majorization_check(np.array([1, 0]), np.array([0, 1]), np.eye(2))
    with pytest.raises(ValueError):
        natural_majorization_check(np.array([1, 0]), np.array([1, 0]), np.array([[1, 1], [0, 1]]))


def test_witness_ignores_roundoff_surplus():
    # a ~1e-9 surplus late in q used to stop the T-transform chain early
    p = np.array([0.0, 0.0, 0.5, 0.5])
    q = np.array([0.0, 1.0, 0.5, 1e-9]) / 1.500000001
    w = doubly_stochastic_witness(p, q)
    assert np.abs(w.matrix @ q - p).max() <= 1e-9
