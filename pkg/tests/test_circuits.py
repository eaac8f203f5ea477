import itertools
import math

import numpy as np
import pytest

from majoq.circuits import (
    AffineProblem,
    ParityProblem,
    parity_shift,
    run_grover,
    run_hidden_affine,
    run_parity,
)
from majoq.statevector import qft_matrix
from majoq.trajectory import detect_cycle


def dense_affine(problem):
    """Oracle: the whole algorithm as dense 2n-qubit matrices."""
    N = problem.N
    F, Fi = qft_matrix(N), qft_matrix(N, inverse=True)
    I = np.eye(N)
    Uf = np.zeros((N * N, N * N))
    for x, y in itertools.product(range(N), repeat=2):
        Uf[x * N + (y + problem.f(x)) % N, x * N + y] = 1
    state = np.zeros(N * N, complex)
    state[1] = 1
    state = np.kron(I, Fi) @ state
    state = np.kron(Fi, I) @ Uf @ np.kron(F, I) @ state
    return (np.abs(state.reshape(N, N)) ** 2).sum(axis=1)


@pytest.mark.parametrize("m,b", [(3, 5), (0, 0), (7, 2), (4, 6)])
def test_affine_matches_dense(m, b):
    problem = AffineProblem(3, m, b)
    res = run_hidden_affine(problem)
    np.testing.assert_allclose(res.trace.records[-1].dist.values, dense_affine(problem), atol=1e-12)
    assert res.outcome == m and res.oracle_calls == 1


def test_affine_structure():
    res = run_hidden_affine(AffineProblem(4, 9, 3))
    assert all(res.entanglement_flags)
    q0, q1 = res.blocks["qft"]
    assert res.blocks["oracle"] == (q1, q1 + 1)
    cycle = detect_cycle(res.trace)
    assert cycle.is_clean_cycle
    lo, hi = cycle.turnaround_range
    assert lo <= q1 <= hi + 1


def test_affine_rejects_out_of_range():
    with pytest.raises(ValueError):
        AffineProblem(3, 8, 0)


def full_parity(problem):
    """Oracle: 2N-dim simulation on |x, a> with a in {0, 1}, a=0 the relevant sector."""
    N = problem.N
    f = np.asarray(problem.f, float)
    shift = parity_shift(N)
    psi = np.zeros(2 * N, complex)
    psi[:N] = 1 / math.sqrt(N)
    Uf = np.diag(np.concatenate([f, np.ones(N)]))
    V = np.zeros((2 * N, 2 * N))
    V[shift, np.arange(N)] = 1
    V[np.arange(N, 2 * N), np.arange(N, 2 * N)] = 1
    for i in range(N // 2):
        psi = Uf @ psi
        if i < N // 2 - 1:
            psi = V @ psi
    return psi


def test_parity_exhaustive_n4():
    for f in itertools.product((-1, 1), repeat=4):
        p = ParityProblem(f)
        res = run_parity(p)
        assert res.parity == p.parity
        assert res.oracle_calls == 2
        np.testing.assert_allclose(res.final_amps, full_parity(p)[:4], atol=1e-12)


def test_parity_trace_shape():
    res = run_parity(ParityProblem.random(8, np.random.default_rng(1)))
    labels = [r.label for r in res.trace]
    assert labels[0] == "init" and labels[-1] == "U_f#4"
    assert len(labels) == 1 + 4 + 3
    for r in res.trace:
        assert r.p_psi0 + r.p_psi0_perp + r.p_rest == pytest.approx(1.0)


def test_parity_rejects_odd():
    with pytest.raises(ValueError):
        ParityProblem((1, -1, 1))


def test_grover_matches_closed_form():
    n, marked = 5, 11
    res = run_grover(n, marked, 8)
    theta = math.asin(2 ** (-n / 2))
    expect = [math.sin((2 * k + 1) * theta) ** 2 for k in range(9)]
    np.testing.assert_allclose(res.success, expect, atol=1e-12)
    assert res.prep_end == n
    assert int(np.argmax(res.success)) == 4
