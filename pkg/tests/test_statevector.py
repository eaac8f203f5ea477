import numpy as np
import pytest

from majoq.statevector import (
    ControlledPhase,
    Hadamard,
    OracleUnitary,
    Permutation,
    PureState,
    SnapshotTrace,
    apply_gate,
    bit_reversal,
    gate_matrix,
    probabilities,
    qft,
    qft_gates,
    qft_matrix,
    schmidt_rank_one,
)


def random_state(dim, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(v / np.linalg.norm(v))


def dense_single(u, target, width):
    # qubit 0 is the most significant bit
    ops = [np.eye(2)] * width
    ops[target] = u
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def test_norm_checked():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]))


def test_hadamard_matches_kron():
    s = random_state(8)
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for t in range(3):
        np.testing.assert_allclose(apply_gate(s, Hadamard(t)).amps, dense_single(H, t, 3) @ s.amps, atol=1e-12)


def test_controlled_phase_diagonal():
    g = ControlledPhase(0, 2, 0.7)
    m = gate_matrix(g, 3)
    expect = np.ones(8, complex)
    for i in range(8):
        if (i >> 2) & 1 and i & 1:
            expect[i] = np.exp(0.7j)
    np.testing.assert_allclose(m, np.diag(expect), atol=1e-12)


def test_gate_inverses():
    s = random_state(16, 1)
    rng = np.random.default_rng(2)
    gates = [Hadamard(1), ControlledPhase(3, 0, 1.1),
             Permutation(rng.permutation(4), qubits=(1, 2), phases=np.exp(1j * rng.uniform(0, 6, 4))),
             OracleUnitary(np.linalg.qr(rng.normal(size=(4, 4)))[0], qubits=(0, 3))]
    for g in gates:
        np.testing.assert_allclose(apply_gate(apply_gate(s, g), g.inverse()).amps, s.amps, atol=1e-12)


def test_permutation_semantics():
    g = Permutation([2, 0, 3, 1])
    out = apply_gate(PureState.basis(0, 4), g)
    assert abs(out.amps[2]) == pytest.approx(1.0)


@pytest.mark.parametrize("width", [1, 2, 3, 4, 5])
def test_qft_gates_match_dense_dft(width):
    N = 1 << width
    for inverse in (False, True):
        u = np.eye(N, dtype=complex)
        for g in qft_gates(width, inverse=inverse):
            u = gate_matrix(g, width) @ u
        np.testing.assert_allclose(u, qft_matrix(N, inverse), atol=1e-12)


def test_dense_dft_is_textbook():
    N = 8
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    np.testing.assert_allclose(qft_matrix(N), np.exp(2j * np.pi * j * k / N) / np.sqrt(N))


def test_bit_reversal():
    assert list(bit_reversal(3)) == [0, 4, 2, 6, 1, 5, 3, 7]


def test_qft_trace_and_offset():
    trace = SnapshotTrace()
    s = PureState.product(PureState.basis(3, 4), PureState.basis(1, 8))
    out = qft(s, 3, trace=trace, offset=2)
    assert len(trace) == len(qft_gates(3))
    np.testing.assert_allclose(out.amps.reshape(4, 8)[3], qft_matrix(8)[:, 1], atol=1e-12)


def test_subregister_probabilities_and_schmidt():
    a, b = random_state(4, 3), random_state(8, 4)
    s = PureState.product(a, b)
    np.testing.assert_allclose(probabilities(s, [0, 1]).values, np.abs(a.amps) ** 2, atol=1e-12)
    assert schmidt_rank_one(s, 2)
    bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert not schmidt_rank_one(bell, 1)


def test_snapshot_steps_increase():
    t = SnapshotTrace()
    t.append("a", probabilities(PureState.basis(0, 2)))
    t.append("b", probabilities(PureState.basis(1, 2)))
    with pytest.raises(ValueError):
        t.append("c", probabilities(PureState.basis(1, 2)), step=0)
