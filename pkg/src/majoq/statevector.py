"""Dense pure-state simulation with per-gate snapshots.

Basis label i reads the most significant qubit first: qubit 0 is the leading
bit of the label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .majorization import ProbDist

NORM_TOL = 1e-9
UNITARY_TOL = 1e-10


def num_qubits(dim: int) -> int:
    width = int(dim).bit_length() - 1
    if dim <= 0 or 1 << width != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return width


@dataclass(frozen=True, eq=False)
class PureState:
    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        norm = float(np.vdot(a, a).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm^2 is {norm:.12g}")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def width(self) -> int:
        return num_qubits(self.dim)

    @classmethod
    def basis(cls, index: int, dim: int) -> "PureState":
        a = np.zeros(dim, dtype=complex)
        a[index] = 1.0
        return cls(a)

    @classmethod
    def product(cls, *parts: "PureState") -> "PureState":
        a = np.ones(1, dtype=complex)
        for part in parts:
            a = np.kron(a, part.amps)
        return cls(a)


# ---------------------------------------------------------------- gates

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class Hadamard:
    target: int

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.target,)

    def local_matrix(self) -> np.ndarray:
        return _H

    def inverse(self) -> "Hadamard":
        return self


@dataclass(frozen=True)
class ControlledPhase:
    control: int
    target: int
    angle: float

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.control, self.target)

    def local_matrix(self) -> np.ndarray:
        return np.diag([1, 1, 1, np.exp(1j * self.angle)])

    def inverse(self) -> "ControlledPhase":
        return ControlledPhase(self.control, self.target, -self.angle)


@dataclass(frozen=True, eq=False)
class Permutation:
    """Relabels basis states of ``qubits``: |i> -> phases[i] |mapping[i]>.

    ``qubits=None`` means the whole register. Also serves as the functional
    oracle form (permutation plus phase) for registers too large for a dense
    matrix.
    """

    mapping: np.ndarray
    qubits: Optional[Tuple[int, ...]] = None
    phases: Optional[np.ndarray] = None
    name: str = "perm"

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64)
        if not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ValueError("mapping is not a permutation")
        object.__setattr__(self, "mapping", m)
        if self.qubits is not None:
            object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.phases is not None:
            ph = np.asarray(self.phases, dtype=complex)
            if ph.shape != m.shape or np.abs(np.abs(ph) - 1).max() > UNITARY_TOL:
                raise ValueError("phases must be unit-modulus, one per label")
            object.__setattr__(self, "phases", ph)

    def local_matrix(self) -> np.ndarray:
        k = self.mapping.size
        out = np.zeros((k, k), dtype=complex)
        out[self.mapping, np.arange(k)] = 1 if self.phases is None else self.phases
        return out

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(self.mapping.size)
        phases = None if self.phases is None else np.conj(self.phases)[inv]
        return Permutation(inv, self.qubits, phases, self.name)


@dataclass(frozen=True, eq=False)
class OracleUnitary:
    matrix: np.ndarray
    qubits: Optional[Tuple[int, ...]] = None
    name: str = "oracle"

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("oracle matrix must be square")
        if np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() > UNITARY_TOL:
            raise ValueError("oracle matrix is not unitary")
        object.__setattr__(self, "matrix", u)
        if self.qubits is not None:
            object.__setattr__(self, "qubits", tuple(self.qubits))

    def local_matrix(self) -> np.ndarray:
        return self.matrix

    def inverse(self) -> "OracleUnitary":
        return OracleUnitary(self.matrix.conj().T, self.qubits, self.name)


GateOp = Union[Hadamard, ControlledPhase, Permutation, OracleUnitary]


def gate_label(gate: GateOp) -> str:
    if isinstance(gate, Hadamard):
        return f"H({gate.target})"
    if isinstance(gate, ControlledPhase):
        return f"CP({gate.control},{gate.target},{gate.angle:.6g})"
    return gate.name


def _gate_qubits(gate: GateOp, width: int) -> Tuple[int, ...]:
    qubits = gate.qubits
    if qubits is None:
        qubits = tuple(range(width))
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit in {qubits}")
    for q in qubits:
        if not 0 <= q < width:
            raise IndexError(f"qubit {q} out of range for width {width}")
    return qubits


def _on_qubits(amps: np.ndarray, width: int, qubits: Sequence[int],
               fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    k = len(qubits)
    t = np.moveaxis(amps.reshape((2,) * width), qubits, range(k))
    shape = t.shape
    flat = fn(t.reshape(1 << k, -1))
    t = np.moveaxis(flat.reshape(shape), range(k), qubits)
    return t.reshape(-1)


def _apply_raw(amps: np.ndarray, width: int, gate: GateOp) -> np.ndarray:
    qubits = _gate_qubits(gate, width)
    k = len(qubits)
    if isinstance(gate, Permutation):
        if gate.mapping.size != 1 << k:
            raise ValueError("permutation size does not match its qubits")

        def fn(block):
            out = np.empty_like(block)
            src = block if gate.phases is None else block * gate.phases[:, None]
            out[gate.mapping] = src
            return out
    else:
        u = gate.local_matrix()
        if u.shape[0] != 1 << k:
            raise ValueError("gate matrix size does not match its qubits")

        def fn(block):
            return u @ block
    return _on_qubits(amps, width, qubits, fn)


def apply_gate(state: PureState, gate: GateOp) -> PureState:
    return PureState(_apply_raw(state.amps, state.width, gate))


def gate_matrix(gate: GateOp, width: int) -> np.ndarray:
    """Dense 2**width matrix of ``gate`` embedded in a ``width``-qubit register."""
    dim = 1 << width
    return _apply_raw_columns(np.eye(dim, dtype=complex), width, gate)


def _apply_raw_columns(mat, width, gate):
    return np.stack([_apply_raw(mat[:, j], width, gate) for j in range(mat.shape[1])], axis=1)


# ---------------------------------------------------------------- traces


@dataclass(frozen=True, eq=False)
class Snapshot:
    label: str
    step: float
    dist: ProbDist
    gate: Optional[GateOp] = None
    amps: Optional[np.ndarray] = None


@dataclass(eq=False)
class SnapshotTrace:
    records: List[Snapshot] = field(default_factory=list)

    def append(self, label: str, dist: ProbDist, step: Optional[float] = None,
               gate: Optional[GateOp] = None, amps: Optional[np.ndarray] = None) -> Snapshot:
        if step is None:
            step = self.records[-1].step + 1 if self.records else 0
        if self.records and step <= self.records[-1].step:
            raise ValueError("snapshot steps must increase strictly")
        rec = Snapshot(label, step, dist, gate, amps)
        self.records.append(rec)
        return rec

    def extend(self, other: "SnapshotTrace") -> None:
        for rec in other.records:
            self.append(rec.label, rec.dist, gate=rec.gate, amps=rec.amps)

    def dists(self) -> List[ProbDist]:
        return [r.dist for r in self.records]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def probabilities(state: PureState, subregister: Optional[Sequence[int]] = None) -> ProbDist:
    """Measurement distribution, marginalized onto ``subregister`` qubits when given."""
    p = np.abs(state.amps) ** 2
    if subregister is None:
        return ProbDist(p / p.sum())
    width = state.width
    qubits = tuple(subregister)
    if not qubits or len(set(qubits)) != len(qubits) or not all(0 <= q < width for q in qubits):
        raise ValueError(f"invalid subregister {qubits}")
    t = np.moveaxis(p.reshape((2,) * width), qubits, range(len(qubits)))
    marg = t.reshape(1 << len(qubits), -1).sum(axis=1)
    return ProbDist(marg / marg.sum())


def schmidt_rank_one(state: PureState, cut: Union[int, Sequence[int]], tol: float = 1e-9) -> bool:
    """True when the state is a product across the bipartition.

    ``cut`` is either the number of leading qubits in part A or an explicit
    qubit list for part A.
    """
    width = state.width
    part = tuple(range(cut)) if isinstance(cut, (int, np.integer)) else tuple(cut)
    if not part or len(part) >= width or len(set(part)) != len(part) \
            or not all(0 <= q < width for q in part):
        raise ValueError(f"invalid cut {cut!r}")
    t = np.moveaxis(state.amps.reshape((2,) * width), part, range(len(part)))
    s = np.linalg.svd(t.reshape(1 << len(part), -1), compute_uv=False)
    return bool(s[0] ** 2 >= 1.0 - tol)


# ---------------------------------------------------------------- QFT


def bit_reversal(width: int) -> np.ndarray:
    labels = np.arange(1 << width)
    out = np.zeros_like(labels)
    for b in range(width):
        out |= ((labels >> b) & 1) << (width - 1 - b)
    return out


def qft_gates(width: int, offset: int = 0, inverse: bool = False) -> List[GateOp]:
    """Coppersmith decomposition on qubits offset..offset+width-1.

    Hadamard plus controlled phases 2*pi/2**(k-j+1) per qubit, then an explicit
    bit-reversal permutation. The inverse runs the conjugate gates backwards.
    """
    gates: List[GateOp] = []
    for j in range(width):
        gates.append(Hadamard(offset + j))
        for k in range(j + 1, width):
            gates.append(ControlledPhase(offset + k, offset + j, 2 * np.pi / 2 ** (k - j + 1)))
    if width > 1:
        qubits = tuple(range(offset, offset + width))
        gates.append(Permutation(bit_reversal(width), qubits, name="bitrev"))
    if inverse:
        gates = [g.inverse() for g in reversed(gates)]
    return gates


def qft(state: PureState, width: int, inverse: bool = False,
        trace: Optional[SnapshotTrace] = None, offset: int = 0,
        observe: Optional[Sequence[int]] = None) -> PureState:
    """QFT (or its inverse) gate by gate, appending one snapshot per gate to ``trace``.

    Snapshots hold the distribution of ``observe`` (default: the QFT register
    itself).
    """
    if offset < 0 or offset + width > state.width:
        raise ValueError(f"QFT on {width} qubits at offset {offset} does not fit "
                         f"a {state.width}-qubit state")
    if observe is None:
        observe = range(offset, offset + width)
    observe = None if len(observe) == state.width else tuple(observe)
    prefix = "iqft" if inverse else "qft"
    for gate in qft_gates(width, offset, inverse):
        state = apply_gate(state, gate)
        if trace is not None:
            trace.append(f"{prefix}:{gate_label(gate)}", probabilities(state, observe),
                         gate=gate, amps=state.amps)
    return state


def qft_matrix(dim: int, inverse: bool = False) -> np.ndarray:
    """Dense DFT matrix with entries exp(+-2 pi i j k / dim) / sqrt(dim)."""
    sign = -1 if inverse else 1
    j = np.arange(dim)
    return np.exp(sign * 2j * np.pi * np.outer(j, j) / dim) / np.sqrt(dim)
