"""Circuit-model algorithms instrumented with majorization snapshots."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .majorization import NaturalCheck, ProbDist, natural_majorization_check
from .statevector import (
    Hadamard,
    Permutation,
    PureState,
    SnapshotTrace,
    apply_gate,
    gate_label,
    gate_matrix,
    probabilities,
    qft_gates,
    schmidt_rank_one,
)

# ---------------------------------------------------------------- hidden affine


@dataclass(frozen=True)
class AffineProblem:
    """Find the slope m of f(x) = m x + b over Z_N, N = 2**n."""

    n: int
    m: int
    b: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        size = 1 << self.n
        if not (0 <= self.m < size and 0 <= self.b < size):
            raise ValueError(f"m and b must lie in [0, {size})")

    @property
    def N(self) -> int:
        return 1 << self.n

    def f(self, x):
        return (self.m * x + self.b) % self.N


class AffineOracle:
    """U_f |x>|y> = |x>|y + f(x) mod N>, counting its invocations."""

    def __init__(self, problem: AffineProblem):
        self.problem = problem
        self.calls = 0
        N = problem.N
        x, y = np.divmod(np.arange(N * N), N)
        self.gate = Permutation(x * N + (y + problem.f(x)) % N, name="U_f")

    def __call__(self, state: PureState) -> PureState:
        self.calls += 1
        return apply_gate(state, self.gate)


@dataclass
class AffineResult:
    outcome: int
    probability: float
    trace: SnapshotTrace
    entanglement_flags: List[bool]
    oracle_calls: int
    natural: List[NaturalCheck] = field(default_factory=list)
    # trace step ranges (start, stop) of the QFT, oracle and inverse QFT blocks
    blocks: dict = field(default_factory=dict)


def run_hidden_affine(problem: AffineProblem) -> AffineResult:
    """QFT on register 1, one U_f call, inverse QFT, measure register 1.

    The trace holds the register-1 distribution after every elementary gate
    (U_f counts as a single black-box step). Entanglement flags test the
    register cut after every gate; ``natural`` holds the interference check of
    each QFT gate on the register-1 amplitudes.
    """
    n, N = problem.n, problem.N
    reg1 = tuple(range(n))

    # |psi_1> = QFT^-1 |1> on register 2, prepared outside the observed trace
    state = PureState.basis(1, N * N)
    for g in qft_gates(n, offset=n, inverse=True):
        state = apply_gate(state, g)
    psi1 = state.amps.reshape(N, N)[0]

    def reg1_amps(s: PureState) -> np.ndarray:
        # register 2 stays psi_1 up to a phase absorbed into register 1
        return s.amps.reshape(N, N) @ psi1.conj()

    trace = SnapshotTrace()
    flags: List[bool] = []
    natural: List[NaturalCheck] = []

    def record(label, s, gate=None):
        trace.append(label, probabilities(s, reg1), gate=gate, amps=reg1_amps(s))
        flags.append(schmidt_rank_one(s, n))

    record("init", state)
    blocks = {}

    def run_block(name, inverse, s):
        start = len(trace)
        for g in qft_gates(n, offset=0, inverse=inverse):
            before = reg1_amps(s)
            s = apply_gate(s, g)
            # register-1 gates only touch qubits < n, so they embed unchanged in n qubits
            natural.append(natural_majorization_check(before, reg1_amps(s), gate_matrix(g, n)))
            record(f"{name}:{gate_label(g)}", s, g)
        blocks[name] = (start, len(trace))
        return s

    state = run_block("qft", False, state)
    oracle = AffineOracle(problem)
    start = len(trace)
    state = oracle(state)
    record("U_f", state, oracle.gate)
    blocks["oracle"] = (start, len(trace))
    state = run_block("iqft", True, state)

    final = trace.records[-1].dist.values
    outcome = int(np.argmax(final))
    return AffineResult(outcome, float(final[outcome]), trace, flags, oracle.calls, natural, blocks)


# ---------------------------------------------------------------- parity


@dataclass(frozen=True)
class ParityProblem:
    """Parity of f: {1..N} -> {-1, +1}; ``f[x-1]`` holds f(x)."""

    f: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.f)
        if len(vals) < 2 or len(vals) % 2:
            raise ValueError(f"N must be even and >= 2, got {len(vals)}")
        if any(v not in (-1, 1) for v in vals):
            raise ValueError("f must take values in {-1, +1}")
        object.__setattr__(self, "f", vals)

    @property
    def N(self) -> int:
        return len(self.f)

    @property
    def parity(self) -> int:
        return int(np.prod(self.f))

    @classmethod
    def random(cls, N: int, rng: np.random.Generator) -> "ParityProblem":
        return cls(tuple(rng.choice([-1, 1], size=N)))


class ParityOracle:
    """Acts on the |x, a> eigenstates: multiplies amplitude x by f(x)."""

    def __init__(self, problem: ParityProblem):
        self.signs = np.asarray(problem.f, dtype=float)
        self.calls = 0

    def __call__(self, amps: np.ndarray) -> np.ndarray:
        self.calls += 1
        return amps * self.signs


def parity_shift(N: int) -> np.ndarray:
    """Index map of V: cyclic shift x -> x+1 inside each half (0-based labels)."""
    half = N // 2
    x = np.arange(N)
    block, pos = np.divmod(x, half)
    return block * half + (pos + 1) % half


@dataclass(frozen=True)
class ParityRecord:
    label: str
    oracle_calls_so_far: int
    p_psi0: float
    p_psi0_perp: float
    p_rest: float

    @property
    def dist(self) -> ProbDist:
        return ProbDist([self.p_psi0, self.p_psi0_perp, self.p_rest])


@dataclass
class ParityResult:
    parity: int
    oracle_calls: int
    trace: List[ParityRecord]
    final_amps: np.ndarray

    def dists(self) -> List[ProbDist]:
        return [r.dist for r in self.trace]


def run_parity(problem: ParityProblem) -> ParityResult:
    """V_{N/2} U_f ... V_1 U_f |psi_0> with V_{N/2} = 1, tracked on the a-sector.

    Each record holds the overlaps with |psi_0> and |psi_0^perp> plus the
    remainder, after every operator.
    """
    N = problem.N
    half = N // 2
    psi0 = np.full(N, 1 / np.sqrt(N))
    perp = psi0 * np.where(np.arange(N) < half, 1.0, -1.0)
    shift = parity_shift(N)
    oracle = ParityOracle(problem)

    trace: List[ParityRecord] = []

    def record(label, a):
        p0 = abs(np.vdot(psi0, a)) ** 2
        p1 = abs(np.vdot(perp, a)) ** 2
        trace.append(ParityRecord(label, oracle.calls, p0, p1, max(0.0, 1.0 - p0 - p1)))

    amps = psi0.astype(complex)
    record("init", amps)
    for i in range(1, half + 1):
        amps = oracle(amps)
        record(f"U_f#{i}", amps)
        if i < half:
            moved = np.empty_like(amps)
            moved[shift] = amps
            amps = moved
            record(f"V#{i}", amps)
    overlap = trace[-1].p_psi0
    parity = 1 if overlap > 0.5 else -1
    return ParityResult(parity, oracle.calls, trace, amps)


# ---------------------------------------------------------------- Grover


@dataclass
class GroverResult:
    trace: SnapshotTrace
    # success probability after k = 0..iterations Grover iterations
    success: np.ndarray
    # trace index of the state before the first Grover iteration
    prep_end: int


def run_grover(n: int, marked: int, iterations: int) -> GroverResult:
    """Hadamard preparation (one snapshot per gate) then Grover iterations.

    One iteration is the oracle phase flip followed by inversion about the
    mean, recorded as a single snapshot.
    """
    N = 1 << n
    if not 0 <= marked < N:
        raise ValueError(f"marked must lie in [0, {N})")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    trace = SnapshotTrace()
    state = PureState.basis(0, N)
    trace.append("init", probabilities(state), amps=state.amps)
    for q in range(n):
        gate = Hadamard(q)
        state = apply_gate(state, gate)
        trace.append(f"H({q})", probabilities(state), gate=gate, amps=state.amps)
    prep_end = len(trace) - 1
    amps = state.amps.copy()
    success = [abs(amps[marked]) ** 2]
    for k in range(1, iterations + 1):
        amps[marked] *= -1
        amps = 2 * amps.mean() - amps
        state = PureState(amps)
        trace.append(f"G#{k}", probabilities(state), amps=state.amps)
        success.append(abs(amps[marked]) ** 2)
    return GroverResult(trace, np.array(success), prep_end)
