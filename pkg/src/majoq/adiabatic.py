"""Adiabatic evolution under H(s) = (1 - s) H0 + s Hp.

Two problems are supported: unstructured search over N items and the 2-SAT
"ring of agrees" on n bits. Integration uses a midpoint exponential step, which
is exactly unitary, so probabilities stay normalized to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from .majorization import ProbDist

# ---------------------------------------------------------------- Hamiltonians


@dataclass(frozen=True)
class SearchSpec:
    """H0 = I - |psi0><psi0| (psi0 uniform), Hp = I - |m><m|."""

    N: int
    marked: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not 0 <= self.marked < self.N:
            raise ValueError(f"marked must lie in [0, {self.N})")

    @property
    def dim(self) -> int:
        return self.N

    def h0(self) -> np.ndarray:
        psi0 = np.full(self.N, 1 / math.sqrt(self.N))
        return np.eye(self.N) - np.outer(psi0, psi0)

    def hp(self) -> np.ndarray:
        h = np.eye(self.N)
        h[self.marked, self.marked] = 0.0
        return h

    def initial_state(self) -> np.ndarray:
        return np.full(self.N, 1 / math.sqrt(self.N), dtype=complex)

    def target_probability(self, probs: np.ndarray) -> float:
        return float(probs[self.marked])

    def reduced(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(H0, Hp, psi0) restricted to span{|m>, uniform over the rest}."""
        a = 1 / math.sqrt(self.N)
        psi0 = np.array([a, math.sqrt(1 - a * a)])
        return np.eye(2) - np.outer(psi0, psi0), np.diag([0.0, 1.0]), psi0


@dataclass(frozen=True)
class RingOfAgreesSpec:
    """Clause j demands bit j == bit j+1 (cyclic); H0 = sum_j (1 - X_j) / 2."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("ring of agrees needs n >= 3")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def h0(self) -> np.ndarray:
        return ring_of_agrees_hamiltonian(self.n)[0]

    def hp(self) -> np.ndarray:
        return np.diag(ring_of_agrees_hamiltonian(self.n)[1])

    def initial_state(self) -> np.ndarray:
        return np.full(self.dim, 1 / math.sqrt(self.dim), dtype=complex)

    def target_probability(self, probs: np.ndarray) -> float:
        # degenerate ground space: all zeros and all ones
        return float(probs[0] + probs[-1])


HamiltonianSpec = Union[SearchSpec, RingOfAgreesSpec]


def ring_of_agrees_hamiltonian(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """(H0 matrix, diagonal of Hp) for the ring of agrees on n bits.

    Hp counts the adjacent disagreeing pairs around the ring; H0 is the
    transverse-field sum whose ground state is the uniform superposition.
    Bit j of a label is read most significant first.
    """
    if n < 3:
        raise ValueError("ring of agrees needs n >= 3")
    dim = 1 << n
    z = np.arange(dim)
    bits = (z[:, None] >> (n - 1 - np.arange(n))) & 1
    hp = (bits != np.roll(bits, -1, axis=1)).sum(axis=1).astype(float)
    h0 = np.zeros((dim, dim))
    for j in range(n):
        flip = z ^ (1 << (n - 1 - j))
        h0[z, z] += 0.5
        h0[flip, z] -= 0.5
    return h0, hp


def _flip_even_basis(n: int) -> np.ndarray:
    # columns (|z> + |~z>)/sqrt(2), z with leading bit 0
    dim = 1 << n
    half = dim >> 1
    basis = np.zeros((dim, half))
    z = np.arange(half)
    basis[z, np.arange(half)] = 1 / math.sqrt(2)
    basis[(dim - 1) ^ z, np.arange(half)] = 1 / math.sqrt(2)
    return basis


def _relevant_pair(spec: HamiltonianSpec):
    """(H0, Hp) in the invariant subspace that carries the dynamics, and its embedding.

    Search reduces to the 2D span of |m> and the uniform rest. The ring of
    agrees conserves global bit flip, so the evolution never leaves the
    flip-even sector; the odd sector's lowest state becomes degenerate with
    the ground state at s = 1 but never couples to it.
    """
    if isinstance(spec, SearchSpec):
        h0, hp, _ = spec.reduced()
        return h0, hp
    basis = _flip_even_basis(spec.n)
    return basis.T @ spec.h0() @ basis, basis.T @ spec.hp() @ basis


def _low_pair(spec: HamiltonianSpec, s: float):
    h0, hp = _relevant_pair(spec)
    w, v = np.linalg.eigh((1 - s) * h0 + s * hp)
    return w, v, hp - h0


def instantaneous_gap(spec: HamiltonianSpec, s: float) -> float:
    """E1(s) - E0(s) within the subspace the evolution explores."""
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    w, _, _ = _low_pair(spec, s)
    return float(w[1] - w[0])


def search_gap(N: int, s: float) -> float:
    """Closed form sqrt(1 - 4 (1 - 1/N) s (1 - s))."""
    return math.sqrt(1 - 4 * (1 - 1 / N) * s * (1 - s))


# ---------------------------------------------------------------- schedules


def local_schedule_time(s: float, N: int, epsilon: float) -> float:
    """Time at which the local-adiabatic search schedule reaches s.

    t(s) = N / (2 eps sqrt(N-1)) * (arctan(sqrt(N-1)(2s-1)) + arctan(sqrt(N-1))).
    """
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    if N < 2 or epsilon <= 0:
        raise ValueError("need N >= 2 and epsilon > 0")
    r = math.sqrt(N - 1)
    return N / (2 * epsilon * r) * (math.atan(r * (2 * s - 1)) + math.atan(r))


def asymptotic_local_time(N: int, epsilon: float) -> float:
    """Large-N limit pi sqrt(N) / (2 eps) of the local schedule's total time."""
    return math.pi * math.sqrt(N) / (2 * epsilon)


@dataclass(frozen=True)
class LinearSchedule:
    T: float

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")

    def s(self, t: float) -> float:
        return min(1.0, max(0.0, t / self.T))

    def ds_dt(self, t: float) -> float:
        return 1.0 / self.T


@dataclass(frozen=True)
class LocalSearchSchedule:
    """ds/dt = eps g(s)^2 for search, optionally stretched to ``total_time``.

    Without ``total_time`` the run lasts exactly t(1); with it the same
    s-path is traversed at uniformly rescaled speed (used to compare with the
    large-N value pi sqrt(N) / (2 eps)).
    """

    N: int
    epsilon: float
    total_time: Optional[float] = None

    def __post_init__(self):
        if self.N < 2 or self.epsilon <= 0:
            raise ValueError("need N >= 2 and epsilon > 0")
        if self.total_time is not None and self.total_time <= 0:
            raise ValueError("total_time must be positive")

    @property
    def T_exact(self) -> float:
        return local_schedule_time(1.0, self.N, self.epsilon)

    @property
    def T(self) -> float:
        return self.T_exact if self.total_time is None else self.total_time

    @property
    def _stretch(self) -> float:
        return self.T_exact / self.T

    def s(self, t: float) -> float:
        return schedule_s_of_t(self, t)

    def ds_dt(self, t: float) -> float:
        g = search_gap(self.N, self.s(t))
        return self.epsilon * g * g * self._stretch


Schedule = Union[LinearSchedule, LocalSearchSchedule]


def schedule_s_of_t(schedule: Schedule, t: float) -> float:
    """Invert the schedule; the local one by bracketed root finding."""
    T = schedule.T
    if not -1e-12 * T <= t <= T * (1 + 1e-12):
        raise ValueError(f"t={t} outside [0, {T}]")
    if isinstance(schedule, LinearSchedule):
        return schedule.s(t)
    t_local = min(max(t, 0.0), T) * schedule._stretch
    T_exact = schedule.T_exact
    if t_local <= 0:
        return 0.0
    if t_local >= T_exact:
        return 1.0
    N, eps = schedule.N, schedule.epsilon
    return brentq(lambda s: local_schedule_time(s, N, eps) - t_local, 0.0, 1.0,
                  xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def adiabatic_lhs(spec: HamiltonianSpec, schedule: Schedule, t: float) -> float:
    """|<E1| dH/dt |E0>| / g(t)^2 with dH/dt = (ds/dt)(Hp - H0)."""
    s = schedule_s_of_t(schedule, t)
    w, v, dh = _low_pair(spec, s)
    g = w[1] - w[0]
    if g <= 0:
        return math.inf
    element = abs(v[:, 1] @ dh @ v[:, 0]) * schedule.ds_dt(t)
    return float(element / (g * g))


# ---------------------------------------------------------------- evolution


@dataclass(frozen=True, eq=False)
class EvolutionRecord:
    t: float
    dist: ProbDist
    p_plus: float
    gap: float
    adiabatic_lhs: float


@dataclass(eq=False)
class EvolutionTrace:
    records: List[EvolutionRecord] = field(default_factory=list)
    final_amps: Optional[np.ndarray] = None
    norm_drift: float = 0.0
    dt: float = 0.0
    steps: int = 0

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def dists(self) -> List[ProbDist]:
        return [r.dist for r in self.records]

    def p_plus(self) -> np.ndarray:
        return np.array([r.p_plus for r in self.records])

    @property
    def final_p_plus(self) -> float:
        return self.records[-1].p_plus


def evolve(spec: HamiltonianSpec, schedule: Schedule, dt: float,
           snapshot_stride: Optional[int] = None, snapshots: Optional[int] = None,
           reduced: bool = False) -> EvolutionTrace:
    """Integrate from the uniform ground state of H0 over [0, T].

    Each step applies exp(-i H(s(t_mid)) dt). Snapshots are taken every
    ``snapshot_stride`` steps, or at ``snapshots`` evenly spaced steps when
    given, always including t=0 and t=T. ``reduced`` integrates search in its
    exact 2D invariant subspace.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    T = schedule.T
    steps = max(1, int(math.ceil(T / dt - 1e-9)))
    h = T / steps
    if snapshots is not None:
        stride = max(1, steps // snapshots)
    else:
        stride = snapshot_stride or 1

    if reduced:
        if not isinstance(spec, SearchSpec):
            raise ValueError("2D reduction only applies to search")
        h0, hp, psi = spec.reduced()
        amps = psi.astype(complex)
        rest = spec.N - 1

        def expand(a):
            probs = np.full(spec.N, abs(a[1]) ** 2 / rest)
            probs[spec.marked] = abs(a[0]) ** 2
            return probs
    else:
        h0, hp = spec.h0(), spec.hp()
        amps = spec.initial_state()

        def expand(a):
            return np.abs(a) ** 2

    trace = EvolutionTrace(dt=h, steps=steps)

    def record(t, a):
        probs = expand(a)
        probs = probs / probs.sum()
        s = schedule_s_of_t(schedule, t)
        trace.records.append(EvolutionRecord(
            t, ProbDist(probs, tol=1e-8), spec.target_probability(probs),
            instantaneous_gap(spec, s), adiabatic_lhs(spec, schedule, t)))

    record(0.0, amps)
    drift = 0.0
    for k in range(steps):
        s = schedule_s_of_t(schedule, (k + 0.5) * h)
        w, v = np.linalg.eigh((1 - s) * h0 + s * hp)
        amps = v @ (np.exp(-1j * w * h) * (v.conj().T @ amps))
        drift = max(drift, abs(float(np.vdot(amps, amps).real) - 1.0))
        if (k + 1) % stride == 0 or k + 1 == steps:
            record(T if k + 1 == steps else (k + 1) * h, amps)
    trace.final_amps = amps
    trace.norm_drift = drift
    return trace


def max_adiabatic_lhs(spec: HamiltonianSpec, schedule: Schedule, points: int = 1000) -> float:
    ts = np.linspace(0.0, schedule.T, points)
    return max(adiabatic_lhs(spec, schedule, float(t)) for t in ts)
