"""Probability distributions, cumulants and majorization relations.

Conventions: ``compare(p, q)`` answers the question "does the step p -> q
majorize?", i.e. ``Relation.MAJORIZES`` means p is majorized by q (q is the
more ordered distribution).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

DEFAULT_TOL = 1e-9
CONTINUOUS_TOL = 1e-6


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProbDist:
    """Nonnegative real vector summing to one.

    Entries within ``tol`` below zero are clamped. Views that are not
    normalized by construction (per-node probabilities of the glued-trees walk)
    pass ``normalized=False`` to skip the sum check.
    """

    values: np.ndarray
    tol: float = DEFAULT_TOL
    normalized: bool = True

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size == 0:
            raise ValueError("empty distribution")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite probability")
        if v.min() < -self.tol:
            raise ValueError(f"negative probability {v.min():.3e}")
        v = np.clip(v, 0.0, None)
        if self.normalized and abs(v.sum() - 1.0) > self.tol:
            raise ValueError(f"probabilities sum to {v.sum():.12g}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def total(self) -> float:
        return float(self.values.sum())

    @classmethod
    def uniform(cls, d: int) -> "ProbDist":
        return cls(np.full(d, 1.0 / d))

    @classmethod
    def delta(cls, d: int, index: int) -> "ProbDist":
        v = np.zeros(d)
        v[index] = 1.0
        return cls(v)


DistLike = Union[ProbDist, Sequence[float], np.ndarray]


def as_dist(p: DistLike, tol: float = DEFAULT_TOL) -> ProbDist:
    if isinstance(p, ProbDist):
        return p
    return ProbDist(np.asarray(p, dtype=float), tol=tol)


@dataclass(frozen=True, eq=False)
class CumulantVector:
    sums: np.ndarray

    def __len__(self):
        return self.sums.size


def sorted_cumulants(p: DistLike) -> CumulantVector:
    """Prefix sums of the entries sorted in decreasing order."""
    v = as_dist(p).values
    sums = np.cumsum(np.sort(v, kind="stable")[::-1])
    return CumulantVector(sums)


class Relation(str, enum.Enum):
    MAJORIZES = "majorizes"
    REVERSELY_MAJORIZES = "reversely_majorizes"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class MajorizationVerdict:
    relation: Relation
    # signed entry of cumulants(q) - cumulants(p) with the largest magnitude
    max_cumulant_gap: float

    @property
    def majorizing(self) -> bool:
        return self.relation in (Relation.MAJORIZES, Relation.EQUAL)

    @property
    def reversing(self) -> bool:
        return self.relation in (Relation.REVERSELY_MAJORIZES, Relation.EQUAL)


def compare(p: DistLike, q: DistLike, tol: float = DEFAULT_TOL) -> MajorizationVerdict:
    """Classify the step p -> q.

    MAJORIZES when every cumulant of q is at least the matching cumulant of p
    (within ``tol``), REVERSELY_MAJORIZES for the mirrored condition, EQUAL when
    both hold and INCOMPARABLE when the cumulant curves cross.
    """
    cp = sorted_cumulants(p).sums
    cq = sorted_cumulants(q).sums
    if cp.size != cq.size:
        raise DimensionError(f"dimension mismatch: {cp.size} vs {cq.size}")
    gap = cq - cp
    forward = gap.min() >= -tol
    backward = gap.max() <= tol
    if forward and backward:
        rel = Relation.EQUAL
    elif forward:
        rel = Relation.MAJORIZES
    elif backward:
        rel = Relation.REVERSELY_MAJORIZES
    else:
        rel = Relation.INCOMPARABLE
    k = int(np.argmax(np.abs(gap)))
    return MajorizationVerdict(rel, float(gap[k]))


def shannon_entropy(p: DistLike) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    v = as_dist(p).values
    nz = v[v > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


class WitnessKind(str, enum.Enum):
    DOUBLY_STOCHASTIC = "doubly_stochastic"
    CONVEX_PERMUTATION_SUM = "convex_permutation_sum"


@dataclass(frozen=True, eq=False)
class StochasticWitness:
    matrix: np.ndarray
    kind: WitnessKind
    # (weight, permutation) pairs; permutation[i] is the column of the 1 in row i
    terms: tuple = field(default=())

    def is_doubly_stochastic(self, tol: float = DEFAULT_TOL) -> bool:
        d = self.matrix
        return bool(
            d.min() >= -tol
            and np.allclose(d.sum(axis=0), 1.0, atol=tol, rtol=0)
            and np.allclose(d.sum(axis=1), 1.0, atol=tol, rtol=0)
        )


BIRKHOFF_MAX_DIM = 6


def doubly_stochastic_witness(
    p: DistLike,
    q: DistLike,
    tol: float = DEFAULT_TOL,
    birkhoff: bool = False,
) -> Optional[StochasticWitness]:
    """Build D with p = D q from a chain of T-transforms, or None if p is not majorized by q.

    With ``birkhoff=True`` and d <= 6 the matrix is also expanded into a convex
    sum of permutation matrices.
    """
    pd, qd = as_dist(p), as_dist(q)
    if pd.dim != qd.dim:
        raise DimensionError(f"dimension mismatch: {pd.dim} vs {qd.dim}")
    if not compare(pd, qd, tol).majorizing:
        return None
    d = pd.dim
    ip = np.argsort(-pd.values, kind="stable")
    iq = np.argsort(-qd.values, kind="stable")
    x = pd.values[ip]
    y = qd.values[iq].copy()

    # Each T-transform equalizes one more coordinate, so d - 1 of them suffice.
    # Take the first deficit k; cumulant dominance puts a surplus j before it.
    eps = 1e-15
    sorted_d = np.eye(d)
    for _ in range(2 * d):
        diff = y - x
        below = np.nonzero(diff < -eps)[0]
        if below.size == 0:
            break
        k = below[0]
        above = np.nonzero(diff[:k] > eps)[0]
        if above.size == 0:
            break
        j = above[-1]
        delta = min(y[j] - x[j], x[k] - y[k])
        t = delta / (y[j] - y[k])
        step = np.eye(d)
        step[[j, k], [j, k]] = 1.0 - t
        step[j, k] = step[k, j] = t
        y = step @ y
        sorted_d = step @ sorted_d

    perm_p = np.eye(d)[ip]
    perm_q = np.eye(d)[iq]
    matrix = perm_p.T @ sorted_d @ perm_q
    if birkhoff and d <= BIRKHOFF_MAX_DIM:
        terms = birkhoff_decomposition(matrix)
        return StochasticWitness(matrix, WitnessKind.CONVEX_PERMUTATION_SUM, tuple(terms))
    return StochasticWitness(matrix, WitnessKind.DOUBLY_STOCHASTIC)


def birkhoff_decomposition(matrix: np.ndarray, eps: float = 1e-12) -> list:
    """Greedy Birkhoff-von Neumann expansion, capped at d**2 terms."""
    rest = np.array(matrix, dtype=float)
    d = rest.shape[0]
    terms = []
    big = 1e6
    for _ in range(d * d):
        if rest.max() <= eps:
            break
        cost = np.where(rest > eps, -rest, big)
        rows, cols = linear_sum_assignment(cost)
        picked = rest[rows, cols]
        if picked.min() <= eps:
            break
        w = float(picked.min())
        terms.append((w, cols.copy()))
        rest[rows, cols] -= w
    return terms


def permutation_sum(terms, d: int) -> np.ndarray:
    out = np.zeros((d, d))
    for w, perm in terms:
        out[np.arange(d), perm] += w
    return out


@dataclass(frozen=True)
class NaturalCheck:
    natural_majorization: bool
    natural_reverse: bool
    max_residual: float
    max_reverse_residual: float


def natural_majorization_check(
    a_before: np.ndarray,
    a_after: np.ndarray,
    step_unitary: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> NaturalCheck:
    """Interference residuals of one unitary step.

    The forward residual compares |a_before|^2 with |C|^2 |a_after|^2 where C is
    the inverse step; a vanishing residual means a_before's distribution is a
    doubly stochastic image of a_after's. The reverse residual swaps the roles
    of the two states and uses |U|^2.
    """
    before = np.asarray(a_before, dtype=complex)
    after = np.asarray(a_after, dtype=complex)
    u = np.asarray(step_unitary, dtype=complex)
    n = before.size
    if after.size != n or u.shape != (n, n):
        raise DimensionError("state/unitary shapes disagree")
    check_tol = max(tol, 1e-8)
    if np.abs(u.conj().T @ u - np.eye(n)).max() > check_tol:
        raise ValueError("step matrix is not unitary")
    if np.abs(u @ before - after).max() > check_tol:
        raise ValueError("step unitary does not map a_before to a_after")
    c = u.conj().T
    p_before = np.abs(before) ** 2
    p_after = np.abs(after) ** 2
    r_fwd = p_before - (np.abs(c) ** 2) @ p_after
    r_rev = p_after - (np.abs(u) ** 2) @ p_before
    fwd = float(np.abs(r_fwd).max())
    rev = float(np.abs(r_rev).max())
    return NaturalCheck(fwd <= tol, rev <= tol, fwd, rev)
