"""Turn snapshot sequences into majorization verdicts and cycle reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Mapping, Sequence, Tuple, Union

import numpy as np

from .majorization import (
    DEFAULT_TOL,
    DimensionError,
    MajorizationVerdict,
    ProbDist,
    Relation,
    as_dist,
    compare,
    shannon_entropy,
)
from .statevector import SnapshotTrace

Direction = Relation  # MAJORIZES or REVERSELY_MAJORIZES


def _as_sequence(trace) -> List[ProbDist]:
    if isinstance(trace, SnapshotTrace):
        return trace.dists()
    if hasattr(trace, "dists"):
        return list(trace.dists())
    return [as_dist(p) for p in trace]


def _ok(verdict: MajorizationVerdict, expected: Relation) -> bool:
    if expected is Relation.MAJORIZES:
        return verdict.majorizing
    if expected is Relation.REVERSELY_MAJORIZES:
        return verdict.reversing
    raise ValueError(f"expected direction must be MAJORIZES or REVERSELY_MAJORIZES, got {expected}")


@dataclass
class ArrowReport:
    verdicts: List[MajorizationVerdict]
    expected: Relation
    violation_count: int
    violation_steps: List[int]
    entropy_curve: List[float]
    tol: float

    @property
    def max_violation(self) -> float:
        """Largest cumulant gap against the expected direction (0 when none)."""
        worst = 0.0
        for v in self.verdicts:
            if not _ok(v, self.expected):
                worst = max(worst, abs(v.max_cumulant_gap))
        return worst


def step_verdicts(trace, tol: float = DEFAULT_TOL,
                  expected: Relation = Relation.MAJORIZES) -> ArrowReport:
    """Compare consecutive snapshots and count steps against ``expected``.

    Equal steps are never violations.
    """
    dists = _as_sequence(trace)
    if len(dists) < 2:
        raise ValueError("need at least two snapshots")
    dim = dists[0].dim
    for i, d in enumerate(dists):
        if d.dim != dim:
            raise DimensionError(f"snapshot {i} has dimension {d.dim}, expected {dim}")
    expected = Relation(expected)
    verdicts = [compare(dists[i], dists[i + 1], tol) for i in range(len(dists) - 1)]
    bad = [i for i, v in enumerate(verdicts) if not _ok(v, expected)]
    return ArrowReport(verdicts, expected, len(bad), bad,
                       [shannon_entropy(d) for d in dists], tol)


@dataclass
class CycleReport:
    # half-open step intervals [start, stop) over the verdict sequence
    reverse_phase: Tuple[int, int]
    forward_phase: Tuple[int, int]
    is_clean_cycle: bool
    turnaround_fraction: float
    violations: int
    # every split index that attains the minimum
    turnaround_range: Tuple[int, int]
    verdicts: List[MajorizationVerdict] = field(repr=False, default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.verdicts)


def detect_cycle(trace, tol: float = DEFAULT_TOL) -> CycleReport:
    """Best split into a reverse-majorization prefix and a majorization suffix.

    The split minimizes the number of steps that break their phase. When a
    whole range of splits ties (Equal steps at the turnaround), the midpoint is
    reported, unless the range touches either end, in which case the trace is
    treated as purely monotone.
    """
    dists = _as_sequence(trace)
    if len(dists) < 3:
        raise ValueError("need at least three snapshots")
    report = step_verdicts(dists, tol)
    verdicts = report.verdicts
    m = len(verdicts)
    bad_rev = np.array([not v.reversing for v in verdicts], dtype=int)
    bad_fwd = np.array([not v.majorizing for v in verdicts], dtype=int)
    prefix = np.concatenate([[0], np.cumsum(bad_rev)])
    suffix = np.concatenate([np.cumsum(bad_fwd[::-1])[::-1], [0]])
    cost = prefix + suffix
    best = int(cost.min())
    ties = np.nonzero(cost == best)[0]
    lo, hi = int(ties[0]), int(ties[-1])
    if lo == 0:
        split = 0
    elif hi == m:
        split = m
    else:
        split = (lo + hi) // 2
    return CycleReport((0, split), (split, m), best == 0, split / m, best, (lo, hi), verdicts)


def truncate_at_peak(trace, success: Sequence[float]):
    """Keep snapshots up to (and including) the first maximum of ``success``."""
    dists = _as_sequence(trace)
    if len(dists) != len(success):
        raise ValueError("success curve must match the snapshots")
    peak = int(np.argmax(np.asarray(success)))
    return dists[: peak + 1]


Report = Union[ArrowReport, CycleReport]


def violation_histogram(reports: Mapping[str, Report]) -> List[dict]:
    """One row per experiment: violation count, worst cumulant gap, clean-cycle flag."""
    if not reports:
        raise ValueError("no reports")
    rows = []
    for name, rep in reports.items():
        if isinstance(rep, CycleReport):
            bad = [v for i, v in enumerate(rep.verdicts)
                   if not (v.reversing if i < rep.reverse_phase[1] else v.majorizing)]
            rows.append({
                "experiment": name,
                "violation_count": rep.violations,
                "max_cumulant_gap": max((abs(v.max_cumulant_gap) for v in bad), default=0.0),
                "is_clean_cycle": rep.is_clean_cycle,
            })
        else:
            rows.append({
                "experiment": name,
                "violation_count": rep.violation_count,
                "max_cumulant_gap": rep.max_violation,
                "is_clean_cycle": None,
            })
    return rows
