import numpy as np
import pytest

from majoq.circuits import AffineProblem, run_hidden_affine
from majoq.majorization import Relation
from majoq.trajectory import detect_cycle, step_verdicts, truncate_at_peak, violation_histogram


def spread(k, d=4):
    v = np.zeros(d)
    v[:k] = 1 / k
    return v


def test_step_verdicts_counts():
    seq = [spread(4), spread(2), spread(3), spread(1)]
    rep = step_verdicts(seq, expected=Relation.MAJORIZES)
    assert rep.violation_count == 1 and rep.violation_steps == [1]
    assert rep.max_violation == pytest.approx(1 / 3)
    assert rep.entropy_curve[0] == pytest.approx(2.0)
    rev = step_verdicts(seq[::-1], expected=Relation.REVERSELY_MAJORIZES)
    assert rev.violation_count == 1


def test_equal_steps_are_not_violations():
    rep = step_verdicts([spread(2), spread(2)[::-1], spread(1)])
    assert rep.violation_count == 0


def test_needs_two_snapshots():
    with pytest.raises(ValueError):
        step_verdicts([spread(1)])


def test_clean_cycle_split():
    seq = [spread(1), spread(2), spread(4), spread(2), spread(1)]
    cyc = detect_cycle(seq)
    assert cyc.is_clean_cycle and cyc.violations == 0
    assert cyc.reverse_phase == (0, 2) and cyc.forward_phase == (2, 4)
    assert cyc.turnaround_fraction == 0.5


def test_monotone_trace_is_clean():
    cyc = detect_cycle([spread(4), spread(3), spread(2), spread(1)])
    assert cyc.is_clean_cycle and cyc.turnaround_fraction == 0.0


def test_dirty_cycle():
    seq = [spread(1), spread(3), spread(2), spread(4), spread(1)]
    cyc = detect_cycle(seq)
    assert not cyc.is_clean_cycle and cyc.violations == 1


def test_affine_cycle_turns_at_oracle():
    res = run_hidden_affine(AffineProblem(3, 5, 1))
    cyc = detect_cycle(res.trace)
    assert cyc.is_clean_cycle
    start, _ = res.blocks["oracle"]
    lo, hi = cyc.turnaround_range
    # the oracle step (verdict index start-1) is Equal, so the split may sit on either side
    assert lo <= start - 1 <= hi


def test_truncate_at_peak():
    seq = [spread(4), spread(2), spread(1), spread(2)]
    assert len(truncate_at_peak(seq, [0.25, 0.5, 1.0, 0.5])) == 3


def test_histogram_rows():
    rows = violation_histogram({
        "a": step_verdicts([spread(4), spread(1)]),
        "b": detect_cycle([spread(1), spread(3), spread(2), spread(4), spread(1)]),
    })
    assert rows[0]["violation_count"] == 0 and rows[0]["is_clean_cycle"] is None
    assert rows[1]["violation_count"] == 1 and rows[1]["is_clean_cycle"] is False
    with pytest.raises(ValueError):
        violation_histogram({})
