import math

import pytest

from hiermod import analytic as an
from hiermod.analytic import OperatingPoint
from hiermod.coding import CODE_K3
from hiermod.montecarlo import (
    CodesConfig, ErrorCount, LinkStats, RunSpec, _run_chunk, empirical_mnr, run,
)
from hiermod.receiver import IterationSchedule

SMALL_CODES = CodesConfig(CODE_K3, CODE_K3, repetition=3)


def test_error_count():
    c = ErrorCount()
    c.add_frame(1000, 10)
    c.add_frame(1000, 30)
    assert c.ber == 0.02
    assert c.ci_halfwidth == pytest.approx(1.96 * math.sqrt(0.02 * 0.98 / 2000))
    assert c.low_confidence
    assert c.frame_ci_halfwidth == pytest.approx(1.96 * math.sqrt(200 / 2) / 1000)
    assert (c + c).errors == 80
    assert math.isnan(ErrorCount().ber)


def test_runspec_validation():
    with pytest.raises(ValueError, match="no operating points"):
        RunSpec([])
    with pytest.raises(ValueError):
        RunSpec([(0.1, 7.0)], frames=0)
    with pytest.raises(ValueError):
        RunSpec([(0.1, 7.0)], frame_message_bits=4)
    with pytest.raises(ValueError):
        RunSpec([(0.9, 7.0)])
    with pytest.raises(ValueError):
        RunSpec([(0.1, 7.0)], frame_message_bits=8)  # K=7 frame too short for repetition 81


def test_noiseless_run_is_error_free():
    spec = RunSpec([(0.15, 7.0), (0.3, 2.0)], frames=1, frame_message_bits=64, noiseless=True,
                   codes=SMALL_CODES, schedule=IterationSchedule(2))
    for _, s in run(spec):
        assert s.legacy_raw_basic.errors == s.raw_secondary.errors == s.legacy_coded_basic.errors == 0
        assert s.basic_given_s0.errors == s.basic_given_s1.errors == 0
        assert [c.errors for c in s.coded_basic + s.coded_secondary] == [0] * 4


def test_lambda_zero_raw_ber_matches_qpsk():
    spec = RunSpec([(0.0, 4.0)], frames=123, decode=False, seed=4)
    (pt, s), = run(spec)
    raw = s.legacy_raw_basic
    assert raw.bits >= 10**6
    p = an.ber_qpsk(pt.cnr)
    assert abs(raw.ber - p) <= 3 * math.sqrt(p * (1 - p) / raw.bits)


def test_conditionals_partition_raw_count():
    spec = RunSpec([(0.2, 5.0)], frames=5, decode=False)
    (_, s), = run(spec)
    assert s.basic_given_s0.bits + s.basic_given_s1.bits == s.legacy_raw_basic.bits
    assert s.basic_given_s0.errors + s.basic_given_s1.errors == s.legacy_raw_basic.errors


def test_workers_do_not_change_results():
    base = dict(operating_points=[(0.2, 4.0), (0.1, 2.0)], frames=10, frame_message_bits=60,
                codes=SMALL_CODES, schedule=IterationSchedule(2), seed=99)
    one = run(RunSpec(**base, workers=1))
    many = run(RunSpec(**base, workers=3))
    assert one == many


def test_stats_are_additive():
    spec = RunSpec([(0.2, 4.0)], frames=8, frame_message_bits=60, codes=SMALL_CODES,
                   schedule=IterationSchedule(2), seed=5)
    full = _run_chunk((spec, 0, 0, 8))
    halves = _run_chunk((spec, 0, 0, 4)) + _run_chunk((spec, 0, 4, 8))
    assert full == halves
    assert full.frames == 8
    with pytest.raises(ValueError):
        full + LinkStats(coded_basic=[ErrorCount()])


def test_seed_changes_results():
    a = run(RunSpec([(0.2, 4.0)], frames=2, decode=False, seed=1))
    b = run(RunSpec([(0.2, 4.0)], frames=2, decode=False, seed=2))
    assert a != b


def test_empirical_mnr_lambda_zero():
    n = 10**6
    measured = empirical_mnr(0.0, 7.0, n_symbols=n, seed=3)
    assert abs(measured - 10**0.7) <= 3 * 10**0.7 / math.sqrt(n)


def test_empirical_mnr_penalty_factor():
    measured = empirical_mnr(0.1, 7.0)
    assert 10**0.7 / measured == pytest.approx(1.0601187, rel=0.01)


def test_empirical_mnr_saturates():
    measured = empirical_mnr(0.1, 40.0)
    assert measured == pytest.approx(an.mnr(OperatingPoint(0.1, 40.0)), rel=0.01)
    assert measured == pytest.approx(1 / 0.1**2, rel=0.015)


def test_empirical_mnr_needs_samples():
    with pytest.raises(ValueError):
        empirical_mnr(0.1, 7.0, n_symbols=1000)
