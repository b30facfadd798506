"""Full ranging sessions: honest verification, replay alarms, phase rules."""

import pytest

from uwblab.channel import SPEED_OF_LIGHT_M_PER_NS, LinkModel
from uwblab.codec import CodeParams
from uwblab.protocol import (
    PHASE_ALARMED,
    PHASE_COMMITTED,
    PHASE_VERIFIED,
    ProtocolState,
    commitment_phase,
    run_session,
    session_trace,
    verification_phase,
)
from uwblab.receiver import (
    REASON_ENERGY,
    REASON_RANGE,
    REASON_TOF,
    VERDICT_NO_CODE,
    DetectionOutcome,
    ReceiverConfig,
)

PARAMS = CodeParams(n=12, alpha=4, beta=8, ts_ns=100.0, tp_ns=2.0, r=2)
RCV = ReceiverConfig(r=1, upsilon=25, backtrack_window_ns=220.0)


def honest_link(d1=10.0):
    return LinkModel(d1_m=d1, d2_m=0.0, e_db=-10.0, sigma_n2=0.0)


def replay_link():
    # per-pulse room R(60 m, +30 m, -10 dB) is about 6.5 dB, so the default
    # 6 dB replay gain keeps the delayed copy plausible at the fake distance
    return LinkModel(d1_m=60.0, d2_m=30.0, e_db=-10.0, sigma_n2=0.0)


def test_honest_session_verifies_exactly():
    for seed in range(3):
        state = run_session(PARAMS, honest_link(), seed=seed, receiver=RCV)
        assert state.phase == PHASE_VERIFIED
        assert state.alarm_reason is None
        assert abs(state.t_commit_tof_ns - state.t_verify_tof_ns) <= 1e-9
        assert state.t_commit_tof_ns == pytest.approx(10.0 / SPEED_OF_LIGHT_M_PER_NS)


def test_replay_session_alarms_on_tof_mismatch():
    for seed in range(3):
        state = run_session(PARAMS, replay_link(), seed=seed,
                            replay_delay_ns=60.0, replay_gain_db=6.0,
                            receiver=RCV)
        assert state.phase == PHASE_ALARMED
        assert state.alarm_reason == REASON_TOF


def test_overdriven_replay_alarms_on_energy():
    state = run_session(PARAMS, replay_link(), seed=0,
                        replay_delay_ns=60.0, replay_gain_db=12.0,
                        receiver=RCV)
    assert state.phase == PHASE_ALARMED
    assert state.alarm_reason == REASON_ENERGY


def test_commitment_beyond_range_alarms():
    state = run_session(PARAMS, replay_link(), seed=0,
                        replay_delay_ns=60.0, max_range_m=65.0,
                        receiver=RCV)
    # committed distance 60 + 60 ns * c / 2 is about 69 m, past the 65 m ceiling
    assert state.phase == PHASE_ALARMED
    assert state.alarm_reason == REASON_RANGE
    assert state.t_verify_tof_ns is None


def test_phase_ordering_is_enforced():
    state = ProtocolState(t_max_tof_ns=1000.0)
    with pytest.raises(RuntimeError):
        verification_phase(state, DetectionOutcome(verdict=VERDICT_NO_CODE))
    commitment_phase(state, honest_link())
    assert state.phase == PHASE_COMMITTED
    with pytest.raises(RuntimeError):
        commitment_phase(state, honest_link())


def test_no_code_fails_closed():
    state = ProtocolState(t_max_tof_ns=1000.0)
    commitment_phase(state, honest_link())
    verification_phase(state, DetectionOutcome(verdict=VERDICT_NO_CODE))
    assert state.phase == PHASE_ALARMED
    assert state.alarm_reason == REASON_TOF
    with pytest.raises(RuntimeError):
        verification_phase(state, DetectionOutcome(verdict=VERDICT_NO_CODE))


def test_session_trace_lines():
    honest = run_session(PARAMS, honest_link(), seed=1, receiver=RCV)
    text = session_trace(honest)
    assert "commit: t_tof=" in text
    assert "verified" in text.strip().split("\n")[-1]
    attacked = run_session(PARAMS, replay_link(), seed=1,
                           replay_delay_ns=60.0, receiver=RCV)
    assert "alarm: tof_mismatch" in session_trace(attacked)
