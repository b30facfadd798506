"""Two-device ranging session: commit a distance, then verify it.

The commitment phase yields an upper-bound time of flight that an adversary
can only enlarge, never shrink. The verification phase re-measures the
arrival of a coded frame, backtracking past the acquisition lock; the
session alarms when the frame's energy is injected-hot, when no code can be
verified at all, or when the re-measured time of flight disagrees with the
committed one. All times are one-way equivalents in nanoseconds; a replay
that delays one direction of a round trip by delta enlarges the one-way
time by delta / 2.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .adversary import plan_attack, replay_frame
from .channel import SPEED_OF_LIGHT_M_PER_NS, LinkModel, synthesize_timeline
from .codec import CodeParams, generate_code
from .receiver import (
    REASON_RANGE,
    REASON_TOF,
    VERDICT_ACCEPTED,
    VERDICT_ATTACK,
    DetectionOutcome,
    ReceiverConfig,
    backtrack_detect,
)

PHASE_IDLE = "idle"
PHASE_COMMITTED = "committed"
PHASE_VERIFIED = "verified"
PHASE_ALARMED = "alarmed"


@dataclass
class ProtocolState:
    """One ranging session's bookkeeping. Alarmed is terminal."""

    t_max_tof_ns: float
    precision_ns: float = 0.33
    t_commit_tof_ns: float | None = None
    t_verify_tof_ns: float | None = None
    phase: str = PHASE_IDLE
    alarm_reason: str | None = None
    trace: list = field(default_factory=list)

    def _log(self, line: str):
        self.trace.append(line)

    def _alarm(self, reason: str):
        self.phase = PHASE_ALARMED
        self.alarm_reason = reason
        self._log(f"alarm: {reason}")


def commitment_phase(state: ProtocolState, link: LinkModel, adversary_delay_ns: float = 0.0) -> float:
    """Commit to an upper-bound time of flight.

    The committed value is the true one-way time of flight plus whatever
    delay the adversary managed to smuggle into the round trip (halved by
    the caller). A commitment beyond the maximum communication range alarms
    immediately.
    """
    if state.phase != PHASE_IDLE:
        raise RuntimeError(f"commitment must start from idle, session is {state.phase}")
    t_true = link.d1_m / SPEED_OF_LIGHT_M_PER_NS
    t_commit = t_true + adversary_delay_ns
    state.t_commit_tof_ns = t_commit
    state._log(
        "commit: t_tof=%.4f ns (d=%.3f m)"
        % (t_commit, t_commit * SPEED_OF_LIGHT_M_PER_NS)
    )
    if t_commit > state.t_max_tof_ns:
        state._alarm(REASON_RANGE)
    else:
        state.phase = PHASE_COMMITTED
    return t_commit


def verification_phase(
    state: ProtocolState,
    detection: DetectionOutcome,
    t_verify_tof_ns: float = float("nan"),
) -> str:
    """Judge the session from the verification frame's detection outcome.

    t_verify_tof_ns is the one-way time of flight the caller recovered from
    the detection's time of arrival. A detection alarm propagates as-is; a
    frame with no verifiable code fails closed as a time-of-flight mismatch
    (there is no arrival to corroborate the commitment); otherwise the
    committed and verified times must agree within the ranging precision.
    Returns the resulting phase.
    """
    if state.phase == PHASE_ALARMED:
        raise RuntimeError("session already alarmed")
    if state.phase != PHASE_COMMITTED:
        raise RuntimeError(f"verification requires a committed session, got {state.phase}")
    if detection.verdict == VERDICT_ATTACK:
        state._alarm(detection.reason)
        return state.phase
    if detection.verdict != VERDICT_ACCEPTED or math.isnan(t_verify_tof_ns):
        state._alarm(REASON_TOF)
        return state.phase
    state.t_verify_tof_ns = t_verify_tof_ns
    state._log("verify: t_tof=%.4f ns" % t_verify_tof_ns)
    if abs(state.t_commit_tof_ns - t_verify_tof_ns) > state.precision_ns:
        state._alarm(REASON_TOF)
    else:
        state.phase = PHASE_VERIFIED
        state._log("verified")
    return state.phase


def run_session(
    params: CodeParams,
    link: LinkModel,
    seed: int = 0,
    k: int = 0,
    replay_delay_ns: float = 0.0,
    replay_gain_db: float = 6.0,
    max_range_m: float = 100.0,
    receiver: ReceiverConfig | None = None,
) -> ProtocolState:
    """Play out one full session, optionally under attack.

    replay_delay_ns > 0 replays the verification frames delayed by that
    much (one attacked direction, so the committed one-way time inflates by
    half the delay); k > 0 additionally injects k random-phase pulses over
    the authentic frame to hide it from backtracking. Both directions of
    the verification exchange run detection; the response direction carries
    the attack. Honest runs end verified with commit and verify times equal.
    """
    if receiver is None:
        receiver = ReceiverConfig(r=min(8, params.alpha))
    state = ProtocolState(t_max_tof_ns=max_range_m / SPEED_OF_LIGHT_M_PER_NS)
    attacked = replay_delay_ns > 0
    commit_delay = replay_delay_ns / 2.0 if attacked else 0.0
    commitment_phase(state, link, commit_delay)
    if state.phase == PHASE_ALARMED:
        return state
    d_committed = state.t_commit_tof_ns * SPEED_OF_LIGHT_M_PER_NS

    t_true = link.d1_m / SPEED_OF_LIGHT_M_PER_NS
    code_ss, noise_ss, attack_ss = np.random.SeedSequence(seed).spawn(3)
    code_seeds = code_ss.generate_state(2)
    noise_seeds = noise_ss.generate_state(2)
    attack_seed = int(attack_ss.generate_state(1)[0])

    outcomes = []
    toa_offset_ns = float("nan")
    for direction in (0, 1):
        code = generate_code(params, int(code_seeds[direction]))
        carries_attack = attacked and direction == 1
        plan = None
        if carries_attack and k > 0:
            plan = plan_attack(params, k, delay_ns=replay_delay_ns, gain_db=replay_gain_db,
                               seed=attack_seed)
        timeline = synthesize_timeline(
            code, link, attack=plan, noise_seed=int(noise_seeds[direction])
        )
        if carries_attack:
            replay_plan = plan if plan is not None else plan_attack(
                params, 0, delay_ns=replay_delay_ns, gain_db=replay_gain_db, seed=attack_seed
            )
            timeline = replay_frame(timeline, replay_plan)
        outcome = backtrack_detect(timeline, code, link, receiver, d_committed_m=d_committed)
        state._log(f"frame {('challenge', 'response')[direction]}: {outcome.verdict}")
        outcomes.append(outcome)
        if direction == 1 and outcome.verdict == VERDICT_ACCEPTED:
            toa_offset_ns = outcome.toa_ns - timeline.start_bin * timeline.tp_ns

    for outcome in outcomes:
        if outcome.verdict == VERDICT_ATTACK:
            verification_phase(state, outcome)
            return state
        if outcome.verdict != VERDICT_ACCEPTED:
            verification_phase(state, outcome)
            return state
    # one attacked direction shifts the round trip by the arrival offset,
    # which enters the one-way time of flight halved
    t_verify = t_true + toa_offset_ns / 2.0
    verification_phase(state, outcomes[1], t_verify)
    return state


def session_trace(state: ProtocolState) -> str:
    """The session's line-oriented trace log."""
    return "\n".join(state.trace) + "\n"
