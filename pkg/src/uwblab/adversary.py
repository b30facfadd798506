"""Attack construction: random-phase injections plus a delayed replay.

The adversary cannot read pulse phases off the air fast enough to react, so
the best it can do against a secret code is statistical: pick k slots, fire
a random-phase pulse into each hoping to cancel whatever authentic pulse
might sit there, and separately replay an amplified copy of the overheard
frame some delay later so the receiver locks onto the late copy.
"""

from dataclasses import dataclass, replace

import numpy as np

from .codec import CodeParams
from .channel import FrameTimeline


@dataclass(frozen=True, eq=False)
class AttackPlan:
    """k injected pulses (slot, phase, power) plus replay timing.

    powers are receiver-referenced multipliers: 1.0 means the injected
    pulse arrives with the adversary's nominal received power, which the
    default policy keeps equal to the sender's so cancellation is exact.
    replay_delay_ns must stay inside one slot spacing or the round-trip
    bookkeeping would already give the replay away.
    """

    slots: np.ndarray
    phases: np.ndarray
    powers: np.ndarray
    replay_delay_ns: float = 200.0
    replay_gain_db: float = 6.0
    seed: int | None = None
    ts_ns: float = 1000.0

    def __post_init__(self):
        slots = np.asarray(self.slots, dtype=np.int64)
        phases = np.asarray(self.phases, dtype=np.int8)
        powers = np.asarray(self.powers, dtype=np.float64)
        if not (slots.shape == phases.shape == powers.shape) or slots.ndim != 1:
            raise ValueError("slots, phases and powers must be parallel vectors")
        if len(np.unique(slots)) != len(slots):
            raise ValueError("injection slots must be distinct")
        if not np.isin(phases, (-1, 1)).all():
            raise ValueError("phases must be -1 or +1")
        if (powers < 0).any():
            raise ValueError("powers must be nonnegative")
        if not 0 < self.replay_delay_ns < self.ts_ns:
            raise ValueError("replay delay must lie strictly inside one slot spacing")
        for name, arr in (("slots", slots), ("phases", phases), ("powers", powers)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def k(self) -> int:
        return len(self.slots)


def plan_attack(
    code_params: CodeParams,
    k: int,
    delay_ns: float = 200.0,
    gain_db: float = 6.0,
    power_policy=1.0,
    seed: int = 0,
) -> AttackPlan:
    """Draw an attack: k distinct uniform slots, independent random phases.

    power_policy is either a constant received-power multiplier or a
    callable (rng, k) -> array, for experiments with non-constant per-pulse
    energy. Positions, phases and powers come from independent child
    streams of the seed.
    """
    if not 0 <= k <= code_params.n:
        raise ValueError("cannot inject more pulses than there are slots")
    pos_ss, phase_ss, power_ss = np.random.SeedSequence(seed).spawn(3)
    slots = np.random.default_rng(pos_ss).choice(code_params.n, size=k, replace=False)
    phases = 2 * np.random.default_rng(phase_ss).integers(0, 2, size=k).astype(np.int8) - 1
    if callable(power_policy):
        powers = np.asarray(power_policy(np.random.default_rng(power_ss), k), dtype=np.float64)
        if powers.shape != (k,):
            raise ValueError("power policy must return one power per injection")
    else:
        powers = np.full(k, float(power_policy))
    return AttackPlan(
        slots=slots,
        phases=phases,
        powers=powers,
        replay_delay_ns=delay_ns,
        replay_gain_db=gain_db,
        seed=seed,
        ts_ns=code_params.ts_ns,
    )


def redraw_injections(plan: AttackPlan, code_params: CodeParams, keep, seed: int) -> AttackPlan:
    """Adaptive-policy hook: redraw the non-kept injections elsewhere.

    keep is a boolean mask over the plan's injections. Kept pulses stay
    put; the rest move to fresh distinct slots outside the kept set with
    fresh phases. Off by default everywhere; provided for experiments with
    adversaries that adapt between repeated rounds.
    """
    keep = np.asarray(keep, dtype=bool)
    if keep.shape != plan.slots.shape:
        raise ValueError("keep mask must match the plan's injections")
    redo = int((~keep).sum())
    free = np.setdiff1d(np.arange(code_params.n), plan.slots[keep])
    if redo > len(free):
        raise ValueError("not enough free slots to redraw into")
    pos_ss, phase_ss = np.random.SeedSequence(seed).spawn(2)
    new_slots = np.random.default_rng(pos_ss).choice(free, size=redo, replace=False)
    new_phases = 2 * np.random.default_rng(phase_ss).integers(0, 2, size=redo).astype(np.int8) - 1
    return replace(
        plan,
        slots=np.concatenate([plan.slots[keep], new_slots]),
        phases=np.concatenate([plan.phases[keep], new_phases]),
        powers=np.concatenate([plan.powers[keep], plan.powers[~keep]]),
    )


def replay_frame(timeline: FrameTimeline, plan: AttackPlan) -> FrameTimeline:
    """Add a delayed, amplified copy of the overheard authentic frame.

    The copy is the clean authentic frame (the adversary recorded it before
    its own injections reached the receiver) scaled by the replay gain and
    shifted by the replay delay. Acquisition lock moves to whichever frame
    copy now holds the strongest pulse, the later copy winning ties.
    """
    shift = int(round(plan.replay_delay_ns / timeline.tp_ns))
    copy_start = timeline.start_bin + shift
    copy_bins = timeline.slot_bins(copy_start)
    if copy_bins[-1] >= len(timeline.amplitudes):
        raise ValueError("timeline too short to hold the delayed copy")
    gain = 10.0 ** (plan.replay_gain_db / 20.0)
    amps = timeline.amplitudes.copy()
    amps[copy_bins] += timeline.auth_slot_amps * gain

    peak_auth = np.abs(amps[timeline.slot_bins(timeline.start_bin)]).max()
    peak_copy = np.abs(amps[copy_bins]).max()
    lock = copy_start if peak_copy >= peak_auth else timeline.start_bin
    return FrameTimeline(
        amplitudes=amps,
        tp_ns=timeline.tp_ns,
        ts_ns=timeline.ts_ns,
        start_bin=timeline.start_bin,
        lock_bin=lock,
        auth_slot_amps=timeline.auth_slot_amps,
        noise_seed=timeline.noise_seed,
    )


def plan_to_csv(plan: AttackPlan) -> str:
    """CSV dump (slot, phase, power) with a schema header."""
    lines = ["# schema=1", "slot,phase,power"]
    for s, ph, pw in zip(plan.slots, plan.phases, plan.powers):
        lines.append("%d,%d,%.12g" % (s, ph, pw))
    return "\n".join(lines) + "\n"
