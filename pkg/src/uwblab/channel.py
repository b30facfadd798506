"""Path loss, link budgets, AWGN, and pulse superposition.

Everything downstream of the antenna is reduced to one real amplitude per
slot (the energy detector integrates a whole slot window, so intra-slot
waveform shape never matters). Powers are dimensionless "power units";
amplitudes are their signed square roots, so a reciprocal-phase pulse of
matching power cancels an authentic pulse exactly and an equal-phase pulse
doubles the amplitude (quadrupling the slot energy).

Two time resolutions exist side by side: SlotSignal holds one amplitude per
slot and is enough for threshold and code checks, while FrameTimeline keeps
a dense amplitude train at pulse-width resolution so that delayed frame
copies and backtracking offsets can be represented.
"""

import math
from dataclasses import dataclass

import numpy as np

from .codec import VerificationCode

SPEED_OF_LIGHT_M_PER_NS = 0.2998


def path_loss_db(d_m: float) -> float:
    """Expected free-space loss in dB at distance d_m, negative for d >= 1 m."""
    if d_m <= 0:
        raise ValueError("distance must be positive")
    return -46.3 - 20.0 * math.log10(d_m) - math.log10(6.5 / 5.0)


def power_ratio(d_m: float, extra_db: float = 0.0) -> float:
    """Linear received/transmitted power ratio at distance d_m."""
    return 10.0 ** ((path_loss_db(d_m) + extra_db) / 10.0)


def expected_rx_power(p_sent: float, d_m: float, extra_db: float = 0.0) -> float:
    """Received per-pulse power for transmit power p_sent at distance d_m.

    extra_db models degradation beyond pure path loss (fading margin,
    detector losses); it is 0 for the best-case budget that thresholds use.
    """
    return p_sent * power_ratio(d_m, extra_db)


def adversary_room(d1_m: float, d2_m: float, e_db: float) -> tuple[float, float]:
    """Per-pulse power headroom the verifier's energy ceiling leaves open.

    The verifier expects best-case power from the claimed distance d1+d2
    while the authentic signal arrives degraded from the true distance d1,
    so each pulse leaves r_db = f(d1+d2) - (f(d1) + e_db) decibels of room.
    Returns (r_db, zeta) with zeta the linear ratio 10^(r_db/10). At d2 = 0
    the path-loss terms cancel and the room is just -e_db.
    """
    if d1_m <= 0 or d2_m < 0:
        raise ValueError("need d1 > 0 and d2 >= 0")
    r_db = path_loss_db(d1_m + d2_m) - (path_loss_db(d1_m) + e_db)
    return r_db, 10.0 ** (r_db / 10.0)


@dataclass(frozen=True)
class LinkModel:
    """Geometry and power budget of one ranging link.

    d1_m is the true sender-receiver distance, d2_m the enlargement the
    adversary wants to add, d3_m the adversary-receiver distance. e_db <= 0
    is the extra degradation the real signal suffers beyond path loss.
    sigma_n2 is the receiver noise variance in power units. The defaults
    reproduce the walk-through scenario of the `uwblab example` command.
    """

    d1_m: float = 4.0
    d2_m: float = 4.5
    d3_m: float = 6.0
    e_db: float = -10.0
    p_sent: float = 7.67
    p_adv_sent: float = 15.77
    sigma_n2: float = 0.0

    def __post_init__(self):
        if self.d1_m <= 0 or self.d3_m <= 0:
            raise ValueError("sender and adversary distances must be positive")
        if self.d2_m < 0:
            raise ValueError("added distance cannot be negative")
        if self.e_db > 0:
            raise ValueError("extra degradation must be <= 0 dB")
        if self.p_sent < 0 or self.p_adv_sent < 0 or self.sigma_n2 < 0:
            raise ValueError("powers and noise variance must be nonnegative")


def worst_case_rx_power(link: LinkModel) -> float:
    """Authentic per-pulse power actually arriving (path loss plus e_db)."""
    return expected_rx_power(link.p_sent, link.d1_m, link.e_db)


def adversary_rx_power(link: LinkModel) -> float:
    """Adversary per-pulse power arriving at the receiver."""
    return expected_rx_power(link.p_adv_sent, link.d3_m, link.e_db)


def unity_link(sigma_n2: float = 0.0, d2_m: float = 4.5) -> LinkModel:
    """A link whose received sender and adversary pulses carry unit power.

    Transmit powers are back-solved from the path loss, so received powers
    are 1.0 up to float rounding. Handy for worked examples and tests where
    per-slot energies should read as small integers.
    """
    link = LinkModel(sigma_n2=sigma_n2, d2_m=d2_m)
    return LinkModel(
        d1_m=link.d1_m,
        d2_m=link.d2_m,
        d3_m=link.d3_m,
        e_db=link.e_db,
        p_sent=1.0 / power_ratio(link.d1_m, link.e_db),
        p_adv_sent=1.0 / power_ratio(link.d3_m, link.e_db),
        sigma_n2=sigma_n2,
    )


@dataclass(frozen=True, eq=False)
class SlotSignal:
    """Received frame at slot resolution: one signed amplitude per slot."""

    amplitudes: np.ndarray
    noise_seed: int | None = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a flat vector")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def _tap_scale(taps, ts_ns: float) -> float:
    # post-cursor copies land inside the same integration window, so their
    # power piles onto the slot energy; fold that into one amplitude factor
    extra = 0.0
    for delay_ns, atten_db in taps:
        if not 0 < delay_ns <= ts_ns:
            raise ValueError("tap delay must lie inside the slot window")
        extra += 10.0 ** (atten_db / 10.0)
    return math.sqrt(1.0 + extra)


def synthesize_rx(
    code: VerificationCode,
    link: LinkModel,
    attack=None,
    noise_seed: int = 0,
    taps=(),
) -> SlotSignal:
    """Superpose authentic frame, optional injections, and noise per slot.

    The authentic pulse in slot i contributes slots[i] * sqrt(worst-case
    power); each injection contributes phase * sqrt(power * adversary
    received power) in its slot; every slot then gets an independent
    N(0, sigma_n2) amplitude sample. Annihilation and amplification fall
    out of plain amplitude addition.
    """
    n = code.params.n
    amps = code.slots.astype(np.float64) * math.sqrt(worst_case_rx_power(link))
    if attack is not None:
        if len(attack.slots) and (attack.slots.min() < 0 or attack.slots.max() >= n):
            raise ValueError("attack slots outside the frame")
        adv = math.sqrt(adversary_rx_power(link))
        amps[attack.slots] += attack.phases * np.sqrt(attack.powers) * adv
    if taps:
        amps = amps * _tap_scale(taps, code.params.ts_ns)
    if link.sigma_n2 > 0:
        rng = np.random.default_rng(noise_seed)
        amps = amps + rng.normal(0.0, math.sqrt(link.sigma_n2), size=n)
    return SlotSignal(amplitudes=amps, noise_seed=noise_seed)


def signal_to_csv(signal: SlotSignal) -> str:
    """CSV dump (slot_index, amplitude, energy) with a schema header."""
    lines = ["# schema=1", "slot_index,amplitude,energy"]
    for i, a in enumerate(signal.amplitudes):
        lines.append("%d,%.12g,%.12g" % (i, a, a * a))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class FrameTimeline:
    """Dense received amplitude train at pulse-width resolution.

    One bin per tp_ns; slot i of a frame starting at bin s occupies bin
    s + i*stride. start_bin marks the authentic frame, lock_bin the frame
    start the receiver's acquisition locked onto (the strongest copy).
    auth_slot_amps keeps the clean authentic per-slot amplitudes so that a
    replay can be synthesized from what the adversary actually overheard.
    """

    amplitudes: np.ndarray
    tp_ns: float
    ts_ns: float
    start_bin: int
    lock_bin: int
    auth_slot_amps: np.ndarray
    noise_seed: int | None = None

    def __post_init__(self):
        for name in ("amplitudes", "auth_slot_amps"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def stride(self) -> int:
        return int(round(self.ts_ns / self.tp_ns))

    def slot_bins(self, frame_start_bin: int) -> np.ndarray:
        n = len(self.auth_slot_amps)
        return frame_start_bin + np.arange(n) * self.stride


def synthesize_timeline(
    code: VerificationCode,
    link: LinkModel,
    attack=None,
    noise_seed: int = 0,
    lead_ns: float = 800.0,
    tail_ns: float = 1100.0,
) -> FrameTimeline:
    """Lay one received frame onto a dense timeline.

    The frame starts lead_ns into the record (its time of arrival), with
    tail_ns of extra record after it so a delayed copy of less than one
    slot spacing still fits. Injections land on the authentic frame's slot
    bins; every bin carries independent noise.
    """
    params = code.params
    tp, ts = params.tp_ns, params.ts_ns
    stride = int(round(ts / tp))
    start_bin = int(round(lead_ns / tp))
    nbins = start_bin + params.n * stride + int(round(tail_ns / tp))
    auth = code.slots.astype(np.float64) * math.sqrt(worst_case_rx_power(link))

    if link.sigma_n2 > 0:
        rng = np.random.default_rng(noise_seed)
        amps = rng.normal(0.0, math.sqrt(link.sigma_n2), size=nbins)
    else:
        amps = np.zeros(nbins)
    bins_at = start_bin + np.arange(params.n) * stride
    amps[bins_at] += auth
    if attack is not None:
        if len(attack.slots) and (attack.slots.min() < 0 or attack.slots.max() >= params.n):
            raise ValueError("attack slots outside the frame")
        adv = math.sqrt(adversary_rx_power(link))
        amps[bins_at[attack.slots]] += attack.phases * np.sqrt(attack.powers) * adv
    return FrameTimeline(
        amplitudes=amps,
        tp_ns=tp,
        ts_ns=ts,
        start_bin=start_bin,
        lock_bin=start_bin,
        auth_slot_amps=auth,
        noise_seed=noise_seed,
    )
