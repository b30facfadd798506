"""Energy-detector side: thresholds, plausibility gate, code check, backtracking.

The receiver never looks at phase. Per slot it sees one energy (squared
amplitude) and asks three questions. Is the aggregate energy of a candidate
frame alignment consistent with a real transmission (above the noise floor
gamma_lower, not above the path-loss ceiling gamma_upper)? Do the slots that
should hold pulses actually outshine the slots that should be empty
(repeated random-sample comparison)? And is there an earlier copy of the
same code on the timeline that the acquisition lock skipped (backtracking)?

An aggregate above the ceiling is treated as a hard alarm: no honest channel
can add energy, so surplus energy is evidence of injected pulses regardless
of what the rest of the frame looks like.
"""

import math
from dataclasses import dataclass

import numpy as np

from .codec import CodeParams, VerificationCode, bins
from .channel import FrameTimeline, LinkModel, SlotSignal, expected_rx_power

PLAUSIBILITY_NOISE = "noise"
PLAUSIBILITY_PLAUSIBLE = "plausible"
PLAUSIBILITY_ENERGY_EXCEEDED = "energy_exceeded"

VERDICT_NO_CODE = "no_code_found"
VERDICT_ACCEPTED = "code_accepted"
VERDICT_ATTACK = "attack_detected"

REASON_ENERGY = "energy_exceeded"
REASON_TOF = "tof_mismatch"
REASON_RANGE = "range_exceeded"


@dataclass(frozen=True)
class ReceiverConfig:
    """Detection knobs.

    upsilon repeated sample comparisons vote on code presence; the vote
    ratio must exceed p_noise_threshold, set above what pure noise can
    reach. Backtracking steps backtrack_step_ns at a time over a window of
    backtrack_window_ns. Candidates closer together than merge_precision_ns
    count as one arrival (ranging hardware cannot tell them apart).
    """

    r: int = 8
    upsilon: int = 100
    p_noise_threshold: float = 0.8
    backtrack_step_ns: float = 2.0
    backtrack_window_ns: float = 660.0
    merge_precision_ns: float = 0.67
    rng_seed: int = 0

    def __post_init__(self):
        if self.upsilon < 1:
            raise ValueError("need at least one vote")
        if not 0 < self.p_noise_threshold < 1:
            raise ValueError("vote threshold must lie in (0, 1)")
        if self.backtrack_step_ns <= 0 or self.backtrack_window_ns < 0:
            raise ValueError("backtracking geometry must be positive")
        if self.r < 1:
            raise ValueError("sample size must be at least 1")


@dataclass(frozen=True)
class Thresholds:
    """Noise floor and path-loss ceiling for a candidate frame's aggregate."""

    gamma_lower: float
    gamma_upper: float

    def __post_init__(self):
        if not 0 <= self.gamma_lower < self.gamma_upper:
            raise ValueError("need 0 <= gamma_lower < gamma_upper")


@dataclass(frozen=True)
class DetectionOutcome:
    """Backtracking result plus per-candidate diagnostics.

    verdict is one of VERDICT_*; toa_ns is set only for an accepted code and
    names the earliest accepted candidate. Diagnostics run in scan order
    (acquisition lock first, then progressively earlier); pass_ratios holds
    nan where the vote never ran (noise-gated or energy-exceeded candidates).
    """

    verdict: str
    toa_ns: float | None = None
    reason: str | None = None
    candidate_toas_ns: tuple = ()
    aggregates: tuple = ()
    pass_ratios: tuple = ()


def compute_thresholds(link: LinkModel, params: CodeParams, d_committed_m: float) -> Thresholds:
    """Energy window for a frame claimed to come from d_committed_m away.

    The ceiling assumes every pulse arrives at the best-case power for the
    committed distance riding on top of a one-sigma noise amplitude, plus
    the noise energy of the empty slots; the floor is the mean noise energy
    of the whole frame. Committing to a larger distance lowers the ceiling.
    """
    if d_committed_m <= 0:
        raise ValueError("committed distance must be positive")
    lam_b = math.sqrt(expected_rx_power(link.p_sent, d_committed_m, 0.0))
    noise_amp = math.sqrt(link.sigma_n2)
    upper = params.alpha * (lam_b + noise_amp) ** 2 + params.beta * link.sigma_n2
    lower = (params.alpha + params.beta) * link.sigma_n2
    return Thresholds(gamma_lower=lower, gamma_upper=upper)


def slot_energies(signal: SlotSignal) -> np.ndarray:
    """Square-law detector output: per-slot energy, phase discarded."""
    return signal.amplitudes**2


def attack_plausibility(energies, thresholds: Thresholds) -> str:
    """Classify a candidate frame by its aggregate energy.

    Below the noise floor there is nothing there; above the ceiling someone
    added energy. Both boundaries are exclusive: sitting exactly on either
    threshold still counts as plausible.
    """
    agg = float(np.sum(energies))
    if agg < thresholds.gamma_lower:
        return PLAUSIBILITY_NOISE
    if agg > thresholds.gamma_upper:
        return PLAUSIBILITY_ENERGY_EXCEEDED
    return PLAUSIBILITY_PLAUSIBLE


def robust_code_verification(
    energies,
    code: VerificationCode,
    cfg: ReceiverConfig,
    rng=None,
) -> tuple[float, bool]:
    """Vote on whether the secret code's energy pattern is present.

    Each of upsilon votes draws r pulse slots and r empty slots (without
    replacement, fresh each vote) and passes when the pulse-slot aggregate
    strictly exceeds the empty-slot aggregate. Ties fail: a window with no
    energy anywhere scores 0.0, not 1.0, so noiseless backtracking never
    mistakes silence for the code. The code is declared present when the
    pass ratio beats the noise baseline.
    """
    energies = np.asarray(energies, dtype=np.float64)
    bin_alpha, bin_beta = bins(code)
    if cfg.r > len(bin_alpha) or cfg.r > len(bin_beta):
        raise ValueError("sample size exceeds a bin")
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    ratio = float(
        _vote_ratio_rows(energies[None, bin_alpha], energies[None, bin_beta], cfg, rng)[0]
    )
    return ratio, ratio > cfg.p_noise_threshold


def _vote_ratio_rows(e_alpha, e_beta, cfg: ReceiverConfig, rng) -> np.ndarray:
    """Vote pass ratios for many candidates at once.

    e_alpha is (rows, alpha) pulse-bin energies, e_beta (rows, beta). Each
    vote samples r columns per row without replacement (the r smallest of
    iid uniform keys form a uniform r-subset) and passes on strictly
    larger aggregate pulse energy.
    """
    rows = e_alpha.shape[0]
    u = cfg.upsilon
    keys_a = rng.random((rows, u, e_alpha.shape[1]))
    keys_b = rng.random((rows, u, e_beta.shape[1]))
    pick_a = np.argpartition(keys_a, cfg.r - 1, axis=2)[:, :, : cfg.r]
    pick_b = np.argpartition(keys_b, cfg.r - 1, axis=2)[:, :, : cfg.r]
    agg_a = np.take_along_axis(e_alpha[:, None, :], pick_a, axis=2).sum(axis=2)
    agg_b = np.take_along_axis(e_beta[:, None, :], pick_b, axis=2).sum(axis=2)
    return (agg_a > agg_b).sum(axis=1) / u


def backtrack_detect(
    timeline: FrameTimeline,
    code: VerificationCode,
    link: LinkModel,
    cfg: ReceiverConfig,
    d_committed_m: float | None = None,
) -> DetectionOutcome:
    """Scan earlier frame alignments for a hidden authentic copy.

    Starting from the acquisition lock, candidate frame starts step earlier
    by backtrack_step_ns over backtrack_window_ns. Any candidate whose
    aggregate exceeds the ceiling aborts the scan as an attack; candidates
    below the noise floor are skipped; the rest take the code vote. Among
    accepted candidates the earliest time of arrival wins, since a replayed
    copy can only ever trail the authentic one.
    """
    params = code.params
    if d_committed_m is None:
        d_committed_m = link.d1_m + link.d2_m
    thresholds = compute_thresholds(link, params, d_committed_m)
    rng = np.random.default_rng(cfg.rng_seed)

    step_bins = max(1, int(round(cfg.backtrack_step_ns / timeline.tp_ns)))
    n_steps = int(cfg.backtrack_window_ns / cfg.backtrack_step_ns)
    starts = timeline.lock_bin - step_bins * np.arange(n_steps + 1)
    starts = starts[starts >= 0]
    if len(starts) == 0:
        raise ValueError("timeline does not cover the backtracking window")

    offsets = np.arange(params.n) * timeline.stride
    energies = timeline.amplitudes[starts[:, None] + offsets[None, :]] ** 2
    aggregates = energies.sum(axis=1)
    toas = starts * timeline.tp_ns

    # the scan aborts at the first over-ceiling candidate, in scan order
    hot = np.nonzero(aggregates > thresholds.gamma_upper)[0]
    scanned = int(hot[0]) + 1 if len(hot) else len(starts)
    plausible = (aggregates[:scanned] >= thresholds.gamma_lower) & (
        aggregates[:scanned] <= thresholds.gamma_upper
    )
    ratios = np.full(scanned, np.nan)
    # a window with zero energy everywhere loses every strict vote exactly
    voted = plausible & (aggregates[:scanned] > 0.0)
    ratios[plausible & ~voted] = 0.0
    if voted.any():
        bin_alpha, bin_beta = bins(code)
        if cfg.r > len(bin_alpha) or cfg.r > len(bin_beta):
            raise ValueError("sample size exceeds a bin")
        rows = energies[:scanned][voted]
        ratios[voted] = _vote_ratio_rows(
            rows[:, bin_alpha], rows[:, bin_beta], cfg, rng
        )

    diag = dict(
        candidate_toas_ns=tuple(toas[:scanned]),
        aggregates=tuple(aggregates[:scanned]),
        pass_ratios=tuple(ratios),
    )
    if len(hot):
        return DetectionOutcome(verdict=VERDICT_ATTACK, reason=REASON_ENERGY, **diag)
    accepted = toas[:scanned][np.nan_to_num(ratios, nan=-1.0) > cfg.p_noise_threshold]
    if len(accepted) == 0:
        return DetectionOutcome(verdict=VERDICT_NO_CODE, **diag)
    # scan ran backward in time, so the earliest arrival is the last accept;
    # anything within ranging precision of it merges into the same arrival
    earliest = float(accepted.min())
    merged = accepted[accepted - earliest < cfg.merge_precision_ns]
    return DetectionOutcome(verdict=VERDICT_ACCEPTED, toa_ns=float(merged.min()), **diag)


def outcome_to_csv(outcome: DetectionOutcome) -> str:
    """CSV dump of per-candidate diagnostics with a schema header."""
    lines = ["# schema=1", "candidate_toa_ns,aggregate,pass_ratio"]
    for toa, agg, ratio in zip(
        outcome.candidate_toas_ns, outcome.aggregates, outcome.pass_ratios
    ):
        lines.append("%.12g,%.12g,%.12g" % (toa, agg, ratio))
    return "\n".join(lines) + "\n"
