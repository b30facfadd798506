"""Randomized trial harness with confidence intervals.

Two simulated quantities back the probability formulas. The "evade" metric
plays the bare sampling game one comparison at a time (uniform secret code,
k uniform random-phase injections, one r-versus-r energy comparison) and
estimates the chance that the empty bin strictly outshines the pulse bin;
it is the direct empirical counterpart of prob_evade_rcv. The "attack"
metric runs the full receive pipeline on the two frame alignments a replay
attack actually produces (the delayed amplified copy the acquisition locks
onto, and the earlier authentic frame the adversary tried to cancel) and
counts the runs where the receiver ends up accepting only the delayed copy.

Trials are chunked; chunk c of grid point k draws its generator from
SeedSequence((base_seed, k, c)), so splitting a run across workers at chunk
boundaries and summing counts reproduces the sequential result bit for bit.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .channel import LinkModel, adversary_room, adversary_rx_power, worst_case_rx_power
from .codec import CodeParams
from .receiver import ReceiverConfig, compute_thresholds, Thresholds

CHUNK = 4096

METRIC_EVADE = "evade"
METRIC_ATTACK = "attack"


@dataclass(frozen=True)
class TrialConfig:
    """One sweep: code geometry, link, attack template, receiver, trial count."""

    params: CodeParams
    link: LinkModel = field(default_factory=LinkModel)
    k_grid: tuple = (0,)
    trials: int = 100_000
    base_seed: int = 0
    metric: str = METRIC_EVADE
    replay_delay_ns: float = 200.0
    replay_gain_db: float = 6.0
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.metric not in (METRIC_EVADE, METRIC_ATTACK):
            raise ValueError("metric must be 'evade' or 'attack'")
        for k in self.k_grid:
            if not 0 <= k <= self.params.n:
                raise ValueError("k must lie in 0..n")


@dataclass(frozen=True)
class EstimateRow:
    """One grid point: success proportion with a 95% Wilson interval."""

    k: int
    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    analytic_p: float = float("nan")


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    # at the boundary counts center and half coincide exactly in real
    # arithmetic; pin the endpoints so 0 and 1 stay inside the interval
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def _chunk_rng(base_seed: int, k: int, chunk_idx: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((base_seed, k, chunk_idx)))


def _chunks(trials: int):
    done = 0
    idx = 0
    while done < trials:
        yield idx, min(CHUNK, trials - done)
        done += CHUNK
        idx += 1


def _sample_sums(rng, energies: np.ndarray, r: int) -> np.ndarray:
    # uniform r-subset per row: take the r smallest of iid uniform keys
    pick = np.argpartition(rng.random(energies.shape), r - 1, axis=1)[:, :r]
    return np.take_along_axis(energies, pick, axis=1).sum(axis=1)


def _evade_successes(cfg: TrialConfig, k: int) -> int:
    """Single-comparison game at unit pulse power, noiseless."""
    n, alpha = cfg.params.n, cfg.params.alpha
    r = cfg.receiver.r
    successes = 0
    for chunk_idx, m in _chunks(cfg.trials):
        rng = _chunk_rng(cfg.base_seed, k, chunk_idx)
        cols = np.argpartition(rng.random((m, n)), alpha - 1, axis=1)
        code_cols, beta_cols = cols[:, :alpha], cols[:, alpha:]
        inj_mask = np.zeros((m, n), dtype=bool)
        if k:
            inj_cols = np.argpartition(rng.random((m, n)), k - 1, axis=1)[:, :k]
            np.put_along_axis(inj_mask, inj_cols, True, axis=1)
        hit = np.take_along_axis(inj_mask, code_cols, axis=1)
        # relative phase of a colliding injection: half cancel, half double
        cancels = rng.random((m, alpha)) < 0.5
        e_alpha = np.where(hit, np.where(cancels, 0.0, 4.0), 1.0)
        e_beta = np.take_along_axis(inj_mask, beta_cols, axis=1).astype(np.float64)
        agg_a = _sample_sums(rng, e_alpha, r)
        agg_b = _sample_sums(rng, e_beta, r)
        successes += int((agg_b > agg_a).sum())
    return successes


def _vote_ratios(rng, energies, code_cols, beta_cols, cfg: ReceiverConfig) -> np.ndarray:
    """Pass ratio of the repeated sample comparison, one row per trial."""
    m = energies.shape[0]
    passes = np.zeros(m, dtype=np.int64)
    r = cfg.r
    for _ in range(cfg.upsilon):
        pa = np.argpartition(rng.random(code_cols.shape), r - 1, axis=1)[:, :r]
        pb = np.argpartition(rng.random(beta_cols.shape), r - 1, axis=1)[:, :r]
        ea = np.take_along_axis(energies, np.take_along_axis(code_cols, pa, axis=1), axis=1)
        eb = np.take_along_axis(energies, np.take_along_axis(beta_cols, pb, axis=1), axis=1)
        passes += ea.sum(axis=1) > eb.sum(axis=1)
    return passes / cfg.upsilon


def _attack_successes(cfg: TrialConfig, k: int) -> int:
    """Replay pipeline on the two real candidates, vectorized over trials.

    All other backtracking offsets hold pure noise and are rejected with
    overwhelming probability, so only the delayed copy and the authentic
    frame alignment are simulated. Success means the receiver accepts the
    delayed copy, rejects the authentic frame, and never sees an aggregate
    above the energy ceiling.
    """
    params, link, rcfg = cfg.params, cfg.link, cfg.receiver
    n, alpha = params.n, params.alpha
    lam_w = math.sqrt(worst_case_rx_power(link))
    lam_adv = math.sqrt(adversary_rx_power(link))
    gain = 10.0 ** (cfg.replay_gain_db / 20.0)
    sigma = math.sqrt(link.sigma_n2)
    thr = compute_thresholds(link, params, link.d1_m + link.d2_m)
    cut = rcfg.p_noise_threshold
    successes = 0
    for chunk_idx, m in _chunks(cfg.trials):
        rng = _chunk_rng(cfg.base_seed, k, chunk_idx)
        cols = np.argpartition(rng.random((m, n)), alpha - 1, axis=1)
        code_cols, beta_cols = cols[:, :alpha], cols[:, alpha:]
        signs = 2.0 * (rng.random((m, alpha)) < 0.5) - 1.0
        clean = np.zeros((m, n))
        np.put_along_axis(clean, code_cols, signs * lam_w, axis=1)
        injected = np.zeros((m, n))
        if k:
            inj_cols = np.argpartition(rng.random((m, n)), k - 1, axis=1)[:, :k]
            inj_phases = 2.0 * (rng.random((m, k)) < 0.5) - 1.0
            np.put_along_axis(injected, inj_cols, inj_phases * lam_adv, axis=1)

        e_auth = (clean + injected + rng.normal(0.0, sigma, (m, n))) ** 2
        e_copy = (clean * gain + rng.normal(0.0, sigma, (m, n))) ** 2
        agg_auth = e_auth.sum(axis=1)
        agg_copy = e_copy.sum(axis=1)
        exceeded = (agg_auth > thr.gamma_upper) | (agg_copy > thr.gamma_upper)
        auth_plausible = (agg_auth >= thr.gamma_lower) & (agg_auth <= thr.gamma_upper)
        copy_plausible = (agg_copy >= thr.gamma_lower) & (agg_copy <= thr.gamma_upper)

        auth_pass = _vote_ratios(rng, e_auth, code_cols, beta_cols, rcfg) > cut
        copy_pass = _vote_ratios(rng, e_copy, code_cols, beta_cols, rcfg) > cut
        hidden = ~(auth_plausible & auth_pass)
        accepted_copy = copy_plausible & copy_pass
        successes += int((~exceeded & hidden & accepted_copy).sum())
    return successes


def run_grid(cfg: TrialConfig) -> list[EstimateRow]:
    """Estimate the configured metric over the k grid, with analytic overlay."""
    rows = []
    if cfg.metric == METRIC_ATTACK:
        zeta = adversary_room(cfg.link.d1_m, cfg.link.d2_m, cfg.link.e_db)[1]
    for k in sorted(cfg.k_grid):
        if cfg.metric == METRIC_EVADE:
            successes = _evade_successes(cfg, k)
            ref = analytic.prob_evade_rcv(cfg.params.alpha, cfg.params.beta, cfg.receiver.r, k)
        else:
            successes = _attack_successes(cfg, k)
            ref = analytic.prob_success(
                cfg.params.alpha, cfg.params.beta, cfg.receiver.r, zeta, k
            )
        p_hat = successes / cfg.trials
        lo, hi = wilson_interval(successes, cfg.trials)
        rows.append(
            EstimateRow(
                k=k,
                trials=cfg.trials,
                successes=successes,
                p_hat=p_hat,
                ci_low=lo,
                ci_high=hi,
                analytic_p=ref,
            )
        )
    return rows


def false_positive_rate(cfg: TrialConfig, thresholds: Thresholds | None = None) -> EstimateRow:
    """Rate at which pure noise survives the whole acceptance path.

    Each trial is one backtracking candidate: a frame-length window of
    noise-only energies, gated by the thresholds and then put to the full
    repeated-sample vote. Noise energies are exchangeable across slots, so
    a fixed bin split is statistically identical to a secret one. Votes
    stop early once a candidate can no longer reach (or miss) the cut.
    """
    params, link, rcfg = cfg.params, cfg.link, cfg.receiver
    n, alpha = params.n, params.alpha
    sigma = math.sqrt(link.sigma_n2)
    if thresholds is None:
        thresholds = compute_thresholds(link, params, link.d1_m + link.d2_m)
    # strict ratio > cut with upsilon votes
    pass_needed = math.floor(rcfg.p_noise_threshold * rcfg.upsilon) + 1
    fail_allowed = rcfg.upsilon - pass_needed
    accepted = 0
    for chunk_idx, m in _chunks(cfg.trials):
        rng = _chunk_rng(cfg.base_seed, 0, chunk_idx)
        energies = rng.normal(0.0, sigma, (m, n)) ** 2
        agg = energies.sum(axis=1)
        live = (agg >= thresholds.gamma_lower) & (agg <= thresholds.gamma_upper)
        e_alpha = energies[live, :alpha]
        e_beta = energies[live, alpha:]
        passes = np.zeros(e_alpha.shape[0], dtype=np.int64)
        fails = np.zeros_like(passes)
        for _ in range(rcfg.upsilon):
            if e_alpha.shape[0] == 0:
                break
            ok = _sample_sums(rng, e_alpha, rcfg.r) > _sample_sums(rng, e_beta, rcfg.r)
            passes += ok
            fails += ~ok
            done = passes >= pass_needed
            accepted += int(done.sum())
            keep = ~done & (fails <= fail_allowed)
            e_alpha, e_beta = e_alpha[keep], e_beta[keep]
            passes, fails = passes[keep], fails[keep]
    p_hat = accepted / cfg.trials
    lo, hi = wilson_interval(accepted, cfg.trials)
    return EstimateRow(
        k=0, trials=cfg.trials, successes=accepted, p_hat=p_hat, ci_low=lo, ci_high=hi
    )


def rows_to_csv(rows, header_extra: str | None = None) -> str:
    """CSV dump (k, trials, successes, p_hat, ci_low, ci_high, analytic_p)."""
    lines = ["# schema=1"]
    if header_extra:
        lines.append("# " + header_extra)
    lines.append("k,trials,successes,p_hat,ci_low,ci_high,analytic_p")
    for row in rows:
        lines.append(
            "%d,%d,%d,%.12g,%.12g,%.12g,%.12g"
            % (row.k, row.trials, row.successes, row.p_hat, row.ci_low, row.ci_high, row.analytic_p)
        )
    return "\n".join(lines) + "\n"
