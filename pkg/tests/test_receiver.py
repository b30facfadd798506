"""Thresholds, plausibility gating, code voting, and backtracking."""

import dataclasses

import numpy as np
import pytest

from uwblab.adversary import plan_attack, replay_frame
from uwblab.channel import (FrameTimeline, LinkModel, expected_rx_power,
                            synthesize_rx, synthesize_timeline, unity_link)
from uwblab.codec import CodeParams, code_from_line, generate_code
from uwblab.receiver import (PLAUSIBILITY_ENERGY_EXCEEDED, PLAUSIBILITY_NOISE,
                             PLAUSIBILITY_PLAUSIBLE, REASON_ENERGY,
                             VERDICT_ACCEPTED, VERDICT_ATTACK, VERDICT_NO_CODE,
                             ReceiverConfig, Thresholds, attack_plausibility,
                             backtrack_detect, compute_thresholds,
                             outcome_to_csv, robust_code_verification,
                             slot_energies)


def small_params():
    return CodeParams(n=12, alpha=4, beta=8, ts_ns=100.0, tp_ns=2.0, r=2)


def test_thresholds_worked_example():
    # five pulses expected at the committed 8.5 m, noiseless receiver
    link = LinkModel(sigma_n2=0.0)
    params = CodeParams(n=18, alpha=5, beta=13, r=2)
    thr = compute_thresholds(link, params, 8.5)
    lam_b2 = expected_rx_power(link.p_sent, 8.5)
    assert thr.gamma_lower == 0.0
    assert thr.gamma_upper == pytest.approx(5 * lam_b2, rel=1e-12)
    with pytest.raises(ValueError):
        compute_thresholds(link, params, 0.0)


def test_thresholds_noise_terms():
    link = LinkModel(sigma_n2=4e-7)
    params = CodeParams(n=18, alpha=5, beta=13, r=2)
    thr = compute_thresholds(link, params, 8.5)
    lam_b = expected_rx_power(link.p_sent, 8.5) ** 0.5
    want = 5 * (lam_b + 4e-7 ** 0.5) ** 2 + 13 * 4e-7
    assert thr.gamma_upper == pytest.approx(want, rel=1e-12)
    assert thr.gamma_lower == pytest.approx(18 * 4e-7, rel=1e-12)


def test_threshold_monotone_in_distance():
    link = LinkModel(sigma_n2=1e-8)
    params = small_params()
    ceilings = [compute_thresholds(link, params, d).gamma_upper
                for d in (2.0, 5.0, 20.0, 80.0)]
    assert all(a > b for a, b in zip(ceilings, ceilings[1:]))


def test_thresholds_ordering_enforced():
    with pytest.raises(ValueError):
        Thresholds(gamma_lower=2.0, gamma_upper=1.0)
    with pytest.raises(ValueError):
        Thresholds(gamma_lower=-1.0, gamma_upper=1.0)


def test_slot_energies_square_law():
    code = code_from_line("1,0,-1", r=1)
    sig = synthesize_rx(code, unity_link(), noise_seed=0)
    assert np.allclose(slot_energies(sig), [1.0, 0.0, 1.0])


def test_plausibility_boundaries():
    thr = Thresholds(gamma_lower=2.0, gamma_upper=10.0)
    assert attack_plausibility([1.0, 0.5], thr) == PLAUSIBILITY_NOISE
    assert attack_plausibility([1.0, 1.0], thr) == PLAUSIBILITY_PLAUSIBLE
    assert attack_plausibility([5.0, 5.0], thr) == PLAUSIBILITY_PLAUSIBLE
    assert attack_plausibility([5.0, 6.0], thr) == PLAUSIBILITY_ENERGY_EXCEEDED
    assert attack_plausibility([4.0, 2.0], thr) == PLAUSIBILITY_PLAUSIBLE


def test_vote_clean_code_is_certain():
    params = small_params()
    code = generate_code(params, seed=1)
    energies = slot_energies(synthesize_rx(code, unity_link(), noise_seed=0))
    cfg = ReceiverConfig(r=2, upsilon=200)
    ratio, is_code = robust_code_verification(energies, code, cfg)
    assert ratio == 1.0 and is_code


def test_vote_silence_scores_zero():
    # ties lose: an all-zero window never looks like the code
    params = small_params()
    code = generate_code(params, seed=1)
    cfg = ReceiverConfig(r=2, upsilon=200)
    ratio, is_code = robust_code_verification(np.zeros(12), code, cfg)
    assert ratio == 0.0 and not is_code


def test_vote_worked_quarter():
    # two pulse slots, two empty slots, r=1: the adversary cancelled one
    # pulse and filled one empty slot, so exactly one draw pair in four
    # passes and ties lose the rest
    code = code_from_line("1,0,-1,0", r=1)
    energies = np.array([0.0, 1.0, 1.0, 0.0])
    cfg = ReceiverConfig(r=1, upsilon=40000, rng_seed=3)
    ratio, is_code = robust_code_verification(energies, code, cfg)
    assert ratio == pytest.approx(0.25, abs=0.01)
    assert not is_code


def test_vote_r_validation():
    code = code_from_line("1,0,-1,0", r=1)
    with pytest.raises(ValueError):
        robust_code_verification(np.zeros(4), code, ReceiverConfig(r=3))


def test_backtrack_honest_exact_toa():
    params = small_params()
    code = generate_code(params, seed=2)
    link = unity_link()
    tl = synthesize_timeline(code, link, noise_seed=0, lead_ns=40.0, tail_ns=60.0)
    cfg = ReceiverConfig(r=2, upsilon=100, backtrack_window_ns=40.0)
    out = backtrack_detect(tl, code, link, cfg, d_committed_m=link.d1_m)
    assert out.verdict == VERDICT_ACCEPTED
    assert out.toa_ns == tl.start_bin * tl.tp_ns
    assert max(out.pass_ratios) == 1.0


def test_backtrack_finds_authentic_before_copy():
    params = small_params()
    code = generate_code(params, seed=2)
    link = unity_link()
    tl = synthesize_timeline(code, link, noise_seed=0, lead_ns=40.0, tail_ns=160.0)
    plan = plan_attack(params, k=0, delay_ns=40.0, gain_db=3.0, seed=0)
    replayed = replay_frame(tl, plan)
    assert replayed.lock_bin == tl.start_bin + 20
    cfg = ReceiverConfig(r=2, upsilon=100, backtrack_window_ns=60.0)
    out = backtrack_detect(replayed, code, link, cfg, d_committed_m=8.5)
    assert out.verdict == VERDICT_ACCEPTED
    # both alignments verify; the earlier one is the authentic arrival
    assert out.toa_ns == tl.start_bin * tl.tp_ns
    accepted = [t for t, p in zip(out.candidate_toas_ns, out.pass_ratios)
                if p > cfg.p_noise_threshold]
    assert len(accepted) == 2


def test_backtrack_hot_copy_aborts():
    params = small_params()
    code = generate_code(params, seed=2)
    link = unity_link()
    tl = synthesize_timeline(code, link, noise_seed=0, lead_ns=40.0, tail_ns=160.0)
    plan = plan_attack(params, k=0, delay_ns=40.0, gain_db=6.0, seed=0)
    replayed = replay_frame(tl, plan)
    cfg = ReceiverConfig(r=2, upsilon=100, backtrack_window_ns=60.0)
    out = backtrack_detect(replayed, code, link, cfg, d_committed_m=8.5)
    assert out.verdict == VERDICT_ATTACK
    assert out.reason == REASON_ENERGY
    # the scan stopped at the first hot candidate, the lock itself
    assert len(out.candidate_toas_ns) == 1


def test_backtrack_silence_finds_nothing():
    params = small_params()
    code = generate_code(params, seed=2)
    link = unity_link()
    bins = 40 + params.n * 50 + 30
    tl = FrameTimeline(amplitudes=np.zeros(bins), tp_ns=2.0, ts_ns=100.0,
                       start_bin=20, lock_bin=20,
                       auth_slot_amps=np.zeros(params.n))
    cfg = ReceiverConfig(r=2, upsilon=100, backtrack_window_ns=40.0)
    out = backtrack_detect(tl, code, link, cfg, d_committed_m=link.d1_m)
    assert out.verdict == VERDICT_NO_CODE
    assert all(r == 0.0 for r in out.pass_ratios)


def test_backtrack_phase_flip_invariant():
    params = small_params()
    code = generate_code(params, seed=2)
    link = unity_link()
    tl = synthesize_timeline(code, link, noise_seed=0, lead_ns=40.0, tail_ns=60.0)
    flipped = dataclasses.replace(tl, amplitudes=-tl.amplitudes)
    cfg = ReceiverConfig(r=2, upsilon=100, backtrack_window_ns=40.0)
    a = backtrack_detect(tl, code, link, cfg, d_committed_m=link.d1_m)
    b = backtrack_detect(flipped, code, link, cfg, d_committed_m=link.d1_m)
    assert a.verdict == b.verdict and a.toa_ns == b.toa_ns


def test_backtrack_never_returns_later_than_lock():
    params = small_params()
    code = generate_code(params, seed=6)
    link = unity_link(sigma_n2=0.01)
    tl = synthesize_timeline(code, link, noise_seed=9, lead_ns=40.0, tail_ns=60.0)
    cfg = ReceiverConfig(r=1, upsilon=50, backtrack_window_ns=40.0)
    out = backtrack_detect(tl, code, link, cfg, d_committed_m=link.d1_m)
    if out.verdict == VERDICT_ACCEPTED:
        assert out.toa_ns <= tl.lock_bin * tl.tp_ns


def test_outcome_csv_schema():
    params = small_params()
    code = generate_code(params, seed=2)
    link = unity_link()
    tl = synthesize_timeline(code, link, noise_seed=0, lead_ns=40.0, tail_ns=60.0)
    cfg = ReceiverConfig(r=2, upsilon=100, backtrack_window_ns=40.0)
    out = backtrack_detect(tl, code, link, cfg, d_committed_m=link.d1_m)
    lines = outcome_to_csv(out).strip().split("\n")
    assert lines[0] == "# schema=1"
    assert lines[1] == "candidate_toa_ns,aggregate,pass_ratio"
    assert len(lines) == 2 + len(out.candidate_toas_ns)
