"""Path loss, link budget, and slot-level signal synthesis."""

import math

import numpy as np
import pytest

from uwblab.adversary import AttackPlan
from uwblab.channel import (LinkModel, adversary_room, adversary_rx_power,
                            expected_rx_power, path_loss_db, power_ratio,
                            signal_to_csv, synthesize_rx, synthesize_timeline,
                            unity_link, worst_case_rx_power)
from uwblab.codec import CodeParams, code_from_line, generate_code

FIG_SENT = "0,-1,0,0,0,-1,1,0,0,0,0,0,1,0,-1,0,0,0"
FIG_RECEIVED = [1, 0, 0, 0, -1, -1, 2, -1, 1, 0, 0, -1, 2, 0, -1, 0, -1, -1]
FIG_INJECT_SLOTS = (0, 1, 4, 6, 7, 8, 11, 12, 16, 17)
FIG_INJECT_PHASES = (1, 1, -1, 1, -1, 1, -1, 1, -1, -1)


def test_path_loss_values():
    assert abs(path_loss_db(1.0) + 46.413943352) < 1e-8
    assert abs(path_loss_db(4.0) + 58.455143179) < 1e-8
    assert abs(path_loss_db(8.5) + 65.002321867) < 1e-8
    with pytest.raises(ValueError):
        path_loss_db(0.0)
    with pytest.raises(ValueError):
        path_loss_db(-3.0)


def test_power_ratio_and_rx_power():
    assert abs(power_ratio(8.5) - 3.160587465e-07) < 1e-15
    # best case at the faked 8.5 m distance; worst case and adversary at
    # their own geometry: the three worked link-budget numbers
    assert abs(expected_rx_power(7.67, 8.5) - 2.424170586e-06) < 1e-14
    assert abs(expected_rx_power(7.67, 4.0, -10.0) - 1.094664530e-06) < 1e-14
    assert abs(expected_rx_power(15.77, 6.0, -10.0) - 1.000310569e-06) < 1e-14


def test_rx_power_monotone_in_distance():
    d = np.linspace(0.5, 120.0, 400)
    p = np.array([expected_rx_power(7.67, x) for x in d])
    assert np.all(np.diff(p) < 0)


def test_adversary_room_landmarks():
    r_db, zeta = adversary_room(4.0, 4.5, -10.0)
    assert abs(r_db - 3.452821312) < 1e-8
    assert abs(zeta - 10 ** (r_db / 10.0)) < 1e-12
    # adding no distance leaves only the degradation term
    r0, z0 = adversary_room(7.0, 0.0, -10.0)
    assert abs(r0 - 10.0) < 1e-12 and abs(z0 - 10.0) < 1e-12
    # the zero-room geometry
    assert abs(adversary_room(15.11, 32.68, -10.0)[0]) < 0.05


def test_adversary_room_decreasing_in_d2():
    rooms = [adversary_room(10.0, d2, -10.0)[0] for d2 in (0.0, 5.0, 20.0, 60.0)]
    assert all(a > b for a, b in zip(rooms, rooms[1:]))
    assert all(adversary_room(10.0, d2, -10.0)[1] > 0 for d2 in (0.0, 80.0, 500.0))


def test_link_model_powers():
    link = LinkModel()
    assert abs(worst_case_rx_power(link) - 1.094664530e-06) < 1e-14
    assert abs(adversary_rx_power(link) - 1.000310569e-06) < 1e-14


def test_synthesize_rx_clean():
    params = CodeParams(n=20, alpha=6, beta=14, r=6)
    code = generate_code(params, seed=1)
    link = unity_link()
    sig = synthesize_rx(code, link, noise_seed=0)
    assert np.allclose(sig.amplitudes, code.slots.astype(float), atol=1e-9)


def test_unity_link_scale():
    link = unity_link()
    assert abs(worst_case_rx_power(link) - 1.0) < 1e-12
    assert abs(adversary_rx_power(link) - 1.0) < 1e-12


def test_figure_received_row():
    # the worked end-to-end superposition: 10 injections, 3 annihilate,
    # 2 amplify, 5 land on empty slots
    code = code_from_line(FIG_SENT)
    plan = AttackPlan(slots=FIG_INJECT_SLOTS, phases=FIG_INJECT_PHASES,
                      powers=(1.0,) * 10)
    sig = synthesize_rx(code, unity_link(), attack=plan, noise_seed=0)
    assert np.allclose(sig.amplitudes, FIG_RECEIVED, atol=1e-9)
    energies = sig.amplitudes ** 2
    assert abs(float(energies.sum()) - 17.0) < 1e-9


def test_superposition_cases():
    # matched powers: annihilation to 0, amplification to (2A)^2 = 4A^2
    line = "1,0"
    code = code_from_line(line, r=1)
    link = unity_link()
    cancel = AttackPlan(slots=(0,), phases=(-1,), powers=(1.0,))
    double = AttackPlan(slots=(0,), phases=(1,), powers=(1.0,))
    empty = AttackPlan(slots=(1,), phases=(1,), powers=(1.0,))
    assert abs(synthesize_rx(code, link, cancel).amplitudes[0]) < 1e-9
    assert abs(synthesize_rx(code, link, double).amplitudes[0] ** 2 - 4.0) < 1e-9
    assert abs(synthesize_rx(code, link, empty).amplitudes[1] ** 2 - 1.0) < 1e-9


def test_noise_statistics():
    params = CodeParams(n=4000, alpha=1000, beta=3000)
    code = generate_code(params, seed=2)
    link = unity_link(sigma_n2=0.25)
    sig = synthesize_rx(code, link, noise_seed=5)
    noise = sig.amplitudes - synthesize_rx(code, unity_link(), noise_seed=5).amplitudes
    assert abs(float(noise.mean())) < 0.05
    assert abs(float(noise.var()) - 0.25) < 0.02


def test_multipath_tap_folds_energy():
    code = code_from_line("1,0", r=1)
    link = unity_link()
    sig = synthesize_rx(code, link, taps=((0.5, -3.0),))
    gain = 1.0 + 10 ** (-3.0 / 10.0)
    assert abs(sig.amplitudes[0] ** 2 - gain) < 1e-9


def test_signal_csv_schema():
    code = code_from_line("1,0,-1", r=1)
    text = signal_to_csv(synthesize_rx(code, unity_link()))
    lines = text.strip().split("\n")
    assert lines[0] == "# schema=1"
    assert lines[1] == "slot_index,amplitude,energy"
    assert len(lines) == 5


def test_timeline_layout():
    params = CodeParams(n=6, alpha=2, beta=4, ts_ns=100.0, tp_ns=2.0, r=1)
    code = generate_code(params, seed=3)
    link = unity_link()
    tl = synthesize_timeline(code, link, noise_seed=0, lead_ns=40.0, tail_ns=60.0)
    assert tl.stride == 50
    assert tl.start_bin == 20
    assert tl.lock_bin == tl.start_bin
    slot_bins = tl.slot_bins(tl.start_bin)
    assert np.allclose(tl.amplitudes[slot_bins], code.slots.astype(float), atol=1e-9)
    # off-slot bins stay silent in a noiseless channel
    mask = np.ones(len(tl.amplitudes), dtype=bool)
    mask[slot_bins] = False
    assert np.all(tl.amplitudes[mask] == 0.0)
