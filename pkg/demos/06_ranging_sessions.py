"""Two complete ranging sessions: one honest, one replayed.

The honest device commits to its time of flight and then proves it: the
verification frame arrives exactly when promised. The replaying adversary
delays the verification exchange by 200 ns, which inflates the committed
distance by 30 m, but the authentic frame is still sitting in the recorded
timeline 200 ns before the loud delayed copy. Backtracking finds it, the
re-measured time of flight contradicts the commitment, and the session
alarms instead of accepting the enlarged distance.
"""

from uwblab.channel import SPEED_OF_LIGHT_M_PER_NS, LinkModel, worst_case_rx_power
from uwblab.codec import CodeParams
from uwblab.protocol import run_session, session_trace
from uwblab.receiver import ReceiverConfig

params = CodeParams(n=12, alpha=4, beta=8, r=2)
rcv = ReceiverConfig(r=1, upsilon=25, backtrack_window_ns=220.0)

print("honest session, 10 m apart, quiet channel:")
honest = run_session(
    params, LinkModel(d1_m=10.0, d2_m=0.0, e_db=-10.0, sigma_n2=0.0),
    seed=7, receiver=rcv)
print(session_trace(honest))
print("phase: %s, measured distance %.3f m"
      % (honest.phase, honest.t_verify_tof_ns * SPEED_OF_LIGHT_M_PER_NS))

print()
print("replay session, 60 m apart, claiming 90 m via a 200 ns delay:")
link = LinkModel(
    d1_m=60.0, d2_m=30.0, e_db=-10.0,
    sigma_n2=worst_case_rx_power(LinkModel(d1_m=60.0, e_db=-10.0)) / 64.0)
attacked = run_session(params, link, seed=7, replay_delay_ns=200.0,
                       replay_gain_db=6.0, receiver=rcv)
print(session_trace(attacked))
print("phase: %s, alarm: %s" % (attacked.phase, attacked.alarm_reason))
