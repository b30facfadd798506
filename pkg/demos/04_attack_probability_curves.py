"""The attacker's sweet spot in k, and what the energy budget does to it.

Injecting few pulses rarely cancels enough of the code; injecting many
floods the empty bin too. In between sits a peak whose height falls fast
as the receiver aggregates more pulses per comparison (larger r). With
the energy ceiling enforced on top (prob_success), large k stops being
affordable at all and the whole curve flattens to the 1e-4 regime.
"""

from uwblab.analytic import prob_evade_rcv, prob_success

ALPHA, BETA = 50, 100

print("single-comparison evasion probability, alpha=%d beta=%d:" % (ALPHA, BETA))
print("  %4s %10s %10s" % ("k", "r=2", "r=8"))
for k in range(0, 151, 15):
    print("  %4d %10.6f %10.6f"
          % (k, prob_evade_rcv(ALPHA, BETA, 2, k), prob_evade_rcv(ALPHA, BETA, 8, k)))

for r in (2, 8):
    ks = range(0, ALPHA + BETA + 1)
    peak_k = max(ks, key=lambda k: prob_evade_rcv(ALPHA, BETA, r, k))
    print("r=%d peak: %.6f at k=%d"
          % (r, prob_evade_rcv(ALPHA, BETA, r, peak_k), peak_k))

print()
print("with the energy ceiling enforced (alpha=50, beta=500, r=50, zeta=10):")
ks = range(0, 551)
vals = {k: prob_success(50, 500, 50, 10.0, k) for k in ks}
peak_k = max(vals, key=vals.get)
print("  best the adversary can do: %.3e at k=%d" % (vals[peak_k], peak_k))
