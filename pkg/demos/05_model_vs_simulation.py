"""Do the closed forms survive contact with sampled trials?

Every grid point plays the sampling game directly: draw a secret
permutation, drop k random-phase injections on it, compare one r-sample
aggregate from each bin. The analytic curve should thread the Wilson
intervals; `uwblab validate` runs the full standard grid with the same
machinery and fails loudly when containment drops below 95%.
"""

from uwblab.codec import CodeParams
from uwblab.montecarlo import TrialConfig, run_grid
from uwblab.receiver import ReceiverConfig

params = CodeParams(n=150, alpha=50, beta=100, r=2)
cfg = TrialConfig(
    params=params,
    k_grid=tuple(range(0, 151, 30)),
    trials=30000,
    base_seed=3,
    receiver=ReceiverConfig(r=2),
)

print("alpha=50 beta=100 r=2, 30000 trials per point:")
print("  %4s %10s %23s %10s %s" % ("k", "estimate", "95% interval", "analytic", ""))
for row in run_grid(cfg):
    inside = row.ci_low <= row.analytic_p <= row.ci_high
    print("  %4d %10.6f [%10.6f,%10.6f] %10.6f %s"
          % (row.k, row.p_hat, row.ci_low, row.ci_high, row.analytic_p,
             "ok" if inside else "OUTSIDE"))
