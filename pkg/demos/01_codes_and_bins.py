"""Generate a secret verification frame and look inside it.

A frame is n slots; alpha of them carry a unit pulse with a random sign,
the rest stay silent. Which slots pulse is the shared secret: a receiver
that knows the permutation can split measured energies into an
expected-pulse bin and an expected-empty bin, a receiver that does not
know it sees an unremarkable sparse frame.
"""

from uwblab.codec import CodeParams, bins, code_to_line, generate_code

params = CodeParams(n=18, alpha=5, beta=13, r=2)
for seed in range(3):
    code = generate_code(params, seed=seed)
    bin_alpha, bin_beta = bins(code)
    print("seed %d: %s" % (seed, code_to_line(code)))
    print("  pulse slots (1-based): %s" % [int(i) + 1 for i in bin_alpha])
    print("  phases:                %s" % [int(code.slots[i]) for i in bin_alpha])

print()
print("the same seed always reproduces the same secret permutation:")
print("  %s" % code_to_line(generate_code(params, seed=0)))
print("  %s" % code_to_line(generate_code(params, seed=0)))
