"""How distance shapes the adversary's energy headroom.

The receiver expects a frame claimed from distance d to arrive with the
free-space power at d. An adversary who wants the frame to look like it
came from farther away (d1 + d2 instead of d1) arrives louder than that
expectation by R = f(d1 + d2) - (f(d1) + E) decibels; that surplus is the
room it has for injected pulses before the aggregate-energy ceiling trips.
Past the geometry where R crosses zero there is no room at all.
"""

from uwblab.channel import adversary_room, path_loss_db

print("free-space path loss:")
for d in (1.0, 4.0, 8.5, 10.0, 60.0, 90.0):
    print("  f(%5.1f m) = %8.3f dB" % (d, path_loss_db(d)))

print()
print("per-pulse room at E = -10 dB excess loss (adversary-to-victim):")
print("  %6s %6s %9s %9s" % ("d1", "d2", "R dB", "zeta"))
for d1, d2 in ((4.0, 4.5), (10.0, 10.0), (60.0, 30.0), (15.11, 32.68)):
    r_db, zeta = adversary_room(d1, d2, -10.0)
    note = "   <- no room left" if abs(r_db) < 0.05 else ""
    print("  %6.2f %6.2f %9.3f %9.3f%s" % (d1, d2, r_db, zeta, note))
