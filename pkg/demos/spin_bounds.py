"""
The spin bounds behind the depth calibration
============================================

For spin S, c_s is the smallest value of Var(Sy) + Var(Sz) compatible with
a given <Sx>, minimized over the ratio.  Dividing by S gives c_tilde, the
threshold that a measured E/r must beat to certify a pair of at least 2S
particles.
"""

import numpy as np

from bec_steering import asymptotic_check, build_table, solve_c_s, solve_zeta2

# Small spins are known in closed form.
print(f"c_s(1/2) = {solve_c_s(0.5):.12f}   (exactly 1/4)")
print(f"c_s(1)   = {solve_c_s(1):.12f}   (exactly 7/16)")
print(f"zeta2(1) = {solve_zeta2(1):.12f}")

table = build_table(np.unique(np.rint(np.geomspace(1, 20000, 40)).astype(int)))
for entry in table.entries[::6]:
    print(f"2S={entry.two_s:6d}  c_s={entry.c_s:12.6f}  c_tilde={entry.c_tilde:.6f}")

# At large S the bound grows like S^(2/3).
print(f"log-log slope over the top decade: {asymptotic_check(table):.4f}")
