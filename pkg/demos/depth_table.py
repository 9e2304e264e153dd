"""
How many atoms are steerable?
=============================

Combine the optimized time evolution with the spin bounds.  For each N,
the optimal ratio E/r is converted into a certified lower bound on the
number of particles in a steerable pair, both with the exact solver and
with the built-in reference rows.
"""

from bec_steering import infer_depth_steering, reference_table, table_one

rows = table_one([50, 100, 200, 500, 1000])
reference = reference_table()

print(f"{'N':>6} {'t_opt':>10} {'E/r':>9} {'2S exact':>9} {'2S ref':>7}")
for row in rows:
    if row.error:
        print(f"{row.n_total:>6} failed: {row.error}")
        continue
    ref = infer_depth_steering(row.e_hz_theta, row.r, reference, interpolate=False)
    print(f"{row.n_total:>6} {row.t_opt:10.6f} {row.ratio:9.5f} {row.two_s:9d} "
          f"{ref.n_lower_bound if ref else '-':>7}")

# A single measured point goes straight through the lookup.
result = infer_depth_steering(0.1572, 1.0, reference, interpolate=False)
print(f"E=0.1572, r=1 certifies at least {result.n_lower_bound} steerable atoms "
      f"(margin {result.margin:.4f})")
