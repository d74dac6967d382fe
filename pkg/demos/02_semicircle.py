"""Wigner matrices: transform gaps, derivative bounds, and the tail condition.

The normalized resolvent trace m(x, z) is smooth in every matrix coordinate
with uniformly bounded partials, so the swap bound applies directly: any two
entry laws with matched first and second moments produce nearly the same
expected transform.  The vanishing tail sum printed at the end is the
classical sufficient condition for semicircle convergence, evaluated for
three entry laws including a heavy-tailed one with infinite third moment.
"""

import numpy as np

from lindeberg_lab import (
    GAUSSIAN,
    RADEMACHER,
    WignerLayout,
    derivative_bounds,
    pareto,
    pastur_term,
    semicircle_experiment,
    semicircle_stieltjes,
    stieltjes,
    test_function,
)

N, z = 60, 2j
layout = WignerLayout(N)

print(f"one Gaussian draw at N={N}, z={z}:")
gen = np.random.default_rng(7)
x = gen.standard_normal(layout.coordinate_count)
m = stieltjes(layout, x, z)
print(f"  m_N(z)  = {m:.6f}")
print(f"  m_sc(z) = {semicircle_stieltjes(z):.6f}   (reference transform)")

b = derivative_bounds(N, z.imag)
print(f"\nuniform partial bounds at v={z.imag:g}: "
      f"|d1|<={b.b1:.2e} |d2|<={b.b2:.2e} |d3|<={b.b3:.2e}")

print("\npaired experiment, Rademacher vs Gaussian entries, 300 replicates:")
report = semicircle_experiment(RADEMACHER, GAUSSIAN, N, z,
                               test_function("identity"),
                               replicates=300, master_seed=202)
print(f"  gap(Re) = {report.report_re.mc_gap:.2e}   "
      f"gap(Im) = {report.report_im.mc_gap:.2e}   "
      f"bound = {report.report_re.theoretical_bound:.2e}")
print(f"  mean m over replicates = {report.mean_m:.6f}")
print(f"  passed: {report.passed}")

print("\ntail sum N^-2 sum E(X^2; |X| > 0.2 sqrt(N)) by entry law:")
print(f"{'N':>6} {'rademacher':>12} {'gaussian':>12} {'pareto(2.5)':>12}")
for n_size in (100, 400, 1600):
    row = [pastur_term(spec, n_size, 0.2)
           for spec in (RADEMACHER, GAUSSIAN, pareto(2.5))]
    print(f"{n_size:6d} {row[0]:12.2e} {row[1]:12.2e} {row[2]:12.2e}")
print("all three vanish with N; the heavy tail is verifiably slower.")
