"""Sampling distributions of the two null-model biases.

On a random graph, each clustering criterion compares an edge weight
against a null value: the independence bias b_x and the
indetermination bias b_+ of a node pair. Over Gilbert(n, eps) graphs
both concentrate near eps, and the exact joint law of (edge, degree,
degree) under the idealized degree model gives their theoretical
histograms. This script samples both biases, compares moments and
heavy bins against theory on a shared grid, and looks at the paired
difference b_+ - b_x, whose mean -(1-eps)/n^2 is tiny but strictly
negative.
"""

import numpy as np

from coupleclust.graph import (
    bias_bin_edges,
    empirical_bias_samples,
    theoretical_bias_difference_distribution,
    theoretical_bias_histograms,
)

n, eps, samples = 50, 0.3, 100_000

times, plus, diff = empirical_bias_samples(
    n, eps, samples, rng=0, use_realized_2m=False
)
print(f"Gilbert(n={n}, eps={eps}), {samples} sampled node pairs")
print(f"  b_x  mean {times.mean():+.6f}  std {times.std():.6f}")
print(f"  b_+  mean {plus.mean():+.6f}  std {plus.std():.6f}")
print(
    f"  paired difference mean {diff.mean():+.2e} "
    f"(theory {-(1 - eps) / n**2:+.2e})"
)

# Shared-grid comparison of the two laws: same mean to O(1/n^2), stds
# within a few percent, visibly identical at plot resolution.
theory_times, theory_plus = theoretical_bias_histograms(n, eps, bins=60)
edges = bias_bin_edges(eps, 60, "common")
emp_times, _ = np.histogram(times, bins=edges)
emp_plus, _ = np.histogram(plus, bins=edges)
print("\nbins holding at least 2% of the mass (shared grid, 60 bins):")
print("    bin            b_x theory  b_x sampled  b_+ theory  b_+ sampled")
for k in range(60):
    t_mass = theory_times.counts[k]
    p_mass = theory_plus.counts[k]
    if min(t_mass, p_mass) < 0.02:
        continue
    print(
        f"  [{edges[k]:+.3f}, {edges[k + 1]:+.3f})  "
        f"{t_mass:10.4f}  {emp_times[k] / samples:11.4f}  "
        f"{p_mass:10.4f}  {emp_plus[k] / samples:11.4f}"
    )

# The difference law is discrete and nearly symmetric around 0; the
# heaviest atoms sit at 0 and at -(multiples of 1/(n^2 eps)).
hist = theoretical_bias_difference_distribution(30, eps, bins=48)
top = np.argsort(hist.counts)[::-1][:5]
print("\nheaviest difference bins at n=30 (theoretical mass):")
for k in sorted(top):
    lo, hi = hist.bin_edges[k], hist.bin_edges[k + 1]
    print(f"  [{lo:+.4f}, {hi:+.4f})  {hist.counts[k]:.4f}")
