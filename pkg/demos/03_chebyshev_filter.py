"""
Chebyshev step filters and damping
==================================

A truncated Chebyshev series of a step function overshoots near the
jumps. Jackson and Lanczos sigma damping trade that overshoot for a
wider transition. We tabulate the three variants and their weighted L2
errors.
"""
import numpy as np

from speccount.chebyshev import ChebFilter, filter_eval, l2_error_bound, weighted_l2_error

a, b, p = -0.2, 0.3, 60
t = np.linspace(-1, 1, 2001)
inside = (t > a + 0.05) & (t < b - 0.05)

for damping in ("none", "jackson", "lanczos_sigma"):
    f = ChebFilter.build(a, b, p, damping)
    y = filter_eval(f, t)
    print(f"{damping:14s} max overshoot {y.max() - 1:+.4f}  "
          f"min inside {y[inside].min():.4f}  L2 error {weighted_l2_error(f):.5f}")

print(f"bound on the squared undamped error: {l2_error_bound(p):.5f}")
