"""
Rational filters from contour quadrature
========================================

Discretizing the Cauchy integral of the resolvent over a circle gives a
rational approximation of the interval indicator. More poles give a
sharper filter.
"""
import numpy as np

from speccount.rational import build_halfcircle_quadrature, rational_eval_real

lam = np.array([0.0, 0.9, 1.1, 1.5, 2.0, 5.0])
print("lambda:", lam)
for m in (2, 4, 8, 16):
    q = build_halfcircle_quadrature(-1.0, 1.0, m)
    print(f"{m:2d} upper poles:", np.round(rational_eval_real(q, lam), 6))

q = build_halfcircle_quadrature(-1.0, 1.0, 4)
for row in q.pole_table():
    print(row)
