"""
Translation matrix elements against brute-force quadrature
==========================================================

Shift a basis function along z and project it back onto the basis.  The
closed form should agree with direct Gauss-Hermite integration.
"""

import math

import numpy as np

from sgltrans import build_table, t_element, t_element_exact
from sgltrans.oracle import translation_matrix_numeric
from sgltrans.sgl import indices

# the smallest non-trivial element has a hand-derived value -sqrt(2/3) nu^2
for nu in (0.25, 1.0, 3.0):
    print(f"nu={nu:5.2f}  closed form {t_element(2, 1, 0, 0, 0, nu): .15f}"
          f"  expected {-math.sqrt(2 / 3) * nu ** 2: .15f}")

# %%
# Compare a whole bandwidth-4 block with the quadrature oracle.
nu = 0.8
numeric = translation_matrix_numeric(4, nu)
idx = list(indices(4))
worst = 0.0
for a, i in enumerate(idx):
    for b, j in enumerate(idx):
        if i.m == j.m:
            worst = max(worst, abs(t_element(i.n, j.n, i.l, j.l, abs(i.m), nu) - numeric[a, b]))
print(f"largest deviation from quadrature at nu={nu}: {worst:.2e}")

# %%
# Small shifts approach the identity, with an error linear in nu.
for nu in (1e-2, 1e-4, 1e-6):
    print(f"nu={nu:.0e}  distance to identity {build_table(4, nu).max_deviation_from_identity():.2e}")

# %%
# At larger orders the float path loses digits to cancellation; the exact
# path shows how many.
for key in [(8, 8, 0, 0, 0), (12, 12, 0, 0, 0)]:
    approx = t_element(*key, 2.0)
    exact = float(t_element_exact(*key, 2.0))
    print(f"T{key} at nu=2: float {approx:.16f}  exact {exact:.16f}"
          f"  rel err {abs(approx - exact) / abs(exact):.1e}")
