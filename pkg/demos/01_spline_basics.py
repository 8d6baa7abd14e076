"""B-spline and NURBS basics: evaluation, refinement, rational weights.

Everything in the library is built from open knot vectors on [0, 1].  This
script walks through the univariate basis, the partition of unity, and
geometry-preserving knot insertion.
"""

import numpy as np

from dgiga import KnotVector, eval_bspline, greville, insert_knots

# A quadratic basis with one interior knot: two elements, four functions.
kv = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
print(f"degree {kv.degree}, {kv.n} basis functions, {kv.num_elements} elements")

# At any point only degree+1 functions are non-zero, and they sum to one.
for xi in (0.0, 0.25, 0.5, 0.9):
    ev = eval_bspline(kv, xi)
    print(
        f"xi={xi:4.2f}: first active {ev.first_active}, "
        f"values {np.round(ev.values, 4)}, sum {ev.values.sum():.15f}"
    )

# Derivatives sum to zero -- differentiating the constant 1 gives 0.
ev = eval_bspline(kv, 0.37)
print("derivative sum:", ev.derivs.sum())

# Greville abscissae reproduce linear functions: sum_k g_k N_k(xi) = xi.
g = greville(kv)
xi = 0.7312
ev = eval_bspline(kv, xi)
print("greville points:", g)
print("linear reproduction at", xi, "->", g[ev.first_active : ev.first_active + 3] @ ev.values)

# Knot insertion refines the mesh without moving the curve.  The returned
# matrix maps coarse control points to fine ones.
refined, T = insert_knots(kv, [0.25, 0.75])
print("refined knots:", refined.knots)
print("refinement matrix shape:", T.shape)

control = np.array([0.0, 0.1, 0.9, 1.0])  # a 1d spline "curve"
fine_control = T @ control
for x in (0.2, 0.5, 0.8):
    coarse_val = eval_bspline(kv, x)
    fine_val = eval_bspline(refined, x)
    a = control[coarse_val.first_active : coarse_val.first_active + 3] @ coarse_val.values
    b = fine_control[fine_val.first_active : fine_val.first_active + 3] @ fine_val.values
    print(f"curve value at {x}: coarse {a:.15f}, refined {b:.15f}")
