"""Measure convergence rates under global h-refinement.

Each level halves every knot span; errors shrink like h^(p+1) in L2 and h^p
in the energy norm.  The same study is what the acceptance suite pins down,
and what `dgiga solve --levels N` writes to rates.csv.
"""

from dgiga import make_problem, run_sweep
from dgiga.geometries import square_grid

for p in (1, 2, 3):
    surface = square_grid(p)

    def factory(surf, delta, p=p):
        return make_problem("plane_sine", surf, p, delta)

    levels = 5 if p < 3 else 4
    table, results = run_sweep(surface, p, factory, levels=levels)
    print(f"\ndegree p = {p}")
    print(f"{'level':>5} {'dofs':>6} {'h':>10} {'L2 error':>12} {'rate':>6} {'DG error':>12} {'rate':>6}")
    for row in table.rows:
        l2r = f"{row.l2_rate:6.2f}" if row.level else "     -"
        dgr = f"{row.dg_rate:6.2f}" if row.level else "     -"
        print(
            f"{row.level:>5} {row.dofs:>6} {row.h_max:>10.4e} "
            f"{row.l2_error:>12.4e} {l2r} {row.dg_error:>12.4e} {dgr}"
        )
    print(f"expected asymptotic rates: L2 -> {p + 1}, DG -> {p}")
