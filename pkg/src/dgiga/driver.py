"""Solve pipeline: assemble, solve, measure, sweep over refinements."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import ErrorReport, RateTable, measure_errors, rate_table, surface_h_max
from .assembly import ProblemData, assemble_system, default_penalty
from .geometry import MultiPatchSurface, refine_surface
from .linalg import SolveReport, cg_solve, cg_solve_projected
from .space import DgSpace, DiscreteFunction, build_space

__all__ = ["SolverFailure", "LevelResult", "solve_problem", "run_sweep"]


class SolverFailure(RuntimeError):
    """The iterative solver did not reach the requested tolerance."""

    def __init__(self, report: SolveReport):
        super().__init__(
            f"CG did not converge: {report.iterations} iterations, "
            f"relative residual {report.final_relative_residual:.3e}"
        )
        self.report = report


def solve_problem(
    surface: MultiPatchSurface,
    p: int,
    data: ProblemData,
    tol: float = 1e-10,
    max_iter: int | None = None,
) -> tuple[DiscreteFunction, SolveReport, DgSpace]:
    """Assemble and solve one discrete problem on the given surface.

    Pure-Neumann problems (no Dirichlet edge anywhere) are solved in the
    mean-zero complement of the constant nullspace.
    """
    space = build_space(surface, p)
    system = assemble_system(space, data)
    solver = cg_solve if surface.has_dirichlet else cg_solve_projected
    x, report = solver(system.matrix, system.rhs, tol=tol, max_iter=max_iter)
    if not report.converged:
        raise SolverFailure(report)
    return space.function(x), report, space


@dataclass
class LevelResult:
    level: int
    surface: MultiPatchSurface
    solution: DiscreteFunction
    errors: ErrorReport
    solve_report: SolveReport


def run_sweep(
    surface: MultiPatchSurface,
    p: int,
    problem_factory,
    levels: int,
    tol: float = 1e-10,
    delta: float | None = None,
    collect=None,
) -> tuple[RateTable, list[LevelResult]]:
    """Refine globally ``levels`` times, solving and measuring each level.

    ``problem_factory(surface, delta)`` builds the problem data per level
    (data may depend on per-patch coefficients of the refined surface).
    ``collect`` is called with each LevelResult as it completes.
    """
    if levels < 1:
        raise ValueError("need at least one level")
    if delta is None:
        delta = default_penalty(p)
    rows = []
    results = []
    current = surface
    for level in range(levels):
        if level > 0:
            current = refine_surface(current)
        data = problem_factory(current, delta)
        u_h, report, space = solve_problem(current, p, data, tol=tol)
        if data.u_exact is not None:
            errors = measure_errors(u_h, data)
        else:
            errors = ErrorReport(
                float("nan"), float("nan"), space.total_dofs, surface_h_max(current), []
            )
        result = LevelResult(level, current, u_h, errors, report)
        results.append(result)
        rows.append(
            dict(
                level=level,
                h_max=errors.h_max,
                dofs=errors.dofs,
                l2_error=errors.l2_error,
                dg_error=errors.dg_error,
            )
        )
        if collect is not None:
            collect(result)
    return rate_table(rows), results


def sample_solution(result: LevelResult, points_per_side: int = 10) -> str:
    """CSV sample of the solution on a parametric grid of each patch."""
    lines = ["patch,xi1,xi2,x,y,z,uh"]
    ts = np.linspace(0.0, 1.0, points_per_side)
    for pid in range(result.surface.num_patches):
        for x2 in ts:
            for x1 in ts:
                val, _ = result.solution.eval(pid, (x1, x2))
                pt = result.surface.patches[pid].point((x1, x2))
                lines.append(
                    f"{pid},{x1:.17g},{x2:.17g},{pt[0]:.17g},{pt[1]:.17g},{pt[2]:.17g},{val:.17g}"
                )
    return "\n".join(lines) + "\n"
