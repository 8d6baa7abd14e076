"""Error measurement against manufactured solutions and convergence rates.

Errors are integrated with one Gauss point per direction more than the
assembly uses, so the quadrature of the error never masks the
discretization error being measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import _EdgeTrace, _PatchTables, _element_basis, _surface_grads, edge_alpha
from .geometry import edge_breakpoints, edge_mesh_size, mesh_size
from .quadrature import gauss_on_interval
from .space import DiscreteFunction

__all__ = ["ErrorReport", "RateTable", "l2_error", "dg_error", "measure_errors", "rate_table"]


@dataclass(frozen=True)
class ErrorReport:
    l2_error: float
    dg_error: float
    dofs: int
    h_max: float
    per_patch: list


def _element_values(space, u_h, tab, eu, ev, pid):
    """u_h values/gradients and geometry weights on one element's Gauss grid."""
    q = tab.q
    R, (Ru, Rv), point, (J1, J2), metric, (au, av) = _element_basis(tab, eu, ev)
    m1, m2 = R.shape[2], R.shape[3]
    c = u_h.patch_coeffs(pid)[au : au + m1, av : av + m2]
    vals = np.einsum("ijab,ab->ij", R, c)
    G = _surface_grads(Ru, Rv, J1, J2, metric)
    grads = np.einsum("ijabk,ab->ijk", G, c)
    wq = np.outer(tab.wu[eu], tab.wv[ev]) * np.sqrt(metric[3])
    return vals, grads, point.reshape(-1, 3), wq


def l2_error(u_h: DiscreteFunction, u_exact, q: int | None = None) -> float:
    """L2 norm of u_h - u over the whole surface.

    Integrates with degree+2 points per direction unless q overrides it.
    """
    space = u_h.space
    if q is None:
        q = space.degree + 2
    total = 0.0
    for pid, patch in enumerate(space.surface.patches):
        tab = _PatchTables(patch, q)
        for eu in range(tab.nel[0]):
            for ev in range(tab.nel[1]):
                vals, _, pts, wq = _element_values(space, u_h, tab, eu, ev, pid)
                diff = vals - np.asarray(u_exact(pts)).reshape(q, q)
                total += float(np.sum(diff**2 * wq))
    return math.sqrt(total)


def dg_error(
    u_h: DiscreteFunction, u_exact, grad_u_exact, delta: float, g_D=None
) -> float:
    """Energy-norm error: weighted broken gradient plus scaled jump terms.

    Interior edges contribute the jumps of u_h (the exact solution is
    continuous); Dirichlet edges contribute u_h - g_D, with g_D defaulting
    to the exact solution's trace.
    """
    space = u_h.space
    surface = space.surface
    q = space.degree + 2
    if g_D is None:
        g_D = u_exact

    total = 0.0
    for pid, patch in enumerate(surface.patches):
        alpha = surface.alpha[pid]
        tab = _PatchTables(patch, q)
        for eu in range(tab.nel[0]):
            for ev in range(tab.nel[1]):
                _, grads, pts, wq = _element_values(space, u_h, tab, eu, ev, pid)
                diff = grads - np.asarray(grad_u_exact(pts)).reshape(q, q, 3)
                total += alpha * float(np.sum(np.sum(diff**2, axis=2) * wq))

    for edge in surface.edges:
        if edge.kind == "neumann":
            continue
        pid_l, side_l = edge.left
        if edge.kind == "interior":
            a_gamma = edge_alpha(
                surface.alpha[pid_l], surface.alpha[edge.right[0]]
            )
        else:
            a_gamma = surface.alpha[pid_l]
        bp = edge_breakpoints(surface, edge)
        for e in range(bp.size - 1):
            h_el = edge_mesh_size(surface, edge, e)
            rule = gauss_on_interval(q, bp[e], bp[e + 1])
            for t, w in zip(rule.nodes, rule.weights):
                left = _EdgeTrace(space, pid_l, side_l, float(t))
                val_l = float(left.values @ u_h.coefficients[left.gidx])
                if edge.kind == "interior":
                    pid_r, side_r = edge.right
                    right = _EdgeTrace(space, pid_r, side_r, edge.partner_t(float(t)))
                    jump = val_l - float(right.values @ u_h.coefficients[right.gidx])
                else:
                    gd = float(np.asarray(g_D(left.point[None, :])).reshape(()))
                    jump = val_l - gd
                total += a_gamma * (delta / h_el) * jump**2 * left.speed * w
    return math.sqrt(total)


def surface_h_max(surface) -> float:
    """Largest element diameter over all patches."""
    from .splines import breakpoints

    h = 0.0
    for patch in surface.patches:
        nel_u = breakpoints(patch.basis.basis_u).size - 1
        nel_v = breakpoints(patch.basis.basis_v).size - 1
        for eu in range(nel_u):
            for ev in range(nel_v):
                h = max(h, mesh_size(patch, (eu, ev)))
    return h


def measure_errors(u_h: DiscreteFunction, data) -> ErrorReport:
    """L2 and energy-norm errors of a discrete solution, with per-patch parts."""
    space = u_h.space
    if data.grad_u_exact is not None:
        dg = dg_error(u_h, data.u_exact, data.grad_u_exact, data.delta, data.g_D)
    else:
        dg = math.nan
    per_patch = []
    q = space.degree + 2
    for pid, patch in enumerate(space.surface.patches):
        tab = _PatchTables(patch, q)
        part = 0.0
        for eu in range(tab.nel[0]):
            for ev in range(tab.nel[1]):
                vals, _, pts, wq = _element_values(space, u_h, tab, eu, ev, pid)
                diff = vals - np.asarray(data.u_exact(pts)).reshape(q, q)
                part += float(np.sum(diff**2 * wq))
        per_patch.append(math.sqrt(part))
    l2 = math.sqrt(sum(p**2 for p in per_patch))
    return ErrorReport(l2, dg, space.total_dofs, surface_h_max(space.surface), per_patch)


@dataclass(frozen=True)
class RateRow:
    level: int
    h_max: float
    dofs: int
    l2_error: float
    dg_error: float
    l2_rate: float  # nan on the first level, +inf when the error hits zero
    dg_rate: float


@dataclass(frozen=True)
class RateTable:
    rows: list

    def last_rates(self) -> tuple[float, float]:
        return self.rows[-1].l2_rate, self.rows[-1].dg_rate

    def to_csv(self) -> str:
        lines = ["level,h_max,dofs,l2_error,dg_error,l2_rate,dg_rate"]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        str(r.level),
                        f"{r.h_max:.17g}",
                        str(r.dofs),
                        f"{r.l2_error:.17g}",
                        _fmt_or_empty(r.dg_error),
                        _fmt_or_empty(r.l2_rate),
                        _fmt_or_empty(r.dg_rate),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def _fmt_or_empty(v: float) -> str:
    if math.isnan(v):
        return ""
    return f"{v:.17g}"


def _rate(e_prev, e_next, h_prev, h_next) -> float:
    if e_next == 0.0:
        return math.inf
    if e_prev == 0.0:
        return math.nan
    return math.log(e_prev / e_next) / math.log(h_prev / h_next)


def rate_table(levels: list[dict]) -> RateTable:
    """Convergence rates from per-level results.

    Each entry needs keys level, h_max, dofs, l2_error, dg_error.  Rates
    compare consecutive levels; the first level has no rate.  A zero error
    yields a +inf rate marker, excluded from any averaging by callers.
    """
    rows: list[RateRow] = []
    for k, rec in enumerate(levels):
        if k == 0:
            l2r = dgr = math.nan
        else:
            prev = levels[k - 1]
            l2r = _rate(prev["l2_error"], rec["l2_error"], prev["h_max"], rec["h_max"])
            if math.isnan(rec["dg_error"]) or math.isnan(prev["dg_error"]):
                dgr = math.nan
            else:
                dgr = _rate(prev["dg_error"], rec["dg_error"], prev["h_max"], rec["h_max"])
        rows.append(
            RateRow(
                rec["level"],
                rec["h_max"],
                rec["dofs"],
                rec["l2_error"],
                rec["dg_error"],
                l2r,
                dgr,
            )
        )
    return RateTable(rows)
