"""Interior-penalty assembly of the surface diffusion system.

Builds the symmetric system: patchwise diffusion stiffness, interface
consistency/symmetry and jump-penalty terms, weakly imposed Dirichlet
conditions of Nitsche type, and the load vector including Neumann data.
Entries accumulate in a fixed order (patch-major, element-lexicographic,
edge-list order) so serial assembly is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import (
    SingularMapError,
    edge_breakpoints,
    edge_mesh_size,
    side_param,
    surface_normal,
    frame_at,
    _SIDE_DATA,
)
from .linalg import CsrMatrix
from .quadrature import gauss_on_interval, panel_rules
from .space import DgSpace
from .splines import breakpoints, eval_nurbs2d, tabulate

__all__ = [
    "ProblemData",
    "SparseSystem",
    "default_penalty",
    "assemble_volume",
    "assemble_interface",
    "assemble_boundary",
    "assemble_system",
]


def default_penalty(p: int) -> float:
    """Default jump-penalty coefficient 2(p+2)(p+1)."""
    if p < 1:
        raise ValueError("degree must be at least 1")
    return 2.0 * (p + 2) * (p + 1)


@dataclass
class ProblemData:
    """Problem data: source, boundary data, penalty, optional exact solution.

    ``f`` is called as f(patch_id, points) with points of shape (N, 3);
    boundary data and the exact solution take only the points.  Missing
    callables are treated as zero data.
    """

    f: Callable | None = None
    g_D: Callable | None = None
    g_N: Callable | None = None
    delta: float = 12.0
    u_exact: Callable | None = None
    grad_u_exact: Callable | None = None

    def __post_init__(self):
        if self.delta <= 0.0:
            raise ValueError("penalty parameter must be positive")


@dataclass
class SparseSystem:
    """Assembled symmetric matrix and right-hand side."""

    matrix: CsrMatrix
    rhs: np.ndarray


class _Accumulator:
    def __init__(self, n: int):
        self.n = n
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []
        self.rhs = np.zeros(n)

    def add_block(self, gidx: np.ndarray, local: np.ndarray):
        m = gidx.size
        self.rows.append(np.repeat(gidx, m))
        self.cols.append(np.tile(gidx, m))
        self.vals.append(local.reshape(-1))

    def system(self) -> SparseSystem:
        rows = np.concatenate(self.rows) if self.rows else np.empty(0, dtype=int)
        cols = np.concatenate(self.cols) if self.cols else np.empty(0, dtype=int)
        vals = np.concatenate(self.vals) if self.vals else np.empty(0)
        return SparseSystem(CsrMatrix.from_coo(self.n, rows, cols, vals), self.rhs)


class _PatchTables:
    """Per-patch tabulation of 1D bases and Gauss rules on every element."""

    def __init__(self, patch, q: int):
        self.patch = patch
        self.q = q
        self.breaks_u = breakpoints(patch.basis.basis_u)
        self.breaks_v = breakpoints(patch.basis.basis_v)
        self.xu, self.wu = panel_rules(self.breaks_u, q)
        self.xv, self.wv = panel_rules(self.breaks_v, q)
        p1 = patch.basis.basis_u.degree
        p2 = patch.basis.basis_v.degree
        fu, Nu, dNu = tabulate(patch.basis.basis_u, self.xu.ravel())
        fv, Nv, dNv = tabulate(patch.basis.basis_v, self.xv.ravel())
        nel_u, nel_v = self.xu.shape[0], self.xv.shape[0]
        self.first_u = fu.reshape(nel_u, q)[:, 0]
        self.first_v = fv.reshape(nel_v, q)[:, 0]
        self.Nu = Nu.reshape(nel_u, q, p1 + 1)
        self.dNu = dNu.reshape(nel_u, q, p1 + 1)
        self.Nv = Nv.reshape(nel_v, q, p2 + 1)
        self.dNv = dNv.reshape(nel_v, q, p2 + 1)
        self.nel = (nel_u, nel_v)


def _element_basis(tab: _PatchTables, eu: int, ev: int):
    """Rational basis values/derivatives and geometry on one element's grid.

    Returns (R, dR, point, J1, J2, sqrt_det_g, ginv_terms, (au, av)) with
    leading quadrature axes (q, q) and local-basis axes (m1, m2).
    """
    patch = tab.patch
    au = int(tab.first_u[eu])
    av = int(tab.first_v[ev])
    m1 = tab.Nu.shape[2]
    m2 = tab.Nv.shape[2]
    W = patch.basis.weights[au : au + m1, av : av + m2]
    B = np.einsum("ia,jb->ijab", tab.Nu[eu], tab.Nv[ev]) * W
    Bu = np.einsum("ia,jb->ijab", tab.dNu[eu], tab.Nv[ev]) * W
    Bv = np.einsum("ia,jb->ijab", tab.Nu[eu], tab.dNv[ev]) * W
    S = B.sum(axis=(2, 3))
    Su = Bu.sum(axis=(2, 3))
    Sv = Bv.sum(axis=(2, 3))
    R = B / S[:, :, None, None]
    Ru = Bu / S[:, :, None, None] - B * (Su / S**2)[:, :, None, None]
    Rv = Bv / S[:, :, None, None] - B * (Sv / S**2)[:, :, None, None]

    cp = patch.control_points[au : au + m1, av : av + m2]
    point = np.einsum("ijab,abk->ijk", R, cp)
    J1 = np.einsum("ijab,abk->ijk", Ru, cp)
    J2 = np.einsum("ijab,abk->ijk", Rv, cp)
    g11 = np.einsum("ijk,ijk->ij", J1, J1)
    g12 = np.einsum("ijk,ijk->ij", J1, J2)
    g22 = np.einsum("ijk,ijk->ij", J2, J2)
    det = g11 * g22 - g12**2
    if np.min(det) <= 1e-14:
        i, j = np.unravel_index(np.argmin(det), det.shape)
        raise SingularMapError(
            f"singular parameterization on patch {patch.id} at "
            f"xi=({tab.xu[eu, i]:.6f}, {tab.xv[ev, j]:.6f})"
        )
    return R, (Ru, Rv), point, (J1, J2), (g11, g12, g22, det), (au, av)


def _surface_grads(Ru, Rv, J1, J2, metric):
    """Tangential gradients of all local basis functions at the grid points."""
    g11, g12, g22, det = metric
    t1 = (g22[:, :, None, None] * Ru - g12[:, :, None, None] * Rv) / det[:, :, None, None]
    t2 = (-g12[:, :, None, None] * Ru + g11[:, :, None, None] * Rv) / det[:, :, None, None]
    return J1[:, :, None, None, :] * t1[:, :, :, :, None] + J2[
        :, :, None, None, :
    ] * t2[:, :, :, :, None]


def assemble_volume(space: DgSpace, data: ProblemData) -> SparseSystem:
    """Patchwise diffusion stiffness and source load."""
    surface = space.surface
    q = space.degree + 1
    acc = _Accumulator(space.total_dofs)
    for pid, patch in enumerate(surface.patches):
        tab = _PatchTables(patch, q)
        alpha = surface.alpha[pid]
        for eu in range(tab.nel[0]):
            for ev in range(tab.nel[1]):
                R, (Ru, Rv), point, (J1, J2), metric, (au, av) = _element_basis(
                    tab, eu, ev
                )
                det = metric[3]
                wq = np.outer(tab.wu[eu], tab.wv[ev]) * np.sqrt(det)
                G = _surface_grads(Ru, Rv, J1, J2, metric)
                m1, m2 = R.shape[2], R.shape[3]
                gidx = space.global_block(pid, au, av, m1, m2).reshape(-1)
                Gf = G.reshape(q, q, m1 * m2, 3)
                local = np.einsum("ijak,ijbk,ij->ab", Gf, Gf, alpha * wq)
                acc.add_block(gidx, local)
                if data.f is not None:
                    fv = np.asarray(
                        data.f(pid, point.reshape(-1, 3)), dtype=float
                    ).reshape(q, q)
                    load = np.einsum("ija,ij->a", R.reshape(q, q, m1 * m2), fv * wq)
                    np.add.at(acc.rhs, gidx, load)
    return acc.system()


class _EdgeTrace:
    """Traces of all active basis functions of one patch side at one point."""

    __slots__ = ("values", "grads", "gidx", "speed", "point", "normal", "jacobian")

    def __init__(self, space: DgSpace, pid: int, pside: str, s: float):
        patch = space.surface.patches[pid]
        axis, _, edge_dir, outward = _SIDE_DATA[pside]
        xi = side_param(pside, s)
        vals, pgrads, (a1, a2) = eval_nurbs2d(patch.basis, xi)
        frame = frame_at(patch, xi)
        m1, m2 = vals.shape
        self.values = vals.reshape(-1)
        t1 = frame.inv_metric[0, 0] * pgrads[:, :, 0] + frame.inv_metric[0, 1] * pgrads[:, :, 1]
        t2 = frame.inv_metric[1, 0] * pgrads[:, :, 0] + frame.inv_metric[1, 1] * pgrads[:, :, 1]
        G = (
            frame.jacobian[:, 0][None, None, :] * t1[:, :, None]
            + frame.jacobian[:, 1][None, None, :] * t2[:, :, None]
        )
        self.grads = G.reshape(-1, 3)
        self.gidx = space.global_block(pid, a1, a2, m1, m2).reshape(-1)
        tangent = frame.jacobian @ edge_dir
        self.speed = float(np.linalg.norm(tangent))
        self.point = frame.point
        nu = surface_normal(frame)
        c = np.cross(tangent / self.speed, nu)
        c /= np.linalg.norm(c)
        if np.dot(c, frame.jacobian @ outward) < 0.0:
            c = -c
        self.normal = c
        self.jacobian = frame.jacobian


def edge_alpha(a: float, b: float) -> float:
    """Penalty weight on an interior edge: the mean of the two coefficients.

    The mean grows with the larger coefficient, which keeps the ellipticity
    threshold of the penalty parameter independent of coefficient jumps
    when the flux average is unweighted (a harmonic mean would let the
    threshold blow up with the jump ratio).
    """
    return 0.5 * (a + b)


def assemble_interface(space: DgSpace, data: ProblemData) -> SparseSystem:
    """Consistency, symmetry and penalty terms on interior edges.

    Uses the left side's conormal as the shared direction; the penalty
    weight on an edge is the arithmetic mean of the two diffusion
    coefficients.
    """
    surface = space.surface
    q = space.degree + 1
    acc = _Accumulator(space.total_dofs)
    for edge in surface.edges:
        if edge.kind != "interior":
            continue
        pid_l, side_l = edge.left
        pid_r, side_r = edge.right
        a_l, a_r = surface.alpha[pid_l], surface.alpha[pid_r]
        a_gamma = edge_alpha(a_l, a_r)
        bp = edge_breakpoints(surface, edge)
        for e in range(bp.size - 1):
            h_el = edge_mesh_size(surface, edge, e)
            rule = gauss_on_interval(q, bp[e], bp[e + 1])
            for t, w in zip(rule.nodes, rule.weights):
                left = _EdgeTrace(space, pid_l, side_l, float(t))
                right = _EdgeTrace(space, pid_r, side_r, edge.partner_t(float(t)))
                n = left.normal
                jump = np.concatenate([left.values, -right.values])
                flux = np.concatenate(
                    [0.5 * a_l * (left.grads @ n), 0.5 * a_r * (right.grads @ n)]
                )
                gidx = np.concatenate([left.gidx, right.gidx])
                dG = left.speed * w
                local = dG * (
                    -(np.outer(flux, jump) + np.outer(jump, flux))
                    + (data.delta / h_el) * a_gamma * np.outer(jump, jump)
                )
                acc.add_block(gidx, local)
    return acc.system()


def assemble_boundary(space: DgSpace, data: ProblemData) -> SparseSystem:
    """Weak Dirichlet terms (matrix and load) and Neumann loads."""
    surface = space.surface
    q = space.degree + 1
    acc = _Accumulator(space.total_dofs)
    for edge in surface.edges:
        if edge.kind == "interior":
            continue
        pid, pside = edge.left
        a_gamma = surface.alpha[pid]
        bp = edge_breakpoints(surface, edge)
        for e in range(bp.size - 1):
            h_el = edge_mesh_size(surface, edge, e)
            rule = gauss_on_interval(q, bp[e], bp[e + 1])
            for t, w in zip(rule.nodes, rule.weights):
                tr = _EdgeTrace(space, pid, pside, float(t))
                dG = tr.speed * w
                if edge.kind == "dirichlet":
                    flux = a_gamma * (tr.grads @ tr.normal)
                    pen = data.delta / h_el
                    local = dG * (
                        -(np.outer(flux, tr.values) + np.outer(tr.values, flux))
                        + pen * a_gamma * np.outer(tr.values, tr.values)
                    )
                    acc.add_block(tr.gidx, local)
                    if data.g_D is not None:
                        gd = float(np.asarray(data.g_D(tr.point[None, :])).reshape(()))
                        np.add.at(
                            acc.rhs,
                            tr.gidx,
                            dG * a_gamma * gd * (-(tr.grads @ tr.normal) + pen * tr.values),
                        )
                else:  # neumann
                    if data.g_N is not None:
                        gn = float(np.asarray(data.g_N(tr.point[None, :])).reshape(()))
                        np.add.at(acc.rhs, tr.gidx, dG * gn * tr.values)
    return acc.system()


def assemble_system(space: DgSpace, data: ProblemData) -> SparseSystem:
    """Full system: volume + interior-edge + boundary contributions."""
    parts = [
        assemble_volume(space, data),
        assemble_interface(space, data),
        assemble_boundary(space, data),
    ]
    mat = parts[0].matrix.to_scipy()
    rhs = parts[0].rhs.copy()
    for part in parts[1:]:
        mat = mat + part.matrix.to_scipy()
        rhs += part.rhs
    return SparseSystem(CsrMatrix.from_scipy(mat), rhs)
