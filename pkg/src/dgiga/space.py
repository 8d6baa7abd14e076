"""Patch-discontinuous NURBS function spaces.

Each patch keeps its own tensor-product NURBS space; global DOFs are the
concatenation of the per-patch coefficient blocks (no coupling between
patches).  Numbering is patch-major, then lexicographic with the second
parametric index as the major key.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import InterfaceEdge, MultiPatchSurface, frame_at, side_param, surface_gradient
from .splines import breakpoints, eval_nurbs2d, greville

__all__ = [
    "DgSpace",
    "DiscreteFunction",
    "build_space",
    "trace_on_edge",
    "edge_jump",
    "edge_average",
    "interpolate",
]


@dataclass(frozen=True)
class DgSpace:
    """Discrete DG space over a multi-patch surface, one block per patch."""

    surface: MultiPatchSurface
    degree: int
    offsets: np.ndarray  # length num_patches + 1
    total_dofs: int

    def patch_shape(self, pid: int) -> tuple[int, int]:
        return self.surface.patches[pid].basis.shape

    def patch_slice(self, pid: int) -> slice:
        return slice(int(self.offsets[pid]), int(self.offsets[pid + 1]))

    def global_index(self, pid: int, k1: int, k2: int) -> int:
        n1, _ = self.patch_shape(pid)
        return int(self.offsets[pid]) + k2 * n1 + k1

    def global_block(self, pid: int, first_u: int, first_v: int, m1: int, m2: int) -> np.ndarray:
        """Global indices of an (m1 x m2) window of a patch's control grid.

        Shaped (m1, m2) to align with basis value arrays.
        """
        n1, _ = self.patch_shape(pid)
        k1 = np.arange(first_u, first_u + m1)
        k2 = np.arange(first_v, first_v + m2)
        return int(self.offsets[pid]) + k2[None, :] * n1 + k1[:, None]

    def function(self, coefficients=None) -> "DiscreteFunction":
        if coefficients is None:
            coefficients = np.zeros(self.total_dofs)
        return DiscreteFunction(self, np.asarray(coefficients, dtype=float))


def build_space(surface: MultiPatchSurface, p: int) -> DgSpace:
    """Collect the per-patch NURBS spaces into one discontinuous space.

    Every patch must carry degree p in both directions.
    """
    sizes = []
    for patch in surface.patches:
        if patch.degree != (p, p):
            raise ValueError(
                f"patch {patch.id} has degree {patch.degree}, expected ({p}, {p})"
            )
        n1, n2 = patch.basis.shape
        sizes.append(n1 * n2)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    return DgSpace(surface, p, offsets, int(offsets[-1]))


@dataclass
class DiscreteFunction:
    """Coefficient vector over a DgSpace."""

    space: DgSpace
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (self.space.total_dofs,):
            raise ValueError("coefficient vector length does not match space")

    def patch_coeffs(self, pid: int) -> np.ndarray:
        """Coefficients of one patch as an (n1, n2) grid."""
        n1, n2 = self.space.patch_shape(pid)
        block = self.coefficients[self.space.patch_slice(pid)]
        return block.reshape(n2, n1).T  # second index is the major key

    def eval(self, pid: int, xi) -> tuple[float, np.ndarray]:
        """Value and tangential gradient at a parameter point of one patch."""
        patch = self.space.surface.patches[pid]
        vals, grads, (a1, a2) = eval_nurbs2d(patch.basis, xi)
        m1, m2 = vals.shape
        c = self.patch_coeffs(pid)[a1 : a1 + m1, a2 : a2 + m2]
        value = float(np.sum(c * vals))
        pgrad = np.array(
            [np.sum(c * grads[:, :, 0]), np.sum(c * grads[:, :, 1])]
        )
        frame = frame_at(patch, xi)
        return value, surface_gradient(frame, pgrad)

    def eval_on_element(self, pid: int, element: tuple[int, int], xi) -> tuple[float, np.ndarray]:
        """Like eval, but checks that xi lies in the element's parametric box."""
        patch = self.space.surface.patches[pid]
        bu = breakpoints(patch.basis.basis_u)
        bv = breakpoints(patch.basis.basis_v)
        eu, ev = element
        if not (bu[eu] <= xi[0] <= bu[eu + 1] and bv[ev] <= xi[1] <= bv[ev + 1]):
            raise ValueError(f"point {tuple(xi)} outside element {element}")
        return self.eval(pid, xi)


def trace_on_edge(
    f: DiscreteFunction, edge: InterfaceEdge, side: str, t: float
) -> tuple[float, np.ndarray]:
    """Trace (value, tangential gradient) from one side of an edge.

    ``t`` runs along the left side's own parameter; the right side is
    composed with the recorded orientation flip.
    """
    if side == "left":
        pid, pside = edge.left
        s = t
    elif side == "right":
        if edge.right is None:
            raise ValueError("boundary edge has no right-side trace")
        pid, pside = edge.right
        s = edge.partner_t(t)
    else:
        raise ValueError("side must be 'left' or 'right'")
    return f.eval(pid, side_param(pside, s))


def edge_jump(f: DiscreteFunction, edge: InterfaceEdge, t: float) -> float:
    """Jump left - right; on boundary edges the jump is the trace itself."""
    left, _ = trace_on_edge(f, edge, "left", t)
    if edge.right is None:
        return left
    right, _ = trace_on_edge(f, edge, "right", t)
    return left - right


def edge_average(f: DiscreteFunction, edge: InterfaceEdge, t: float) -> float:
    """Unweighted average; on boundary edges the average is the trace."""
    left, _ = trace_on_edge(f, edge, "left", t)
    if edge.right is None:
        return left
    right, _ = trace_on_edge(f, edge, "right", t)
    return 0.5 * (left + right)


def interpolate(space: DgSpace, fn) -> DiscreteFunction:
    """Patchwise Greville-point collocation of fn(points (N,3)) -> (N,).

    The interpolant of a continuous function has (up to roundoff) zero
    jumps across matched interfaces since neighboring patches collocate
    the same edge data.
    """
    coeffs = np.empty(space.total_dofs)
    for pid, patch in enumerate(space.surface.patches):
        gu = greville(patch.basis.basis_u)
        gv = greville(patch.basis.basis_v)
        n1, n2 = patch.basis.shape
        n = n1 * n2
        M = np.zeros((n, n))
        pts = np.empty((n, 3))
        for j, xv in enumerate(gv):
            for i, xu in enumerate(gu):
                row = j * n1 + i
                vals, _, (a1, a2) = eval_nurbs2d(patch.basis, (xu, xv))
                m1, m2 = vals.shape
                cols = (np.arange(a2, a2 + m2)[None, :] * n1
                        + np.arange(a1, a1 + m1)[:, None])
                M[row, cols.ravel()] = vals.ravel()
                pts[row] = frame_at(patch, (xu, xv)).point
        coeffs[space.patch_slice(pid)] = np.linalg.solve(M, fn(pts))
    return space.function(coeffs)
