"""Multi-patch NURBS surface geometry.

Patches map the unit square into R^3.  This module provides the first
fundamental form (metric, area density, tangential gradients), outward unit
conormals along patch edges, physical mesh sizes, and the construction of a
multi-patch surface by geometric interface matching with matching-mesh
verification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .splines import (
    KnotVector,
    NurbsBasis2D,
    breakpoints,
    eval_nurbs2d,
    midpoint_refine,
)

__all__ = [
    "GeometryError",
    "TopologyError",
    "SingularMapError",
    "NurbsPatch",
    "SurfaceFrame",
    "InterfaceEdge",
    "MultiPatchSurface",
    "SIDES",
    "frame_at",
    "surface_gradient",
    "conormal",
    "conormal_at",
    "match_interfaces",
    "mesh_size",
    "edge_mesh_size",
    "refine_surface",
]

SIDES = ("west", "east", "south", "north")

# Each side: (fixed axis, fixed value, edge direction in parameter space,
# outward parametric direction).
_SIDE_DATA = {
    "west": (0, 0.0, np.array([0.0, 1.0]), np.array([-1.0, 0.0])),
    "east": (0, 1.0, np.array([0.0, 1.0]), np.array([1.0, 0.0])),
    "south": (1, 0.0, np.array([1.0, 0.0]), np.array([0.0, -1.0])),
    "north": (1, 1.0, np.array([1.0, 0.0]), np.array([0.0, 1.0])),
}


class GeometryError(Exception):
    """Base class for geometry and topology failures."""


class TopologyError(GeometryError):
    """Interface matching or boundary tagging is inconsistent."""


class SingularMapError(GeometryError):
    """Patch parameterization is (numerically) singular."""


@dataclass(frozen=True)
class NurbsPatch:
    """One NURBS patch: rational basis plus a control net in R^3."""

    basis: NurbsBasis2D
    control_points: np.ndarray
    id: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "control_points", np.asarray(self.control_points, dtype=float)
        )
        n1, n2 = self.basis.shape
        if self.control_points.shape != (n1, n2, 3):
            raise ValueError(
                f"control net {self.control_points.shape} does not match basis {(n1, n2)}"
            )

    @property
    def degree(self) -> tuple[int, int]:
        return self.basis.basis_u.degree, self.basis.basis_v.degree

    def point(self, xi) -> np.ndarray:
        return frame_at(self, xi).point

    def side_knots(self, side: str) -> KnotVector:
        """Knot vector running along the given side."""
        axis = _SIDE_DATA[side][0]
        return self.basis.basis_v if axis == 0 else self.basis.basis_u

    def side_point(self, side: str, t: float) -> np.ndarray:
        return self.point(side_param(side, t))


def side_param(side: str, t: float) -> tuple[float, float]:
    """Map a side coordinate t in [0,1] to the patch parameter square."""
    axis, value, _, _ = _SIDE_DATA[side]
    return (value, t) if axis == 0 else (t, value)


@dataclass(frozen=True)
class SurfaceFrame:
    """First-fundamental-form data of a patch at one parameter point."""

    point: np.ndarray
    jacobian: np.ndarray  # 3x2
    metric: np.ndarray  # 2x2, J^T J
    sqrt_det_g: float
    inv_metric: np.ndarray


def frame_at(patch: NurbsPatch, xi) -> SurfaceFrame:
    """Evaluate the mapped point, Jacobian and metric of a patch at xi.

    Raises SingularMapError when det(J^T J) falls below 1e-14.
    """
    vals, grads, (a1, a2) = eval_nurbs2d(patch.basis, xi)
    p1, p2 = vals.shape
    cp = patch.control_points[a1 : a1 + p1, a2 : a2 + p2]
    point = np.einsum("ab,abk->k", vals, cp)
    jac = np.einsum("abd,abk->kd", grads, cp)
    g = jac.T @ jac
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if det <= 1e-14:
        raise SingularMapError(
            f"singular parameterization on patch {patch.id} at xi={tuple(xi)} (det g={det:.3e})"
        )
    inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det
    return SurfaceFrame(point, jac, g, float(np.sqrt(det)), inv)


def surface_gradient(frame: SurfaceFrame, parametric_grad) -> np.ndarray:
    """Push a parametric gradient forward to the tangential gradient in R^3."""
    return frame.jacobian @ (frame.inv_metric @ np.asarray(parametric_grad, dtype=float))


def surface_normal(frame: SurfaceFrame) -> np.ndarray:
    """Unit normal of the surface (cross product of the Jacobian columns)."""
    nu = np.cross(frame.jacobian[:, 0], frame.jacobian[:, 1])
    return nu / np.linalg.norm(nu)


def conormal(patch: NurbsPatch, side: str, t: float) -> np.ndarray:
    """Outward unit conormal of a patch side at side coordinate t.

    Tangent to the surface, orthogonal to the edge, pointing out of the
    patch.  Raises GeometryError for a degenerate edge tangent.
    """
    axis, _, edge_dir, outward = _SIDE_DATA[side]
    frame = frame_at(patch, side_param(side, t))
    tangent = frame.jacobian @ edge_dir
    tnorm = np.linalg.norm(tangent)
    if tnorm < 1e-14:
        raise GeometryError(f"degenerate edge tangent on patch {patch.id} side {side}")
    nu = surface_normal(frame)
    c = np.cross(tangent / tnorm, nu)
    c /= np.linalg.norm(c)
    # Orient outward: compare with the parametric outward direction pushed forward.
    if np.dot(c, frame.jacobian @ outward) < 0.0:
        c = -c
    return c


@dataclass(frozen=True)
class InterfaceEdge:
    """One edge of the patch decomposition: interior, Dirichlet or Neumann.

    ``left``/``right`` are (patch id, side) pairs; boundary edges have no
    right slot.  ``orientation_flip`` records whether the right side's edge
    parameter runs opposite to the left's.  ``h_gamma`` is the largest
    physical element chord on the edge.
    """

    kind: str  # "interior" | "dirichlet" | "neumann"
    left: tuple[int, str]
    right: tuple[int, str] | None = None
    orientation_flip: bool = False
    h_gamma: float = 0.0

    def partner_t(self, t: float) -> float:
        """Right-side edge coordinate matching the left-side coordinate t."""
        return 1.0 - t if self.orientation_flip else t


@dataclass
class MultiPatchSurface:
    """Non-overlapping patches, their edge topology and per-patch diffusion."""

    patches: list[NurbsPatch]
    edges: list[InterfaceEdge]
    alpha: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.alpha is None:
            self.alpha = np.ones(len(self.patches))
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.alpha.shape != (len(self.patches),):
            raise ValueError("need one diffusion coefficient per patch")
        if np.any(self.alpha <= 0.0):
            raise ValueError("diffusion coefficients must be positive")

    @property
    def num_patches(self) -> int:
        return len(self.patches)

    def edges_of_kind(self, kind: str) -> list[InterfaceEdge]:
        return [e for e in self.edges if e.kind == kind]

    @property
    def has_dirichlet(self) -> bool:
        return any(e.kind == "dirichlet" for e in self.edges)

    def area(self, q: int = 4) -> float:
        from .quadrature import integrate_patch

        return sum(integrate_patch(p, None, q) for p in self.patches)


def _side_samples(patch: NurbsPatch, side: str, ts: np.ndarray) -> np.ndarray:
    return np.array([patch.side_point(side, t) for t in ts])


def _knots_match(kv_a: KnotVector, kv_b: KnotVector, flip: bool, tol: float = 1e-12) -> bool:
    if kv_a.degree != kv_b.degree or kv_a.n != kv_b.n:
        return False
    kb = kv_b.knots if not flip else 1.0 - kv_b.knots[::-1]
    return bool(np.max(np.abs(kv_a.knots - kb)) <= tol)


def match_interfaces(
    patches: list[NurbsPatch],
    tags: dict[tuple[int, str], str] | None = None,
    alpha=None,
    tol: float = 1e-8,
) -> MultiPatchSurface:
    """Pair patch sides into interior edges and classify the rest by tag.

    Sides are paired when their traced physical curves coincide at 5 sample
    parameters within ``tol`` (both orientations are tried).  Remaining
    sides must carry a ``dirichlet`` or ``neumann`` tag; an untagged side
    whose curve matches nothing raises TopologyError.  Paired sides must
    have equal knot vectors up to orientation reversal (matching meshes),
    otherwise TopologyError("non-matching meshes ...") is raised.
    """
    for i, patch in enumerate(patches):
        if patch.id != i:
            raise TopologyError(f"patch ids must equal list positions, got {patch.id} at {i}")
    tags = dict(tags or {})
    for (pid, side), tag in tags.items():
        if not 0 <= pid < len(patches) or side not in SIDES:
            raise TopologyError(f"tag references unknown patch side ({pid}, {side})")
        if tag not in ("dirichlet", "neumann"):
            raise TopologyError(f"unknown boundary tag {tag!r}")

    ts = np.linspace(0.0, 1.0, 5)
    samples = {
        (p.id, side): _side_samples(p, side, ts) for p in patches for side in SIDES
    }
    all_sides = [(p.id, side) for p in patches for side in SIDES]
    partner: dict[tuple[int, str], tuple[tuple[int, str], bool]] = {}

    for a in range(len(all_sides)):
        sa = all_sides[a]
        if sa in partner:
            continue
        for b in range(a + 1, len(all_sides)):
            sb = all_sides[b]
            if sb in partner:
                continue
            A, B = samples[sa], samples[sb]
            straight = np.max(np.linalg.norm(A - B, axis=1))
            reversed_ = np.max(np.linalg.norm(A - B[::-1], axis=1))
            if min(straight, reversed_) > tol:
                continue
            if sa in partner or sb in partner:
                raise TopologyError(f"side {sb} matches more than one side")
            flip = reversed_ < straight
            partner[sa] = (sb, flip)
            partner[sb] = (sa, flip)

    edges: list[InterfaceEdge] = []
    seen: set[tuple[int, str]] = set()
    for s in all_sides:
        if s in seen:
            continue
        if s in partner:
            other, flip = partner[s]
            seen.update((s, other))
            if s in tags or other in tags:
                raise TopologyError(f"boundary tag on interior side {s if s in tags else other}")
            kv_l = patches[s[0]].side_knots(s[1])
            kv_r = patches[other[0]].side_knots(other[1])
            if not _knots_match(kv_l, kv_r, flip):
                raise TopologyError(
                    f"non-matching meshes unsupported: knot vectors differ on "
                    f"interface {s} / {other}"
                )
            edges.append(InterfaceEdge("interior", s, other, flip))
        else:
            seen.add(s)
            if s not in tags:
                raise TopologyError(
                    f"patch side {s} matches no neighbor and carries no boundary tag"
                )
            edges.append(InterfaceEdge(tags[s], s))

    surface = MultiPatchSurface(list(patches), edges, alpha)
    surface.edges = [
        InterfaceEdge(e.kind, e.left, e.right, e.orientation_flip, _edge_h_max(surface, e))
        for e in surface.edges
    ]
    return surface


def edge_breakpoints(surface: MultiPatchSurface, edge: InterfaceEdge) -> np.ndarray:
    """Element boundaries along the edge, in the left side's parameter."""
    patch = surface.patches[edge.left[0]]
    return breakpoints(patch.side_knots(edge.left[1]))


def edge_mesh_size(surface: MultiPatchSurface, edge: InterfaceEdge, element: int) -> float:
    """Physical chord length of one mapped edge element."""
    bp = edge_breakpoints(surface, edge)
    patch = surface.patches[edge.left[0]]
    a = patch.side_point(edge.left[1], bp[element])
    b = patch.side_point(edge.left[1], bp[element + 1])
    return float(np.linalg.norm(b - a))


def _edge_h_max(surface: MultiPatchSurface, edge: InterfaceEdge) -> float:
    bp = edge_breakpoints(surface, edge)
    return max(edge_mesh_size(surface, edge, e) for e in range(bp.size - 1))


def mesh_size(patch: NurbsPatch, element: tuple[int, int]) -> float:
    """Element diameter estimate: max distance among the 4 mapped corners."""
    bu = breakpoints(patch.basis.basis_u)
    bv = breakpoints(patch.basis.basis_v)
    eu, ev = element
    corners = [
        patch.point((bu[eu + du], bv[ev + dv])) for du in (0, 1) for dv in (0, 1)
    ]
    return max(
        float(np.linalg.norm(corners[i] - corners[j]))
        for i in range(4)
        for j in range(i + 1, 4)
    )


def conormal_at(
    surface: MultiPatchSurface, edge: InterfaceEdge, side: str, t: float
) -> np.ndarray:
    """Outward unit conormal of the given edge slot ("left"/"right").

    ``t`` is the left side's edge coordinate; for the right slot the
    recorded orientation flip is applied first.
    """
    if side == "left":
        pid, pside = edge.left
        s = t
    elif side == "right":
        if edge.right is None:
            raise GeometryError("boundary edge has no right side")
        pid, pside = edge.right
        s = edge.partner_t(t)
    else:
        raise ValueError("side must be 'left' or 'right'")
    return conormal(surface.patches[pid], pside, s)


def _refine_patch(patch: NurbsPatch) -> NurbsPatch:
    kv_u, Tu = midpoint_refine(patch.basis.basis_u)
    kv_v, Tv = midpoint_refine(patch.basis.basis_v)
    w = patch.basis.weights
    hom = np.concatenate([patch.control_points * w[:, :, None], w[:, :, None]], axis=2)
    hom = np.einsum("ij,jbk->ibk", Tu, hom)
    hom = np.einsum("ij,ajk->aik", Tv, hom)
    w_new = hom[:, :, 3]
    cp_new = hom[:, :, :3] / w_new[:, :, None]
    return NurbsPatch(NurbsBasis2D(kv_u, kv_v, w_new), cp_new, patch.id)


def refine_surface(surface: MultiPatchSurface) -> MultiPatchSurface:
    """Global midpoint h-refinement of every patch (meshes stay matching)."""
    patches = [_refine_patch(p) for p in surface.patches]
    tags = {e.left: e.kind for e in surface.edges if e.kind != "interior"}
    return match_interfaces(patches, tags, surface.alpha.copy())
