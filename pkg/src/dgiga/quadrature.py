"""Gauss-Legendre quadrature on intervals, elements and element edges."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadRule",
    "gauss_on_interval",
    "panel_rules",
    "element_rule",
    "edge_rule",
    "integrate_patch",
]

MAX_POINTS = 30


@dataclass(frozen=True)
class QuadRule:
    """Nodes and positive weights on an interval [a, b]."""

    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def _gauss_reference(q: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    # Newton iteration on the Legendre polynomial P_q; Chebyshev-like
    # initial guesses converge in a handful of steps for q <= 30.
    def legendre_and_deriv(x):
        P0 = np.ones_like(x)
        P1 = x.copy()
        for k in range(2, q + 1):
            P0, P1 = P1, ((2 * k - 1) * x * P1 - (k - 1) * P0) / k
        # Nodes are strictly inside (-1, 1), so x^2 - 1 never vanishes.
        dP = q * (x * P1 - P0) / (x**2 - 1.0)
        return P1, dP

    nodes = np.cos(np.pi * (np.arange(1, q + 1) - 0.25) / (q + 0.5))
    for _ in range(100):
        P, dP = legendre_and_deriv(nodes)
        step = P / dP
        nodes -= step
        if np.max(np.abs(step)) < 1e-15:
            break
    _, dP = legendre_and_deriv(nodes)
    weights = 2.0 / ((1.0 - nodes**2) * dP**2)
    order = np.argsort(nodes)
    return tuple(nodes[order]), tuple(weights[order])


def gauss_on_interval(q: int, a: float, b: float) -> QuadRule:
    """q-point Gauss-Legendre rule mapped affinely onto [a, b].

    Exact for polynomials up to degree 2q-1; nodes lie strictly inside
    (a, b).  Raises ValueError for q < 1, q > 30 or a >= b.
    """
    if q < 1:
        raise ValueError("need at least one quadrature point")
    if q > MAX_POINTS:
        raise ValueError(f"quadrature order {q} unsupported (max {MAX_POINTS})")
    if not a < b:
        raise ValueError("empty interval")
    x, w = _gauss_reference(q)
    x = np.asarray(x)
    w = np.asarray(w)
    half = 0.5 * (b - a)
    return QuadRule(a + half * (x + 1.0), half * w)


def panel_rules(breaks: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-span Gauss rules; returns nodes and weights of shape (nspans, q)."""
    breaks = np.asarray(breaks, dtype=float)
    nel = breaks.size - 1
    nodes = np.empty((nel, q))
    weights = np.empty((nel, q))
    for e in range(nel):
        rule = gauss_on_interval(q, breaks[e], breaks[e + 1])
        nodes[e], weights[e] = rule.nodes, rule.weights
    return nodes, weights


def element_rule(breaks_u, breaks_v, q: int):
    """Tensor-product Gauss rule on every element of a breakpoint grid.

    Yields ((eu, ev), points, weights) with points of shape (q*q, 2) and
    tensor weights (products of the 1D weights) of shape (q*q,).
    """
    xu, wu = panel_rules(np.asarray(breaks_u, dtype=float), q)
    xv, wv = panel_rules(np.asarray(breaks_v, dtype=float), q)
    for eu in range(xu.shape[0]):
        for ev in range(xv.shape[0]):
            pts = np.stack(
                np.meshgrid(xu[eu], xv[ev], indexing="ij"), axis=-1
            ).reshape(-1, 2)
            yield (eu, ev), pts, np.outer(wu[eu], wv[ev]).reshape(-1)


def edge_rule(breaks, q: int):
    """Gauss rule on every span of an edge; yields (element, nodes, weights)."""
    nodes, weights = panel_rules(np.asarray(breaks, dtype=float), q)
    for e in range(nodes.shape[0]):
        yield e, nodes[e], weights[e]


def integrate_patch(patch, fn, q: int) -> float:
    """Integrate fn(x, y, z) over one mapped patch with q points per direction.

    Passing ``fn=None`` integrates 1 and returns the surface area.
    """
    from . import geometry
    from .splines import breakpoints

    xu, wu = panel_rules(breakpoints(patch.basis.basis_u), q)
    xv, wv = panel_rules(breakpoints(patch.basis.basis_v), q)
    total = 0.0
    for eu in range(xu.shape[0]):
        for ev in range(xv.shape[0]):
            for iu in range(q):
                for iv in range(q):
                    frame = geometry.frame_at(patch, (xu[eu, iu], xv[ev, iv]))
                    val = 1.0 if fn is None else float(fn(*frame.point))
                    total += val * frame.sqrt_det_g * wu[eu, iu] * wv[ev, iv]
    return total
