"""B-spline and NURBS basis evaluation on open knot vectors.

Provides the univariate building blocks (basis values and first derivatives
via the Cox-de Boor triangular scheme), bivariate rational tensor-product
bases, and knot insertion for h-refinement.  Evaluation is right-continuous
at interior knots; at the right endpoint the last non-empty span is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KnotVector",
    "BasisEval",
    "NurbsBasis2D",
    "eval_bspline",
    "eval_nurbs2d",
    "insert_knots",
    "greville",
    "breakpoints",
    "uniform_open_knots",
]


@dataclass(frozen=True)
class KnotVector:
    """Open knot vector on [0, 1] with polynomial degree ``degree``."""

    degree: int
    knots: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=float))
        p, U = self.degree, self.knots
        if p < 0:
            raise ValueError("degree must be non-negative")
        if U.ndim != 1 or U.size < 2 * (p + 1):
            raise ValueError("knot vector needs at least 2*(degree+1) entries")
        if np.any(np.diff(U) < 0):
            raise ValueError("knots must be non-decreasing")
        if not (np.all(U[: p + 1] == U[0]) and np.all(U[-(p + 1):] == U[-1])):
            raise ValueError("knot vector must be open (end knots repeated degree+1 times)")
        if U[0] != 0.0 or U[-1] != 1.0:
            raise ValueError("knot vector must span [0, 1]")

    @property
    def n(self) -> int:
        """Number of basis functions."""
        return self.knots.size - self.degree - 1

    @property
    def num_elements(self) -> int:
        return breakpoints(self).size - 1


@dataclass(frozen=True)
class BasisEval:
    """Non-vanishing basis values and first derivatives at one point.

    ``values[r]`` and ``derivs[r]`` belong to basis function
    ``first_active + r`` for ``r = 0 .. degree``.
    """

    first_active: int
    values: np.ndarray
    derivs: np.ndarray


def find_span(kv: KnotVector, xi: float) -> int:
    """Index i of the knot span [U_i, U_{i+1}) containing xi.

    Right-continuous at interior knots; xi = 1 maps to the last
    non-empty span.
    """
    U, n = kv.knots, kv.n
    if xi >= U[n]:
        return n - 1
    return int(np.searchsorted(U, xi, side="right")) - 1


def eval_bspline(kv: KnotVector, xi: float) -> BasisEval:
    """Evaluate the degree+1 possibly non-zero B-splines and d/dxi at xi.

    Raises ValueError if xi lies outside [0, 1].
    """
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"evaluation point {xi} outside [0, 1]")
    p, U = kv.degree, kv.knots
    span = find_span(kv, xi)

    values = np.zeros(p + 1)
    values[0] = 1.0
    if p == 0:
        return BasisEval(span, values, np.zeros(1))

    # Triangular Cox-de Boor scheme; keep the degree p-1 row for derivatives.
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    lower = np.zeros(p)
    for j in range(1, p + 1):
        if j == p:
            lower[:] = values[:p]
        left[j] = xi - U[span + 1 - j]
        right[j] = U[span + j] - xi
        saved = 0.0
        for r in range(j):
            temp = values[r] / (right[r + 1] + left[j - r])
            values[r] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        values[j] = saved

    derivs = np.zeros(p + 1)
    first = span - p
    for r in range(p + 1):
        i = first + r
        d = 0.0
        if r > 0:
            den = U[i + p] - U[i]
            if den > 0.0:
                d += lower[r - 1] / den
        if r < p:
            den = U[i + p + 1] - U[i + 1]
            if den > 0.0:
                d -= lower[r] / den
        derivs[r] = p * d
    return BasisEval(first, values, derivs)


def tabulate(kv: KnotVector, xs: np.ndarray):
    """eval_bspline at many points; returns (first_active, values, derivs) arrays."""
    xs = np.asarray(xs, dtype=float)
    m, p = xs.size, kv.degree
    first = np.empty(m, dtype=int)
    vals = np.empty((m, p + 1))
    ders = np.empty((m, p + 1))
    for k, x in enumerate(xs):
        ev = eval_bspline(kv, float(x))
        first[k], vals[k], ders[k] = ev.first_active, ev.values, ev.derivs
    return first, vals, ders


@dataclass(frozen=True)
class NurbsBasis2D:
    """Rational tensor-product basis: two knot vectors and a positive weight grid."""

    basis_u: KnotVector
    basis_v: KnotVector
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        n1, n2 = self.basis_u.n, self.basis_v.n
        if self.weights.shape != (n1, n2):
            raise ValueError(
                f"weight grid {self.weights.shape} does not match basis size {(n1, n2)}"
            )
        if np.any(self.weights <= 0.0):
            raise ValueError("all NURBS weights must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return self.basis_u.n, self.basis_v.n


def eval_nurbs2d(basis: NurbsBasis2D, xi) -> tuple[np.ndarray, np.ndarray, tuple[int, int]]:
    """Rational basis values and parametric gradients at xi in [0,1]^2.

    Returns ``(values, grads, (first_u, first_v))`` where ``values`` has
    shape (p1+1, p2+1), ``grads`` has shape (p1+1, p2+1, 2), and entry
    (a, b) belongs to the basis function (first_u + a, first_v + b).
    Values sum to 1 (weighted projection; gradients by the quotient rule).
    """
    eu = eval_bspline(basis.basis_u, xi[0])
    ev = eval_bspline(basis.basis_v, xi[1])
    p1, p2 = basis.basis_u.degree, basis.basis_v.degree
    w = basis.weights[
        eu.first_active : eu.first_active + p1 + 1,
        ev.first_active : ev.first_active + p2 + 1,
    ]
    B = np.outer(eu.values, ev.values) * w
    Bu = np.outer(eu.derivs, ev.values) * w
    Bv = np.outer(eu.values, ev.derivs) * w
    S = B.sum()
    Su = Bu.sum()
    Sv = Bv.sum()
    vals = B / S
    grads = np.empty((p1 + 1, p2 + 1, 2))
    grads[:, :, 0] = Bu / S - B * (Su / S**2)
    grads[:, :, 1] = Bv / S - B * (Sv / S**2)
    return vals, grads, (eu.first_active, ev.first_active)


def breakpoints(kv: KnotVector) -> np.ndarray:
    """Unique knots (the parametric element boundaries)."""
    return np.unique(kv.knots)


def greville(kv: KnotVector) -> np.ndarray:
    """Greville abscissae: moving averages of degree consecutive knots."""
    p, U = kv.degree, kv.knots
    if p == 0:
        return 0.5 * (U[:-1] + U[1:])
    return np.array([U[k + 1 : k + p + 1].mean() for k in range(kv.n)])


def uniform_open_knots(degree: int, num_elements: int) -> KnotVector:
    """Open knot vector with ``num_elements`` uniform spans on [0, 1]."""
    if num_elements < 1:
        raise ValueError("need at least one element")
    interior = np.linspace(0.0, 1.0, num_elements + 1)[1:-1]
    U = np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])
    return KnotVector(degree, U)


def _single_insertion_matrix(U: np.ndarray, p: int, u: float) -> tuple[np.ndarray, np.ndarray]:
    """Boehm's single-knot insertion: returns (new knots, (n+1) x n matrix)."""
    n = U.size - p - 1
    k = int(np.searchsorted(U, u, side="right")) - 1
    T = np.zeros((n + 1, n))
    for i in range(n + 1):
        if i <= k - p:
            T[i, i] = 1.0
        elif i > k:
            T[i, i - 1] = 1.0
        else:
            a = (u - U[i]) / (U[i + p] - U[i])
            T[i, i] = a
            T[i, i - 1] = 1.0 - a
    Unew = np.insert(U, k + 1, u)
    return Unew, T


def insert_knots(kv: KnotVector, new_knots) -> tuple[KnotVector, np.ndarray]:
    """Insert knots strictly inside (0, 1); returns refined vector and the
    control-point refinement matrix.

    Applying the matrix to (weighted) control points reproduces the
    original geometry exactly.  Raises ValueError if any resulting knot
    multiplicity would exceed the degree.
    """
    new_knots = np.sort(np.asarray(new_knots, dtype=float))
    if new_knots.size and (new_knots[0] <= 0.0 or new_knots[-1] >= 1.0):
        raise ValueError("new knots must lie strictly inside (0, 1)")
    p = kv.degree
    U = kv.knots.copy()
    T = np.eye(kv.n)
    for u in new_knots:
        mult = int(np.count_nonzero(U == u))
        if mult + 1 > p:
            raise ValueError(f"multiplicity of knot {u} would exceed degree {p}")
        U, T1 = _single_insertion_matrix(U, p, float(u))
        T = T1 @ T
    return KnotVector(p, U), T


def midpoint_refine(kv: KnotVector) -> tuple[KnotVector, np.ndarray]:
    """Insert the midpoint of every non-empty span once (global h-refinement)."""
    bp = breakpoints(kv)
    return insert_knots(kv, 0.5 * (bp[:-1] + bp[1:]))
