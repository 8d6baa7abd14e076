"""Symmetric sparse storage and preconditioned conjugate gradients.

The matrix container is a thin CSR wrapper (scipy backs the storage and the
matrix-vector product); the solver is a plain Jacobi-preconditioned CG with
an optional mean-value projection for pure-Neumann / closed-surface systems
whose nullspace is the constant vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = ["CsrMatrix", "SolveReport", "NumericalBreakdownError", "cg_solve", "cg_solve_projected"]


class NumericalBreakdownError(RuntimeError):
    """NaN or infinity appeared during an iterative solve."""


@dataclass(frozen=True)
class CsrMatrix:
    """Square CSR matrix with sorted, duplicate-free column indices per row."""

    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    n: int

    @classmethod
    def from_coo(cls, n: int, rows, cols, vals) -> "CsrMatrix":
        m = sp.coo_matrix(
            (np.asarray(vals, dtype=float), (np.asarray(rows), np.asarray(cols))),
            shape=(n, n),
        ).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data, n)

    @classmethod
    def from_scipy(cls, m) -> "CsrMatrix":
        m = sp.csr_matrix(m)
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data, m.shape[0])

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, self.col_indices, self.row_offsets), shape=(self.n, self.n)
        )

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.to_scipy() @ x

    def diagonal(self) -> np.ndarray:
        return self.to_scipy().diagonal()

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def symmetry_deviation(self) -> float:
        """max |A - A^T| relative to max |A|."""
        a = self.to_scipy()
        num = np.abs((a - a.T).data)
        den = np.abs(a.data)
        if den.size == 0:
            return 0.0
        return float((num.max() if num.size else 0.0) / den.max())


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_relative_residual: float
    converged: bool


def _jacobi_inverse(A: CsrMatrix) -> np.ndarray:
    d = A.diagonal().copy()
    good = np.abs(d) > 0.0
    inv = np.ones(A.n)
    inv[good] = 1.0 / d[good]
    return inv


def _check_finite(v: np.ndarray):
    if not np.all(np.isfinite(v)):
        raise NumericalBreakdownError("non-finite value encountered in CG iteration")


def cg_solve(
    A: CsrMatrix,
    b: np.ndarray,
    tol: float = 1e-10,
    max_iter: int | None = None,
    precond: str | None = "jacobi",
    x0: np.ndarray | None = None,
    _project: bool = False,
) -> tuple[np.ndarray, SolveReport]:
    """Preconditioned CG for symmetric positive (semi-)definite systems.

    Stops when ||b - A x|| / ||b|| <= tol.  Hitting max_iter returns a
    non-converged report; NaNs raise NumericalBreakdownError.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError("tolerance must be in (0, 1)")
    b = np.asarray(b, dtype=float)
    _check_finite(b)
    n = A.n
    if max_iter is None:
        max_iter = 10 * n
    mat = A.to_scipy()
    minv = _jacobi_inverse(A) if precond == "jacobi" else None

    def project(v):
        if _project:
            v = v - v.mean()
        return v

    b = project(b)
    x = np.zeros(n) if x0 is None else project(np.asarray(x0, dtype=float).copy())
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x * 0.0, SolveReport(0, 0.0, True)

    r = project(b - mat @ x)
    z = project(r * minv) if minv is not None else r
    p = z.copy()
    rz = float(r @ z)
    relres = np.linalg.norm(r) / bnorm
    it = 0
    while relres > tol and it < max_iter:
        Ap = mat @ p
        pAp = float(p @ Ap)
        if pAp <= 0.0 or not np.isfinite(pAp):
            raise NumericalBreakdownError(
                f"CG breakdown: non-positive curvature p^T A p = {pAp:.3e}"
            )
        a = rz / pAp
        x += a * p
        r -= a * Ap
        r = project(r)
        _check_finite(r)
        z = project(r * minv) if minv is not None else r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
        relres = float(np.linalg.norm(r) / bnorm)
    if _project:
        x = x - x.mean()
    return x, SolveReport(it, relres, relres <= tol)


def cg_solve_projected(
    A: CsrMatrix,
    b: np.ndarray,
    tol: float = 1e-10,
    max_iter: int | None = None,
    precond: str | None = "jacobi",
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """CG with the constant vector projected out of b, x and every iterate.

    For symmetric positive semidefinite systems whose nullspace is (close
    to) the constant coefficient vector; the returned solution has zero
    mean.
    """
    return cg_solve(A, b, tol=tol, max_iter=max_iter, precond=precond, x0=x0, _project=True)
