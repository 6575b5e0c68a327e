"""Dense two-phase tableau simplex for small equality-form LPs.

Solves ``max c @ x  s.t.  A @ x = b, x >= 0`` with Bland's rule for both
the entering and the leaving variable, which rules out cycling on the
degenerate vertices these allocation problems are full of.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PIVOT_TOL", "OPT_TOL", "LpResult", "Infeasible", "Unbounded", "simplex_max"]

PIVOT_TOL = 1e-10
# reduced costs are compared against a much tighter bound so regions with
# probabilities far below PIVOT_TOL still enter the basis
OPT_TOL = 1e-14


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


@dataclass
class LpResult:
    x: np.ndarray
    value: float
    basis: list
    iterations: int


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    col_vals = tab[:, col].copy()
    col_vals[row] = 0.0
    tab -= np.outer(col_vals, tab[row])


def _run(tab: np.ndarray, basis: list, n_cols: int, tol: float, opt_tol: float, max_iter: int) -> int:
    """Iterate on ``tab`` in place; the last row holds reduced costs."""
    it = 0
    while True:
        reduced = tab[-1, :n_cols]
        candidates = np.flatnonzero(reduced < -opt_tol)
        if candidates.size == 0:
            return it
        if it >= max_iter:
            raise RuntimeError(f"simplex did not converge in {max_iter} iterations")
        col = int(candidates[0])
        column = tab[:-1, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise Unbounded(f"column {col} is unbounded")
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(tab, row, col)
        basis[row] = col
        it += 1


def simplex_max(c, A, b, tol: float = PIVOT_TOL, opt_tol: float = OPT_TOL, max_iter: int = 10_000) -> LpResult:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float)
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError(f"shape mismatch: c {c.shape}, A {A.shape}, b {b.shape}")
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase I: minimize the sum of artificials
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[-1, :n] = -A.sum(axis=0)
    tab[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    iters = _run(tab, basis, n + m, tol, opt_tol, max_iter)
    if tab[-1, -1] < -max(tol, 1e-9) * max(1.0, b.sum()):
        raise Infeasible(f"phase I residual {-tab[-1, -1]!r}")

    # drive remaining artificials out, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        nz = np.flatnonzero(np.abs(tab[i, :n]) > tol)
        if nz.size:
            _pivot(tab, i, int(nz[0]))
            basis[i] = int(nz[0])
            keep.append(i)
    tab = np.vstack([tab[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[i] for i in keep]

    # phase II
    tab[-1, :n] = -c
    for i, j in enumerate(basis):
        tab[-1] += c[j] * tab[i]
    iters += _run(tab, basis, n, tol, opt_tol, max_iter)

    x = np.zeros(n)
    for i, j in enumerate(basis):
        x[j] = tab[i, -1]
    x[np.abs(x) < tol] = 0.0
    return LpResult(x=x, value=float(c @ x), basis=basis, iterations=iters)
