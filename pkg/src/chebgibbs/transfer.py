"""Transfer operator: exact pointwise action and Chebyshev-Lagrange matrix.

The operator acts on functions as ``(L psi)(x) = sum_i e^{phi_i(x)} psi(g_i(x))``;
collocating its action on the Lagrange basis at the grid nodes yields the
dense N x N matrix whose leading eigendata carry the equilibrium measure.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import expr
from .cheb import ChebGrid, NodePolynomial, basis_row
from .system import IFSSystem

__all__ = ["TransferMatrix", "AssemblyError", "assemble", "apply_operator", "matrix_to_csv"]

IMAGE_TOL = 1e-12


class AssemblyError(RuntimeError):
    """A branch image left [-1, 1] at a collocation node."""


@dataclass(frozen=True)
class TransferMatrix:
    """Dense collocation matrix ``entries[j, k] = (L l_k)(x_j)``."""

    grid: ChebGrid
    entries: np.ndarray = field(repr=False)
    system: IFSSystem

    def __post_init__(self):
        if not np.all(np.isfinite(self.entries)):
            raise AssemblyError("transfer matrix contains non-finite entries")

    @property
    def N(self) -> int:
        return self.grid.N


def _branch_images(system: IFSSystem, x: np.ndarray):
    """Branch maps and weights evaluated at ``x``, with image range checks."""
    for branch in system.branches:
        y = branch.map_fn()(x)
        overshoot = np.abs(y) - 1.0
        if np.any(overshoot > IMAGE_TOL) or not np.all(np.isfinite(y)):
            bad = int(np.argmax(np.where(np.isfinite(y), overshoot, np.inf)))
            raise AssemblyError(
                f"branch {branch.label!r} maps node {bad} (x={x[bad]:.17g}) to "
                f"{y[bad]:.17g}, outside [-1, 1]"
            )
        yield branch, np.clip(y, -1.0, 1.0)


def assemble(system: IFSSystem, grid: ChebGrid, threads: int = 1) -> TransferMatrix:
    """Assemble the N x N transfer matrix for ``system`` on ``grid``.

    Cost is O(branches * N^2); rows are independent, so ``threads > 1``
    splits the node set across a thread pool (the result is identical for
    any thread count).
    """
    nodes = grid.nodes
    entries = np.zeros((grid.N, grid.N))
    for branch, y in _branch_images(system, nodes):
        w = np.exp(branch.weight_fn()(nodes))
        if threads > 1 and grid.N >= 64:
            blocks = np.array_split(np.arange(grid.N), threads)

            def fill(idx, y=y, w=w):
                entries[idx] += w[idx, None] * basis_row(grid, y[idx])

            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(fill, blocks))
        else:
            entries += w[:, None] * basis_row(grid, y)
    return TransferMatrix(grid=grid, entries=entries, system=system)


def apply_operator(system: IFSSystem, psi, x):
    """Exact (non-discretized) action ``sum_i e^{phi_i(x)} psi(g_i(x))``.

    ``psi`` may be a callable, an expression AST, or a :class:`NodePolynomial`;
    ``x`` a scalar or array in [-1, 1].  Serves as the independent oracle for
    the matrix assembly and as the sampler's probability denominator.
    """
    if isinstance(psi, expr.Node):
        psi = expr.as_callable(psi)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    total = 0.0
    for branch, y in _branch_images(system, x_arr):
        total = total + np.exp(branch.weight_fn()(x_arr)) * np.asarray(psi(y))
    return total[0] if np.ndim(x) == 0 else total


def matrix_to_csv(matrix: TransferMatrix, path):
    """Dump the matrix row-major to CSV at full precision (17 significant digits)."""
    np.savetxt(path, matrix.entries, delimiter=",", fmt="%.16e")
