"""Chebyshev nodes of the first kind and Lagrange/barycentric evaluation.

The degree-(N-1) polynomial space is represented throughout by values at
the nodes ``x_n = cos((2n-1)pi/2N)``; this module supplies the node grid,
single Lagrange basis functions via their sin/tan closed form, and stable
interpolation through node values via the barycentric formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ChebGrid", "NodePolynomial", "make_grid", "lagrange_basis", "basis_row", "interpolate"]


@dataclass(frozen=True)
class ChebGrid:
    """First-kind Chebyshev grid: nodes, their angles, barycentric weights.

    ``nodes[j] = cos(thetas[j])`` with ``thetas[j] = (2j+1)pi/2N`` strictly
    increasing in (0, pi), so the nodes are strictly decreasing in (-1, 1)
    and symmetric about 0.
    """

    N: int
    thetas: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    bary_weights: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class NodePolynomial:
    """A polynomial of degree <= N-1 given by its values at the grid nodes."""

    grid: ChebGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.grid.N,):
            raise ValueError(f"need {self.grid.N} node values, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def __call__(self, x):
        return interpolate(self.grid, self.values, x)


def make_grid(N: int) -> ChebGrid:
    """Build the N-point first-kind Chebyshev grid on [-1, 1]."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    j = np.arange(N)
    thetas = (2 * j + 1) * (np.pi / (2 * N))
    nodes = np.cos(thetas)
    weights = np.where(j % 2 == 0, 1.0, -1.0) * np.sin(thetas)
    for arr in (thetas, nodes, weights):
        arr.setflags(write=False)
    return ChebGrid(N=N, thetas=thetas, nodes=nodes, bary_weights=weights)


def _sin_over_tan(N: int, d: np.ndarray) -> np.ndarray:
    """sin(N d) / tan(d/2), evaluated through the exact factorization
    2N * [sin(Nd)/(Nd)] * [(d/2)/tan(d/2)] so the d -> 0 limit is smooth."""
    d = np.asarray(d, dtype=float)
    safe = np.where(d == 0.0, 1.0, d)
    sinc = np.where(d == 0.0, 1.0, np.sin(N * safe) / (N * safe))
    taper = np.where(d == 0.0, 1.0, (0.5 * safe) / np.tan(0.5 * safe))
    return 2.0 * N * sinc * taper


def _check_range(x: np.ndarray):
    if np.any(np.abs(x) > 1.0):
        bad = np.asarray(x)[np.abs(np.asarray(x)) > 1.0]
        raise ValueError(f"evaluation point outside [-1, 1]: {bad.flat[0]!r}")


def lagrange_basis(grid: ChebGrid, n: int, x) -> float | np.ndarray:
    """Evaluate the Lagrange basis polynomial attached to node ``n`` (1-based).

    Uses the closed form
    ``(1/2N) [sin N(t-t_n)/tan((t-t_n)/2) + sin N(t+t_n)/tan((t+t_n)/2)]``
    with ``t = arccos(x)``; both sin/tan ratios go through a factorization
    that is exact at the removable singularity, so values at nodes come out
    as Kronecker deltas to rounding.
    """
    if not 1 <= n <= grid.N:
        raise ValueError(f"basis index must be in 1..{grid.N}, got {n}")
    x_arr = np.asarray(x, dtype=float)
    _check_range(x_arr)
    theta = np.arccos(x_arr)
    t_n = grid.thetas[n - 1]
    val = (_sin_over_tan(grid.N, theta - t_n) + _sin_over_tan(grid.N, theta + t_n)) / (2.0 * grid.N)
    return float(val) if np.ndim(x) == 0 else val


def basis_row(grid: ChebGrid, x) -> np.ndarray:
    """All N basis values at ``x``: shape (N,) for scalar x, (m, N) for a vector.

    Same closed form as :func:`lagrange_basis`, vectorized over the basis
    index; this is the evaluation the transfer-matrix assembly uses.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    _check_range(x_arr)
    theta = np.arccos(x_arr)[:, None]
    t = grid.thetas[None, :]
    row = (_sin_over_tan(grid.N, theta - t) + _sin_over_tan(grid.N, theta + t)) / (2.0 * grid.N)
    return row[0] if np.ndim(x) == 0 else row


def interpolate(grid: ChebGrid, values, x):
    """Evaluate the interpolant through ``(nodes, values)`` at ``x``.

    Barycentric second form with first-kind weights; exact (bitwise) at the
    nodes.  ``values`` may be real or complex; ``x`` may be a scalar or an
    array of points in [-1, 1].
    """
    vals = values.values if isinstance(values, NodePolynomial) else np.asarray(values)
    if vals.shape != (grid.N,):
        raise ValueError(f"need {grid.N} node values, got shape {vals.shape}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    _check_range(x_arr)

    diff = x_arr[:, None] - grid.nodes[None, :]
    hit = diff == 0.0
    w_over = grid.bary_weights / np.where(hit, 1.0, diff)
    out = (w_over @ vals) / np.sum(w_over, axis=1)

    hit_rows = np.nonzero(hit.any(axis=1))[0]
    for i in hit_rows:
        out[i] = vals[np.nonzero(hit[i])[0][0]]
    if np.ndim(x) == 0:
        return out[0] if np.iscomplexobj(vals) else float(out[0])
    return out
