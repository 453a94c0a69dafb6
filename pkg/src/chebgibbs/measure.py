"""Weak integrals against the equilibrium and conformal measures.

Given spectral data on an N-point grid, ``integral(psi) ~ sum_j mu_j psi(x_j)``
for the equilibrium measure, and ``sum_j nu_j psi(x_j) / sum_j nu_j`` for the
conformal measure.  Errors decay geometrically in N for analytic ``psi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr
from .cheb import ChebGrid
from .spectral import SpectralData

__all__ = ["WeakEstimate", "integrate", "integrate_conformal"]


@dataclass(frozen=True)
class WeakEstimate:
    value: float | complex
    N: int
    kind: str  # "equilibrium" or "conformal"

    def __post_init__(self):
        if not np.all(np.isfinite([np.real(self.value), np.imag(self.value)])):
            raise ValueError(f"non-finite estimate: {self.value!r}")


def _node_values(psi, grid: ChebGrid) -> np.ndarray:
    if isinstance(psi, expr.Node):
        return np.asarray(expr.evaluate(psi, grid.nodes))
    return np.asarray(psi(grid.nodes))


def _scalar(value):
    return complex(value) if np.iscomplexobj(value) else float(value)


def integrate(data: SpectralData, grid: ChebGrid, psi) -> WeakEstimate:
    """Estimate the equilibrium-measure integral of ``psi``.

    ``psi`` may be a callable on arrays or an expression AST, real or
    complex valued; complex values get the real weights applied to real
    and imaginary parts separately (a plain dot product).
    """
    values = _node_values(psi, grid)
    return WeakEstimate(value=_scalar(data.mu_weights @ values), N=data.N, kind="equilibrium")


def integrate_conformal(data: SpectralData, grid: ChebGrid, psi, vector: str = "nu") -> WeakEstimate:
    """Estimate the conformal-measure integral of ``psi``.

    The default weights are the left eigenvector entries (``nu_k`` is the
    conformal measure applied to the k-th basis polynomial, so
    ``nu . psi(nodes) / nu . 1`` is its normalized action on the
    interpolant of ``psi``).  ``vector="h"`` switches to right-eigenvector
    weights for comparison.
    """
    if vector == "nu":
        w = data.nu
    elif vector == "h":
        w = data.h
    else:
        raise ValueError(f"vector must be 'nu' or 'h', got {vector!r}")
    # normalize through the same dot product as the numerator, so psi == 1
    # comes out as exactly 1.0
    total = float(w @ np.ones_like(w))
    if abs(total) < 1e-10:
        raise ZeroDivisionError(f"conformal weights sum to {total!r}; cannot normalize")
    values = _node_values(psi, grid)
    return WeakEstimate(value=_scalar((w @ values) / total), N=data.N, kind="conformal")
