"""Leading eigendata of the collocation matrix and equilibrium weights.

The transfer matrix has a simple dominant eigenvalue ``e^P`` (P is the
pressure) with positive right eigenvector ``h`` (eigenfunction values at
nodes) and left eigenvector ``nu`` (the conformal measure applied to the
Lagrange basis).  The equilibrium weight vector is the normalized
entrywise product ``mu_j = nu_j h_j / sum_i nu_i h_i``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cheb import ChebGrid, interpolate, make_grid
from .transfer import TransferMatrix

__all__ = [
    "SpectralData",
    "ConvergenceError",
    "InvalidEigenvectorError",
    "leading_eigentriple",
    "eigenfunction",
    "to_json",
    "from_json",
]

DEFAULT_TOL = 1e-14
RESIDUAL_TARGET = 1e-13
RESIDUAL_LIMIT = 1e-12


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach the residual target."""


class InvalidEigenvectorError(RuntimeError):
    """Eigenvector violates positivity or normalization requirements."""


@dataclass(frozen=True)
class SpectralData:
    """Leading eigentriple plus the equilibrium weight vector.

    Normalization: ``max|h| = 1`` with positive sign, ``nu . h = 1``;
    ``mu_weights`` sums to 1.  ``residuals`` are the sup-norm relative
    eigen-residuals (right, left).
    """

    pressure: float
    h: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)
    mu_weights: np.ndarray = field(repr=False)
    residuals: tuple[float, float]
    N: int
    system_name: str = ""

    @property
    def eigenvalue(self) -> float:
        return math.exp(self.pressure)


def _power_iterate(A: np.ndarray, tol: float, max_iter: int):
    """Dominant eigenpair by power iteration from the all-ones vector.

    Converged when successive Rayleigh quotients differ by less than
    ``tol`` (relative above magnitude 1) and the sup-norm residual is at
    the roundoff floor."""
    v = np.ones(A.shape[0])
    lam_prev = np.inf
    lam = np.inf
    resid = np.inf
    resid_prev = np.inf
    for _ in range(max_iter):
        y = A @ v
        lam = float(v @ y) / float(v @ v)
        resid = float(np.max(np.abs(y - lam * v))) / float(np.max(np.abs(v)))
        rayleigh_ok = abs(lam - lam_prev) < tol * max(1.0, abs(lam))
        # accept at the hard target, or once under the limit with the
        # residual no longer improving (roundoff floor reached)
        if rayleigh_ok and (
            resid <= RESIDUAL_TARGET or (resid <= RESIDUAL_LIMIT and resid >= 0.9 * resid_prev)
        ):
            return lam, v, resid
        ynorm = np.max(np.abs(y))
        if ynorm == 0.0 or not np.isfinite(ynorm):
            raise ConvergenceError("power iteration collapsed (matrix annihilates iterate)")
        v = y / ynorm
        lam_prev = lam
        resid_prev = resid
    if resid <= RESIDUAL_LIMIT:
        return lam, v, resid
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations (residual {resid:.3e}); "
        "the leading eigenvalue may be near-degenerate"
    )


def _dense_pair(A: np.ndarray):
    vals, vecs = np.linalg.eig(A)
    k = int(np.argmax(np.abs(vals)))
    if abs(vals[k].imag) > 1e-10 * abs(vals[k]):
        raise ConvergenceError(f"leading eigenvalue is not real: {vals[k]!r}")
    v = np.real(vecs[:, k])
    lam = float(np.real(vals[k]))
    resid = float(np.max(np.abs(A @ v - lam * v))) / float(np.max(np.abs(v)))
    return lam, v, resid


def leading_eigentriple(
    L: TransferMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    method: str = "power",
) -> SpectralData:
    """Extract pressure, eigenvectors and equilibrium weights from ``L``.

    ``method="power"`` (default) iterates ``L`` and its transpose from the
    all-ones vector; ``method="dense"`` uses a full eigensolve behind the
    same interface.  Raises :class:`ConvergenceError` on stagnation and
    :class:`InvalidEigenvectorError` if the eigenfunction fails to be
    strictly positive at the nodes (usually: N too small, or the system is
    not an eventually-positive transfer operator).
    """
    A = L.entries
    if max_iter is None:
        max_iter = 100 * L.N
    if method == "power":
        lam, h, res_r = _power_iterate(A, tol, max_iter)
        lam_left, nu, res_l = _power_iterate(A.T, tol, max_iter)
    elif method == "dense":
        lam, h, res_r = _dense_pair(A)
        lam_left, nu, res_l = _dense_pair(A.T)
    else:
        raise ValueError(f"unknown method {method!r}")

    if lam <= 0.0:
        raise InvalidEigenvectorError(f"leading eigenvalue must be positive, got {lam!r}")

    # sign conventions: largest-|.| entry of h positive, then nu . h = 1
    if h[int(np.argmax(np.abs(h)))] < 0:
        h = -h
    h = h / np.max(np.abs(h))
    if np.any(h <= 0.0):
        raise InvalidEigenvectorError(
            "eigenfunction is not strictly positive at the nodes; increase N"
        )
    pairing = float(nu @ h)
    if pairing == 0.0:
        raise ConvergenceError("left/right eigenvectors are orthogonal (defective matrix?)")
    nu = nu / pairing

    prod = nu * h
    mu = prod / np.sum(prod)
    res_right = float(np.max(np.abs(A @ h - lam * h))) / float(np.max(np.abs(h)))
    res_left = float(np.max(np.abs(A.T @ nu - lam_left * nu))) / float(np.max(np.abs(nu)))
    return SpectralData(
        pressure=math.log(lam),
        h=h,
        nu=nu,
        mu_weights=mu,
        residuals=(res_right, res_left),
        N=L.N,
        system_name=L.system.name,
    )


def eigenfunction(data: SpectralData, grid: ChebGrid, x):
    """Evaluate the eigenfunction interpolant ``h_N`` at ``x``."""
    return interpolate(grid, data.h, x)


def to_json(data: SpectralData) -> str:
    """Serialize spectral data (full precision; floats round-trip exactly)."""
    return json.dumps(
        {
            "pressure": data.pressure,
            "h": data.h.tolist(),
            "nu": data.nu.tolist(),
            "mu_weights": data.mu_weights.tolist(),
            "residuals": list(data.residuals),
            "N": data.N,
            "system": data.system_name,
        }
    )


def from_json(text: str) -> tuple[SpectralData, ChebGrid]:
    """Inverse of :func:`to_json`; also rebuilds the matching grid."""
    raw = json.loads(text)
    data = SpectralData(
        pressure=raw["pressure"],
        h=np.asarray(raw["h"]),
        nu=np.asarray(raw["nu"]),
        mu_weights=np.asarray(raw["mu_weights"]),
        residuals=(raw["residuals"][0], raw["residuals"][1]),
        N=int(raw["N"]),
        system_name=raw.get("system", ""),
    )
    return data, make_grid(data.N)
