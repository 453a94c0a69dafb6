"""Fourier transforms of equilibrium measures.

``mu_hat(xi) = integral of exp(-i xi x)``; the direct estimate is the
equilibrium dot product with the exponential at the nodes (accurate while
``|xi|`` stays below roughly ``c N``), the Monte Carlo estimate averages
the exponential along sampled orbits and keeps working at arbitrarily high
frequencies, and the two-branch equal-weight Cantor systems admit an exact
infinite-product oracle for ground truth.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cheb import ChebGrid
from .measure import integrate
from .sampler import FourierAccumulator, SamplerConfig, run_accumulators
from .spectral import SpectralData
from .system import IFSSystem, diagnose_contraction

__all__ = [
    "FourierSweep",
    "FrequencyResolutionWarning",
    "fourier_direct",
    "fourier_mc",
    "cantor_oracle",
    "frequency_limit",
    "sweep",
]


class FrequencyResolutionWarning(UserWarning):
    """|xi| exceeds the advisory resolution c*N of the direct estimate."""


@dataclass(frozen=True)
class FourierSweep:
    """Fourier estimates over a frequency batch, one method per sweep."""

    xis: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    method: str
    std_errors: np.ndarray | None = field(default=None, repr=False)
    errors_vs: np.ndarray | None = field(default=None, repr=False)
    reference: str | None = None


def fourier_direct(data: SpectralData, grid: ChebGrid, xi: float, system: IFSSystem | None = None) -> complex:
    """Spectral estimate ``sum_j mu_j exp(-i xi x_j)``.

    Shares the code path of :func:`chebgibbs.measure.integrate`.  When the
    system is supplied, frequencies beyond the advisory limit ``c N`` raise
    a :class:`FrequencyResolutionWarning` (accuracy degrades there).
    """
    if system is not None and abs(xi) > frequency_limit(system, grid):
        warnings.warn(
            f"|xi|={abs(xi):g} exceeds the advisory resolution of the N={grid.N} grid",
            FrequencyResolutionWarning,
            stacklevel=2,
        )
    est = integrate(data, grid, lambda x: np.exp(-1j * xi * x))
    return complex(est.value)


def frequency_limit(system: IFSSystem, grid: ChebGrid) -> float:
    """Advisory frequency resolution ``c_est * N`` with ``c_est = 1 - max
    theta-contraction``; direct estimates are exponentially good below it."""
    c_est = 1.0 - diagnose_contraction(system).max
    return c_est * grid.N


def fourier_mc(
    system: IFSSystem,
    data: SpectralData,
    grid: ChebGrid,
    config: SamplerConfig,
    xis,
    exact_eval: bool = False,
    mode: str = "operator",
) -> FourierSweep:
    """Monte Carlo estimates of ``mu_hat`` for a whole frequency batch.

    One orbit per replica; every frequency is accumulated from the same
    point sample.  ``std_errors`` holds per-frequency replica standard
    errors (modulus of complex deviations).
    """
    xis = np.asarray(xis, dtype=float)
    acc = FourierAccumulator(xis)
    (per_replica,), _ = run_accumulators(
        system, data, grid, config, [acc], exact_eval=exact_eval, mode=mode
    )
    per_replica = np.atleast_2d(per_replica)  # (replicas, n_freq)
    values = per_replica.mean(axis=0)
    r = per_replica.shape[0]
    if r >= 2:
        spread = np.sqrt(np.sum(np.abs(per_replica - values) ** 2, axis=0) / (r - 1))
        std_errors = spread / math.sqrt(r)
    else:
        std_errors = np.full(xis.size, np.nan)
    return FourierSweep(xis=xis, values=values, method="monte_carlo", std_errors=std_errors)


def cantor_oracle(r: float, xi: float, tol: float = 1e-15) -> float:
    """Exact Fourier transform of the equal-weight Cantor measure, ratio ``r``.

    The attractor measure is the law of ``sum_k eps_k (1-r) r^k`` with
    independent uniform signs, hence ``mu_hat(xi) = prod_k cos((1-r) r^k xi)``;
    the product is truncated once the remaining angles fall below
    ``sqrt(tol)``, whose quadratic tail is within ``tol``.
    """
    if not 0.0 < r <= 0.5:
        raise ValueError(f"r must be in (0, 1/2], got {r}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    angle = (1.0 - r) * xi
    cutoff = math.sqrt(tol)
    value = 1.0
    while abs(angle) >= cutoff:
        value *= math.cos(angle)
        angle *= r
    return value


def _evaluate(method: str, params: dict, xis: np.ndarray):
    """Dispatch one method over a frequency batch -> (values, std_errors)."""
    if method == "direct":
        data, grid = params["data"], params["grid"]
        values = np.array([fourier_direct(data, grid, xi) for xi in xis])
        return values, None
    if method in ("monte_carlo", "mc"):
        out = fourier_mc(params["system"], params["data"], params["grid"], params["config"], xis,
                         exact_eval=params.get("exact_eval", False),
                         mode=params.get("mode", "operator"))
        return out.values, out.std_errors
    if method == "oracle":
        tol = params.get("tol", 1e-15)
        values = np.array([cantor_oracle(params["r"], xi, tol) for xi in xis], dtype=complex)
        return values, None
    if method == "ulam":
        from .ulam import ulam_fourier

        values = np.array([ulam_fourier(params["op"], xi) for xi in xis])
        return values, None
    raise ValueError(f"unknown method {method!r}")


def sweep(
    method: str,
    params: dict,
    xi_start: float,
    xi_end: float,
    count: int,
    reference: str | None = None,
    ref_params: dict | None = None,
) -> FourierSweep:
    """Uniform frequency sweep (endpoints included) with optional reference.

    ``params`` carries whatever the method needs: ``data``/``grid`` for
    ``direct``, plus ``system``/``config`` for ``monte_carlo``, ``r`` for
    ``oracle``, ``op`` for ``ulam``.  A reference method adds the
    ``errors_vs`` column of absolute deviations.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if count == 1:
        if xi_start != xi_end:
            raise ValueError("count=1 needs xi_start == xi_end")
    elif not xi_start < xi_end:
        raise ValueError(f"need xi_start < xi_end, got [{xi_start}, {xi_end}]")
    xis = np.linspace(xi_start, xi_end, count)

    if method == "direct" and params.get("system") is not None:
        limit = frequency_limit(params["system"], params["grid"])
        if np.max(np.abs(xis)) > limit:
            warnings.warn(
                f"sweep reaches |xi|={np.max(np.abs(xis)):g}, beyond the advisory "
                f"resolution {limit:g} of the N={params['grid'].N} grid",
                FrequencyResolutionWarning,
                stacklevel=2,
            )

    values, std_errors = _evaluate(method, params, xis)
    errors_vs = None
    if reference is not None:
        ref_values, _ = _evaluate(reference, ref_params if ref_params is not None else params, xis)
        errors_vs = np.abs(values - ref_values)
    return FourierSweep(
        xis=xis,
        values=np.asarray(values, dtype=complex),
        method="monte_carlo" if method == "mc" else method,
        std_errors=std_errors,
        errors_vs=errors_vs,
        reference=reference,
    )
