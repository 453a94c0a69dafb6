"""IFS/potential models on [-1, 1]: branches, preset systems, contraction check.

A system is a finite family of contracting branch maps with one potential
weight expression per branch.  Presets cover the two systems studied here:
two-branch affine Cantor constructions and Gauss-map inverse branches
restricted to a digit set, conjugated from [0, 1] to [-1, 1] by
``tau(x) = (x + 1)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import expr

__all__ = [
    "Branch",
    "IFSSystem",
    "ContractionReport",
    "RangeError",
    "preset_cantor",
    "preset_gauss_restricted",
    "diagnose_contraction",
]

CERTIFY_MARGIN = 1e-6
RANGE_TOL = 1e-12


class RangeError(ValueError):
    """A branch map leaves [-1, 1]."""


@dataclass(frozen=True)
class Branch:
    """One IFS branch: the contraction ``map`` and its weight ``exp(weight)``."""

    map: expr.Node
    weight: expr.Node
    label: str

    def map_fn(self):
        return expr.as_callable(self.map)

    def weight_fn(self):
        return expr.as_callable(self.weight)


@dataclass(frozen=True)
class IFSSystem:
    branches: tuple[Branch, ...]
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if len(self.branches) == 0:
            raise ValueError("a system needs at least one branch")
        labels = [b.label for b in self.branches]
        if len(set(labels)) != len(labels):
            raise ValueError(f"branch labels must be unique, got {labels}")

    def validate_ranges(self, grid_points: int = 1001, tol: float = RANGE_TOL):
        """Check g([-1,1]) within [-1,1] on a uniform grid; raises RangeError."""
        xs = np.linspace(-1.0, 1.0, grid_points)
        for branch in self.branches:
            ys = branch.map_fn()(xs)
            if not np.all(np.isfinite(ys)):
                raise RangeError(f"branch {branch.label!r} is not finite on [-1, 1]")
            worst = float(np.max(np.abs(ys)))
            if worst > 1.0 + tol:
                raise RangeError(
                    f"branch {branch.label!r} leaves [-1, 1]: |g| reaches {worst:.17g}"
                )
        return self


def _parse_branch(map_src: str, weight_src: str, label: str) -> Branch:
    return Branch(map=expr.parse(map_src), weight=expr.parse(weight_src), label=label)


def preset_cantor(alpha: float, weights: Sequence[float] = (0.5, 0.5)) -> IFSSystem:
    """Two-branch affine Cantor system removing a middle gap of width ``alpha``.

    Branches ``g1(x) = r x - (1 - r)`` and ``g2(x) = r x + (1 - r)`` with
    ``r = (1 - alpha)/2``; the potentials are the constants ``log w_i``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if len(weights) != 2 or any(w <= 0 for w in weights):
        raise ValueError(f"need two positive weights, got {tuple(weights)}")
    r = (1.0 - alpha) / 2.0
    gap = 1.0 - r
    branches = (
        _parse_branch(f"{r!r}*x - {gap!r}", f"{math.log(weights[0])!r}", "left"),
        _parse_branch(f"{r!r}*x + {gap!r}", f"{math.log(weights[1])!r}", "right"),
    )
    return IFSSystem(branches, name=f"cantor(alpha={alpha:g})").validate_ranges()


def preset_gauss_restricted(digits: Sequence[int], potential_kind: str = "neg_geometric") -> IFSSystem:
    """Gauss-map inverse branches ``y -> 1/(d + y)`` for ``d`` in ``digits``.

    Conjugated to [-1, 1]; the potential options per branch are

    - ``"geometric"``:      +log|f' o g_d| = +2 log(d + tau(x))
    - ``"neg_geometric"``:  -log|f' o g_d| = log|g_d'| = -2 log(d + tau(x))
    - ``"constant"``:       0 (pressure becomes the topological entropy)
    """
    digits = list(digits)
    if not digits:
        raise ValueError("digit set must be non-empty")
    if len(set(digits)) != len(digits):
        raise ValueError(f"digits must be distinct, got {digits}")
    if any(d < 1 for d in digits):
        raise ValueError(f"digits must be >= 1, got {digits}")
    if potential_kind not in ("geometric", "neg_geometric", "constant"):
        raise ValueError(f"unknown potential kind {potential_kind!r}")

    branches = []
    for d in digits:
        map_src = f"2/({d} + (x + 1)/2) - 1"
        if potential_kind == "geometric":
            weight_src = f"2*log({d} + (x + 1)/2)"
        elif potential_kind == "neg_geometric":
            weight_src = f"-2*log({d} + (x + 1)/2)"
        else:
            weight_src = "0"
        branches.append(_parse_branch(map_src, weight_src, f"digit{d}"))
    name = f"gauss(digits={{{','.join(str(d) for d in digits)}}},{potential_kind})"
    return IFSSystem(tuple(branches), name=name).validate_ranges()


@dataclass(frozen=True)
class ContractionReport:
    """Grid maxima of |d/dtheta acos(g(cos theta))| per branch."""

    branch_maxima: np.ndarray = field(repr=False)
    certified: bool
    labels: tuple[str, ...] = ()

    @property
    def max(self) -> float:
        return float(np.max(self.branch_maxima))


def diagnose_contraction(system: IFSSystem, grid_points: int = 1001) -> ContractionReport:
    """Estimate the theta-metric contraction factor of each branch.

    Evaluates ``|g'(cos t)| sin t / sqrt(1 - g(cos t)^2)`` on a uniform
    midpoint grid over (0, pi) and reports the maxima.  The system is
    flagged certified when every maximum stays below ``1 - 1e-6``; branches
    whose image touches +-1 inside the interval produce an infinite maximum
    and an uncertified flag instead of an error.  Heuristic grid bound, not
    a rigorous certificate.
    """
    if grid_points < 100:
        raise ValueError(f"grid_points must be >= 100, got {grid_points}")
    thetas = (np.arange(grid_points) + 0.5) * (np.pi / grid_points)
    xs = np.cos(thetas)
    sins = np.sin(thetas)
    maxima = np.empty(len(system.branches))
    for i, branch in enumerate(system.branches):
        g = branch.map_fn()(xs)
        dg = expr.as_callable(expr.differentiate(branch.map))(xs)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(dg) * sins / np.sqrt(1.0 - g * g)
        maxima[i] = np.max(ratio) if np.all(np.isfinite(ratio)) else np.inf
    certified = bool(np.all(maxima < 1.0 - CERTIFY_MARGIN))
    return ContractionReport(
        branch_maxima=maxima,
        certified=certified,
        labels=tuple(b.label for b in system.branches),
    )
