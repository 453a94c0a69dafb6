"""Markov-chain point samples of equilibrium measures.

The chain iterates ``x_{t+1} = g_i(x_t)`` with branch ``i`` drawn with
probability ``e^{phi_i(x)} h(g_i(x)) / (L h)(x)`` (the normalized potential),
so the invariant law is the equilibrium measure of the original potential.
Birkhoff means over the retained orbit estimate integrals; independent
replicas give Student-t confidence intervals; reweighting retained points
by ``1/h`` samples the conformal measure instead.

Replicas run in lockstep as a vector of chain states.  Each replica owns a
counter-based Philox stream spawned from the run seed, so sample paths are
bitwise reproducible (within one installation) and independent across
replicas by construction.  Steps are generated in blocks -- through a
compiled kernel when numba is importable, else vectorized numpy -- and the
observables consume whole blocks at a time.  Per-step branch weights
default to degree-(N-1) tabulations of the exact weights on the spectral
grid (indistinguishable from exact evaluation at usable N); pass
``exact_eval=True`` to evaluate the branch expressions directly instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr
from .cheb import ChebGrid, interpolate
from .spectral import SpectralData
from .system import IFSSystem
from .transfer import _branch_images

__all__ = [
    "SamplerConfig",
    "SampleRun",
    "PositivityError",
    "branch_probabilities",
    "run_chain",
    "run_chain_conformal",
    "run_accumulators",
    "BirkhoffAccumulator",
    "ConformalAccumulator",
    "FourierAccumulator",
]

_BLOCK = 2048
CI_LEVEL = 0.95


class PositivityError(RuntimeError):
    """Eigenfunction estimate not positive where the chain needs it; increase N."""


@dataclass(frozen=True)
class SamplerConfig:
    """Chain parameters: ``T`` retained steps after ``T0`` burn-in steps."""

    T: int
    T0: int = 10_000
    seed: int = 0
    replicas: int = 1
    N: int | None = None

    def __post_init__(self):
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.T0 < 0:
            raise ValueError(f"T0 must be >= 0, got {self.T0}")
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")


@dataclass(frozen=True)
class SampleRun:
    """Per-replica Birkhoff values and their combined replica statistics."""

    config: SamplerConfig
    replica_values: np.ndarray = field(repr=False)
    estimate: float | complex
    std_error: float
    ci: tuple[float, float] | None
    level: float = CI_LEVEL
    orbit: np.ndarray | None = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# Branch probabilities (exact evaluation; the tabulated fast path mirrors this)


def branch_probabilities(
    system: IFSSystem,
    data: SpectralData,
    grid: ChebGrid,
    x,
    mode: str = "operator",
) -> np.ndarray:
    """Sampling probabilities ``p_i(x)`` over the branches.

    ``mode="operator"`` divides by the exact operator action ``(L h)(x)``,
    an exact probability simplex.  ``mode="footnote"`` divides by
    ``e^P h(x)`` for every branch except the last, which takes the
    remaining probability (cheaper, statistically equivalent).
    Scalar ``x`` gives shape (branches,), a vector gives (m, branches).
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    q = np.empty((x_arr.size, len(system.branches)))
    for i, (branch, y) in enumerate(_branch_images(system, x_arr)):
        hy = np.atleast_1d(interpolate(grid, data.h, y))
        if np.any(hy <= 0.0):
            raise PositivityError(
                f"h_N(g(x)) <= 0 along branch {branch.label!r}; increase N"
            )
        q[:, i] = np.exp(branch.weight_fn()(x_arr)) * hy
    if mode == "operator":
        p = q / q.sum(axis=1, keepdims=True)
    elif mode == "footnote":
        hx = np.atleast_1d(interpolate(grid, data.h, x_arr))
        if np.any(hx <= 0.0):
            raise PositivityError("h_N(x) <= 0 at a chain point; increase N")
        p = q / (math.exp(data.pressure) * hx)[:, None]
        p[:, -1] = 1.0 - p[:, :-1].sum(axis=1)
    else:
        raise ValueError(f"mode must be 'operator' or 'footnote', got {mode!r}")
    return p[0] if np.ndim(x) == 0 else p


# ---------------------------------------------------------------------------
# Block generation.  A provider advances the replica state vector through a
# block of steps, recording each new state and the eigenfunction value there.


def _chain_block_python(x, u, nodes, bw, cols, n_b, scale, x_out, h_out):
    """Vectorized-per-step fallback with the same semantics as the kernel."""
    n_steps = u.shape[0]
    rows = np.arange(x.size)
    for b in range(n_steps):
        diff = x[:, None] - nodes[None, :]
        wd = bw / np.where(diff == 0.0, 1e-300, diff)
        vals = (wd @ cols) / wd.sum(axis=1)[:, None]
        hit_r, hit_c = np.nonzero(diff == 0.0)
        if hit_r.size:
            vals[hit_r] = cols[hit_c]
        if b > 0:
            h_out[b - 1] = vals[:, 2 * n_b]
        q = vals[:, n_b : 2 * n_b]
        if scale > 0.0:
            cum = np.cumsum(q[:, :-1], axis=1) / (scale * vals[:, 2 * n_b])[:, None]
            idx = np.sum(cum < u[b][:, None], axis=1)
        else:
            cum = np.cumsum(q, axis=1)
            idx = np.sum(cum < (u[b] * cum[:, -1])[:, None], axis=1)
        x[:] = np.clip(vals[rows, idx], -1.0, 1.0)
        x_out[b] = x
    diff = x[:, None] - nodes[None, :]
    wd = bw / np.where(diff == 0.0, 1e-300, diff)
    h_out[n_steps - 1] = (wd @ cols[:, 2 * n_b]) / wd.sum(axis=1)
    hit_r, hit_c = np.nonzero(diff == 0.0)
    if hit_r.size:
        h_out[n_steps - 1][hit_r] = cols[hit_c, 2 * n_b]


_KERNEL = None
_KERNEL_MISSING = False


def _compiled_block():
    """The numba chain kernel, or None if numba is unavailable."""
    global _KERNEL, _KERNEL_MISSING
    if _KERNEL is None and not _KERNEL_MISSING:
        try:
            from ._kernels import chain_block

            _KERNEL = chain_block
        except ImportError:
            _KERNEL_MISSING = True
    return _KERNEL


class _TabulatedStep:
    """Branch images and weights from one barycentric pass through node tables."""

    def __init__(self, system, data, grid, mode):
        n_b = len(system.branches)
        cols = np.empty((grid.N, 2 * n_b + 1))
        for i, (branch, y) in enumerate(_branch_images(system, grid.nodes)):
            hy = np.atleast_1d(interpolate(grid, data.h, y))
            cols[:, i] = y
            cols[:, n_b + i] = np.exp(branch.weight_fn()(grid.nodes)) * hy
        cols[:, 2 * n_b] = data.h
        # reject systems whose tabulated weights are not positive on a fine grid
        probe = np.linspace(-1.0, 1.0, 2001)
        dv = probe[:, None] - grid.nodes[None, :]
        wv = grid.bary_weights / np.where(dv == 0.0, 1e-300, dv)
        q_probe = (wv @ cols[:, n_b : 2 * n_b]) / wv.sum(axis=1)[:, None]
        if np.any(q_probe <= 0.0):
            raise PositivityError("tabulated branch weights dip below zero; increase N")
        self.n_branches = n_b
        self.nodes = grid.nodes
        self.weights = grid.bary_weights
        self.cols = cols
        self.scale = math.exp(data.pressure) if mode == "footnote" else -1.0

    def run_block(self, x, u, x_out, h_out):
        fn = _compiled_block() or _chain_block_python
        fn(x, u, np.asarray(self.nodes), np.asarray(self.weights), self.cols,
           self.n_branches, self.scale, x_out, h_out)


class _ExactStep:
    """Direct expression evaluation of branch maps and weights each step."""

    def __init__(self, system, data, grid, mode):
        self.data = data
        self.grid = grid
        self.maps = [b.map_fn() for b in system.branches]
        self.wfns = [b.weight_fn() for b in system.branches]
        self.scale = math.exp(data.pressure) if mode == "footnote" else -1.0

    def _tables(self, x):
        n_b = len(self.maps)
        g = np.empty((x.size, n_b))
        q = np.empty((x.size, n_b))
        for i in range(n_b):
            y = np.clip(self.maps[i](x), -1.0, 1.0)
            g[:, i] = y
            q[:, i] = np.exp(self.wfns[i](x)) * interpolate(self.grid, self.data.h, y)
        h = np.atleast_1d(interpolate(self.grid, self.data.h, x))
        return g, q, h

    def run_block(self, x, u, x_out, h_out):
        n_steps = u.shape[0]
        rows = np.arange(x.size)
        for b in range(n_steps):
            g, q, h = self._tables(x)
            if b > 0:
                h_out[b - 1] = h
            if self.scale > 0.0:
                cum = np.cumsum(q[:, :-1], axis=1) / (self.scale * h)[:, None]
                idx = np.sum(cum < u[b][:, None], axis=1)
            else:
                cum = np.cumsum(q, axis=1)
                idx = np.sum(cum < (u[b] * cum[:, -1])[:, None], axis=1)
            x[:] = np.clip(g[rows, idx], -1.0, 1.0)
            x_out[b] = x
        h_out[n_steps - 1] = np.atleast_1d(interpolate(self.grid, self.data.h, x))


# ---------------------------------------------------------------------------
# Accumulators consume blocks of retained points (and h there) and produce
# per-replica Birkhoff values.


class BirkhoffAccumulator:
    """Running sum of ``psi(x_t)`` per replica."""

    def __init__(self, psi):
        self.psi = psi
        self.sums = None

    def add_block(self, x_block, h_block):
        v = np.asarray(self.psi(x_block)).sum(axis=0)
        if self.sums is None:
            self.sums = np.array(v, dtype=complex if np.iscomplexobj(v) else float)
        else:
            self.sums += v

    def values(self, T):
        out = self.sums / T
        return out.real if np.iscomplexobj(out) and np.all(out.imag == 0.0) else out


class ConformalAccumulator:
    """Reweighted sums ``psi/h`` and ``1/h``; values are their ratio
    (self-normalized) or the plain mean of ``psi/h`` (unnormalized form)."""

    def __init__(self, psi, normalized=True):
        self.psi = psi
        self.normalized = normalized
        self.num = None
        self.den = None

    def add_block(self, x_block, h_block):
        inv_h = 1.0 / h_block
        num = np.asarray(self.psi(x_block) * inv_h).sum(axis=0)
        den = inv_h.sum(axis=0)
        if self.num is None:
            self.num = np.array(num, dtype=complex if np.iscomplexobj(num) else float)
            self.den = den
        else:
            self.num += num
            self.den += den

    def values(self, T):
        out = self.num / self.den if self.normalized else self.num / T
        return out.real if np.iscomplexobj(out) and np.all(out.imag == 0.0) else out


class FourierAccumulator:
    """Sums of ``exp(-i xi x_t)`` for a whole frequency batch at once."""

    def __init__(self, xis):
        self.xis = np.asarray(xis, dtype=float)
        self.sums = None

    def add_block(self, x_block, h_block):
        ph = _phase_mod_2pi(x_block, self.xis)
        term = (np.cos(ph) - 1j * np.sin(ph)).sum(axis=0)  # (replicas, n_freq)
        if self.sums is None:
            self.sums = term
        else:
            self.sums += term

    def values(self, T):
        return self.sums / T


_SPLITTER = 134217729.0  # 2^27 + 1, Dekker split constant
_TWO_PI_HI = 6.283185307179586
_TWO_PI_TAIL = 2.4492935982947064e-16  # 2*pi - float64(2*pi)


def _two_prod(a, b):
    """Exact product a*b = hi + lo via Dekker splitting (no fma needed)."""
    hi = a * b
    ta = _SPLITTER * a
    a1 = ta - (ta - a)
    a2 = a - a1
    tb = _SPLITTER * b
    b1 = tb - (tb - b)
    b2 = b - b1
    lo = ((a1 * b1 - hi) + a1 * b2 + a2 * b1) + a2 * b2
    return hi, lo


def _phase_mod_2pi(x: np.ndarray, xis: np.ndarray) -> np.ndarray:
    """Phases ``xi * x``, reduced modulo 2 pi in two-word arithmetic above
    |xi| = 1e9 so the product's own rounding cannot corrupt the angle."""
    if np.max(np.abs(xis)) <= 1e9:
        return x[..., None] * xis
    hi, lo = _two_prod(x[..., None], xis)
    k = np.round(hi / _TWO_PI_HI)
    kp_hi, kp_lo = _two_prod(k, _TWO_PI_HI)
    # hi - kp_hi is exact (the operands are within a factor of 2)
    return ((hi - kp_hi) - kp_lo - k * _TWO_PI_TAIL) + lo


# ---------------------------------------------------------------------------
# Core replica loop


def _spawn_generators(seed: int, replicas: int):
    seq = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in seq.spawn(replicas)]


def run_accumulators(
    system: IFSSystem,
    data: SpectralData,
    grid: ChebGrid,
    config: SamplerConfig,
    accumulators,
    exact_eval: bool = False,
    mode: str = "operator",
    keep_orbit: int = 0,
):
    """Drive one chain per replica, feeding retained points to ``accumulators``.

    Returns ``(list of per-replica value arrays, orbit or None)``.  The
    orbit, when requested, holds the first ``keep_orbit`` retained points
    of replica 0 (capped at 10^6).
    """
    if mode not in ("operator", "footnote"):
        raise ValueError(f"mode must be 'operator' or 'footnote', got {mode!r}")
    provider = (_ExactStep if exact_eval else _TabulatedStep)(system, data, grid, mode)
    gens = _spawn_generators(config.seed, config.replicas)
    x = np.array([2.0 * g.random() - 1.0 for g in gens])

    n_keep = min(keep_orbit, config.T, 10**6)
    orbit = np.empty(n_keep) if n_keep else None
    kept = 0

    total = config.T0 + config.T
    done = 0
    with np.errstate(all="ignore"):
        while done < total:
            n_steps = min(_BLOCK, total - done)
            u = np.column_stack([g.random(n_steps) for g in gens])
            x_out = np.empty((n_steps, config.replicas))
            h_out = np.empty((n_steps, config.replicas))
            provider.run_block(x, u, x_out, h_out)
            first_kept = max(config.T0 - done, 0)
            if first_kept < n_steps:
                for acc in accumulators:
                    acc.add_block(x_out[first_kept:], h_out[first_kept:])
                if kept < n_keep:
                    take = min(n_keep - kept, n_steps - first_kept)
                    orbit[kept : kept + take] = x_out[first_kept : first_kept + take, 0]
                    kept += take
            done += n_steps

    values = [acc.values(config.T) for acc in accumulators]
    for vals in values:
        if not np.all(np.isfinite(np.abs(vals))):
            raise ArithmeticError("non-finite replica values (chain left the domain?)")
    return values, orbit


def _replica_stats(values: np.ndarray):
    values = np.asarray(values)
    r = values.size
    estimate = values.mean()
    if np.iscomplexobj(values):
        estimate = complex(estimate)
        if r < 2:
            return estimate, float("nan"), None
        spread = math.sqrt(float(np.sum(np.abs(values - estimate) ** 2)) / (r - 1))
        return estimate, spread / math.sqrt(r), None
    estimate = float(estimate)
    if r < 2:
        return estimate, float("nan"), None
    se = float(np.std(values, ddof=1)) / math.sqrt(r)
    from scipy.stats import t as student_t

    half = float(student_t.ppf(0.5 + CI_LEVEL / 2.0, r - 1)) * se
    return estimate, se, (estimate - half, estimate + half)


def run_chain(
    system: IFSSystem,
    data: SpectralData,
    grid: ChebGrid,
    config: SamplerConfig,
    psi,
    exact_eval: bool = False,
    mode: str = "operator",
    keep_orbit: int = 0,
) -> SampleRun:
    """Birkhoff-mean estimate of the equilibrium integral of ``psi``.

    ``psi`` is a vectorized callable, an expression AST, or expression
    text.  Identical (seed, config, system, N) reproduce the sample paths
    bitwise.  Complex-valued ``psi`` gives a complex estimate with a
    modulus-based standard error and no confidence interval.
    """
    acc = BirkhoffAccumulator(_as_psi(psi))
    (values,), orbit = run_accumulators(
        system, data, grid, config, [acc], exact_eval=exact_eval, mode=mode, keep_orbit=keep_orbit
    )
    estimate, se, ci = _replica_stats(values)
    return SampleRun(config=config, replica_values=values, estimate=estimate,
                     std_error=se, ci=ci, orbit=orbit)


def run_chain_conformal(
    system: IFSSystem,
    data: SpectralData,
    grid: ChebGrid,
    config: SamplerConfig,
    psi,
    normalized: bool = True,
    exact_eval: bool = False,
    mode: str = "operator",
    keep_orbit: int = 0,
) -> SampleRun:
    """Conformal-measure estimate by reweighting chain points with ``1/h``.

    The default self-normalized ratio is invariant under rescaling of the
    eigenfunction; ``normalized=False`` gives the plain weighted mean.
    """
    acc = ConformalAccumulator(_as_psi(psi), normalized=normalized)
    (values,), orbit = run_accumulators(
        system, data, grid, config, [acc], exact_eval=exact_eval, mode=mode,
        keep_orbit=keep_orbit,
    )
    estimate, se, ci = _replica_stats(values)
    return SampleRun(config=config, replica_values=values, estimate=estimate,
                     std_error=se, ci=ci, orbit=orbit)


def _as_psi(psi):
    if isinstance(psi, expr.Node):
        return expr.as_callable(psi)
    if isinstance(psi, str):
        return expr.as_callable(expr.parse(psi))
    return psi
