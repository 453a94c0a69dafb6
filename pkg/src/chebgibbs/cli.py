"""Command-line frontend: pressure, integrate, fourier, sample, diagnose, ulam.

Every command takes a JSON system-configuration file (see
:mod:`chebgibbs.config`), prints JSON or schema-versioned CSV to stdout
(or ``--out``), and is byte-reproducible for identical invocations.
Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
Floats are printed with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import expr, spectral, transfer
from .cheb import make_grid
from .config import ConfigError, load_config
from .fourier import sweep as fourier_sweep
from .measure import integrate, integrate_conformal
from .sampler import PositivityError, SamplerConfig, run_chain, run_chain_conformal
from .system import RangeError, diagnose_contraction
from .ulam import ulam_assemble, ulam_integrate

SCHEMA_LINE = "# schema=1"
ORBIT_CAP = 10**6


# ---------------------------------------------------------------------------
# Deterministic formatting


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return json.dumps(x)
    x = float(x)
    return f"{x:.17g}" if math.isfinite(x) else json.dumps(x)


def _json_text(obj) -> str:
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(k)}: {_json_text(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    return _fmt(obj)


def _csv_text(header: list[str], rows) -> str:
    lines = [SCHEMA_LINE, ",".join(header)]
    for row in rows:
        lines.append(",".join(str(v) if isinstance(v, int) else f"{float(v):.17g}" for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Shared plumbing


class UsageError(ValueError):
    """Bad flags or flag/config combinations (exit code 2)."""


def _get_spectral(cfg, config_path: str, N: int, no_cache: bool, threads: int):
    """Spectral data for (config, N), memoized in a JSON sidecar directory."""
    key_src = cfg.canonical + f"|N={N}"
    key = hashlib.sha256(key_src.encode()).hexdigest()[:24]
    cache_file = Path(str(config_path) + ".cache") / f"{key}.json"
    if not no_cache and cache_file.exists():
        return spectral.from_json(cache_file.read_text())
    grid = make_grid(N)
    matrix = transfer.assemble(cfg.system, grid, threads=threads)
    data = spectral.leading_eigentriple(matrix)
    if not no_cache:
        cache_file.parent.mkdir(exist_ok=True)
        cache_file.write_text(spectral.to_json(data))
    return data, grid


def _parse_triple(text: str, caster, what: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{what} must look like start:stop:count, got {text!r}")
    try:
        return caster(parts[0]), caster(parts[1]), int(float(parts[2]))
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None


def _sampler_config(args, defaults, N: int) -> SamplerConfig:
    return SamplerConfig(
        T=int(args.T) if args.T is not None else defaults["T"],
        T0=int(args.T0) if args.T0 is not None else defaults["T0"],
        seed=args.seed if args.seed is not None else defaults["seed"],
        replicas=args.replicas if args.replicas is not None else defaults["replicas"],
        N=N,
    )


def _parse_psi(text: str):
    """An expression string, or ``fourier:XI`` for exp(-i xi x)."""
    if text.startswith("fourier:"):
        try:
            xi = float(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"cannot parse frequency in {text!r}") from None
        return lambda x: np.exp(-1j * xi * x), True
    return expr.as_callable(expr.parse(text)), False


# ---------------------------------------------------------------------------
# Commands


def cmd_pressure(args) -> str:
    cfg = load_config(args.config)
    N = args.N if args.N is not None else cfg.defaults["N"]
    data, _ = _get_spectral(cfg, args.config, N, args.no_cache, args.threads)
    report = diagnose_contraction(cfg.system)
    return _json_text(
        {
            "pressure": data.pressure,
            "N": data.N,
            "residuals": list(data.residuals),
            "certified_contracting": report.certified,
        }
    ) + "\n"


def cmd_integrate(args) -> str:
    cfg = load_config(args.config)
    psi = expr.parse(args.psi)
    if args.sweep_N:
        start, stop, step = _parse_triple(args.sweep_N, int, "--sweep-N")
        if step < 1 or start < 1 or stop < start:
            raise UsageError(f"bad --sweep-N range {args.sweep_N!r}")
        ns = list(range(start, stop + 1, step))
        values = []
        for n in ns:
            data, grid = _get_spectral(cfg, args.config, n, args.no_cache, args.threads)
            est = (integrate_conformal if args.conformal else integrate)(data, grid, psi)
            values.append(float(np.real(est.value)))
        final = values[-1]
        rows = [(n, v, abs(v - final)) for n, v in zip(ns, values)]
        return _csv_text(["N", "value", "delta_vs_final"], rows)
    N = args.N if args.N is not None else cfg.defaults["N"]
    data, grid = _get_spectral(cfg, args.config, N, args.no_cache, args.threads)
    est = (integrate_conformal if args.conformal else integrate)(data, grid, psi)
    return _json_text(
        {"value": est.value, "N": est.N, "kind": est.kind, "system": cfg.system.name}
    ) + "\n"


def _fourier_params(args, cfg, method: str):
    if method in ("direct", "mc"):
        N = args.N if args.N is not None else cfg.defaults["N"]
        data, grid = _get_spectral(cfg, args.config, N, args.no_cache, args.threads)
        params = {"system": cfg.system, "data": data, "grid": grid}
        if method == "mc":
            params["config"] = _sampler_config(args, cfg.defaults, N)
        return params
    if method == "oracle":
        r = args.r if args.r is not None else cfg.cantor_ratio()
        if r is None:
            raise UsageError(
                "oracle method needs an equal-weight cantor preset or an explicit --r"
            )
        return {"r": r}
    if method == "ulam":
        return {"op": ulam_assemble(cfg.system, args.M, args.quad_points)}
    raise UsageError(f"unknown fourier method {method!r}")


def cmd_fourier(args) -> str:
    cfg = load_config(args.config)
    xi_start, xi_end, count = _parse_triple(args.xi, float, "--xi")
    if count < 1:
        raise UsageError(f"--xi count must be >= 1, got {count}")
    method = "mc" if args.method == "mc" else args.method
    main = fourier_sweep(method, _fourier_params(args, cfg, method), xi_start, xi_end, count)
    header = ["xi", "re", "im", "abs"]
    columns = [main.xis, main.values.real, main.values.imag, np.abs(main.values)]
    if main.std_errors is not None:
        header.append("std_error")
        columns.append(main.std_errors)
    if args.reference:
        ref = fourier_sweep(
            args.reference, _fourier_params(args, cfg, args.reference), xi_start, xi_end, count
        )
        header += ["ref_abs", "abs_error"]
        columns += [np.abs(ref.values), np.abs(main.values - ref.values)]
    return _csv_text(header, zip(*columns))


def cmd_sample(args) -> str:
    cfg = load_config(args.config)
    psi, is_complex = _parse_psi(args.psi)
    N = args.N if args.N is not None else cfg.defaults["N"]
    data, grid = _get_spectral(cfg, args.config, N, args.no_cache, args.threads)
    sconf = _sampler_config(args, cfg.defaults, N)
    keep = min(args.orbit_rows, ORBIT_CAP) if args.orbit_csv else 0
    if args.conformal:
        run = run_chain_conformal(cfg.system, data, grid, sconf, psi, keep_orbit=keep)
    else:
        run = run_chain(cfg.system, data, grid, sconf, psi, keep_orbit=keep)
    if args.orbit_csv:
        orbit = run.orbit if run.orbit is not None else np.empty(0)
        text = _csv_text(["t", "x_t"], [(t + 1, x) for t, x in enumerate(orbit)])
        Path(args.orbit_csv).write_text(text)
    if is_complex:
        payload = {
            "estimate": {"re": run.estimate.real, "im": run.estimate.imag},
            "std_error": run.std_error,
            "ci_low": None,
            "ci_high": None,
            "replicas": sconf.replicas,
        }
    else:
        ci = run.ci if run.ci is not None else (None, None)
        payload = {
            "estimate": run.estimate,
            "std_error": run.std_error,
            "ci_low": ci[0],
            "ci_high": ci[1],
            "replicas": sconf.replicas,
        }
    return _json_text(payload) + "\n"


def cmd_diagnose(args) -> str:
    cfg = load_config(args.config)
    report = diagnose_contraction(cfg.system, args.grid_points)
    return _json_text(
        {
            "branches": dict(zip(report.labels, report.branch_maxima.tolist())),
            "certified": report.certified,
            "c_est": 1.0 - report.max,
        }
    ) + "\n"


def cmd_ulam(args) -> str:
    cfg = load_config(args.config)
    psi = expr.parse(args.psi)
    op = ulam_assemble(cfg.system, args.M, args.quad_points)
    value = ulam_integrate(op, expr.as_callable(psi))
    return _json_text(
        {"value": value, "M": op.M, "kind": "ulam", "system": cfg.system.name}
    ) + "\n"


# ---------------------------------------------------------------------------
# Parser / entry point


def _int_like(text: str) -> int:
    return int(float(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chebgibbs",
        description="Equilibrium measures of analytic IFS via Chebyshev-Lagrange transfer operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sampler_flags=False):
        p.add_argument("config", help="JSON system configuration file")
        p.add_argument("--N", type=int, default=None, help="grid size (default from config)")
        p.add_argument("--no-cache", action="store_true", help="skip the spectral sidecar cache")
        p.add_argument(
            "--threads",
            type=int,
            default=int(os.environ.get("CHEBGIBBS_THREADS", "1")),
            help="assembly threads (default $CHEBGIBBS_THREADS or 1)",
        )
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        if sampler_flags:
            p.add_argument("--T", type=_int_like, default=None, help="retained chain steps")
            p.add_argument("--T0", type=_int_like, default=None, help="burn-in steps")
            p.add_argument("--replicas", type=int, default=None)
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("pressure", help="leading eigenvalue log and residuals")
    common(p)
    p.set_defaults(func=cmd_pressure)

    p = sub.add_parser("integrate", help="weak integral against the equilibrium measure")
    common(p)
    p.add_argument("--psi", required=True, help="integrand expression in x")
    p.add_argument("--conformal", action="store_true", help="integrate against the conformal measure")
    p.add_argument("--sweep-N", default=None, help="start:stop:step convergence sweep (CSV output)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("fourier", help="Fourier transform sweeps (CSV output)")
    common(p, sampler_flags=True)
    p.add_argument("--method", required=True, choices=["direct", "mc", "oracle", "ulam"])
    p.add_argument("--xi", required=True, help="start:stop:count frequency range")
    p.add_argument("--reference", default=None, choices=["oracle", "direct"],
                   help="add ref_abs/abs_error columns against this method")
    p.add_argument("--r", type=float, default=None, help="cantor ratio for the oracle")
    p.add_argument("--M", type=int, default=200, help="Ulam cells")
    p.add_argument("--quad-points", type=int, default=16)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("sample", help="Markov-chain Birkhoff estimate (JSON output)")
    common(p, sampler_flags=True)
    p.add_argument("--psi", required=True, help="expression in x, or fourier:XI")
    p.add_argument("--conformal", action="store_true", help="reweight to the conformal measure")
    p.add_argument("--orbit-csv", default=None, help="also dump the replica-0 orbit here")
    p.add_argument("--orbit-rows", type=_int_like, default=ORBIT_CAP,
                   help=f"orbit row cap (hard maximum {ORBIT_CAP})")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("diagnose", help="per-branch contraction diagnostic (JSON output)")
    common(p)
    p.add_argument("--grid-points", type=int, default=1001)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("ulam", help="integrate against the Ulam stationary weights")
    common(p)
    p.add_argument("--psi", required=True, help="integrand expression in x")
    p.add_argument("--M", type=int, default=200, help="Ulam cells")
    p.add_argument("--quad-points", type=int, default=16)
    p.set_defaults(func=cmd_ulam)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except (ConfigError, UsageError, expr.ParseError, RangeError,
            FileNotFoundError, IsADirectoryError) as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 2
    except (spectral.ConvergenceError, spectral.InvalidEigenvectorError, PositivityError,
            expr.DomainError, transfer.AssemblyError, ZeroDivisionError,
            ArithmeticError, ValueError) as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 3
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
