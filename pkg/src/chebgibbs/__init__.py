"""Equilibrium (Gibbs) measures of analytic IFS via Chebyshev-Lagrange
discretization of transfer operators: weak integral estimates from spectral
data, Markov-chain point samples, and Fourier transforms of the measures at
low and very high frequencies."""

from .cheb import ChebGrid, NodePolynomial, interpolate, lagrange_basis, make_grid
from .fourier import FourierSweep, cantor_oracle, fourier_direct, fourier_mc, frequency_limit, sweep
from .measure import WeakEstimate, integrate, integrate_conformal
from .sampler import SampleRun, SamplerConfig, branch_probabilities, run_chain, run_chain_conformal
from .spectral import SpectralData, eigenfunction, leading_eigentriple
from .system import (
    Branch,
    IFSSystem,
    diagnose_contraction,
    preset_cantor,
    preset_gauss_restricted,
)
from .transfer import TransferMatrix, apply_operator, assemble
from .ulam import UlamOperator, ulam_assemble, ulam_fourier, ulam_integrate

__version__ = "0.1.0"

__all__ = [
    "ChebGrid",
    "NodePolynomial",
    "make_grid",
    "lagrange_basis",
    "interpolate",
    "Branch",
    "IFSSystem",
    "preset_cantor",
    "preset_gauss_restricted",
    "diagnose_contraction",
    "TransferMatrix",
    "assemble",
    "apply_operator",
    "SpectralData",
    "leading_eigentriple",
    "eigenfunction",
    "WeakEstimate",
    "integrate",
    "integrate_conformal",
    "SamplerConfig",
    "SampleRun",
    "branch_probabilities",
    "run_chain",
    "run_chain_conformal",
    "FourierSweep",
    "fourier_direct",
    "fourier_mc",
    "cantor_oracle",
    "frequency_limit",
    "sweep",
    "UlamOperator",
    "ulam_assemble",
    "ulam_integrate",
    "ulam_fourier",
    "__version__",
]
