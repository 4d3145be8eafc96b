"""Pseudo-spectral simulator and verification harness for the Fowler dune equation.

The package evaluates the nonlocal fractional operator by two independent
routes (Fourier multiplier and singular integral), builds the semigroup
kernel of the linear part, advances mild solutions of the travelling-wave
perturbation equation by a Duhamel/Picard integrator, and ships executable
checks for the quantitative properties of all of these.
"""

__version__ = "0.1.0"

from .grid import (
    Grid,
    RealField,
    SpectralField,
    circular_convolve,
    forward_transform,
    inverse_transform,
    make_grid,
    oversample,
    spectral_derivative,
)
from .operator import (
    QuadratureSpec,
    SymbolCoefficients,
    SymbolTable,
    apply_nonlocal_fourier,
    apply_nonlocal_integral,
    default_quadrature,
    psi_symbol,
    sobolev_norm,
    symbol_coefficients,
    unstable_band,
)
from .kernel import (
    KernelNormFit,
    KernelSnapshot,
    convolve_kernel,
    grad_kernel_norms,
    kernel_field,
    semigroup_residual,
)
from .profiles import WaveProfile
from .evolution import (
    BlowUpError,
    ContractionBound,
    InitialCondition,
    PicardError,
    SimConfig,
    Trajectory,
    contraction_time_bound,
    duhamel_step,
    evolve,
    evolve_full,
    nonlinear_flux,
    stepping_norm_fit,
)
from .diagnostics import (
    DiagnosticsRecord,
    EnergyBoundParams,
    c1b_norm,
    c2b_norm,
    energy_bound_check,
    l2_norm,
    linear_growth_report,
    spectral_decay_report,
)
from .config import ConfigError, RunSettings, parse_config
