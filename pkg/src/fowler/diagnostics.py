"""Norms, growth bounds, and residual reports for trajectories and fields.

The central a-priori estimate is the L2 growth bound

    ||v(t)|| <= e^{(alpha0 + C_phi) t} ||v0||,

with alpha0 the maximal linear growth rate and C_phi half the C^1_b norm of
the background profile.  The bound holds exactly for true solutions, so the
checker treats a violation (beyond a 1e-8 roundoff allowance) as a solver
bug, not as physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, RealField, forward_transform
from .operator import psi_symbol
from .profiles import WaveProfile

__all__ = [
    "DiagnosticsRecord",
    "EnergyBoundParams",
    "EnergyBoundReport",
    "SpectralThirds",
    "l2_norm",
    "energy_bound_check",
    "c1b_norm",
    "c2b_norm",
    "linear_growth_report",
    "spectral_decay_report",
]

# violations beyond this fraction of the bound are hard failures
BOUND_TOLERANCE = 1e-8


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-time diagnostics attached to a trajectory record."""

    t: float
    l2: float
    energy_bound: float
    mass: float
    mass_drift: float
    picard_iters: int
    picard_ratio: float
    spectral_tail: float

    def __post_init__(self):
        fields = (self.t, self.l2, self.energy_bound, self.mass,
                  self.mass_drift, self.picard_ratio, self.spectral_tail)
        if not all(math.isfinite(v) for v in fields):
            raise ValueError(f"diagnostics record has non-finite entries: {self}")


@dataclass(frozen=True)
class EnergyBoundParams:
    alpha0: float
    c_phi: float
    v0_norm: float

    def bound(self, t: float) -> float:
        return math.exp((self.alpha0 + self.c_phi) * t) * self.v0_norm


@dataclass(frozen=True)
class EnergyBoundReport:
    margins: np.ndarray
    ok: bool
    first_violation: int | None


def l2_norm(f: RealField) -> float:
    """sqrt(dx * sum f^2); Parseval-consistent with the spectral norm."""
    with np.errstate(over="ignore"):  # inf propagates to the blow-up guard
        return float(np.sqrt(f.grid.spacing * np.sum(f.values**2)))


def energy_bound_check(traj, params: EnergyBoundParams) -> EnergyBoundReport:
    """Margin bound(t) - ||v(t)|| per record; fails on the first violation
    beyond BOUND_TOLERANCE * bound."""
    if not traj.records:
        raise ValueError("empty trajectory")
    margins = np.array([params.bound(r.t) - r.l2 for r in traj.records])
    bounds = np.array([params.bound(r.t) for r in traj.records])
    bad = margins < -BOUND_TOLERANCE * bounds
    first = int(np.argmax(bad)) if bad.any() else None
    return EnergyBoundReport(margins=margins, ok=not bad.any(), first_violation=first)


def c1b_norm(p: WaveProfile, grid: Grid) -> float:
    """sup|phi| + sup|phi'|, sups over a 16x oversampled evaluation."""
    s0, s1, _ = p.sup_values(grid)
    return s0 + s1


def c2b_norm(p: WaveProfile, grid: Grid) -> float:
    """sup|phi| + sup|phi'| + sup|phi''|."""
    s0, s1, s2 = p.sup_values(grid)
    return s0 + s1 + s2


def linear_growth_report(xi: float) -> float:
    """Growth rate -Re psi(xi) of the mode at frequency xi under the linear
    flow; positive exactly inside the unstable band."""
    return -psi_symbol(xi).real


@dataclass(frozen=True)
class SpectralThirds:
    low: float
    mid: float
    tail: float


def spectral_decay_report(f: RealField) -> SpectralThirds:
    """L2 energy fractions per third of the wavenumber range.

    Smoothing shows up as a shrinking tail fraction; this is reported, never
    asserted (regularity is not directly observable on a grid).
    """
    F = forward_transform(f)
    n = f.grid.n
    k = np.abs(np.rint(F.grid.frequencies * f.grid.length).astype(int))
    energy = np.abs(F.coeffs) ** 2
    total = float(energy.sum())
    if total == 0.0:
        return SpectralThirds(low=0.0, mid=0.0, tail=0.0)
    low = float(energy[k <= n / 6].sum() / total)
    tail = float(energy[k > n / 3].sum() / total)
    return SpectralThirds(low=low, mid=max(0.0, 1.0 - low - tail), tail=tail)
