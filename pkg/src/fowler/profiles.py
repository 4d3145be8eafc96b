"""Travelling-wave profiles: the background states perturbations ride on.

A profile phi moving at speed c enters the dynamics as phi(x - c t),
periodized over the box.  Profiles are inputs here: constants, tanh fronts,
Gaussian bumps, or arbitrary sampled fields; nothing in this package
constructs travelling waves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    Grid,
    RealField,
    forward_transform,
    inverse_transform,
    oversample,
    spectral_derivative,
    SpectralField,
)

__all__ = ["WaveProfile", "PROFILE_KINDS"]

PROFILE_KINDS = ("constant", "tanh-front", "gaussian-bump", "sampled")


@dataclass(frozen=True)
class WaveProfile:
    """Background profile phi and its wave speed.

    amplitude/width/offset parametrize the analytic kinds; `samples` carries
    the field for kind="sampled" (width and offset are ignored there).
    """

    kind: str
    amplitude: float = 1.0
    width: float = 1.0
    offset: float = 0.0
    speed: float = 0.0
    samples: RealField | None = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {PROFILE_KINDS}")
        if self.kind == "sampled" and self.samples is None:
            raise ValueError("sampled profile requires samples")
        if self.kind in ("tanh-front", "gaussian-bump") and not (self.width > 0):
            raise ValueError(f"profile width must be positive, got {self.width}")

    def _analytic(self, y: np.ndarray, derivative: int) -> np.ndarray:
        A, w = self.amplitude, self.width
        if self.kind == "constant":
            return np.full_like(y, A) if derivative == 0 else np.zeros_like(y)
        u = (y - self.offset) / w
        if self.kind == "tanh-front":
            if derivative == 0:
                return A * np.tanh(u)
            sech2 = 1.0 / np.cosh(u) ** 2
            if derivative == 1:
                return (A / w) * sech2
            return (-2.0 * A / w**2) * sech2 * np.tanh(u)
        # gaussian-bump
        bump = A * np.exp(-(u**2))
        if derivative == 0:
            return bump
        if derivative == 1:
            return bump * (-2.0 * u / w)
        return bump * (4.0 * u**2 - 2.0) / w**2

    def evaluate(self, t: float, grid: Grid) -> RealField:
        """Samples of phi(x - c t) on the grid, argument wrapped into the box."""
        if self.kind == "sampled":
            if self.samples.grid != grid:
                raise ValueError("sampled profile lives on a different grid")
            if self.speed * t == 0.0:
                return self.samples
            # translation is a phase in the spectrum (periodic by nature)
            F = forward_transform(self.samples)
            shift = np.exp(-2j * np.pi * grid.frequencies * (self.speed * t))
            shift[grid.nyquist_index] = np.cos(
                2 * np.pi * grid.frequencies[grid.nyquist_index] * self.speed * t
            )
            return inverse_transform(SpectralField(grid, F.coeffs * shift))
        y = grid.points - self.speed * t
        half = 0.5 * grid.length
        y = (y + half) % grid.length - half
        return RealField(grid, self._analytic(y, 0))

    def sup_values(self, grid: Grid, oversampling: int = 16) -> tuple[float, float, float]:
        """(sup|phi|, sup|phi'|, sup|phi''|) over a 16x oversampled box."""
        if self.kind == "sampled":
            F = forward_transform(self.samples)
            sups = []
            for order in (0, 1, 2):
                G = F if order == 0 else spectral_derivative(F, order)
                _, fine = oversample(inverse_transform(G), oversampling)
                sups.append(float(np.abs(fine).max()))
            return tuple(sups)
        m = grid.n * oversampling
        x = -0.5 * grid.length + (grid.length / m) * np.arange(m)
        return tuple(
            float(np.abs(self._analytic(x, order)).max()) for order in (0, 1, 2)
        )
