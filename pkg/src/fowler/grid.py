"""Periodic grid, Fourier transform conventions, and spectral calculus.

The whole line is approximated by a periodic box of length L centered at 0,
sampled at x_j = -L/2 + j*dx.  Transforms carry the physical dx and 1/L
factors so that discrete coefficients approximate the continuous transform

    F f (xi) = int e^{-2 i pi x xi} f(x) dx

directly, with frequencies xi_k = k/L in cycles per unit length (k an
integer in [-n/2, n/2), FFT storage order).  Every symbol formula downstream
is written in these continuous-frequency units and evaluated verbatim on
the grid frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "RealField",
    "SpectralField",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "spectral_derivative",
    "circular_convolve",
    "evaluate_spectral",
    "oversample",
]

# Relative tolerance on the Hermitian-symmetry check; violations beyond this
# signal a symbol or symmetry bug upstream, not roundoff.
HERMITIAN_RTOL = 1e-8


@dataclass(frozen=True)
class Grid:
    """Uniform periodic 1-D grid with n points on a box of length L."""

    n: int
    length: float

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def points(self) -> np.ndarray:
        """Sample points x_j = -L/2 + j*dx, j = 0..n-1."""
        x = -0.5 * self.length + self.spacing * np.arange(self.n)
        x.setflags(write=False)
        return x

    @property
    def frequencies(self) -> np.ndarray:
        """Grid frequencies xi_k = k/L (cycles per unit), FFT order."""
        xi = np.fft.fftfreq(self.n, d=self.spacing)
        xi.setflags(write=False)
        return xi

    @property
    def nyquist_index(self) -> int:
        """Index of the unpaired k = -n/2 mode in FFT storage order."""
        return self.n // 2


def make_grid(n: int, length: float) -> Grid:
    """Build a Grid, validating the point count and box length.

    n must be even (the FFT layout pairs +k with -k and keeps a single
    Nyquist slot) and at least 8; length must be positive.
    """
    if n != int(n) or n % 2 != 0:
        raise ValueError(f"n must be even, got {n}")
    if n < 8:
        raise ValueError(f"n must be at least 8, got {n}")
    if not (length > 0):
        raise ValueError(f"length must be positive, got {length}")
    return Grid(n=int(n), length=float(length))


def _as_locked_array(values, n: int, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.shape != (n,):
        raise ValueError(f"expected {n} samples, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("field values must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RealField:
    """A real function sampled on a Grid.  Immutable after construction."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "values", _as_locked_array(self.values, self.grid.n, np.float64)
        )


@dataclass(frozen=True)
class SpectralField:
    """Discrete Fourier coefficients of a field, FFT storage order.

    coeffs[m] approximates the continuous transform at xi_k = k/L where
    k = m for m < n/2 and k = m - n otherwise.
    """

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", _as_locked_array(self.coeffs, self.grid.n, np.complex128)
        )

    def coefficient(self, k: int) -> complex:
        """Coefficient of integer wavenumber k in [-n/2, n/2)."""
        n = self.grid.n
        if not (-n // 2 <= k < n // 2):
            raise IndexError(f"wavenumber {k} outside [-{n // 2}, {n // 2})")
        return complex(self.coeffs[k % n])


def _centering_phase(n: int) -> np.ndarray:
    # e^{-2 i pi x_0 xi_k} = (-1)^k accounts for the grid starting at -L/2.
    phase = np.ones(n)
    phase[1::2] = -1.0
    return phase


def forward_transform(f: RealField) -> SpectralField:
    """Discrete approximation of the continuous transform of f.

    coeffs(k) = dx * sum_j e^{-2 i pi x_j xi_k} f(x_j); in particular
    coeffs(0) is the discrete mass dx * sum f.
    """
    grid = f.grid
    phase = _centering_phase(grid.n)
    coeffs = grid.spacing * phase * np.fft.fft(f.values)
    return SpectralField(grid=grid, coeffs=coeffs)


def hermitian_defect(coeffs: np.ndarray) -> float:
    """Max deviation from coeffs(-k) == conj(coeffs(k)), relative to the peak."""
    n = len(coeffs)
    mirrored = coeffs[(-np.arange(n)) % n]
    scale = np.abs(coeffs).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(coeffs - np.conj(mirrored)).max() / scale)


def inverse_transform(F: SpectralField) -> RealField:
    """Invert forward_transform, requiring a real-valued result.

    Rejects coefficient arrays without Hermitian symmetry: asking for a real
    field from a non-symmetric spectrum signals a symbol or symmetry bug.
    """
    defect = hermitian_defect(F.coeffs)
    if defect > HERMITIAN_RTOL:
        raise ValueError(
            f"coefficients are not Hermitian-symmetric (relative defect {defect:.3e}); "
            "cannot produce a real field"
        )
    grid = F.grid
    phase = _centering_phase(grid.n)
    values = np.fft.ifft(F.coeffs * phase).real / grid.spacing
    return RealField(grid=grid, values=values)


def spectral_derivative(F: SpectralField, order: int) -> SpectralField:
    """Multiply by (2 i pi xi_k)^order; order 1 or 2.

    The unpaired Nyquist mode is zeroed for odd orders so that derivatives
    of real fields stay real.
    """
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    grid = F.grid
    multiplier = (2j * np.pi * grid.frequencies) ** order
    if order % 2 == 1:
        multiplier = multiplier.copy()
        multiplier[grid.nyquist_index] = 0.0
    return SpectralField(grid=grid, coeffs=F.coeffs * multiplier)


def circular_convolve(f: RealField, g: RealField) -> RealField:
    """Periodic physical-space convolution (f * g)(x_i) = dx * sum_j f(x_i - x_j) g(x_j).

    The roll realigns sample index with physical offset: sample arrays start
    at x = -L/2, while convolution offsets start at 0.
    """
    if f.grid != g.grid:
        raise ValueError("fields must share a grid")
    n = f.grid.n
    a = np.roll(f.values, -(n // 2))
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(g.values)).real
    return RealField(grid=f.grid, values=f.grid.spacing * conv)


def evaluate_spectral(F: SpectralField, x) -> np.ndarray:
    """Evaluate the trigonometric interpolant of F at arbitrary points x.

    The unpaired Nyquist mode contributes through its cosine only, matching
    the real interpolant the oversampling routine produces.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    grid = F.grid
    xi = grid.frequencies
    ny = grid.nyquist_index
    weights = np.exp(2j * np.pi * np.outer(x, xi))
    weights[:, ny] = np.cos(2 * np.pi * x * xi[ny])
    return (weights @ F.coeffs).real / grid.length


def oversample(f: RealField, factor: int) -> tuple[np.ndarray, np.ndarray]:
    """Trigonometric interpolation of f onto a factor-times finer grid.

    Returns (x_fine, values_fine).  The Nyquist coefficient is split evenly
    over +n/2 and -n/2 in the padded spectrum, the standard choice for real
    fields.
    """
    if factor < 1 or factor != int(factor):
        raise ValueError(f"oversampling factor must be a positive integer, got {factor}")
    grid = f.grid
    n, m = grid.n, grid.n * int(factor)
    if factor == 1:
        return grid.points.copy(), f.values.copy()
    C = forward_transform(f).coeffs * _centering_phase(n)
    padded = np.zeros(m, dtype=np.complex128)
    padded[: n // 2] = C[: n // 2]
    padded[m - n // 2 + 1 :] = C[n // 2 + 1 :]
    padded[n // 2] = 0.5 * C[n // 2]
    padded[m - n // 2] = 0.5 * C[n // 2]
    values = np.fft.ifft(padded).real * (m / grid.length)
    x_fine = -0.5 * grid.length + (grid.length / m) * np.arange(m)
    return x_fine, values
