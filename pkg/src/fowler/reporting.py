"""Bit-stable CSV tables and the flat key/value run manifest.

Floats are written with 17 significant digits (round-trip safe for IEEE
doubles) and no locale dependence, so identical configs and seeds produce
byte-identical files.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunSettings
from .diagnostics import c1b_norm, l2_norm
from .evolution import contraction_time_bound, stepping_norm_fit
from .operator import symbol_coefficients, unstable_band

__all__ = ["CsvTable", "RunManifest", "format_float", "derived_constants"]


def format_float(x) -> str:
    return format(float(x), ".17g")


@dataclass
class CsvTable:
    """Numeric table with a fixed column layout."""

    header: list[str]
    rows: list[list[float]] = field(default_factory=list)

    def add_row(self, *values) -> None:
        if len(values) != len(self.header):
            raise ValueError(
                f"row has {len(values)} entries, header has {len(self.header)}"
            )
        self.rows.append([float(v) for v in values])

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        lines = [",".join(self.header)]
        lines += [",".join(format_float(v) for v in row) for row in self.rows]
        path.write_text("\n".join(lines) + "\n")
        return path


@dataclass
class RunManifest:
    """Flat key/value record of one run: config echo, derived constants,
    versions and seeds, and a pass/fail line per executed check."""

    entries: list[tuple[str, str]] = field(default_factory=list)

    def add(self, key: str, value) -> None:
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = format_float(value)
        else:
            text = str(value)
        self.entries.append((key, text))

    def add_check(self, name: str, passed: bool) -> None:
        self.add(f"check.{name}", "pass" if passed else "FAIL")

    def all_passed(self) -> bool:
        return all(v == "pass" for k, v in self.entries if k.startswith("check."))

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(
            "".join(f"{k} = {v}\n" for k, v in self.entries)
        )
        return path


def echo_config(manifest: RunManifest, settings: RunSettings) -> None:
    sim = settings.sim
    manifest.add("grid.n", sim.grid.n)
    manifest.add("grid.length", float(sim.grid.length))
    manifest.add("profile.kind", sim.profile.kind)
    manifest.add("profile.amplitude", float(sim.profile.amplitude))
    manifest.add("profile.width", float(sim.profile.width))
    manifest.add("profile.offset", float(sim.profile.offset))
    manifest.add("profile.speed", float(sim.profile.speed))
    if sim.profile.kind == "sampled":
        manifest.add("profile.samples", "sampled-field")
    manifest.add("initial.kind", sim.v0.kind)
    manifest.add("initial.amplitude", float(sim.v0.amplitude))
    manifest.add("initial.width", float(sim.v0.width))
    manifest.add("initial.offset", float(sim.v0.offset))
    manifest.add("initial.mode_k", sim.v0.mode_k)
    manifest.add("initial.seed", sim.v0.seed)
    if sim.v0.path:
        manifest.add("initial.file", sim.v0.path)
    manifest.add("time.dt", float(sim.dt))
    manifest.add("time.t_end", float(sim.t_end))
    manifest.add("time.picard_tol", float(sim.picard_tol))
    manifest.add("time.picard_max", sim.picard_max)
    manifest.add("time.dealias", sim.dealias)
    manifest.add("time.linear_only", sim.linear_only)
    manifest.add("quadrature.z_max", float(settings.quadrature.z_max))
    manifest.add("quadrature.z_min", float(settings.quadrature.z_min))
    manifest.add("quadrature.panels", settings.quadrature.panels)
    manifest.add("output.stride", sim.output_stride)
    manifest.add("output.snapshots", settings.snapshots)
    manifest.add("output.kernel_times", " ".join(map(format_float, settings.kernel_times)))
    manifest.add("output.seed", settings.seed)


def derived_constants(manifest: RunManifest, settings: RunSettings) -> dict:
    """Compute and record every constant derivable from the config alone."""
    coeffs = symbol_coefficients()
    xi_c, xi_star, alpha0 = unstable_band()
    fit = stepping_norm_fit()
    sim = settings.sim
    c_phi = 0.5 * c1b_norm(sim.profile, sim.grid)
    v0_norm = l2_norm(sim.v0.build(sim.grid))
    u_norm = c1b_norm(sim.profile, sim.grid)
    if v0_norm > 0.0 or u_norm > 0.0:
        t_star = contraction_time_bound(2.0 * v0_norm, fit, u_norm).t_star
    else:
        t_star = np.inf
    values = {
        "a_I": coeffs.a_I,
        "b_I": coeffs.b_I,
        "gamma_two_thirds": coeffs.gamma_two_thirds,
        "alpha0": alpha0,
        "xi_c": xi_c,
        "xi_star": xi_star,
        "K0": fit.K0,
        "K1": fit.K1,
        "C_phi": c_phi,
        "t_star": t_star,
    }
    for key, value in values.items():
        manifest.add(f"derived.{key}", float(value))
    manifest.add("version.package", __version__)
    manifest.add("version.numpy", np.__version__)
    manifest.add("version.python", ".".join(map(str, sys.version_info[:3])))
    manifest.add("seed", settings.seed)
    return values
