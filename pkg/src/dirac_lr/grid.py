"""Uniform 1D grid, two-component fields on it, and the momentum operator."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels

EDGE_TOL = 1e-10


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError("Grid1D needs at least 16 points")
        if not self.x_max > self.x_min:
            raise ValueError("Grid1D needs x_max > x_min")

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def period(self):
        """Length of the periodic cell implied by the spectral derivative."""
        return self.n_points * self.spacing

    @property
    def is_pow2(self):
        n = self.n_points
        return n & (n - 1) == 0

    @cached_property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @cached_property
    def weights(self):
        w = np.full(self.n_points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    @cached_property
    def wavenumbers(self):
        k = 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)
        if self.n_points % 2 == 0:
            # drop the Nyquist mode so that -i d/dx stays Hermitian
            k[self.n_points // 2] = 0.0
        return k

    @classmethod
    def centered(cls, center, half_width, n_points):
        return cls(center - half_width, center + half_width, n_points)

    def integrate(self, values):
        return np.dot(self.weights, values)

    def norm(self, f):
        return float(np.sqrt(self.integrate(np.abs(f) ** 2)))

    def inner(self, f, g):
        return complex(self.integrate(np.conj(f) * g))


@dataclass
class SpinorGridField:
    grid: Grid1D
    upper: np.ndarray
    lower: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.upper = np.asarray(self.upper, dtype=complex)
        self.lower = np.asarray(self.lower, dtype=complex)
        n = self.grid.n_points
        if self.upper.shape != (n,) or self.lower.shape != (n,):
            raise ValueError("spinor components must match the grid length")

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_points, complex), np.zeros(grid.n_points, complex))

    @classmethod
    def from_vector(cls, grid, v):
        n = grid.n_points
        return cls(grid, v[:n], v[n:])

    def as_vector(self):
        return np.concatenate([self.upper, self.lower])

    def copy(self):
        return SpinorGridField(self.grid, self.upper.copy(), self.lower.copy(), dict(self.meta))

    def inner(self, other: "SpinorGridField") -> complex:
        return _kernels.spinor_inner(self.upper, self.lower, other.upper, other.lower,
                                     self.grid.spacing)

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))

    def normalized(self):
        n = self.norm()
        return self.scaled(1.0 / n)

    def scaled(self, c):
        return SpinorGridField(self.grid, c * self.upper, c * self.lower, dict(self.meta))

    def __add__(self, other):
        return SpinorGridField(self.grid, self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other):
        return SpinorGridField(self.grid, self.upper - other.upper, self.lower - other.lower)

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    def edge_max(self):
        return float(max(abs(self.upper[0]), abs(self.upper[-1]),
                         abs(self.lower[0]), abs(self.lower[-1])))


def px_array(f, grid: Grid1D, method="spectral"):
    """-i d/dx of one component."""
    if method == "spectral":
        return np.fft.ifft(grid.wavenumbers * np.fft.fft(f))
    if method == "central-4th":
        return -1j * _kernels.central4(f, grid.spacing)
    raise ValueError(f"unknown derivative method {method!r}")


def apply_px(fld: SpinorGridField, method="spectral") -> SpinorGridField:
    out = SpinorGridField(fld.grid, px_array(fld.upper, fld.grid, method),
                          px_array(fld.lower, fld.grid, method))
    if method == "spectral" and fld.edge_max() > EDGE_TOL:
        out.meta["boundary_warning"] = (
            f"field magnitude {fld.edge_max():.2e} at the grid edge; periodic wrap implied")
    return out
