"""Oscillator eigenfunctions, the quantized invariant spectrum and spinor eigenstates.

Writing W = xi = (gamma3 + beta3*x)/alpha2, the alpha1 = 0 part of the
invariant is alpha2 * [[0, L-], [L+, 0]] with L+- = p +- i*W.  In the xi
variable L+ = i*sqrt(2/mu) * adag, so L+ maps chi_n to a multiple of
chi_{n+1}; the zero mode of L- is chi_0 and lives in the lower component.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .grid import Grid1D, SpinorGridField, px_array
from .scenario import ScenarioParams, gamma3_of_t

HERMITE_MAX_N = 64
DIRECT_FORMULA_MAX_N = 20
PAIRINGS = ("ladder", "equal-index")
NORMALIZATIONS = ("per-component", "total")


class GridResolutionError(ValueError):
    pass


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > HERMITE_MAX_N:
        raise ValueError(f"hermite(n={n}) overflows quickly; use ho_eigenfunction, "
                         "which carries the normalized recurrence")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for m in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * m * h_prev
    return h if h.ndim else float(h)


def ho_eigenfunction(n: int, mu: float, xi):
    """Normalized eigenfunction of -1/2 d^2/dxi^2 + mu^2 xi^2 / 2."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    xi = np.asarray(xi, dtype=float)
    if n <= DIRECT_FORMULA_MAX_N:
        y = math.sqrt(mu) * xi
        norm = (mu / math.pi) ** 0.25 / math.sqrt(2.0 ** n * math.factorial(n))
        out = norm * np.exp(-0.5 * y * y) * hermite(n, y)
    else:
        out = _kernels.hermite_functions(n, mu, np.atleast_1d(xi))[n].reshape(xi.shape)
    return out if np.ndim(out) else float(out)


def ho_eigenfunctions(n_max: int, mu: float, xi):
    """All chi_0..chi_{n_max} at once (rows)."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    return _kernels.hermite_functions(n_max, mu, np.asarray(xi, dtype=float))


def lambda_tilde(n: int, mu: float) -> float:
    return mu * (n + 0.5)


def invariant_eigenvalue(params: ScenarioParams, n: int, s: int, branch: str) -> float:
    """lambda_{n,s}^{+-} = alpha1 + gamma1 + beta3 * s * sqrt(mu*(2n+1+-1))."""
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    shift = {"+": 1, "-": -1}[branch]
    return params.alpha1 + params.gamma1 + params.beta3 * s * math.sqrt(
        params.mu * (2 * n + 1 + shift))


@dataclass(frozen=True)
class OscillatorState:
    n: int
    mu: float

    def __call__(self, xi):
        return ho_eigenfunction(self.n, self.mu, xi)

    @property
    def eigenvalue(self):
        return lambda_tilde(self.n, self.mu)

    def xi_half_width(self, sigma=8.0):
        return math.sqrt((2 * self.n + 1) / self.mu) + sigma / math.sqrt(self.mu)


@dataclass(frozen=True)
class XiMap:
    params: ScenarioParams

    def xi(self, x, t):
        p = self.params
        return (gamma3_of_t(p, t) + p.beta3 * np.asarray(x, dtype=float)) / p.alpha2

    def x(self, xi, t):
        p = self.params
        return (p.alpha2 * np.asarray(xi, dtype=float) - gamma3_of_t(p, t)) / p.beta3

    @property
    def dxi_dx(self):
        return self.params.beta3 / self.params.alpha2


def superpotential(params: ScenarioParams, x, t):
    return XiMap(params).xi(x, t)


@dataclass(frozen=True)
class EigenSolution:
    """Quantum numbers plus the recipe for the spinor eigenfunction.

    ``upper``/``lower`` are (oscillator index, complex amplitude) or None.
    Amplitudes are relative; normalization is applied on assembly.
    """
    n: int
    s: int
    branch: str
    lam: float
    upper: tuple | None
    lower: tuple | None
    pairing: str = "ladder"
    normalization: str = "per-component"

    @property
    def n_components(self):
        return (self.upper is not None) + (self.lower is not None)

    @property
    def max_index(self):
        return max(c[0] for c in (self.upper, self.lower) if c is not None)

    def field(self, params, t, grid, check=True):
        return _materialize(params, self, t, grid, check=check)

    def norm_squared(self):
        if self.normalization == "total":
            return 1.0
        return float(self.n_components)


def eigen_solution(params: ScenarioParams, n: int, s: int, branch: str = "+",
                   pairing: str = "ladder",
                   normalization: str = "per-component") -> EigenSolution:
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    if n < 0:
        raise ValueError("n must be non-negative")
    lam = invariant_eigenvalue(params, n, s, branch)
    if pairing == "equal-index":
        upper, lower = (n, 1.0), (n, float(s))
    elif branch == "+":
        upper, lower = (n, 1.0), (n + 1, 1j * s)
    elif n == 0:
        upper, lower = None, (0, 1.0)
    else:
        upper, lower = (n - 1, 1.0), (n, 1j * s)
    return EigenSolution(n, s, branch, lam, upper, lower, pairing, normalization)


def grid_half_width_xi(n_max, mu, sigma=8.0):
    return math.sqrt((2 * n_max + 3) / mu) + sigma / math.sqrt(mu)


def grid_for(params: ScenarioParams, n_max: int, n_points: int = 1024,
             sigma: float = 8.0, times=None) -> Grid1D:
    """Grid covering chi_0..chi_{n_max+1} around x(xi=0, t) for all ``times``.

    ``times`` defaults to the window end points (the centre moves
    monotonically with gamma3).
    """
    if times is None:
        times = (params.t_min, params.t_max)
    xm = XiMap(params)
    centers = [float(xm.x(0.0, t)) for t in times]
    half = grid_half_width_xi(n_max, params.mu, sigma) * params.mu
    return Grid1D(min(centers) - half, max(centers) + half, n_points)


def _materialize(params, eig, t, grid, check=True):
    xm = XiMap(params)
    xi = xm.xi(grid.x, t)
    rows = ho_eigenfunctions(eig.max_index, params.mu, xi)
    # unit L2 norm in x for each oscillator function
    scale = 1.0 / math.sqrt(params.mu)
    if eig.normalization == "total":
        scale /= math.sqrt(eig.n_components)
    comps = []
    for c in (eig.upper, eig.lower):
        if c is None:
            comps.append(np.zeros(grid.n_points, dtype=complex))
            continue
        idx, amp = c
        comps.append(scale * amp * rows[idx].astype(complex))
    fld = SpinorGridField(grid, comps[0], comps[1],
                          meta={"n": eig.n, "s": eig.s, "branch": eig.branch,
                                "pairing": eig.pairing, "normalization": eig.normalization})
    if check:
        # d x / d xi = mu, so each scaled component has unit x-norm (or 1/sqrt(2) for total)
        target = 1.0 if eig.normalization != "total" else 1.0 / math.sqrt(eig.n_components)
        for name, comp, c in (("upper", comps[0], eig.upper), ("lower", comps[1], eig.lower)):
            if c is None:
                continue
            got = grid.norm(comp)
            if got < 0.999 * target * abs(c[1]):
                raise GridResolutionError(
                    f"{name} component norm {got:.6f} on grid is below 0.999 of "
                    f"{target * abs(c[1]):.6f}; widen the grid")
    return fld


def assemble_spinor(params: ScenarioParams, n: int, s: int, t: float, grid: Grid1D,
                    branch: str = "+", pairing: str = "ladder",
                    normalization: str = "per-component") -> SpinorGridField:
    """Spinor eigenfunction of I(t) built from oscillator functions in xi."""
    return eigen_solution(params, n, s, branch, pairing, normalization).field(params, t, grid)


def ladder_plus(params, t, f, grid, method="spectral"):
    """L+ f = p f + i W f."""
    return px_array(f, grid, method) + 1j * superpotential(params, grid.x, t) * f


def ladder_minus(params, t, f, grid, method="spectral"):
    """L- f = p f - i W f."""
    return px_array(f, grid, method) - 1j * superpotential(params, grid.x, t) * f
