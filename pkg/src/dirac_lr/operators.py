"""Grid discretizations of H(t) and I(t) and the residuals built from them.

Both operators have the form

    c_id + c_p * p  (identity block)  +  q * p * sx  +  v(x) * sy

so one pointwise kernel applies either of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .grid import Grid1D, SpinorGridField, apply_px, px_array  # noqa: F401
from .report import ResidualReport
from .scenario import (ScenarioDomainError, ScenarioParams, a_of_t, fd_step, g_of_t,
                       gamma3_of_t)

DENSE_MAX_POINTS = 512


@dataclass(frozen=True)
class DiracOperator:
    """c_id + c_p p + q p sx + (v0 + v1 x) sy with real scalar coefficients."""
    c_id: float = 0.0
    c_p: float = 0.0
    q: float = 0.0
    v0: float = 0.0
    v1: float = 0.0

    def potential(self, grid: Grid1D):
        return self.v0 + self.v1 * grid.x

    def apply(self, fld: SpinorGridField, method="spectral") -> SpinorGridField:
        grid = fld.grid
        if self.c_p == 0.0 and self.q == 0.0:
            pu = pl = np.zeros(grid.n_points, dtype=complex)
        else:
            pu = px_array(fld.upper, grid, method)
            pl = px_array(fld.lower, grid, method)
        up, lo = _kernels.dirac_combine(fld.upper, fld.lower, pu, pl,
                                        self.c_id, self.c_p, self.q, self.potential(grid))
        return SpinorGridField(grid, up, lo)

    def __sub__(self, other: "DiracOperator") -> "DiracOperator":
        return DiracOperator(self.c_id - other.c_id, self.c_p - other.c_p,
                             self.q - other.q, self.v0 - other.v0, self.v1 - other.v1)

    def scaled(self, c):
        return DiracOperator(c * self.c_id, c * self.c_p, c * self.q, c * self.v0, c * self.v1)

    def dense(self, grid: Grid1D) -> np.ndarray:
        """2N x 2N matrix with the spectral momentum operator."""
        n = grid.n_points
        if n > DENSE_MAX_POINTS:
            raise ValueError(f"dense matrices are capped at {DENSE_MAX_POINTS} points")
        pm = np.fft.ifft(grid.wavenumbers[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
        pm = 0.5 * (pm + pm.conj().T)
        eye = np.eye(n)
        v = np.diag(self.potential(grid))
        diag = self.c_id * eye + self.c_p * pm
        return np.block([[diag, self.q * pm - 1j * v],
                         [self.q * pm + 1j * v, diag]])


def hamiltonian_operator(params: ScenarioParams, t: float) -> DiracOperator:
    """a sx p + (k b + g x) sy - omega."""
    g = g_of_t(params, t)
    return DiracOperator(c_id=-params.omega, q=a_of_t(params, t),
                         v0=params.k * float(params.b(t)), v1=g)


def invariant_operator(params: ScenarioParams, t: float, gamma3=None) -> DiracOperator:
    """(alpha1 p + gamma1) + alpha2 p sx + (beta3 x + gamma3) sy."""
    if gamma3 is None:
        gamma3 = gamma3_of_t(params, t)
    return DiracOperator(c_id=params.gamma1, c_p=params.alpha1, q=params.alpha2,
                         v0=gamma3, v1=params.beta3)


def apply_hamiltonian(params, t, fld, method="spectral"):
    return hamiltonian_operator(params, t).apply(fld, method)


def apply_invariant(params, t, fld, method="spectral"):
    return invariant_operator(params, t).apply(fld, method)


OperatorFn = Callable[[float], DiracOperator]


def _centered_stencil(params, t, h):
    if t - h < params.t_min or t + h > params.t_max:
        raise ScenarioDomainError(
            f"t={t} is within one stencil step ({h:.2e}) of the window edge")


def invariant_evolution_residual(params: ScenarioParams, t: float, probe_fields,
                                 invariant: OperatorFn | None = None,
                                 hamiltonian: OperatorFn | None = None,
                                 method="spectral", tol=1e-5) -> ResidualReport:
    """max over probes of ||(dI/dt - i[I, H]) phi|| / ||phi||.

    dI/dt is the operator difference (I(t+h) - I(t-h)) / 2h applied to phi.
    """
    probes = list(probe_fields)
    if len(probes) < 3:
        raise ValueError("need at least 3 probe fields")
    inv = invariant or (lambda s: invariant_operator(params, s))
    ham = hamiltonian or (lambda s: hamiltonian_operator(params, s))
    h = fd_step(params)
    _centered_stencil(params, t, h)
    i_t, h_t = inv(t), ham(t)
    di = (inv(t + h) - inv(t - h)).scaled(1.0 / (2.0 * h))
    worst = 0.0
    per_probe = []
    for phi in probes:
        comm = i_t.apply(h_t.apply(phi, method), method) - h_t.apply(i_t.apply(phi, method), method)
        r = di.apply(phi, method) + comm.scaled(-1j)
        val = r.norm() / phi.norm()
        per_probe.append(val)
        worst = max(worst, val)
    rep = ResidualReport(title="invariant evolution", meta={"t": float(t), "per_probe": per_probe})
    rep.add("dI/dt", worst, tol)
    return rep


def oscillator_probes(params: ScenarioParams, t: float, grid: Grid1D, n_probes=3):
    """Spinors (chi_n, chi_n) for n = 0..n_probes-1 at time t."""
    from .spectrum import eigen_solution
    return [eigen_solution(params, n, 1, "+", pairing="equal-index").field(params, t, grid)
            for n in range(n_probes)]


def eigen_residual(params: ScenarioParams, eig, t: float, grid: Grid1D,
                   method="spectral") -> float:
    chi = eig.field(params, t, grid)
    r = invariant_operator(params, t).apply(chi, method) - chi.scaled(eig.lam)
    return r.norm() / chi.norm()


def discretized_invariant_eigenvalues(params: ScenarioParams, t: float, grid: Grid1D):
    return np.linalg.eigvalsh(invariant_operator(params, t).dense(grid))


def hermiticity_defect(op: DiracOperator, psi: SpinorGridField, phi: SpinorGridField,
                       method="spectral") -> float:
    """|<psi|A phi> - conj(<phi|A psi>)| / (||psi|| ||phi||)."""
    lhs = psi.inner(op.apply(phi, method))
    rhs = np.conj(phi.inner(op.apply(psi, method)))
    return abs(lhs - rhs) / (psi.norm() * phi.norm())
