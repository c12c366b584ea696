"""Lewis-Riesenfeld phase of the invariant eigenstates and the full solution Psi.

The phase rate is <chi| i d/dt - H |chi>.  For a spinor that is not unit
normalized (per-component normalization gives <chi|chi> = 2) the rate that
actually makes exp(i delta) chi a solution is that expression divided by
<chi|chi>; both are carried in :class:`PhaseTrace`.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
import io

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad

from .grid import Grid1D, SpinorGridField
from .operators import apply_px, hamiltonian_operator
from .report import ResidualReport
from .scenario import ScenarioDomainError, ScenarioParams, fd_step, time_derivative

PHASE_MODES = ("closed", "quadrature")


def _dchi_dt(params, eig, t, grid, h, one_sided):
    if not one_sided and (t - h < params.t_min or t + h > params.t_max):
        raise ScenarioDomainError(f"t={t} too close to the window edge for d/dt")

    def vec(s):
        return eig.field(params, s, grid, check=False).as_vector()
    return SpinorGridField.from_vector(
        grid, time_derivative(vec, t, h, params.t_min, params.t_max))


def phase_integrand_complex(params: ScenarioParams, eig, t: float, grid: Grid1D,
                            one_sided=False) -> complex:
    h = fd_step(params)
    chi = eig.field(params, t, grid)
    dchi = _dchi_dt(params, eig, t, grid, h, one_sided)
    rhs = dchi.scaled(1j) - hamiltonian_operator(params, t).apply(chi)
    return chi.inner(rhs)


def phase_integrand(params: ScenarioParams, eig, t: float, grid: Grid1D,
                    one_sided=False) -> float:
    """Re <chi| i d/dt - H(t) |chi> on the grid."""
    return phase_integrand_complex(params, eig, t, grid, one_sided).real


def phase_rate(params, eig, t, grid, one_sided=True) -> float:
    """Norm-consistent rate <chi|i d/dt - H|chi> / <chi|chi>."""
    val = phase_integrand_complex(params, eig, t, grid, one_sided)
    return val.real / eig.norm_squared()


@dataclass
class PhaseTrace:
    t: np.ndarray
    integrand: np.ndarray
    delta: np.ndarray
    delta_closed: np.ndarray
    norm_sq: float
    delta_lr: np.ndarray
    imag_max: float = 0.0

    def max_closed_deviation(self):
        return float(np.max(np.abs(self.delta - self.delta_closed)))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "integrand", "delta", "delta_closed", "delta_lr"])
        for row in zip(self.t, self.integrand, self.delta, self.delta_closed, self.delta_lr):
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()


def lr_phase(params: ScenarioParams, eig, t_samples, grid: Grid1D) -> PhaseTrace:
    """Cumulative trapezoid of the phase integrand from t_samples[0]."""
    t = np.asarray(t_samples, dtype=float)
    if t.size < 8:
        raise ValueError("lr_phase needs at least 8 time samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time samples must be increasing")
    vals = np.array([phase_integrand_complex(params, eig, float(s), grid, one_sided=True)
                     for s in t])
    integrand = vals.real
    delta = cumulative_trapezoid(integrand, t, initial=0.0)
    nsq = eig.norm_squared()
    return PhaseTrace(t=t, integrand=integrand, delta=delta,
                      delta_closed=2.0 * params.omega * (t - t[0]),
                      norm_sq=nsq, delta_lr=delta / nsq,
                      imag_max=float(np.max(np.abs(vals.imag))))


def closed_phase(params: ScenarioParams, t: float) -> float:
    return 2.0 * params.omega * (t - params.t_min)


def quadrature_phase(params: ScenarioParams, eig, t: float, grid: Grid1D,
                     t0: float | None = None, delta0: float = 0.0) -> float:
    """Norm-consistent LR phase integrated from t0 (default t_min)."""
    t0 = params.t_min if t0 is None else t0
    if t == t0:
        return delta0
    val, _ = quad(lambda s: phase_rate(params, eig, s, grid), t0, t,
                  epsabs=1e-12, epsrel=1e-12, limit=200)
    return delta0 + val


_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


def short_phase_increment(params, eig, t0, t1, grid):
    """Gauss-Legendre integral of the phase rate over a short interval."""
    mid, half = 0.5 * (t0 + t1), 0.5 * (t1 - t0)
    return half * sum(w * phase_rate(params, eig, mid + half * x, grid)
                      for x, w in zip(_GL_X, _GL_W))


def phase_value(params, eig, t, grid, phase="closed"):
    if phase == "closed":
        return closed_phase(params, t)
    if phase == "quadrature":
        return quadrature_phase(params, eig, t, grid)
    raise ValueError(f"phase mode must be one of {PHASE_MODES}")


def reduced_solution(params, eig, t, grid, phase="closed", delta=None) -> SpinorGridField:
    """Phi(x, t) = exp(i delta(t)) chi(x, t)."""
    if delta is None:
        delta = phase_value(params, eig, t, grid, phase)
    return eig.field(params, t, grid).scaled(np.exp(1j * delta))


def assemble_full_solution(params: ScenarioParams, eig, t: float, grid: Grid1D, y: float,
                           phase="closed") -> SpinorGridField:
    """Psi(x, y, t) = exp(i(k y - omega t)) exp(i delta(t)) chi(x, t) on the x grid."""
    if not params.t_min <= t <= params.t_max:
        raise ScenarioDomainError(f"t={t} outside the window")
    phi = reduced_solution(params, eig, t, grid, phase)
    out = phi.scaled(np.exp(1j * (params.k * y - params.omega * t)))
    out.meta.update(phi.meta, y=y, phase_mode=phase)
    return out


def orthogonality_diagnostics(params: ScenarioParams, eig, t: float, grid: Grid1D,
                              tol=1e-8) -> ResidualReport:
    """The three matrix-element identities used in the closed-form phase."""
    h = fd_step(params)
    chi = eig.field(params, t, grid)
    dchi = _dchi_dt(params, eig, t, grid, h, one_sided=True)
    cp, cm = chi.upper, chi.lower
    dp, dm = dchi.upper, dchi.lower
    pchi = apply_px(chi)
    x = grid.x
    rep = ResidualReport(title="orthogonality diagnostics",
                         meta={"t": float(t), "pairing": eig.pairing})
    rep.add("Re<chi+|d_t chi+>", abs(grid.inner(cp, dp).real), tol, asserted=False)
    rep.add("Re<chi-|d_t chi->", abs(grid.inner(cm, dm).real), tol, asserted=False)
    rep.add("|<chi+|d_t chi+>|", abs(grid.inner(cp, dp)), tol, asserted=False)
    rep.add("|<chi-|d_t chi->|", abs(grid.inner(cm, dm)), tol, asserted=False)
    rep.add("|<chi+|p chi-> + <chi-|p chi+>|",
            abs(grid.inner(cp, pchi.lower) + grid.inner(cm, pchi.upper)), tol, asserted=False)
    rep.add("|<chi+|x chi-> - <chi-|x chi+>|",
            abs(grid.inner(cp, x * cm) - grid.inner(cm, x * cp)), tol, asserted=False)
    return rep
