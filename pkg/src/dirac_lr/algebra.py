"""2x2 complex matrix algebra and the invariant-coefficient constraint system."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .report import ResidualReport
from .scenario import (ScenarioParams, a_of_t, fd_step, g_of_t, gamma3_of_t,
                       time_derivative)

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_BASIS = (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z)


def mat2(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class PauliDecomposition:
    c_I: complex
    c_x: complex
    c_y: complex
    c_z: complex

    def as_tuple(self):
        return (self.c_I, self.c_x, self.c_y, self.c_z)

    def reconstruct(self) -> np.ndarray:
        return sum(c * s for c, s in zip(self.as_tuple(), PAULI_BASIS))

    def is_real(self, tol=1e-14):
        return all(abs(complex(c).imag) <= tol for c in self.as_tuple())


def pauli_decompose(m) -> PauliDecomposition:
    """Coefficients c_j = tr(sigma_j m)/2 in the basis {I, sx, sy, sz}."""
    m = mat2(m)
    return PauliDecomposition(*(complex(np.trace(s @ m)) / 2 for s in PAULI_BASIS))


def commutator(a, b) -> np.ndarray:
    a, b = mat2(a), mat2(b)
    return a @ b - b @ a


MatFn = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class CoefficientSet:
    """alpha(t), beta(t), gamma(t) of I = alpha p + beta x + gamma.

    Derivatives are optional; missing ones are taken by central differences.
    """
    alpha: MatFn
    beta: MatFn
    gamma: MatFn
    alpha_dot: Optional[MatFn] = None
    beta_dot: Optional[MatFn] = None
    gamma_dot: Optional[MatFn] = None


def paper_coefficients(params: ScenarioParams) -> CoefficientSet:
    """alpha = a1 I + a2 sx, beta = b3 sy, gamma = g1 I + gamma3(t) sy."""
    p = params
    alpha = p.alpha1 * IDENTITY + p.alpha2 * SIGMA_X
    beta = p.beta3 * SIGMA_Y
    zero = np.zeros((2, 2), dtype=complex)
    return CoefficientSet(
        alpha=lambda t: alpha.copy(),
        beta=lambda t: beta.copy(),
        gamma=lambda t: p.gamma1 * IDENTITY + gamma3_of_t(p, t) * SIGMA_Y,
        alpha_dot=lambda t: zero.copy(),
        beta_dot=lambda t: zero.copy(),
        # d gamma3/dt = alpha1*g holds for the corrected g only
        gamma_dot=(lambda t: p.alpha1 * g_of_t(p, t) * SIGMA_Y)
        if p.g_formula == "corrected" else None,
    )


def zero_coefficients() -> CoefficientSet:
    z = lambda t: np.zeros((2, 2), dtype=complex)  # noqa: E731
    return CoefficientSet(z, z, z, z, z, z)


CONSTRAINT_NAMES = (
    "[alpha,sx]",
    "[beta,sy]",
    "g[alpha,sy]+a[beta,sx]",
    "i*alpha_dot+kb[alpha,sy]+a[gamma,sx]",
    "i*beta_dot+g[gamma,sy]",
    "i*gamma_dot+kb[gamma,sy]+i*a*sx*beta-i*g*alpha*sy",
)


def constraint_matrices(coeffs: CoefficientSet, params: ScenarioParams, t: float):
    """The six matrix expressions that vanish iff dI/dt = 0 for I linear in (p, x)."""
    h = fd_step(params)

    def deriv(fn, dfn):
        if dfn is not None:
            return mat2(dfn(t))
        return time_derivative(fn, t, h, params.t_min, params.t_max)

    al, be, ga = mat2(coeffs.alpha(t)), mat2(coeffs.beta(t)), mat2(coeffs.gamma(t))
    ald = deriv(coeffs.alpha, coeffs.alpha_dot)
    bed = deriv(coeffs.beta, coeffs.beta_dot)
    gad = deriv(coeffs.gamma, coeffs.gamma_dot)
    g = g_of_t(params, t)
    a = a_of_t(params, t)
    kb = params.k * float(params.b(t))
    c = commutator
    return (
        c(al, SIGMA_X),
        c(be, SIGMA_Y),
        g * c(al, SIGMA_Y) + a * c(be, SIGMA_X),
        1j * ald + kb * c(al, SIGMA_Y) + a * c(ga, SIGMA_X),
        1j * bed + g * c(ga, SIGMA_Y),
        1j * gad + kb * c(ga, SIGMA_Y) + 1j * a * SIGMA_X @ be - 1j * g * al @ SIGMA_Y,
    )


def constraint_residuals(coeffs: CoefficientSet, params: ScenarioParams, t: float,
                         tol=1e-6) -> ResidualReport:
    rep = ResidualReport(title="invariant coefficient constraints", meta={"t": float(t)})
    for name, m in zip(CONSTRAINT_NAMES, constraint_matrices(coeffs, params, t)):
        rep.add(name, np.linalg.norm(m, "fro"), tol)
    return rep
