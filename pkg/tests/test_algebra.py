import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirac_lr.algebra import (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, CoefficientSet,
                              PauliDecomposition, commutator, constraint_residuals,
                              paper_coefficients, pauli_decompose, zero_coefficients)
from dirac_lr.scenario import ScenarioParams, TimeProfile
from conftest import interior_times, random_scenario

finite = st.floats(-10, 10, allow_nan=False)


def unit_scenario(**kw):
    base = dict(k=1.0, omega=0.5, alpha1=1.0, alpha2=1.0, beta3=1.0, gamma1=0.25,
                t_min=0.0, t_max=2.0, b=TimeProfile("constant", b0=2.0))
    base.update(kw)
    return ScenarioParams(**base).validate()


class TestPauli:
    def test_identity(self):
        assert pauli_decompose(IDENTITY).as_tuple() == (1, 0, 0, 0)

    def test_sigma_y(self):
        assert pauli_decompose(SIGMA_Y).as_tuple() == (0, 0, 1, 0)

    def test_hand_solved(self):
        d = pauli_decompose([[3, 1 - 1j], [1 + 1j, -1]])
        assert np.allclose(d.as_tuple(), (1, 1, 1, 2), atol=1e-15)
        assert d.is_real()

    @settings(max_examples=100)
    @given(st.lists(finite, min_size=8, max_size=8))
    def test_roundtrip(self, v):
        coeffs = tuple(complex(a, b) for a, b in zip(v[::2], v[1::2]))
        back = pauli_decompose(PauliDecomposition(*coeffs).reconstruct()).as_tuple()
        assert np.allclose(back, coeffs, rtol=0, atol=1e-14 * max(1.0, max(map(abs, coeffs))))

    @settings(max_examples=100)
    @given(st.lists(finite, min_size=8, max_size=8))
    def test_reconstruct_source(self, v):
        m = np.array(v[:4]).reshape(2, 2) + 1j * np.array(v[4:]).reshape(2, 2)
        assert np.max(np.abs(pauli_decompose(m).reconstruct() - m)) <= 1e-14 * max(1, np.abs(m).max())


class TestCommutator:
    def test_xy(self):
        assert np.allclose(commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)

    def test_self(self):
        m = np.array([[1, 2 + 1j], [3, -4j]])
        assert not np.any(commutator(m, m))

    def test_identity_drops(self):
        assert np.allclose(commutator(SIGMA_X + IDENTITY, SIGMA_Y), 2j * SIGMA_Z)

    @settings(max_examples=100)
    @given(st.lists(finite, min_size=16, max_size=16))
    def test_antisymmetric(self, v):
        a = np.array(v[:4]).reshape(2, 2) + 1j * np.array(v[4:8]).reshape(2, 2)
        b = np.array(v[8:12]).reshape(2, 2) + 1j * np.array(v[12:]).reshape(2, 2)
        assert np.linalg.norm(commutator(a, b) + commutator(b, a)) == 0.0


class TestInvariantCoefficients:
    def test_alpha_has_no_y_z(self):
        p = unit_scenario()
        for t in (0.3, 1.0, 1.9):
            d = pauli_decompose(paper_coefficients(p).alpha(t))
            assert d.c_y == 0 and d.c_z == 0

    def test_beta_is_pure_sigma_y(self):
        d = pauli_decompose(paper_coefficients(unit_scenario()).beta(1.0))
        assert d.c_I == d.c_x == d.c_z == 0

    def test_gamma_at_one(self):
        p = unit_scenario()
        assert np.allclose(paper_coefficients(p).gamma(1.0), 0.25 * IDENTITY + 2.0 * SIGMA_Y,
                           atol=1e-15)

    def test_hermitian(self):
        c = paper_coefficients(unit_scenario())
        for m in (c.alpha(1.0), c.beta(1.0), c.gamma(1.0)):
            assert np.allclose(m, m.conj().T)

    def test_residuals_small(self):
        p = unit_scenario()
        for t in (0.2, 1.0, 2.0):
            rep = constraint_residuals(paper_coefficients(p), p, t)
            assert rep.passed, rep.to_dict()

    def test_finite_difference_fallback(self):
        p = unit_scenario()
        c = paper_coefficients(p)
        fd = CoefficientSet(c.alpha, c.beta, c.gamma)
        assert constraint_residuals(fd, p, 1.0).max() < 1e-6


def test_broken_alpha_flags_first_constraint():
    p = unit_scenario()
    c = paper_coefficients(p)
    broken = CoefficientSet(lambda t: SIGMA_Y.copy(), c.beta, c.gamma)
    rep = constraint_residuals(broken, p, 1.0)
    assert rep["[alpha,sx]"] == pytest.approx(2 * math.sqrt(2), rel=1e-15)


def test_zero_coefficients_trivially_satisfy():
    p = unit_scenario()
    assert constraint_residuals(zero_coefficients(), p, 1.0).max() == 0.0


def test_printed_g_breaks_constraints():
    p = unit_scenario(g_formula="printed")
    assert not constraint_residuals(paper_coefficients(p), p, 1.0).passed


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_random_scenarios_close(seed):
    rng = np.random.default_rng(seed)
    p = random_scenario(rng)
    c = paper_coefficients(p)
    for t in interior_times(p, rng, 20):
        rep = constraint_residuals(c, p, float(t))
        assert rep.max() < 1e-6, rep.to_dict()
