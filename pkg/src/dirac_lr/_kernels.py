"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba versions are used when numba imports cleanly and the environment
variable ``DIRAC_LR_NUMBA`` is not set to ``0``.  Both paths are always
importable so the benchmark and the tests can compare them directly.
"""
import math
import os

import numpy as np

try:
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return decorator


def numba_enabled():
    return _HAVE_NUMBA and os.environ.get("DIRAC_LR_NUMBA", "1") != "0"


# ---------------------------------------------------------------------------
# normalized Hermite functions
# ---------------------------------------------------------------------------

def hermite_functions_numpy(n_max, mu, xi):
    """Rows 0..n_max of chi_n(xi) for the oscillator with frequency ``mu``.

    Uses the normalized three-term recurrence
    chi_{n+1} = sqrt(2/(n+1)) * y * chi_n - sqrt(n/(n+1)) * chi_{n-1},
    y = sqrt(mu) * xi, which never forms 2^n n!.
    """
    xi = np.asarray(xi, dtype=np.float64)
    out = np.empty((n_max + 1,) + xi.shape)
    y = math.sqrt(mu) * xi
    out[0] = (mu / math.pi) ** 0.25 * np.exp(-0.5 * y * y)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for n in range(1, n_max):
        out[n + 1] = (math.sqrt(2.0 / (n + 1)) * y * out[n]
                      - math.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


@njit(cache=True)
def _hermite_functions_nb(n_max, mu, xi):
    m = xi.shape[0]
    out = np.empty((n_max + 1, m))
    s = math.sqrt(mu)
    c0 = (mu / math.pi) ** 0.25
    y = np.empty(m)
    for j in range(m):
        y[j] = s * xi[j]
        out[0, j] = c0 * math.exp(-0.5 * y[j] * y[j])
    if n_max >= 1:
        r2 = math.sqrt(2.0)
        for j in range(m):
            out[1, j] = r2 * y[j] * out[0, j]
    # row-major sweep with the recurrence coefficients hoisted out of the inner loop
    for n in range(1, n_max):
        a = math.sqrt(2.0 / (n + 1))
        b = math.sqrt(n / (n + 1.0))
        for j in range(m):
            out[n + 1, j] = a * y[j] * out[n, j] - b * out[n - 1, j]
    return out


def hermite_functions(n_max, mu, xi):
    xi = np.asarray(xi, dtype=np.float64)
    if numba_enabled():
        flat = np.ascontiguousarray(xi.ravel())
        return _hermite_functions_nb(int(n_max), float(mu), flat).reshape(
            (n_max + 1,) + xi.shape)
    return hermite_functions_numpy(n_max, mu, xi)


# ---------------------------------------------------------------------------
# 4th-order central first derivative (one-sided 4th-order closures at edges)
# ---------------------------------------------------------------------------

def central4_numpy(f, h):
    f = np.asarray(f)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return d


@njit(cache=True)
def _central4_nb(f, h):
    n = f.shape[0]
    d = np.empty_like(f)
    c = 1.0 / (12.0 * h)
    for i in range(2, n - 2):
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) * c
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) * c
    d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3]
                - 16 * f[n - 4] + 3 * f[n - 5]) * c
    d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3]
                + 6 * f[n - 4] - f[n - 5]) * c
    return d


def central4(f, h):
    f = np.ascontiguousarray(f, dtype=np.complex128)
    if numba_enabled():
        return _central4_nb(f, float(h))
    return central4_numpy(f, h)


# ---------------------------------------------------------------------------
# pointwise Dirac-operator assembly
#
#   out_up = c_id*u + c_p*pu + q*pl + (-1j)*v*l
#   out_lo = c_id*l + c_p*pl + q*pu + (+1j)*v*u
#
# with c_p*p the identity-block momentum term, q*p the sigma_x term
# (q p applied to the other component) and v the sigma_y multiplier.
# ---------------------------------------------------------------------------

def dirac_combine_numpy(u, l, pu, pl, c_id, c_p, q, v):
    up = c_id * u + c_p * pu + q * pl - 1j * v * l
    lo = c_id * l + c_p * pl + q * pu + 1j * v * u
    return up, lo


@njit(cache=True)
def _dirac_combine_nb(u, l, pu, pl, c_id, c_p, q, v):
    n = u.shape[0]
    up = np.empty(n, dtype=np.complex128)
    lo = np.empty(n, dtype=np.complex128)
    for i in range(n):
        up[i] = c_id * u[i] + c_p * pu[i] + q * pl[i] - 1j * v[i] * l[i]
        lo[i] = c_id * l[i] + c_p * pl[i] + q * pu[i] + 1j * v[i] * u[i]
    return up, lo


def dirac_combine(u, l, pu, pl, c_id, c_p, q, v):
    if numba_enabled():
        return _dirac_combine_nb(u, l, pu, pl, complex(c_id), complex(c_p),
                                 complex(q), np.ascontiguousarray(v, dtype=np.float64))
    return dirac_combine_numpy(u, l, pu, pl, c_id, c_p, q, v)


# ---------------------------------------------------------------------------
# trapezoid-weighted inner product of two spinors
# ---------------------------------------------------------------------------

def spinor_inner_numpy(u1, l1, u2, l2, h):
    s = np.conj(u1) * u2 + np.conj(l1) * l2
    return h * (s.sum() - 0.5 * (s[0] + s[-1]))


@njit(cache=True)
def _spinor_inner_nb(u1, l1, u2, l2, h):
    n = u1.shape[0]
    acc = 0j
    for i in range(1, n - 1):
        acc += np.conj(u1[i]) * u2[i] + np.conj(l1[i]) * l2[i]
    acc += 0.5 * (np.conj(u1[0]) * u2[0] + np.conj(l1[0]) * l2[0])
    acc += 0.5 * (np.conj(u1[n - 1]) * u2[n - 1] + np.conj(l1[n - 1]) * l2[n - 1])
    return acc * h


def spinor_inner(u1, l1, u2, l2, h):
    if numba_enabled():
        return complex(_spinor_inner_nb(u1, l1, u2, l2, float(h)))
    return complex(spinor_inner_numpy(u1, l1, u2, l2, h))
