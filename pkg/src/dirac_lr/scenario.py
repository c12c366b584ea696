"""Physical configuration: constants, the b(t) profile and derived fields.

The invariant's time dependence sits in gamma3(t), which together with the
magnetic-field amplitude g(t) and the velocity factor a(t) must satisfy

    d gamma3/dt = alpha1 * g,    gamma3 = k*beta3*b/g,    a = mu*g.

Eliminating g gives gamma3**2 = gamma3_0**2 + 2*k*alpha1*beta3*B(t) with
B(t) the integral of b from t_min.  ``gamma3_0`` is the value at t_min; it
defaults to 0 but must be nonzero when alpha1 == 0 (gamma3 is then constant).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
import io
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .report import ResidualReport

PROFILE_KINDS = ("constant", "linear", "power-law", "sampled")
G_FORMULAS = ("corrected", "printed")


class ScenarioDomainError(ValueError):
    """A scenario quantity was requested outside its domain of definition."""


class ScenarioFormatError(ValueError):
    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field '{key}'")
        prefix = (", ".join(where) + ": ") if where else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class TimeProfile:
    """b(t).  ``constant``: b0; ``linear``: b0 + b1*t;
    ``power-law``: b0 + b1*t**exponent; ``sampled``: cubic spline through
    ``samples`` (rows of (t, value))."""
    kind: str = "constant"
    b0: float = 1.0
    b1: float = 0.0
    exponent: float = 1.0
    samples: tuple | None = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ScenarioDomainError(f"unknown profile kind {self.kind!r}")
        if self.kind == "sampled":
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 2 or s.shape[1] != 2 or s.shape[0] < 4:
                raise ScenarioDomainError("sampled profile needs >= 4 (t, value) rows")
            if np.any(np.diff(s[:, 0]) <= 0):
                raise ScenarioDomainError("sampled profile times must be strictly increasing")
            object.__setattr__(self, "samples", tuple(map(tuple, s)))
            object.__setattr__(self, "_spline", CubicSpline(s[:, 0], s[:, 1]))

    def __call__(self, t):
        if self.kind == "constant":
            return self.b0 + 0.0 * np.asarray(t, dtype=float)
        if self.kind == "linear":
            return self.b0 + self.b1 * np.asarray(t, dtype=float)
        if self.kind == "power-law":
            return self.b0 + self.b1 * np.power(np.asarray(t, dtype=float), self.exponent)
        return self._spline(t)

    def antiderivative(self, t0, t1):
        if self.kind == "constant":
            return self.b0 * (t1 - t0)
        if self.kind == "linear":
            return self.b0 * (t1 - t0) + 0.5 * self.b1 * (t1 * t1 - t0 * t0)
        if self.kind == "power-law":
            p = self.exponent
            if p == -1.0:
                tail = math.log(t1 / t0)
            else:
                tail = (t1 ** (p + 1) - t0 ** (p + 1)) / (p + 1)
            return self.b0 * (t1 - t0) + self.b1 * tail
        # exact integral of the piecewise cubic; adaptive quadrature across the
        # knots was only good to ~1e-9, which finite differences of B amplify
        return float(self._spline.integrate(t0, t1))


@dataclass(frozen=True)
class ScenarioParams:
    k: float
    omega: float
    alpha1: float
    alpha2: float
    beta3: float
    gamma1: float
    t_min: float
    t_max: float
    b: TimeProfile = field(default_factory=TimeProfile)
    gamma3_0: float = 0.0
    g_formula: str = "corrected"

    @property
    def mu(self):
        return self.alpha2 / self.beta3

    @property
    def window(self):
        return self.t_max - self.t_min

    def replace(self, **changes):
        return replace(self, **changes)

    def validate(self):
        """Raise :class:`ScenarioDomainError` naming the first violated invariant."""
        if not self.t_max > self.t_min >= 0.0:
            raise ScenarioDomainError("window must satisfy 0 <= t_min < t_max")
        if self.alpha2 == 0.0 or self.beta3 == 0.0:
            raise ScenarioDomainError("alpha2 and beta3 must be nonzero (mu = alpha2/beta3)")
        if self.mu <= 0.0:
            raise ScenarioDomainError("mu = alpha2/beta3 must be positive")
        if self.g_formula not in G_FORMULAS:
            raise ScenarioDomainError(f"g_formula must be one of {G_FORMULAS}")
        if self.b.kind == "sampled":
            ts = np.asarray(self.b.samples)[:, 0]
            if ts[0] > self.t_min or ts[-1] < self.t_max:
                raise ScenarioDomainError("sampled profile must cover the window")
        tt = np.linspace(self.t_min, self.t_max, 257)
        if np.any(self.b(tt) <= 0.0):
            raise ScenarioDomainError("b(t) > 0 required on the window")
        rad = _radicand(self, self.t_max)
        if rad < 0.0:
            raise ScenarioDomainError(
                "gamma3 radicand gamma3_0**2 + 2*k*alpha1*beta3*B(t) < 0 on the window")
        if self.alpha1 == 0.0 and self.gamma3_0 == 0.0 and self.k != 0.0:
            raise ScenarioDomainError(
                "alpha1 == 0 makes gamma3 constant; gamma3_0 must be nonzero")
        if self.g_formula == "printed" and self.alpha1 == 0.0:
            raise ScenarioDomainError("printed g formula divides by alpha1")
        return self


def _check_window(p, t):
    if not (p.t_min <= t <= p.t_max):
        raise ScenarioDomainError(f"t={t} outside window [{p.t_min}, {p.t_max}]")


def _radicand(p, t):
    return p.gamma3_0 ** 2 + 2.0 * p.k * p.alpha1 * p.beta3 * p.b.antiderivative(p.t_min, t)


def integrate_b(params: ScenarioParams, t: float) -> float:
    _check_window(params, t)
    return float(params.b.antiderivative(params.t_min, t))


def gamma3_of_t(params: ScenarioParams, t: float) -> float:
    _check_window(params, t)
    rad = _radicand(params, t)
    if rad < 0.0:
        raise ScenarioDomainError(
            f"k*alpha1*beta3*B(t) invariant violated: radicand {rad:.3e} < 0 at t={t}")
    return math.copysign(math.sqrt(rad), params.gamma3_0 if params.gamma3_0 else 1.0)


def g_of_t(params: ScenarioParams, t: float) -> float:
    """Field amplitude g(t).

    The corrected form is k*beta3*b/gamma3, which for gamma3_0 = 0 equals
    sqrt(k*beta3/(2*alpha1)) * b * B**-0.5.  ``g_formula='printed'`` uses
    the prefactor k*beta3/(2*alpha1) without the square root.
    """
    if params.g_formula == "printed":
        return g_printed(params, t)
    gam = gamma3_of_t(params, t)
    if gam == 0.0:
        raise ScenarioDomainError(
            f"g(t) is singular where gamma3 = 0 (B(t)=0 at t={t}); "
            "start the window later or set gamma3_0")
    return params.k * params.beta3 * float(params.b(t)) / gam


def g_printed(params: ScenarioParams, t: float) -> float:
    bigb = integrate_b(params, t)
    if bigb <= 0.0:
        raise ScenarioDomainError(f"g(t) is singular where B(t)=0 (t={t})")
    if params.alpha1 == 0.0:
        raise ScenarioDomainError("printed g formula divides by alpha1")
    pref = params.k * params.beta3 / (2.0 * params.alpha1)
    return pref * float(params.b(t)) / math.sqrt(bigb)


def a_of_t(params: ScenarioParams, t: float) -> float:
    return params.mu * g_of_t(params, t)


def time_derivative(f, t, h, lo, hi):
    """Second-order derivative of a scalar/array function of t.

    Central difference when t +- h stays in [lo, hi], one-sided otherwise.
    """
    if t - h >= lo and t + h <= hi:
        return (f(t + h) - f(t - h)) / (2.0 * h)
    if t + 2 * h <= hi:
        return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2 * h)) / (2.0 * h)
    if t - 2 * h >= lo:
        return (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2 * h)) / (2.0 * h)
    raise ScenarioDomainError(f"window too short for a time stencil at t={t}")


def fd_step(params: ScenarioParams, rel=1e-5):
    return rel * params.window


def _gamma_residuals(params, t, g_fn, h):
    gam = gamma3_of_t(params, t)
    g = g_fn(params, t)
    a = params.mu * g
    bt = float(params.b(t))
    dgam = time_derivative(lambda s: gamma3_of_t(params, s), t, h,
                           params.t_min, params.t_max)
    scale = max(1.0, abs(gam))
    return (abs(dgam - params.alpha1 * g) / scale,
            abs(gam - params.k * params.alpha2 * bt / a) / scale,
            abs(gam - params.k * params.beta3 * bt / g) / scale,
            abs(a - params.mu * g) / scale)


RESIDUAL_NAMES = ("dgamma3_minus_alpha1_g", "gamma3_minus_k_alpha2_b_over_a",
                  "gamma3_minus_k_beta3_b_over_g", "a_minus_mu_g")


def consistency_residuals(params: ScenarioParams, t_samples, tol=1e-6) -> ResidualReport:
    """Max-over-samples residuals of the gamma3 / g / a constraint set."""
    t_samples = np.atleast_1d(np.asarray(t_samples, dtype=float))
    if t_samples.size < 3:
        raise ValueError("consistency_residuals needs at least 3 time samples")
    for t in t_samples:
        _check_window(params, t)
    gamma3_of_t(params, float(t_samples.max()))
    h = fd_step(params)

    chosen = g_printed if params.g_formula == "printed" else g_of_t
    worst = np.zeros(4)
    for t in t_samples:
        worst = np.maximum(worst, _gamma_residuals(params, float(t), chosen, h))
    rep = ResidualReport(title="scenario consistency",
                         meta={"g_formula": params.g_formula, "n_samples": int(t_samples.size)})
    for name, val in zip(RESIDUAL_NAMES, worst):
        rep.add(name, val, tol)

    # the other g variant, reported only
    other = "corrected" if params.g_formula == "printed" else "printed"
    try:
        alt = params.replace(g_formula=other)
        fn = g_printed if other == "printed" else g_of_t
        alt_worst = np.zeros(4)
        for t in t_samples:
            alt_worst = np.maximum(alt_worst, _gamma_residuals(alt, float(t), fn, h))
        for name, val in zip(RESIDUAL_NAMES, alt_worst):
            rep.add(f"{other}:{name}", val, tol, asserted=False)
    except ScenarioDomainError as exc:
        rep.meta[f"{other}_unavailable"] = str(exc)
    return rep


# ---------------------------------------------------------------------------
# scenario file format
# ---------------------------------------------------------------------------

_CONSTANT_KEYS = {"k", "omega", "alpha1", "alpha2", "beta3", "gamma1", "gamma3_0", "g_formula"}
_REQUIRED_CONSTANTS = {"k", "omega", "alpha1", "alpha2", "beta3", "gamma1"}
_PROFILE_KEYS = {"kind", "b0", "b1", "exponent", "samples_t", "samples_b"}
_WINDOW_KEYS = {"t_min", "t_max"}
_SECTIONS = {"constants": _CONSTANT_KEYS, "profile": _PROFILE_KEYS, "window": _WINDOW_KEYS}


def _key_lines(text):
    """Map (section, key) -> 1-based line number."""
    lines = {}
    section = None
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            lines[(section, None)] = i
            continue
        for sep in ("=", ":"):
            if sep in s:
                lines[(section, s.split(sep, 1)[0].strip().lower())] = i
                break
    return lines


def parse_scenario(text: str) -> ScenarioParams:
    """Parse the ``[constants]/[profile]/[window]`` key-value format."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioFormatError(str(exc).splitlines()[0],
                                  line=getattr(exc, "lineno", None)) from None
    lines = _key_lines(text)

    for sec in cp.sections():
        if sec not in _SECTIONS:
            raise ScenarioFormatError(f"unknown section [{sec}]", line=lines.get((sec, None)))
        for key in cp[sec]:
            if key not in _SECTIONS[sec]:
                raise ScenarioFormatError(f"unknown key in [{sec}]", line=lines.get((sec, key)), key=key)
    for sec in _SECTIONS:
        if sec not in cp:
            raise ScenarioFormatError(f"missing section [{sec}]")

    def num(sec, key, default=None):
        if key not in cp[sec]:
            if default is None:
                raise ScenarioFormatError(f"missing required key in [{sec}]", key=key)
            return default
        try:
            return float(cp[sec][key])
        except ValueError:
            raise ScenarioFormatError(f"not a number: {cp[sec][key]!r}",
                                      line=lines.get((sec, key)), key=key) from None

    def num_list(sec, key):
        try:
            return [float(v) for v in cp[sec][key].replace("\n", ",").split(",") if v.strip()]
        except (KeyError, ValueError):
            raise ScenarioFormatError("expected a comma-separated list of numbers",
                                      line=lines.get((sec, key)), key=key) from None

    for key in _REQUIRED_CONSTANTS:
        if key not in cp["constants"]:
            raise ScenarioFormatError("missing required key in [constants]", key=key)
    g_formula = cp["constants"].get("g_formula", "corrected").strip()
    if g_formula not in G_FORMULAS:
        raise ScenarioFormatError(f"must be one of {G_FORMULAS}",
                                  line=lines.get(("constants", "g_formula")), key="g_formula")

    kind = cp["profile"].get("kind", "constant").strip()
    if kind not in PROFILE_KINDS:
        raise ScenarioFormatError(f"must be one of {PROFILE_KINDS}",
                                  line=lines.get(("profile", "kind")), key="kind")
    try:
        if kind == "sampled":
            ts, bs = num_list("profile", "samples_t"), num_list("profile", "samples_b")
            if len(ts) != len(bs):
                raise ScenarioFormatError("samples_t and samples_b differ in length",
                                          line=lines.get(("profile", "samples_b")), key="samples_b")
            prof = TimeProfile("sampled", samples=tuple(zip(ts, bs)))
        else:
            prof = TimeProfile(kind, b0=num("profile", "b0"), b1=num("profile", "b1", 0.0),
                               exponent=num("profile", "exponent", 1.0))
        params = ScenarioParams(
            k=num("constants", "k"), omega=num("constants", "omega"),
            alpha1=num("constants", "alpha1"), alpha2=num("constants", "alpha2"),
            beta3=num("constants", "beta3"), gamma1=num("constants", "gamma1"),
            gamma3_0=num("constants", "gamma3_0", 0.0), g_formula=g_formula,
            t_min=num("window", "t_min"), t_max=num("window", "t_max"), b=prof)
        params.validate()
    except ScenarioDomainError as exc:
        raise ScenarioFormatError(str(exc)) from None
    return params


def load_scenario(path) -> ScenarioParams:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def serialize_scenario(params: ScenarioParams) -> str:
    r = repr
    out = io.StringIO()
    out.write("[constants]\n")
    for key in ("k", "omega", "alpha1", "alpha2", "beta3", "gamma1", "gamma3_0"):
        out.write(f"{key} = {r(float(getattr(params, key)))}\n")
    out.write(f"g_formula = {params.g_formula}\n\n[profile]\nkind = {params.b.kind}\n")
    if params.b.kind == "sampled":
        s = np.asarray(params.b.samples)
        out.write("samples_t = " + ", ".join(r(float(v)) for v in s[:, 0]) + "\n")
        out.write("samples_b = " + ", ".join(r(float(v)) for v in s[:, 1]) + "\n")
    else:
        out.write(f"b0 = {r(float(params.b.b0))}\nb1 = {r(float(params.b.b1))}\n"
                  f"exponent = {r(float(params.b.exponent))}\n")
    out.write(f"\n[window]\nt_min = {r(float(params.t_min))}\nt_max = {r(float(params.t_max))}\n")
    return out.getvalue()
