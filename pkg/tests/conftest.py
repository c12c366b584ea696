import importlib.resources
import math

import numpy as np
import pytest

from dirac_lr.scenario import ScenarioParams, TimeProfile, gamma3_of_t, load_scenario

_CRITERIA = {}
_REPORTED = []


def record_criterion(number, title, passed, detail=""):
    _CRITERIA[number] = (title, passed, detail)


def record_reported(line):
    """A measured value with no pass threshold, printed after the criteria."""
    _REPORTED.append(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_CRITERIA):
            title, passed, detail = _CRITERIA[num]
            terminalreporter.write_line(
                f"criterion {num:>2} {'PASS' if passed else 'FAIL'}  {title}  {detail}")
    if _REPORTED:
        terminalreporter.section("reported only (no threshold)")
        for line in _REPORTED:
            terminalreporter.write_line(line)


def bundled(name):
    ref = importlib.resources.files("dirac_lr") / "scenarios" / name
    with importlib.resources.as_file(ref) as path:
        return path


@pytest.fixture
def alpha1_zero():
    return load_scenario(bundled("alpha1_zero.scn"))


@pytest.fixture
def gamma3_dynamics():
    return load_scenario(bundled("gamma3_dynamics.scn"))


@pytest.fixture
def landau_static():
    return load_scenario(bundled("landau_static.scn"))


def random_scenario(rng, allow_alpha1_zero=True):
    """A random ScenarioParams that passes validation."""
    while True:
        kind = rng.choice(["constant", "linear", "power-law", "sampled"])
        t_min = float(rng.uniform(0.0, 0.5))
        t_max = t_min + float(rng.uniform(0.5, 3.0))
        if kind == "constant":
            prof = TimeProfile("constant", b0=float(rng.uniform(0.3, 3.0)))
        elif kind == "linear":
            prof = TimeProfile("linear", b0=float(rng.uniform(0.5, 2.0)),
                               b1=float(rng.uniform(-0.1, 1.0)))
        elif kind == "power-law":
            t_min = max(t_min, 0.05)
            t_max = max(t_max, t_min + 0.5)
            prof = TimeProfile("power-law", b0=float(rng.uniform(0.5, 2.0)),
                               b1=float(rng.uniform(0.0, 1.0)),
                               exponent=float(rng.uniform(-0.5, 2.5)))
        else:
            ts = np.linspace(t_min - 0.1, t_max + 0.1, 41)
            c = rng.uniform(0.8, 2.0, 3)
            vals = c[0] + 0.3 * c[1] * np.sin(c[2] * ts)
            prof = TimeProfile("sampled", samples=tuple(zip(ts, vals)))
        beta3 = float(rng.choice([-1, 1]) * rng.uniform(0.5, 2.0))
        alpha2 = math.copysign(float(rng.uniform(0.5, 2.0)), beta3)
        k = float(rng.choice([-1, 1]) * rng.uniform(0.3, 2.0))
        alpha1 = 0.0 if (allow_alpha1_zero and rng.uniform() < 0.25) else float(rng.uniform(-1.5, 1.5))
        gamma3_0 = float(rng.choice([-1, 1]) * rng.uniform(0.5, 2.5))
        if alpha1 != 0.0 and rng.uniform() < 0.4 and k * alpha1 * beta3 > 0:
            gamma3_0 = 0.0
        p = ScenarioParams(k=k, omega=float(rng.uniform(-1, 1)), alpha1=alpha1, alpha2=alpha2,
                           beta3=beta3, gamma1=float(rng.uniform(-1, 1)), t_min=t_min,
                           t_max=t_max, b=prof, gamma3_0=gamma3_0)
        try:
            p.validate()
            # keep gamma3 away from zero inside the window: g ~ 1/gamma3 diverges
            # there and the one-sided edge stencils lose their 1e-6 accuracy
            if gamma3_0 != 0.0 and abs(gamma3_of_t(p, t_max)) < 0.5:
                continue
            return p
        except ValueError:
            continue


def interior_times(params, rng, n):
    w = params.window
    lo = params.t_min + (0.02 * w if params.gamma3_0 == 0.0 else 0.0)
    return np.sort(rng.uniform(lo, params.t_max, n))
