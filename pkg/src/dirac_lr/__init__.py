"""Lewis-Riesenfeld solutions of the time-dependent 2+1D massless Dirac equation
in a time-dependent magnetic field, with numerical verification oracles."""

__version__ = "0.1.0"

from .scenario import (ScenarioParams, TimeProfile, a_of_t, consistency_residuals,  # noqa: F401
                       g_of_t, gamma3_of_t, integrate_b, load_scenario, parse_scenario,
                       serialize_scenario)
from .grid import Grid1D, SpinorGridField  # noqa: F401
from .spectrum import assemble_spinor, eigen_solution, invariant_eigenvalue  # noqa: F401
