"""icft: exact non-equilibrium dynamics and transport for 1+1D CFT with a
smooth position-dependent velocity.

The package evaluates closed-form predictions (densities, currents,
correlators, conductivities) for conformal systems whose propagation
velocity, initial inverse temperature, and chemical potential all vary in
space, and cross-checks them through mutually independent computation
routes.
"""

from .numerics import QuadratureSpec, SampledPeriodic, integrate, find_root_monotone, spectral_derivative
from .profiles import Circle, Line, Profile, KinkProfile, make_smooth_kink, perturb
from .circlemaps import (
    CircleMap, LineMap, GaugeFunction, ScenarioConstants,
    build_f, build_g, build_h, schwarzian, velocity_anomaly, temperature_anomaly,
    bott_cocycle,
)
from .lightcone import LightConeFrame
from .observables import (
    Scenario, PrimaryFieldSpec, LuttingerCouplings,
    mean_values, current_current, luttinger_params, fermion_two_point,
    equilibrium_reference,
)
from .transport import (
    TransportSpec, ConductivityResult, inhomogeneity_spectrum, closed_form,
    thermal_electrical, sinh_fourier, kernel_k, green_kubo_regular,
    dynamical_conductivity, dynamical_drude,
)

__all__ = [
    "QuadratureSpec", "SampledPeriodic", "integrate", "find_root_monotone",
    "spectral_derivative",
    "Circle", "Line", "Profile", "KinkProfile", "make_smooth_kink", "perturb",
    "CircleMap", "LineMap", "GaugeFunction", "ScenarioConstants",
    "build_f", "build_g", "build_h", "schwarzian", "velocity_anomaly",
    "temperature_anomaly", "bott_cocycle",
    "LightConeFrame",
    "Scenario", "PrimaryFieldSpec", "LuttingerCouplings",
    "mean_values", "current_current", "luttinger_params", "fermion_two_point",
    "equilibrium_reference",
    "TransportSpec", "ConductivityResult", "inhomogeneity_spectrum",
    "closed_form", "thermal_electrical", "sinh_fourier", "kernel_k",
    "green_kubo_regular", "dynamical_conductivity", "dynamical_drude",
]

__version__ = "0.1.0"
