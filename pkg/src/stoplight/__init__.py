"""Doppler-averaged probe response of a Lambda atom with a lower-level coupling field.

The probe sees a closed-loop three-level system: an optical control field
on 1<->2, a weak probe on 1<->3 and a microwave/RF field on 2<->3.  The
package solves the density-matrix equations to first order in the probe,
averages the susceptibility over a Maxwell-Boltzmann velocity distribution
and evaluates the group velocity including the spatial dispersion that
atomic motion introduces.
"""

from .config import ConfigError, RunConfig
from .core import (
    GAMMA_DEFAULT,
    ParameterError,
    SolverError,
    StoplightError,
    SystemParams,
    derive_detunings,
    dipole_from_gamma,
    doppler_width,
    equivalent_b_field,
)
from .dispersion import (
    GroupVelocityReport,
    dchi_domega1,
    group_velocity,
    group_velocity_no_spatial,
    numerator_scan,
)
from .liouville import build_generator, sideband_minus_check, sideband_plus, steady_state_zeroth
from .scan import StopLightResult, find_stop_omega, sweep, sweep_omega
from .susceptibility import DopplerEnsemble, QuadratureSpec, chi_atom, chi_doppler, spectrum

__all__ = [
    "ConfigError", "RunConfig",
    "GAMMA_DEFAULT", "ParameterError", "SolverError", "StoplightError", "SystemParams",
    "derive_detunings", "dipole_from_gamma", "doppler_width", "equivalent_b_field",
    "GroupVelocityReport", "dchi_domega1", "group_velocity", "group_velocity_no_spatial",
    "numerator_scan",
    "build_generator", "sideband_minus_check", "sideband_plus", "steady_state_zeroth",
    "StopLightResult", "find_stop_omega", "sweep", "sweep_omega",
    "DopplerEnsemble", "QuadratureSpec", "chi_atom", "chi_doppler", "spectrum",
]
