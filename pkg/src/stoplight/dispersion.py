"""Frequency derivatives of the averaged susceptibility and the group velocity.

Atomic motion makes the susceptibility depend on the wavenumber through
``chi(omega - k v)``, so per velocity class ``d chi/d k = -v d chi/d omega``.
The spatial-dispersion term of the group velocity therefore reduces to the
velocity-weighted average ``<v d chi/d omega>``, which does not factor into
``<v><d chi/d omega>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ParameterError, SolverError, SystemParams
from .susceptibility import DEFAULT_QUADRATURE, DopplerEnsemble, QuadratureSpec, check_passive

DERIVATIVE_RTOL = 1e-4
WEAK_CHI_LIMIT = 0.1
DEFAULT_STEP_OVER_GAMMA = 1e-7


class DerivativeNotConvergedError(SolverError):
    pass


class StrongSusceptibilityError(SolverError):
    pass


def default_step(params: SystemParams) -> float:
    return DEFAULT_STEP_OVER_GAMMA * params.gamma


def refractive_index(chi) -> float:
    """Linearized index ``1 + 2 pi Re chi`` (valid for ``|chi| << 1``)."""
    return 1.0 + 2.0 * math.pi * complex(chi).real


def absorption_coefficient(chi, omega1, c) -> float:
    """Intensity absorption coefficient ``4 pi (omega/c) Im chi`` [1/cm]."""
    return 4.0 * math.pi * omega1 / c * complex(chi).imag


def group_velocity_spatial(omega, k, dchi_domega, dchi_dk, c) -> float:
    """Group velocity of a weakly, spatially dispersive medium.

    ``Re[c (1 - 2 pi k dchi/dk) / (1 + 2 pi omega dchi/domega)]``.
    """
    return (c * (1.0 - 2.0 * math.pi * k * dchi_dk) / (1.0 + 2.0 * math.pi * omega * dchi_domega)).real


def _stencil(ens: DopplerEnsemble, Delta4, h):
    """Per-node central difference of chi with respect to the probe frequency.

    A probe-frequency change moves the loop detuning by the same amount
    while the control detunings stay fixed.
    """
    up = ens.chi_nodes(Delta4 + h, check=False)
    down = ens.chi_nodes(Delta4 - h, check=False)
    return (up - down) / (2.0 * h)


def _converged(coarse, fine):
    return abs(coarse - fine) <= DERIVATIVE_RTOL * abs(fine)


def ensemble_derivatives(ens: DopplerEnsemble, Delta4, h):
    """``(<chi>, <dchi/domega>, <v dchi/domega>)`` at loop detuning ``Delta4``.

    Derivatives are taken per velocity class and then averaged.  The step
    ``h`` and ``h/2`` estimates must agree to 1e-4 relative; the returned
    values are their Richardson combination.
    """
    if not h > 0:
        raise ParameterError(f"finite-difference step must be positive, got {h!r}")
    chi = ens.chi(Delta4)
    d_h = _stencil(ens, Delta4, h)
    d_h2 = _stencil(ens, Delta4, 0.5 * h)
    dchi_h, dchi_h2 = ens.average(d_h), ens.average(d_h2)
    vchi_h = ens.average(d_h, weight_by_velocity=True)
    vchi_h2 = ens.average(d_h2, weight_by_velocity=True)
    for label, coarse, fine in (("<dchi/domega>", dchi_h, dchi_h2), ("<v dchi/domega>", vchi_h, vchi_h2)):
        if not _converged(coarse, fine):
            raise DerivativeNotConvergedError(
                f"derivative not converged: {label} changes by "
                f"{abs(coarse - fine) / abs(fine):.2e} relative when h={h!r} is halved"
            )
    dchi = (4.0 * dchi_h2 - dchi_h) / 3.0
    vchi = (4.0 * vchi_h2 - vchi_h) / 3.0
    return chi, dchi, vchi


def dchi_domega1(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUADRATURE, h=None):
    """``(<dchi/domega1>, <v dchi/domega1>)`` at the probe detuning of ``params``.

    Units are s/rad and cm/rad.
    """
    if h is None:
        h = default_step(params)
    _, dchi, vchi = ensemble_derivatives(DopplerEnsemble.thermal(params, quad), params.Delta4, h)
    return dchi, vchi


@dataclass(frozen=True)
class GroupVelocityReport:
    """Group velocity [cm/s] and the pieces it is assembled from.

    ``vg == (c * numerator / denominator).real`` holds exactly.
    """

    vg: float
    numerator: complex
    denominator: complex
    chi_at_center: complex
    absorption_coeff: float
    dchi: complex
    vchi: complex
    vg_no_spatial: float


def report_from_derivatives(params: SystemParams, chi, dchi, vchi) -> GroupVelocityReport:
    if not abs(2.0 * math.pi * chi) < WEAK_CHI_LIMIT:
        raise StrongSusceptibilityError(
            f"strong-susceptibility regime: |2 pi <chi>| = {abs(2 * math.pi * chi):.3g} "
            f">= {WEAK_CHI_LIMIT}"
        )
    c, omega1, k1 = params.c, params.omega1, params.k1
    numerator = 1.0 + 2.0 * math.pi * k1 * vchi
    denominator = 1.0 + 2.0 * math.pi * omega1 * dchi
    return GroupVelocityReport(
        vg=(c * numerator / denominator).real,
        numerator=numerator,
        denominator=denominator,
        chi_at_center=chi,
        absorption_coeff=absorption_coefficient(chi, omega1, c),
        dchi=dchi,
        vchi=vchi,
        vg_no_spatial=(c / denominator).real,
    )


def group_velocity(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                   h=None) -> GroupVelocityReport:
    """Doppler-averaged group velocity including spatial dispersion.

    Raises
    ------
    StrongSusceptibilityError
        If ``|2 pi <chi>| >= 0.1``, outside the single-wave regime.
    DerivativeNotConvergedError
        If halving ``h`` changes either derivative by more than 1e-4.
    """
    if h is None:
        h = default_step(params)
    ens = DopplerEnsemble.thermal(params, quad)
    chi, dchi, vchi = ensemble_derivatives(ens, params.Delta4, h)
    check_passive(chi, f" at Delta1={params.Delta1!r}")
    return report_from_derivatives(params, chi, dchi, vchi)


def group_velocity_no_spatial(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                              h=None) -> float:
    """Group velocity with the wavenumber dependence of chi ignored."""
    return group_velocity(params, quad, h).vg_no_spatial


@dataclass(frozen=True)
class NumeratorPoint:
    Delta1: float
    numerator: complex
    dchi: complex


def numerator_scan(params: SystemParams, Delta1_grid, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                   h=None):
    """``1 + 2 pi k1 <v dchi/domega>`` and ``<dchi/domega>`` across probe detunings."""
    grid = np.asarray(Delta1_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ParameterError("Delta1 grid must be a non-empty, strictly increasing 1-D array")
    if h is None:
        h = default_step(params)
    ens = DopplerEnsemble.thermal(params, quad)
    out = []
    for d1 in grid:
        d4 = float(d1) - params.Delta2 - params.Delta3
        _, dchi, vchi = ensemble_derivatives(ens, d4, h)
        out.append(NumeratorPoint(float(d1), 1.0 + 2.0 * math.pi * params.k1 * vchi, dchi))
    return out
