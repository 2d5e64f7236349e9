"""Probe susceptibility of one velocity class and of the thermal ensemble."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_hermite

from .core import ParameterError, SolverError, SystemParams
from .liouville import S13, generator_batch, sideband_batch, steady_state_batch

log = logging.getLogger(__name__)

QUADRATURE_RTOL = 1e-6
SCHEMES = ("trapezoid", "gauss-hermite")


class QuadratureNotConvergedError(SolverError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Velocity-integration rule for the Maxwell-Boltzmann average.

    ``cutoff_sigmas`` is only used by the trapezoid rule, which samples
    ``k1 v`` uniformly on ``[-cutoff*D, cutoff*D]``.  With
    ``check_convergence`` every average is repeated with twice the nodes and
    rejected if the two differ by more than 1e-6 relative.
    """

    scheme: str = "trapezoid"
    n_nodes: int = 4001
    cutoff_sigmas: float = 8.0
    check_convergence: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown quadrature scheme {self.scheme!r}; expected {SCHEMES}")
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 3:
            raise ParameterError(f"n_nodes must be an integer >= 3, got {self.n_nodes!r}")
        if self.scheme == "trapezoid" and not self.cutoff_sigmas >= 4:
            raise ParameterError(f"cutoff_sigmas must be >= 4, got {self.cutoff_sigmas!r}")

    def doubled(self) -> "QuadratureSpec":
        # keep trapezoid grids nested and odd so the v = 0 node is retained
        n = 2 * self.n_nodes - 1 if self.scheme == "trapezoid" else 2 * self.n_nodes
        return QuadratureSpec(self.scheme, n, self.cutoff_sigmas, False)

    def nodes(self, D):
        """Doppler shifts ``u = k1 v`` [rad/s] and probability weights."""
        if D == 0:
            return np.zeros(1), np.ones(1)
        if self.scheme == "gauss-hermite":
            x, w = roots_hermite(int(self.n_nodes))
            return math.sqrt(2.0) * D * x, w / math.sqrt(math.pi)
        u = np.linspace(-self.cutoff_sigmas * D, self.cutoff_sigmas * D, int(self.n_nodes))
        step = u[1] - u[0]
        w = np.exp(-0.5 * (u / D) ** 2) * (step / (math.sqrt(2.0 * math.pi) * D))
        w[0] *= 0.5
        w[-1] *= 0.5
        return u, w


DEFAULT_QUADRATURE = QuadratureSpec()


def weighted_sum(weights, values) -> complex:
    """Exactly rounded complex sum of ``weights * values``.

    ``math.fsum`` makes the result independent of node order and
    bit-reproducible.
    """
    terms = np.asarray(weights) * np.asarray(values)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


class DopplerEnsemble:
    """Velocity grid with its zeroth-order steady states precomputed.

    The steady state does not depend on the probe detuning, so one ensemble
    serves every probe frequency of a spectrum or finite-difference stencil.
    """

    def __init__(self, params: SystemParams, shifts, weights):
        self.params = params
        self.shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
        self.weights = np.atleast_1d(np.asarray(weights, dtype=float))
        self.velocities = self.shifts / params.k1
        self.prefactor = params.derived().chi_prefactor
        self.generators = generator_batch(params, self.shifts)
        self.sigma0 = steady_state_batch(params, self.generators)

    @classmethod
    def thermal(cls, params: SystemParams, quad: QuadratureSpec = DEFAULT_QUADRATURE):
        return cls(params, *quad.nodes(params.D))

    def sigma13_plus(self, Delta4, check=True):
        s = sideband_batch(self.params, self.generators, self.sigma0, Delta4, +1, check=check)
        return s[:, S13]

    def chi_nodes(self, Delta4, check=True):
        return self.prefactor * self.sigma13_plus(Delta4, check=check)

    def average(self, values, weight_by_velocity=False) -> complex:
        w = self.weights * self.velocities if weight_by_velocity else self.weights
        return weighted_sum(w, values)

    def chi(self, Delta4, check=True) -> complex:
        return self.average(self.chi_nodes(Delta4, check=check))


@dataclass(frozen=True)
class SusceptibilityPoint:
    Delta1: float
    chi: complex
    dchi_domega: complex
    vchi_correlation: complex


def chi_atom(params: SystemParams, v=0.0) -> complex:
    """Susceptibility contributed by atoms moving at ``v`` [cm/s]."""
    ens = DopplerEnsemble(params, [params.k1 * float(v)], [1.0])
    return complex(ens.chi_nodes(params.Delta4)[0])


def check_passive(chi, where=""):
    if chi.imag < -1e-12 * abs(chi):
        log.warning("gain: Im chi = %.3e < 0%s", chi.imag, where)


def chi_doppler(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """Maxwell-Boltzmann averaged susceptibility at the probe detuning of ``params``."""
    chi = DopplerEnsemble.thermal(params, quad).chi(params.Delta4)
    if quad.check_convergence and params.D > 0:
        fine = DopplerEnsemble.thermal(params, quad.doubled()).chi(params.Delta4)
        _require_converged(chi, fine, quad)
        chi = fine
    check_passive(chi, f" at Delta1={params.Delta1!r}")
    return chi


def _require_converged(coarse, fine, quad):
    scale = abs(fine)
    if abs(fine - coarse) > QUADRATURE_RTOL * scale:
        raise QuadratureNotConvergedError(
            f"quadrature not converged: {quad.scheme} with {quad.n_nodes} nodes differs "
            f"from doubled grid by {abs(fine - coarse) / scale if scale else math.inf:.2e} relative"
        )


def spectrum(params: SystemParams, Delta1_grid, quad: QuadratureSpec = DEFAULT_QUADRATURE,
             h=None):
    """Averaged susceptibility and its probe-frequency derivatives on a grid.

    Parameters
    ----------
    params : SystemParams
        ``Delta1`` is ignored; every other field is held fixed.
    Delta1_grid : array_like
        Strictly increasing probe detunings [rad/s].
    quad : QuadratureSpec
    h : float, optional
        Finite-difference step [rad/s]; defaults to the dispersion module's.

    Returns
    -------
    list of SusceptibilityPoint
    """
    from .dispersion import default_step, ensemble_derivatives

    grid = np.asarray(Delta1_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ParameterError("Delta1 grid must be a non-empty, strictly increasing 1-D array")
    if h is None:
        h = default_step(params)
    ens = DopplerEnsemble.thermal(params, quad)
    fine = None
    if quad.check_convergence and params.D > 0:
        fine = DopplerEnsemble.thermal(params, quad.doubled())
    points = []
    for d1 in grid:
        d4 = float(d1) - params.Delta2 - params.Delta3
        chi, dchi, vchi = ensemble_derivatives(ens, d4, h)
        if fine is not None:
            _require_converged(chi, fine.chi(d4), quad)
        check_passive(chi, f" at Delta1={float(d1)!r}")
        points.append(SusceptibilityPoint(float(d1), chi, dchi, vchi))
    return points
