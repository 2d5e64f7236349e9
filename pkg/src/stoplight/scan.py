"""Parameter sweeps and the stopped-light root search."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .config import ConfigError, RunConfig
from .core import SolverError, equivalent_b_field
from .dispersion import GroupVelocityReport, ensemble_derivatives, group_velocity, report_from_derivatives
from .susceptibility import DopplerEnsemble, check_passive

log = logging.getLogger(__name__)

NUMERATOR_ATOL = 1e-8
MAX_ITERATIONS = 200


class NoSignChangeError(SolverError):
    pass


class RootNotConvergedError(SolverError):
    def __init__(self, message, best_estimate):
        super().__init__(message)
        self.best_estimate = best_estimate


@dataclass(frozen=True)
class SweepRow:
    value: float
    report: GroupVelocityReport | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def sweep_values(config: RunConfig) -> np.ndarray:
    s = config.sweep
    if s.scale == "log":
        return np.geomspace(s.start, s.stop, s.count)
    return np.linspace(s.start, s.stop, s.count)


def _params_at(config: RunConfig, variable, value):
    gam = config.gamma
    base = config.params
    if variable == "Omega":
        return base.replace(Omega=value * gam)
    if variable == "G":
        return base.replace(G=value * gam)
    if variable == "n":
        return base.replace(n_density=value)
    return base.replace(Delta1=value * gam)


def sweep(config: RunConfig, variable=None):
    """Group-velocity report at every sweep point; failures flag the row.

    Sweeps over ``Delta1`` share one velocity ensemble, since the
    zeroth-order state does not depend on the probe.
    """
    variable = variable or config.sweep.variable
    values = sweep_values(config)
    quad, h = config.quad, config.fd_step
    rows = []
    ens = None
    if variable == "Delta1":
        try:
            ens = DopplerEnsemble.thermal(config.params, quad)
        except SolverError as exc:
            return [SweepRow(float(x), None, str(exc)) for x in values]
    for x in values:
        params = _params_at(config, variable, float(x))
        try:
            if ens is not None:
                chi, dchi, vchi = ensemble_derivatives(ens, params.Delta4, h)
                check_passive(chi, f" at Delta1={params.Delta1!r}")
                report = report_from_derivatives(params, chi, dchi, vchi)
            else:
                report = group_velocity(params, quad, h)
        except SolverError as exc:
            log.warning("%s = %r: %s", variable, float(x), exc)
            rows.append(SweepRow(float(x), None, str(exc)))
            continue
        rows.append(SweepRow(float(x), report))
    return rows


def sweep_omega(config: RunConfig):
    if config.sweep.variable != "Omega":
        raise ConfigError("sweep_omega needs sweep_variable = \"Omega\"")
    return sweep(config, "Omega")


def sign_changes(values, series):
    """Brackets ``(x_i, x_{i+1})`` across which ``series`` changes sign."""
    out = []
    for (x0, y0), (x1, y1) in zip(zip(values, series), zip(values[1:], series[1:])):
        if y0 == 0 or np.sign(y0) != np.sign(y1):
            out.append((x0, x1))
    return out


@dataclass(frozen=True)
class StopLightResult:
    """LL coupling at which the numerator of the group velocity vanishes.

    ``omega_star`` and ``bracket`` are in rad/s, ``equivalent_B_field`` in
    gauss.
    """

    omega_star: float
    bracket: tuple
    iterations: int
    residual_numerator: float
    equivalent_B_field: float
    gamma: float

    def as_row(self):
        return {
            "omega_star": self.omega_star,
            "omega_star_over_gamma": self.omega_star / self.gamma,
            "bracket_lo": self.bracket[0],
            "bracket_hi": self.bracket[1],
            "iterations": self.iterations,
            "residual_numerator": self.residual_numerator,
            "equivalent_B_field_gauss": self.equivalent_B_field,
        }


def numerator_real(config: RunConfig, omega):
    """``Re[1 + 2 pi k1 <v dchi/domega>]`` at LL coupling ``omega`` [rad/s]."""
    params = config.params.replace(Omega=omega)
    ens = DopplerEnsemble.thermal(params, config.quad)
    _, _, vchi = ensemble_derivatives(ens, params.Delta4, config.fd_step)
    return (1.0 + 2.0 * math.pi * params.k1 * vchi).real


def find_stop_omega(config: RunConfig, bracket=None) -> StopLightResult:
    """Locate the LL coupling that stops the light by Brent's method.

    Parameters
    ----------
    config : RunConfig
        Everything except ``Omega`` is held at the configured values.
    bracket : (float, float), optional
        Search interval for ``Omega`` [rad/s]; defaults to the configured one.
        The real part of the numerator must change sign across it.

    Raises
    ------
    NoSignChangeError
        The numerator has the same sign at both ends of the bracket.
    RootNotConvergedError
        No root within 200 iterations or the residual exceeds 1e-8; the
        last iterate is attached as ``best_estimate``.
    """
    lo, hi = bracket if bracket is not None else config.bracket
    if not 0 <= lo < hi:
        raise ConfigError(f"bracket must satisfy 0 <= lo < hi, got ({lo!r}, {hi!r})")

    def f(omega):
        return numerator_real(config, omega)

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0 or f_hi == 0.0:
        root = lo if f_lo == 0.0 else hi
        return _result(config, root, (lo, hi), 0, 0.0)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChangeError(
            f"no sign change in bracket: Re numerator is {f_lo:.6g} at Omega={lo / config.gamma:.6g} gamma "
            f"and {f_hi:.6g} at Omega={hi / config.gamma:.6g} gamma"
        )
    # interval tolerance far below what the 1e-8 residual needs
    xtol = 1e-15 * config.gamma
    root, info = brentq(f, lo, hi, xtol=xtol, maxiter=MAX_ITERATIONS, full_output=True, disp=False)
    residual = f(root)
    if not info.converged or not abs(residual) <= NUMERATOR_ATOL:
        raise RootNotConvergedError(
            f"stop-field search did not converge after {info.iterations} iterations "
            f"(residual {residual:.3g}); best estimate Omega={root / config.gamma:.9g} gamma",
            best_estimate=root,
        )
    return _result(config, root, (lo, hi), info.iterations, residual)


def _result(config, root, bracket, iterations, residual):
    return StopLightResult(
        omega_star=float(root),
        bracket=(float(bracket[0]), float(bracket[1])),
        iterations=int(iterations),
        residual_numerator=float(residual),
        equivalent_B_field=equivalent_b_field(root, config.gamma),
        gamma=config.gamma,
    )
