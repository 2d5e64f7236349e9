"""Physical parameters, unit conventions and derived constants.

Everything is Gaussian/CGS: lengths in cm, rates and detunings in rad/s,
number densities in atoms/cm^3, dipole moments in esu*cm.  Rabi-type
couplings (``G``, ``Omega``, ``g_probe``) are *half* Rabi frequencies, so
the physical Rabi frequency of the control field is ``2*G``.

Level labels follow the Lambda scheme: |1> is the excited state, |2> and
|3> are the two metastable lower states.  The probe drives 1<->3, the
optical control field drives 1<->2 and the lower-level (LL) field drives
2<->3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

C_CGS = 2.99792458e10  # cm/s
HBAR_CGS = 1.054571817e-27  # erg*s
K_B_CGS = 1.380649e-16  # erg/K
AMU_G = 1.66053906660e-24  # g

GAMMA_DEFAULT = 3.0 * math.pi * 1e6  # rad/s; 4*gamma is the Rb D-line natural width
LAMBDA_RB87_D2 = 780.241e-7  # cm
DOPPLER_WIDTH_DEFAULT = 1.33e9  # rad/s
DENSITY_DEFAULT = 1e12  # atoms/cm^3
MASS_RB87_AMU = 86.909180527

# An LL coupling of 1e-6*gamma corresponds to ~0.993 microgauss for 87Rb.
GAUSS_PER_MICROGAMMA = 0.993e-6

DIPOLE_CONVENTIONS = ("linewidth", "branch")


class StoplightError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(StoplightError, ValueError):
    """Physical inputs violate a domain constraint."""


class SolverError(StoplightError, ArithmeticError):
    """A numerical stage failed; carries enough context to flag a sweep row."""


def derive_detunings(Delta1, Delta2, Delta3):
    """Two-photon loop detuning ``Delta4 = Delta1 - Delta2 - Delta3``.

    Uses ``omega13 = omega12 + omega23`` for the Lambda scheme, so the loop
    detuning equals ``omega1 - omega2 - omega3``.
    """
    return Delta1 - Delta2 - Delta3


def dipole_from_gamma(gamma, omega13, hbar=HBAR_CGS, c=C_CGS, convention="branch"):
    """Squared probe dipole ``|d13|^2`` from the radiative rate.

    The Weisskopf-Wigner rate of a dipole ``d`` at angular frequency
    ``omega`` is ``A = 4 omega^3 |d|^2 / (3 hbar c^3)``.  Which rate is
    attributed to the 1<->3 dipole is a convention:

    ``"branch"``
        Only the 1->3 channel, ``A = 2*gamma``, giving
        ``|d|^2 = 3 hbar gamma c^3 / (2 omega^3)``.
    ``"linewidth"``
        The full population decay of |1>, ``A = 2*(gamma1 + gamma2) = 4*gamma``,
        giving twice the ``"branch"`` value.  This treats the probe dipole as
        the one that sets the natural width of the optical line.

    Parameters
    ----------
    gamma : float
        Radiative rate gamma [rad/s].
    omega13 : float
        Transition angular frequency [rad/s].
    hbar, c : float
        CGS constants; overridable for unit audits.
    convention : {"branch", "linewidth"}

    Returns
    -------
    float
        ``|d13|^2`` in esu^2*cm^2 (erg*cm^3).
    """
    for name, value in (("gamma", gamma), ("omega13", omega13), ("hbar", hbar), ("c", c)):
        if not value > 0:
            raise ParameterError(f"{name} must be positive, got {value!r}")
    if convention == "branch":
        rate = 2.0 * gamma
    elif convention == "linewidth":
        rate = 4.0 * gamma
    else:
        raise ParameterError(
            f"unknown dipole convention {convention!r}; expected one of {DIPOLE_CONVENTIONS}"
        )
    return 3.0 * hbar * rate * c**3 / (4.0 * omega13**3)


def doppler_width(T, M, omega1, c=C_CGS):
    """Standard deviation ``D`` of the ``k1*v`` distribution [rad/s].

    ``T`` in kelvin, ``M`` in grams.
    """
    if not (T > 0 and M > 0):
        raise ParameterError(f"temperature and mass must be positive, got T={T!r}, M={M!r}")
    return omega1 * math.sqrt(K_B_CGS * T / (M * c**2))


def temperature_from_doppler_width(D, M, omega1, c=C_CGS):
    """Inverse of :func:`doppler_width`."""
    if not (D >= 0 and M > 0 and omega1 > 0):
        raise ParameterError("D must be non-negative; M and omega1 positive")
    return M * c**2 * (D / omega1) ** 2 / K_B_CGS


@dataclass(frozen=True)
class SystemParams:
    """All physical inputs for one evaluation of the medium response.

    Rates, couplings and detunings are in rad/s.  ``G``, ``Omega`` and
    ``g_probe`` may be complex.  ``g_probe`` never enters the
    susceptibility; it is kept so that the weak-probe assumption can be
    checked against the other couplings.

    ``d13_sq`` overrides the dipole derived from ``gamma`` when given.
    """

    gamma: float = GAMMA_DEFAULT
    Gamma12: float = 0.0
    Gamma13: float = 0.0
    Gamma23: float = 1e-3 * GAMMA_DEFAULT
    G: complex = 0.3 * GAMMA_DEFAULT
    Omega: complex = 0.0
    g_probe: complex = 1e-6 * GAMMA_DEFAULT
    Delta1: float = 0.0
    Delta2: float = 0.0
    Delta3: float = 0.0
    delta_phi: float = 0.0
    n_density: float = DENSITY_DEFAULT
    D: float = DOPPLER_WIDTH_DEFAULT
    lambda1: float = LAMBDA_RB87_D2
    c: float = C_CGS
    hbar: float = HBAR_CGS
    dipole_convention: str = "linewidth"
    d13_sq: float | None = field(default=None)

    def __post_init__(self):
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma!r}")
        for name in ("Gamma12", "Gamma13", "Gamma23", "n_density", "D"):
            value = getattr(self, name)
            if not value >= 0:
                raise ParameterError(f"{name} must be non-negative, got {value!r}")
        for name in ("lambda1", "c", "hbar"):
            value = getattr(self, name)
            if not value > 0:
                raise ParameterError(f"{name} must be positive, got {value!r}")
        if self.dipole_convention not in DIPOLE_CONVENTIONS:
            raise ParameterError(
                f"unknown dipole convention {self.dipole_convention!r}; "
                f"expected one of {DIPOLE_CONVENTIONS}"
            )
        if self.d13_sq is not None and not self.d13_sq > 0:
            raise ParameterError(f"d13_sq must be positive, got {self.d13_sq!r}")
        for name in ("G", "Omega", "g_probe", "Delta1", "Delta2", "Delta3", "delta_phi"):
            value = getattr(self, name)
            if not math.isfinite(abs(value)):
                raise ParameterError(f"{name} must be finite, got {value!r}")

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def omega1(self) -> float:
        """Probe angular frequency [rad/s]."""
        return 2.0 * math.pi * self.c / self.lambda1

    @property
    def k1(self) -> float:
        """Probe wavenumber [rad/cm]."""
        return 2.0 * math.pi / self.lambda1

    @property
    def Delta4(self) -> float:
        return derive_detunings(self.Delta1, self.Delta2, self.Delta3)

    def derived(self) -> "DerivedConstants":
        return DerivedConstants.from_params(self)


@dataclass(frozen=True)
class DerivedConstants:
    Delta4: float
    k1: float
    d13_sq: float
    chi_prefactor: float

    @classmethod
    def from_params(cls, params: SystemParams) -> "DerivedConstants":
        if params.d13_sq is not None:
            d13_sq = params.d13_sq
        else:
            d13_sq = dipole_from_gamma(
                params.gamma, params.omega1, params.hbar, params.c, params.dipole_convention
            )
        return cls(
            Delta4=params.Delta4,
            k1=params.k1,
            d13_sq=d13_sq,
            chi_prefactor=params.n_density * d13_sq / (params.hbar * params.gamma),
        )


def equivalent_b_field(omega, gamma=GAMMA_DEFAULT):
    """Magnetic field [gauss] equivalent to an LL coupling ``omega`` [rad/s]."""
    return abs(omega) / gamma / 1e-6 * GAUSS_PER_MICROGAMMA
