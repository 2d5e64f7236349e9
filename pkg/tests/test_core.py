import math

import pytest

from stoplight.core import (
    AMU_G,
    C_CGS,
    GAMMA_DEFAULT,
    HBAR_CGS,
    MASS_RB87_AMU,
    ParameterError,
    SystemParams,
    derive_detunings,
    dipole_from_gamma,
    doppler_width,
    equivalent_b_field,
    temperature_from_doppler_width,
)

G = GAMMA_DEFAULT
OMEGA_780 = 2 * math.pi * C_CGS / 780e-7
M_RB = MASS_RB87_AMU * AMU_G


@pytest.mark.parametrize("args, expected", [
    ((-50 * G, -50 * G, 0.0), 0.0),
    ((0.0, 0.0, 0.0), 0.0),
    ((1.0, 2.0, 3.0), -4.0),
])
def test_loop_detuning_examples(args, expected):
    assert derive_detunings(*args) == expected


def test_loop_detuning_antisymmetric_under_exchange():
    d1, d2, d3 = 3.5, -1.25, 0.75
    assert derive_detunings(d2 + d3, d1, 0.0) == -derive_detunings(d1, d2, d3)


def test_loop_detuning_is_velocity_invariant(detuned):
    u = 0.37 * detuned.D
    moved = detuned.replace(Delta1=detuned.Delta1 - u, Delta2=detuned.Delta2 - u)
    assert moved.Delta4 == pytest.approx(detuned.Delta4, abs=1e-6)


def test_dipole_closed_form_and_magnitude():
    d2 = dipole_from_gamma(G, OMEGA_780, convention="branch")
    assert d2 == pytest.approx(3 * HBAR_CGS * G * C_CGS**3 / (2 * OMEGA_780**3), rel=1e-14)
    # an atomic-scale dipole: a few 1e-18 esu*cm
    assert 1e-18 < math.sqrt(d2) < 1e-17


def test_dipole_linewidth_convention_doubles():
    assert dipole_from_gamma(G, OMEGA_780, convention="linewidth") == pytest.approx(
        2 * dipole_from_gamma(G, OMEGA_780, convention="branch"), rel=1e-15)


def test_dipole_scalings():
    base = dipole_from_gamma(G, OMEGA_780)
    assert dipole_from_gamma(2 * G, OMEGA_780) == pytest.approx(2 * base, rel=1e-15)
    assert dipole_from_gamma(G, 2 * OMEGA_780) == pytest.approx(base / 8, rel=1e-15)


@pytest.mark.parametrize("bad", [dict(gamma=0.0), dict(omega13=-1.0), dict(hbar=0.0), dict(c=-3.0)])
def test_dipole_rejects_non_positive(bad):
    kw = dict(gamma=G, omega13=OMEGA_780, hbar=HBAR_CGS, c=C_CGS) | bad
    with pytest.raises(ParameterError):
        dipole_from_gamma(**kw)


def test_dipole_rejects_unknown_convention():
    with pytest.raises(ParameterError):
        dipole_from_gamma(G, OMEGA_780, convention="half")


def test_doppler_width_room_temperature_rubidium():
    assert doppler_width(285.0, M_RB, OMEGA_780) == pytest.approx(1.33e9, rel=0.01)


def test_doppler_width_round_trip():
    for D in (1e6, 1.33e9, 4e9):
        T = temperature_from_doppler_width(D, M_RB, OMEGA_780)
        assert doppler_width(T, M_RB, OMEGA_780) == pytest.approx(D, rel=1e-12)


def test_doppler_width_scaling_and_cold_limit():
    D = doppler_width(300.0, M_RB, OMEGA_780)
    assert doppler_width(1200.0, M_RB, OMEGA_780) == pytest.approx(2 * D, rel=1e-14)
    assert doppler_width(1e-12, M_RB, OMEGA_780) < 1e-6 * D
    with pytest.raises(ParameterError):
        doppler_width(0.0, M_RB, OMEGA_780)


def test_chi_prefactor_is_dimensionless():
    # n [cm^-3] * d^2 [erg cm^3] / (hbar [erg s] * gamma [1/s]); rescaling the
    # unit of length by s changes n by s^-3 and d^2 by s^3, leaving the result
    p = SystemParams(n_density=1e12)
    base = p.derived().chi_prefactor
    s = 10.0
    scaled = SystemParams(n_density=1e12 / s**3, d13_sq=p.derived().d13_sq * s**3)
    assert scaled.derived().chi_prefactor == pytest.approx(base, rel=1e-14)
    # and it is a small number for a dilute vapour
    assert 1e-4 < base < 1e-1


def test_derived_constants():
    p = SystemParams(Delta1=1.0, Delta2=2.0, Delta3=3.0)
    d = p.derived()
    assert d.Delta4 == -4.0
    assert d.k1 == pytest.approx(p.omega1 / p.c, rel=1e-15)
    assert SystemParams(d13_sq=1e-35).derived().d13_sq == 1e-35


@pytest.mark.parametrize("bad", [
    dict(gamma=0.0), dict(Gamma23=-1.0), dict(n_density=-1.0), dict(D=-1.0),
    dict(lambda1=0.0), dict(dipole_convention="other"), dict(d13_sq=0.0),
    dict(Omega=complex("nan")),
])
def test_system_params_validation(bad):
    with pytest.raises(ParameterError):
        SystemParams(**bad)


def test_equivalent_b_field():
    assert equivalent_b_field(1741e-6 * G) == pytest.approx(1.7288e-3, rel=1e-4)
    assert equivalent_b_field(-1e-6 * G) == pytest.approx(0.993e-6, rel=1e-12)
