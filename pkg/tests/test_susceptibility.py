import logging
import math

import numpy as np
import pytest

from conftest import GAMMA
from stoplight.core import ParameterError, SystemParams
from stoplight.susceptibility import (
    DEFAULT_QUADRATURE,
    DopplerEnsemble,
    QuadratureNotConvergedError,
    QuadratureSpec,
    check_passive,
    chi_atom,
    chi_doppler,
    spectrum,
    weighted_sum,
)

g = GAMMA
GH201 = QuadratureSpec("gauss-hermite", 201)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_empty_medium(detuned):
    empty = detuned.replace(n_density=0.0)
    assert chi_atom(empty) == 0
    assert chi_doppler(empty) == 0
    for pt in spectrum(empty, np.array([-51.0, -50.0, -49.0]) * g):
        assert pt.chi == 0 and pt.dchi_domega == 0 and pt.vchi_correlation == 0


def test_linear_in_density(detuned):
    assert chi_atom(detuned.replace(n_density=2e12)) == 2 * chi_atom(detuned)
    assert chi_doppler(detuned.replace(n_density=2e12)) == 2 * chi_doppler(detuned)


def test_single_atom_transparency():
    # a strong enough control field suppresses the resonant absorption
    p = SystemParams(G=1.0 * g, Omega=0, Delta1=0, Delta2=0)
    assert abs(chi_atom(p).imag) < 1e-2 * abs(chi_atom(p.replace(Delta1=2 * g)).imag)


def test_cold_limit_is_single_velocity_class(detuned):
    assert rel(chi_doppler(detuned.replace(D=0.0)), chi_atom(detuned)) < 1e-10


def test_node_order_does_not_change_the_sum(detuned, rng):
    u, w = DEFAULT_QUADRATURE.nodes(detuned.D)
    ref = DopplerEnsemble(detuned, u, w).chi(0.0)
    perm = rng.permutation(u.size)
    assert rel(DopplerEnsemble(detuned, u[perm], w[perm]).chi(0.0), ref) <= 1e-14


def test_weighted_sum_is_order_independent(rng):
    x = rng.normal(size=1000) * 10.0 ** rng.integers(-8, 8, size=1000)
    z = x + 1j * x[::-1]
    w = rng.uniform(size=1000)
    perm = rng.permutation(1000)
    assert weighted_sum(w, z) == weighted_sum(w[perm], z[perm])


@pytest.mark.parametrize("scheme", ["trapezoid", "gauss-hermite"])
def test_rules_integrate_the_gaussian(scheme):
    q = QuadratureSpec(scheme, 401)
    u, w = q.nodes(1.33e9)
    assert math.fsum(w) == pytest.approx(1.0, abs=1e-13)
    assert math.fsum(w * u**2) == pytest.approx(1.33e9**2, rel=1e-12)
    assert abs(math.fsum(w * u)) < 1e-3


def test_quadrature_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec("simpson")
    with pytest.raises(ParameterError):
        QuadratureSpec(n_nodes=2)
    with pytest.raises(ParameterError):
        QuadratureSpec(cutoff_sigmas=3.0)
    assert QuadratureSpec(n_nodes=11).doubled().n_nodes == 21
    assert QuadratureSpec("gauss-hermite", 11).doubled().n_nodes == 22


@pytest.mark.parametrize("omega", [1e-4, 1e-3, 3e-3])
@pytest.mark.parametrize("d1", [-55.0, -50.0, -45.0])
def test_default_rule_survives_node_doubling(detuned, omega, d1):
    p = detuned.replace(Omega=omega * g, Delta1=d1 * g)
    coarse = chi_doppler(p)
    fine = chi_doppler(p, DEFAULT_QUADRATURE.doubled())
    assert rel(coarse, fine) < 1e-6


def test_convergence_check_accepts_default_rule(detuned):
    checked = chi_doppler(detuned, QuadratureSpec(check_convergence=True))
    assert rel(checked, chi_doppler(detuned)) < 1e-6


def test_convergence_check_rejects_coarse_gauss_hermite(detuned):
    # the 1e-3 gamma transparency feature is far narrower than the node
    # spacing of a 201-point Gauss-Hermite rule at room temperature
    with pytest.raises(QuadratureNotConvergedError, match="quadrature not converged"):
        chi_doppler(detuned, QuadratureSpec("gauss-hermite", 201, check_convergence=True))


@pytest.mark.parametrize("D_over_gamma", [0.5, 2.0])
@pytest.mark.parametrize("d1", [-52.0, -50.0, -49.5])
def test_independent_rules_agree_for_narrow_distributions(detuned, D_over_gamma, d1):
    p = detuned.replace(D=D_over_gamma * g, Delta1=d1 * g)
    assert rel(chi_doppler(p, GH201), chi_doppler(p)) < 1e-6


@pytest.mark.parametrize("scale", [0.5, 1.0, 2.0])
def test_dip_position_is_doppler_protected(detuned, scale):
    p = detuned.replace(D=scale * 1.33e9)
    ens = DopplerEnsemble.thermal(p)
    grid = np.linspace(-50.3, -49.7, 61)
    im = [ens.chi((d1 + 50.0) * g).imag for d1 in grid]
    assert abs(grid[int(np.argmin(im))] + 50.0) < 0.1


def test_dispersion_is_steep_inside_the_window(detuned):
    pts = spectrum(detuned, np.array([-55.0, -50.0]) * g)
    assert abs(pts[1].dchi_domega.real) > 100 * abs(pts[0].dchi_domega.real)


def test_passive_across_the_window(detuned):
    ens = DopplerEnsemble.thermal(detuned)
    for d1 in np.linspace(-60, -40, 41):
        chi = ens.chi((d1 + 50) * g)
        assert chi.imag >= -1e-12 * abs(chi)


def test_gain_is_logged_not_raised(caplog):
    with caplog.at_level(logging.WARNING, logger="stoplight.susceptibility"):
        check_passive(complex(1e-3, -1e-6), " at test point")
    assert "gain" in caplog.text


def test_spectrum_rejects_bad_grids(detuned):
    with pytest.raises(ParameterError):
        spectrum(detuned, np.array([1.0, 0.0]))
    with pytest.raises(ParameterError):
        spectrum(detuned, np.array([]))


def test_spectrum_point_fields(detuned):
    (pt,) = spectrum(detuned, np.array([-50.0 * g]))
    assert pt.Delta1 == -50.0 * g
    assert pt.chi == chi_doppler(detuned)
