"""Rotating-frame density-matrix generator and its perturbative solutions.

The density matrix of the driven Lambda atom is flattened into the
9-vector ``(s11, s22, s33, s12, s21, s13, s31, s23, s32)``.  The probe is
treated to first order: the state is ``s0 + (g/gamma) e^{-i theta} s_plus
+ (g*/gamma) e^{+i theta} s_minus`` with ``theta = Delta4 t + delta_phi``.

All solvers work on a batch of Doppler shifts ``u = k1 v`` at once so that
a whole velocity grid is handled by one stacked LAPACK call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import SolverError, SystemParams

LEVELS = 3
DIM = 9
ORDER = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1))
INDEX = {pair: k for k, pair in enumerate(ORDER)}
S11, S22, S33, S12, S21, S13, S31, S23, S32 = range(DIM)
POPULATIONS = (S11, S22, S33)

# s33 carries nothing beyond population conservation, so trace closure overwrites it.
TRACE_ROW = S33
COND_LIMIT = 1e12


class DegenerateSteadyStateError(SolverError):
    """The zeroth-order steady state is not unique."""


class SidebandResonanceError(SolverError):
    """The first-order sideband system is singular."""


def vectorize(sigma):
    sigma = np.asarray(sigma)
    rows, cols = zip(*ORDER)
    return sigma[..., rows, cols]


def unvectorize(vec):
    vec = np.asarray(vec)
    out = np.zeros(vec.shape[:-1] + (LEVELS, LEVELS), dtype=complex)
    for k, (i, j) in enumerate(ORDER):
        out[..., i, j] = vec[..., k]
    return out


@dataclass(frozen=True)
class DensityMatrix:
    sigma: np.ndarray

    @property
    def populations(self):
        return np.real(np.diag(self.sigma))

    def trace(self):
        return complex(np.trace(self.sigma))

    def hermiticity_error(self):
        return float(np.max(np.abs(self.sigma - self.sigma.conj().T)))


@dataclass(frozen=True)
class SidebandMatrix:
    sigma_plus: np.ndarray

    @property
    def s13(self) -> complex:
        return complex(self.sigma_plus[0, 2])

    def trace(self):
        return complex(np.trace(self.sigma_plus))


@dataclass(frozen=True)
class GeneratorSystem:
    """Probe-free generator and its trace-closed steady-state system.

    ``matrix`` is the raw Liouvillian ``L`` with ``d/dt vec(s) = L vec(s)``.
    ``closed_matrix`` has the s33 row replaced by ``gamma * (s11 + s22 + s33)``
    and ``source`` is the matching right-hand side, so that
    ``closed_matrix @ s0 = source`` pins the unit-trace steady state.
    """

    matrix: np.ndarray
    closed_matrix: np.ndarray
    source: np.ndarray


def generator_batch(params: SystemParams, shifts):
    """Stack of 9x9 generators, one per Doppler shift ``u = k1 v`` [rad/s].

    The probe and control detunings both move by ``-u`` (equal wavenumbers);
    the LL field is treated as Doppler-free.
    """
    u = np.atleast_1d(np.asarray(shifts, dtype=float))
    n = u.shape[0]
    gam = params.gamma
    G, Gc = complex(params.G), complex(params.G).conjugate()
    W, Wc = complex(params.Omega), complex(params.Omega).conjugate()
    d2 = params.Delta2 - u
    d3 = params.Delta3

    L = np.zeros((n, DIM, DIM), dtype=complex)
    # populations
    L[:, S11, S11] = -4.0 * gam
    L[:, S11, S21] = 1j * G
    L[:, S11, S12] = -1j * Gc

    L[:, S22, S11] = 2.0 * gam
    L[:, S22, S12] = 1j * Gc
    L[:, S22, S32] = 1j * W
    L[:, S22, S21] = -1j * G
    L[:, S22, S23] = -1j * Wc

    # s33 completes population conservation: 2*gamma1 of s11 lands here
    L[:, S33, S11] = 2.0 * gam
    L[:, S33, S32] = -1j * W
    L[:, S33, S23] = 1j * Wc

    # coherences and their conjugate partners
    L[:, S12, S12] = -(2.0 * gam + params.Gamma12 - 1j * d2)
    L[:, S12, S22] = 1j * G
    L[:, S12, S11] = -1j * G
    L[:, S12, S13] = -1j * Wc

    L[:, S21, S21] = -(2.0 * gam + params.Gamma12 + 1j * d2)
    L[:, S21, S22] = -1j * Gc
    L[:, S21, S11] = 1j * Gc
    L[:, S21, S31] = 1j * W

    L[:, S13, S13] = -(2.0 * gam + params.Gamma13 - 1j * (d2 + d3))
    L[:, S13, S23] = 1j * G
    L[:, S13, S12] = -1j * W

    L[:, S31, S31] = -(2.0 * gam + params.Gamma13 + 1j * (d2 + d3))
    L[:, S31, S32] = -1j * Gc
    L[:, S31, S21] = 1j * Wc

    L[:, S23, S23] = -(params.Gamma23 - 1j * d3)
    L[:, S23, S13] = 1j * Gc
    L[:, S23, S33] = 1j * W
    L[:, S23, S22] = -1j * W

    L[:, S32, S32] = -(params.Gamma23 + 1j * d3)
    L[:, S32, S31] = -1j * G
    L[:, S32, S33] = -1j * Wc
    L[:, S32, S22] = 1j * Wc
    return L


def probe_coupling_plus(sigma_vec):
    """Coefficient of ``g e^{-i theta}`` in the equations, acting on ``s``.

    Equal to ``i [|1><3|, s]`` in vectorized form.
    """
    s = np.asarray(sigma_vec)
    out = np.zeros_like(s, dtype=complex)
    out[..., S11] = 1j * s[..., S31]
    out[..., S33] = -1j * s[..., S31]
    out[..., S12] = 1j * s[..., S32]
    out[..., S13] = 1j * (s[..., S33] - s[..., S11])
    out[..., S23] = -1j * s[..., S21]
    return out


def probe_coupling_minus(sigma_vec):
    """Coefficient of ``g* e^{+i theta}``; equal to ``i [|3><1|, s]``."""
    s = np.asarray(sigma_vec)
    out = np.zeros_like(s, dtype=complex)
    out[..., S11] = -1j * s[..., S13]
    out[..., S33] = 1j * s[..., S13]
    out[..., S31] = 1j * (s[..., S11] - s[..., S33])
    out[..., S32] = 1j * s[..., S12]
    out[..., S21] = -1j * s[..., S23]
    return out


def _close_trace(M, rhs, gamma, trace_value):
    M = M.copy()
    rhs = rhs.copy()
    M[:, TRACE_ROW, :] = 0.0
    M[:, TRACE_ROW, list(POPULATIONS)] = gamma
    rhs[:, TRACE_ROW] = gamma * trace_value
    return M, rhs


def condition_numbers(M):
    """One-norm condition numbers of a stack of matrices (inf if singular)."""
    with np.errstate(all="ignore"):
        try:
            return np.linalg.cond(M, 1)
        except np.linalg.LinAlgError:
            return np.array([_cond_one(m) for m in M])


def _cond_one(m):
    try:
        return float(np.linalg.cond(m, 1))
    except np.linalg.LinAlgError:
        return np.inf


def _worst(cond):
    cond = np.abs(cond)
    cond = np.where(np.isfinite(cond), cond, np.inf)
    k = int(np.argmax(cond))
    return k, float(cond[k])


def steady_state_batch(params: SystemParams, L):
    """Unit-trace steady states for a stack of generators, shape ``(n, 9)``."""
    n = L.shape[0]
    M, rhs = _close_trace(L, np.zeros((n, DIM), dtype=complex), params.gamma, 1.0)
    k, cond = _worst(condition_numbers(M))
    if not cond < COND_LIMIT:
        raise DegenerateSteadyStateError(
            f"degenerate steady state: condition number {cond:.3g} "
            f"exceeds {COND_LIMIT:.0e} (velocity node {k})"
        )
    return np.linalg.solve(M, rhs[..., None])[..., 0]


def sideband_batch(params: SystemParams, L, sigma0, Delta4, sign=+1, check=True):
    """First-order sideband at loop detuning ``Delta4`` for each generator.

    Solves ``(L + i*sign*Delta4) s = -gamma * S[s0]`` with the s33 row
    replaced by ``Tr s = 0``; ``sign=+1`` gives ``s_plus`` and ``sign=-1``
    gives ``s_minus``.  The closure is exact: the source is traceless and
    ``L`` conserves trace, so for ``Delta4 != 0`` the dropped row is implied
    by the others, and at ``Delta4 = 0`` it removes the steady-state null
    direction that otherwise makes the system singular.
    """
    coupling = probe_coupling_plus if sign > 0 else probe_coupling_minus
    rhs = -params.gamma * coupling(sigma0)
    M = L + (1j * sign * Delta4) * np.eye(DIM)
    M, rhs = _close_trace(M, rhs, params.gamma, 0.0)
    if check:
        k, cond = _worst(condition_numbers(M))
        if not cond < COND_LIMIT:
            raise SidebandResonanceError(
                f"sideband resonance singularity: condition number {cond:.3g} "
                f"at Delta4={Delta4!r} rad/s (velocity node {k})"
            )
    return np.linalg.solve(M, rhs[..., None])[..., 0]


def _shift(params: SystemParams, v):
    return params.k1 * float(v)


def build_generator(params: SystemParams, v=0.0) -> GeneratorSystem:
    """Generator for an atom moving at ``v`` [cm/s] along the beams."""
    L = generator_batch(params, [_shift(params, v)])
    M, rhs = _close_trace(L, np.zeros((1, DIM), dtype=complex), params.gamma, 1.0)
    return GeneratorSystem(matrix=L[0], closed_matrix=M[0], source=rhs[0])


def steady_state_zeroth(params: SystemParams, v=0.0) -> DensityMatrix:
    L = generator_batch(params, [_shift(params, v)])
    s0 = steady_state_batch(params, L)
    return DensityMatrix(unvectorize(s0[0]))


def _first_order(params, v, sign):
    L = generator_batch(params, [_shift(params, v)])
    s0 = steady_state_batch(params, L)
    return sideband_batch(params, L, s0, params.Delta4, sign=sign)[0]


def sideband_plus(params: SystemParams, v=0.0) -> SidebandMatrix:
    """Probe sideband ``s_plus`` for one velocity class.

    Independent of ``g_probe`` and ``delta_phi``: the amplitude ``g/gamma``
    and the phase factor are carried by the expansion, not the solution.
    """
    return SidebandMatrix(unvectorize(_first_order(params, v, +1)))


def sideband_minus(params: SystemParams, v=0.0) -> np.ndarray:
    return unvectorize(_first_order(params, v, -1))


class SidebandCheck(NamedTuple):
    norm_ratio: float
    conjugate_residual: float


def sideband_minus_check(params: SystemParams, v=0.0) -> SidebandCheck:
    """Compare the counter-rotating sideband against ``s_plus``.

    Returns ``|s_minus| / |s_plus|`` (Frobenius norms) and the relative
    residual of the Hermitian-partner relation ``s_minus = s_plus^dagger``
    that any Hermiticity-preserving generator must satisfy.
    """
    L = generator_batch(params, [_shift(params, v)])
    s0 = steady_state_batch(params, L)
    plus = unvectorize(sideband_batch(params, L, s0, params.Delta4, +1)[0])
    minus = unvectorize(sideband_batch(params, L, s0, params.Delta4, -1)[0])
    scale = np.linalg.norm(plus)
    if scale == 0.0:
        return SidebandCheck(float("nan"), float(np.linalg.norm(minus)))
    return SidebandCheck(
        float(np.linalg.norm(minus) / scale),
        float(np.linalg.norm(minus - plus.conj().T) / scale),
    )
