"""Steady-state Bogoliubov scattering matrix and its equivalent circuit.

Mode order is (idler-conjugate, signal, memory). Row I maps input creation
operators of the idler onto the output idler creation operator, so with
``T = scattering_matrix(...).t``::

    B_I^out+ = T[0,0] B_I^in+ + T[0,1] B_S^in + T[0,2] C_M^in
    B_S^out  = T[1,0] B_I^in+ + T[1,1] B_S^in + T[1,2] C_M^in
    C_M^out  = T[2,0] B_I^in+ + T[2,1] B_S^in + T[2,2] C_M^in

Phases follow the Fourier convention A(t) ~ int A[w] exp(-i w t) dw, with
waveguide outputs b_out = sqrt(kappa) B - b_in and the memory treated as a
structured port of rate kappa_M(w) = 2 pi G^2 rho(w) whose output is
C_out = C_in - i sqrt(kappa_M) B_S.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .model import SystemParams, check_stable, memory_port_rate, susceptibilities

I, S, M = 0, 1, 2
MODES = ("I", "S", "M")


class InvariantViolation(ArithmeticError):
    pass


@dataclasses.dataclass(frozen=True)
class ScatteringMatrix:
    omega: float
    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=complex)
        if t.shape != (3, 3):
            raise ValueError(f"scattering matrix must be 3x3, got {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    def __getitem__(self, key: str) -> complex:
        """``T["MI"]`` is the amplitude from idler input into memory output."""
        return complex(self.t[MODES.index(key[0]), MODES.index(key[1])])

    def identity_residuals(self) -> np.ndarray:
        """Deviations of the six Bogoliubov norm identities and two cross identities."""
        return bogoliubov_residuals(self.t[np.newaxis])[0]


@dataclasses.dataclass(frozen=True)
class CircuitDecomposition:
    r: float
    theta1: float
    theta2: float

    @property
    def gain(self) -> float:
        return math.cosh(self.r) ** 2


def scattering_array(params: SystemParams, omegas) -> np.ndarray:
    """T(w) for an array of detunings, shape ``omegas.shape + (3, 3)``.

    The caller is responsible for the stability check.
    """
    omegas = np.asarray(omegas, dtype=float)
    kappa, lam = params.kappa, params.lam
    chi_i, chi_s, d = susceptibilities(params, omegas)
    k_m = memory_port_rate(omegas, params)
    root = np.sqrt(kappa * k_m)
    cc = chi_i * chi_s / d

    t = np.empty(omegas.shape + (3, 3), dtype=complex)
    t[..., I, I] = kappa * chi_i / d - 1.0
    t[..., I, S] = 1j * lam * kappa * cc
    t[..., I, M] = lam * root * cc
    t[..., S, I] = -1j * lam * kappa * cc
    t[..., S, S] = kappa * chi_s / d - 1.0
    t[..., S, M] = -1j * root * chi_s / d
    t[..., M, I] = -lam * root * cc
    t[..., M, S] = -1j * root * chi_s / d
    t[..., M, M] = 1.0 - k_m * chi_s / d
    return t


def scattering_matrix(params: SystemParams, omega: float) -> ScatteringMatrix:
    check_stable(params)
    return ScatteringMatrix(omega=float(omega), t=scattering_array(params, float(omega)))


def bogoliubov_residuals(t: np.ndarray) -> np.ndarray:
    """Residuals of the commutator-preservation identities, shape (..., 8).

    Columns: rows I, S, M; columns I, S, M; cross identities for rows S and M.
    """
    p = np.abs(t) ** 2
    out = np.empty(t.shape[:-2] + (8,))
    out[..., 0] = p[..., I, I] - p[..., I, S] - p[..., I, M] - 1
    out[..., 1] = p[..., S, S] + p[..., S, M] - p[..., S, I] - 1
    out[..., 2] = p[..., M, M] + p[..., M, S] - p[..., M, I] - 1
    out[..., 3] = p[..., I, I] - p[..., S, I] - p[..., M, I] - 1
    out[..., 4] = p[..., S, S] + p[..., M, S] - p[..., I, S] - 1
    out[..., 5] = p[..., M, M] + p[..., S, M] - p[..., I, M] - 1
    for col, row in ((6, S), (7, M)):
        lhs = np.conj(t[..., I, I]) * t[..., row, I]
        rhs = t[..., row, S] * np.conj(t[..., I, S]) + t[..., row, M] * np.conj(t[..., I, M])
        out[..., col] = np.abs(lhs - rhs)
    return out


def beam_splitter_angle_sq(params: SystemParams, omega):
    """tan^2(theta_2) = C / (1 + 4 w^2 / Gamma^2)."""
    omega = np.asarray(omega, dtype=float)
    out = params.cooperativity / (1.0 + 4.0 * omega**2 / params.gamma_inh**2)
    return out if out.ndim else float(out)


def decompose_circuit(T: ScatteringMatrix, tol: float = 1e-9) -> CircuitDecomposition:
    """Two-mode squeezer between two beam splitters.

    Without drive both angle ratios are 0/0; the limit is taken from
    |1 - T_MM| / |1 + T_SS|, which equals kappa_M / kappa at any drive.
    """
    t = T.t
    gain = abs(t[I, I])
    if gain < 1.0 - tol:
        raise InvariantViolation(f"|T_II| = {gain!r} < 1: not a Bogoliubov matrix")
    r = math.acosh(max(gain, 1.0))

    ratio_floor = 1e-300
    if abs(t[I, S]) > ratio_floor and abs(t[S, I]) > ratio_floor:
        theta1 = math.atan2(abs(t[I, M]), abs(t[I, S]))
        theta2 = math.atan2(abs(t[M, I]), abs(t[S, I]))
    else:
        denom = abs(1.0 + t[S, S])
        tan_sq = abs(1.0 - t[M, M]) / denom if denom > 0 else 0.0
        theta1 = theta2 = math.atan(math.sqrt(tan_sq))
    return CircuitDecomposition(r=r, theta1=theta1, theta2=theta2)
