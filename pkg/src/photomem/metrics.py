"""Frequency-resolved and integrated figures of merit.

Each detuning w pairs the signal/memory mode at +w with the idler mode at -w,
and different frequency modes are independent, so rates are
(1/2pi) * integral over w of the per-mode quantity.
"""

from __future__ import annotations

import dataclasses
import enum
import warnings

import numpy as np

from . import gaussian
from .model import TWO_PI, SystemParams, check_stable, memory_port_rate
from .quadrature import Integral, QuadratureError, integrate_real_line
from .scattering import I, M, S, scattering_array, scattering_matrix

RTOL = 1e-6
ATOL_FLOOR = 1e-12
NEAR_THRESHOLD = 0.99


class Which(str, enum.Enum):
    IDLER_MEMORY = "idler_memory"
    MEMORY_VS_BOTH = "memory_vs_both"


class Port(str, enum.Enum):
    IDLER = "idler"
    SIGNAL = "signal"
    MEMORY = "memory"


class DegenerateInputError(ValueError):
    pass


class MemoryDecoupledWarning(UserWarning):
    pass


@dataclasses.dataclass(frozen=True)
class EntanglementSpectrum:
    omegas: np.ndarray
    ef_idler_memory: np.ndarray | None
    ef_memory_vs_both: np.ndarray | None
    n_idler: np.ndarray
    n_memory: np.ndarray


class Rate(Integral):
    """Integral result; ``value`` and ``error`` are rates (per unit time)."""


def occupations(t: np.ndarray) -> dict[Port, np.ndarray]:
    p = np.abs(t) ** 2
    return {
        Port.IDLER: p[..., I, S] + p[..., I, M],
        Port.SIGNAL: p[..., S, I],
        Port.MEMORY: p[..., M, I],
    }


def idler_memory_ebits(t: np.ndarray) -> np.ndarray:
    """EoF of the reduced idler-memory state for an array of scattering matrices.

    The reduced state has <a_I a_M> = conj(T_II) T_MI as its only correlation,
    so its standard form is a = 2 n_I + 1, b = 2 n_M + 1, c1 = -c2 = 2|T_II T_MI|.
    Its symplectic spectrum is {1, 2 n_S + 1} (the rest of a pure state), so the
    rank-one branch applies.
    """
    occ = occupations(t)
    a = 2.0 * occ[Port.IDLER] + 1.0
    b = 2.0 * occ[Port.MEMORY] + 1.0
    c = 2.0 * np.abs(t[..., I, I]) * np.abs(t[..., M, I])
    return gaussian.eof_standard_form(a, b, c, -c, rank_one=True)


def memory_vs_both_ebits(t: np.ndarray) -> np.ndarray:
    """Pure-state entropy of the memory mode."""
    return gaussian.g_entropy(2.0 * occupations(t)[Port.MEMORY] + 1.0)


_MEASURES = {
    Which.IDLER_MEMORY: idler_memory_ebits,
    Which.MEMORY_VS_BOTH: memory_vs_both_ebits,
}


def ef_spectrum(params: SystemParams, omega_grid, which: Which | None = None) -> EntanglementSpectrum:
    """Per-mode entanglement on a grid, computed state by state from the covariance."""
    check_stable(params)
    omegas = np.asarray(omega_grid, dtype=float)
    wanted = set(Which) if which is None else {Which(which)}
    ef_im = np.zeros(omegas.shape) if Which.IDLER_MEMORY in wanted else None
    ef_mb = np.zeros(omegas.shape) if Which.MEMORY_VS_BOTH in wanted else None
    n_i = np.zeros(omegas.shape)
    n_m = np.zeros(omegas.shape)
    for k, w in np.ndenumerate(omegas):
        cov = gaussian.covariance_from_scattering(scattering_matrix(params, w))
        n_i[k] = cov.occupation(I)
        n_m[k] = cov.occupation(M)
        if ef_im is not None:
            ef_im[k] = gaussian.eof_two_mode(gaussian.reduce(cov, [I, M])).ebits
        if ef_mb is not None:
            ef_mb[k] = gaussian.entropy_of_entanglement(cov, [M])
    return EntanglementSpectrum(omegas, ef_im, ef_mb, n_i, n_m)


def _breakpoints(params: SystemParams, lam_c: float) -> list[float]:
    if params.lam <= NEAR_THRESHOLD * lam_c:
        return []
    gap = lam_c - params.lam
    return [s * f * gap for f in (1.0, 10.0) for s in (-1.0, 1.0)]


def _integrate(params: SystemParams, integrand, rtol: float) -> Integral:
    lam_c = check_stable(params)
    scale = max(params.kappa, params.gamma_inh)
    try:
        return integrate_real_line(
            integrand,
            scale=scale,
            rtol=rtol,
            atol=ATOL_FLOOR * params.kappa,
            breakpoints=_breakpoints(params, lam_c),
        )
    except QuadratureError as exc:
        raise QuadratureError(f"{exc} for {params}", exc.value, exc.error, exc.panels) from None


def entanglement_rate(params: SystemParams, which: Which = Which.IDLER_MEMORY, rtol: float = RTOL) -> Rate:
    """Entanglement rate in ebits per unit time."""
    check_stable(params)
    if params.lam == 0.0 or params.g_coll == 0.0:
        return Rate(0.0, 0.0, 0)
    measure = _MEASURES[Which(which)]
    res = _integrate(params, lambda w: measure(scattering_array(params, w)), rtol)
    return Rate(res.value / TWO_PI, res.error / TWO_PI, res.evaluations)


def photon_flux(params: SystemParams, port: Port, rtol: float = RTOL) -> Rate:
    """Output photons per unit time leaving ``port``."""
    check_stable(params)
    port = Port(port)
    if params.lam == 0.0 or (port is Port.MEMORY and params.g_coll == 0.0):
        return Rate(0.0, 0.0, 0)
    res = _integrate(params, lambda w: occupations(scattering_array(params, w))[port], rtol)
    return Rate(res.value / TWO_PI, res.error / TWO_PI, res.evaluations)


def heralding_efficiency(params: SystemParams, rtol: float = RTOL) -> float:
    """Ratio of non-zero memory excitation to non-zero idler output.

    Both integrals use the probability of a non-empty mode, n / (1 + n).
    """
    check_stable(params)
    if params.lam == 0.0:
        raise DegenerateInputError(
            "heralding efficiency is 0/0 without drive; "
            "use heralding_efficiency_weak_drive for the limit"
        )
    if params.g_coll == 0.0:
        warnings.warn("memory decoupled (G = 0): no memory excitation", MemoryDecoupledWarning)
        return 0.0

    def integrand(w):
        occ = occupations(scattering_array(params, w))
        n_m, n_i = occ[Port.MEMORY], occ[Port.IDLER]
        return np.stack([n_m / (1.0 + n_m), n_i / (1.0 + n_i)], axis=-1)

    num, den = _integrate(params, integrand, rtol).value
    if den == 0.0:
        # Occupations underflowed; the ratio is continuous onto its weak-drive limit.
        return heralding_efficiency_weak_drive(params, rtol)
    return float(num / den)


def heralding_efficiency_weak_drive(params: SystemParams, rtol: float = RTOL) -> float:
    """Limit of the heralding efficiency as the drive vanishes.

    To leading order in lambda, n_M = lambda^2 kappa kappa_M |chi_I chi_S|^2 and
    n_I = lambda^2 kappa (kappa + kappa_M) |chi_I chi_S|^2.
    """
    base = params.replace(lam=0.0)
    if base.g_coll == 0.0:
        return 0.0
    half = 0.5 * base.kappa

    def integrand(w):
        k_m = memory_port_rate(w, base)
        sigma = base.g_eff**2 / (0.5 * base.gamma_inh - 1j * w)
        weight = 1.0 / (np.abs(-1j * w + half) ** 2 * np.abs(-1j * w + half + sigma) ** 2)
        return np.stack([k_m * weight, (base.kappa + k_m) * weight], axis=-1)

    num, den = _integrate(base, integrand, rtol).value
    return float(num / den)


def photons_per_time_bin(params: SystemParams, port: Port = Port.IDLER) -> float:
    """Mean photon number in a time bin of width 1/kappa."""
    return photon_flux(params, port).value / params.kappa
