"""Physical parameters, memory spectral density, self-energy and stability.

All rates are angular frequencies. The numerical unit is whatever the caller
chooses (rad/s from the config parser, or kappa = 1 for normalized runs); every
function here is homogeneous of degree one in the rates.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import math

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * math.pi

# Stability scan: |omega| <= SCAN_SPAN * max(kappa, gamma, G_eff) on SCAN_POINTS samples.
SCAN_SPAN = 20.0
SCAN_POINTS = 4001


class MemoryModel(str, enum.Enum):
    LORENTZIAN = "lorentzian"
    AFC_EFFECTIVE = "afc"


class ParameterError(ValueError):
    """Raised for parameters outside their physical domain."""


class InstabilityError(ValueError):
    """The parametric drive is at or above the instability threshold."""

    def __init__(self, lam: float, lambda_crit: float):
        self.lam = lam
        self.lambda_crit = lambda_crit
        super().__init__(
            f"lambda={lam:.6g} is not below the instability threshold "
            f"lambda_crit={lambda_crit:.6g}"
        )


AFC_SCALING_LAW = "G_eff^2 = G^2 / F_AFC (uniform density rescale 1/F_AFC)"


@dataclasses.dataclass(frozen=True)
class SystemParams:
    """Rates of the pumped two-mode cavity coupled to an ensemble memory.

    ``g_coll`` is the bare collective coupling. ``density_scale`` multiplies the
    memory spectral density (1 for a plain Lorentzian ensemble, 1/F_AFC for an
    atomic frequency comb), so the coupling the cavity actually sees is
    :attr:`g_eff`.
    """

    kappa: float
    lam: float
    g_coll: float
    gamma_inh: float
    memory_model: MemoryModel = MemoryModel.LORENTZIAN
    density_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "memory_model", MemoryModel(self.memory_model))
        for name in ("kappa", "gamma_inh"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive, got {value!r}")
        for name in ("lam", "g_coll"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ParameterError(f"{name} must be non-negative, got {value!r}")
        if not (0 < self.density_scale <= 1):
            raise ParameterError(
                f"density_scale must lie in (0, 1], got {self.density_scale!r}"
            )
        if self.memory_model is MemoryModel.LORENTZIAN and self.density_scale != 1.0:
            raise ParameterError("a plain Lorentzian memory has density_scale = 1")

    @property
    def g_eff(self) -> float:
        return self.g_coll * math.sqrt(self.density_scale)

    @property
    def cooperativity(self) -> float:
        """Effective cooperativity 4 G_eff^2 / (kappa Gamma)."""
        return 4.0 * self.g_eff**2 / (self.kappa * self.gamma_inh)

    @property
    def bare_cooperativity(self) -> float:
        return 4.0 * self.g_coll**2 / (self.kappa * self.gamma_inh)

    @property
    def spectral_density(self) -> SpectralDensity:
        return SpectralDensity(
            kind=self.memory_model,
            gamma_inh=self.gamma_inh,
            density_scale=self.density_scale,
        )

    def replace(self, **changes) -> SystemParams:
        return dataclasses.replace(self, **changes)

    def scaled(self, s: float) -> SystemParams:
        """All rates multiplied by ``s`` (a change of time unit)."""
        return self.replace(
            kappa=self.kappa * s,
            lam=self.lam * s,
            g_coll=self.g_coll * s,
            gamma_inh=self.gamma_inh * s,
        )

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["memory_model"] = self.memory_model.value
        return d


@dataclasses.dataclass(frozen=True)
class AfcParams:
    """Atomic frequency comb. ``comb_spacing`` and ``tooth_width`` are angular."""

    finesse: float
    comb_spacing: float
    tooth_width: float | None = None

    def __post_init__(self):
        if not self.finesse >= 1:
            raise ParameterError(f"AFC finesse must be >= 1, got {self.finesse!r}")
        if not self.comb_spacing > 0:
            raise ParameterError("AFC comb spacing must be positive")
        if self.tooth_width is None:
            object.__setattr__(self, "tooth_width", self.comb_spacing / self.finesse)
        elif abs(self.comb_spacing / self.tooth_width - self.finesse) > 1e-12 * self.finesse:
            raise ParameterError(
                "AFC finesse must equal comb_spacing / tooth_width "
                f"({self.comb_spacing / self.tooth_width:.12g} != {self.finesse:.12g})"
            )

    @property
    def storage_time(self) -> float:
        # T_M = 1/Delta with Delta an ordinary frequency.
        return TWO_PI / self.comb_spacing


@dataclasses.dataclass(frozen=True)
class SpectralDensity:
    kind: MemoryModel
    gamma_inh: float
    density_scale: float = 1.0

    def __call__(self, omega):
        return self.density_scale * lorentzian_density(omega, self.gamma_inh)

    @property
    def total_mass(self) -> float:
        return self.density_scale


def lorentzian_density(omega, gamma_inh: float):
    """Normalized Lorentzian with FWHM ``gamma_inh``."""
    if not gamma_inh > 0:
        raise ParameterError(f"inhomogeneous linewidth must be positive, got {gamma_inh!r}")
    omega = np.asarray(omega, dtype=float)
    out = (gamma_inh / TWO_PI) / (omega**2 + 0.25 * gamma_inh**2)
    return out if out.ndim else float(out)


def memory_self_energy(omega, g_coll: float, spectral_density: SpectralDensity):
    """Self-energy of the signal mode after eliminating the memory continuum.

    For the (scaled) Lorentzian, G^2 * int rho(w') / (i(w' - w) + 0+) dw'
    evaluates to G^2 s / (Gamma/2 - i w).
    """
    omega = np.asarray(omega, dtype=float)
    g2 = g_coll**2 * spectral_density.density_scale
    out = g2 / (0.5 * spectral_density.gamma_inh - 1j * omega)
    return out if out.ndim else complex(out)


def memory_port_rate(omega, params: SystemParams):
    """Structured memory-port rate kappa_M(w) = 2 pi G^2 rho(w)."""
    return TWO_PI * params.g_coll**2 * params.spectral_density(omega)


def susceptibilities(params: SystemParams, omega):
    """Return (chi_I, chi_S, D) at detuning(s) ``omega``."""
    omega = np.asarray(omega, dtype=float)
    half = 0.5 * params.kappa
    chi_i = 1.0 / (-1j * omega + half)
    sigma = memory_self_energy(omega, params.g_coll, params.spectral_density)
    chi_s = 1.0 / (-1j * omega + half + sigma)
    d = 1.0 - params.lam**2 * chi_s * chi_i
    return chi_i, chi_s, d


def _denominator_product(params: SystemParams, omega):
    # D(w) = 0  <=>  lambda^2 = z_S(w) z_I(w)
    omega = np.asarray(omega, dtype=float)
    half = 0.5 * params.kappa
    sigma = memory_self_energy(omega, params.g_coll, params.spectral_density)
    return (-1j * omega + half + sigma) * (-1j * omega + half)


def threshold_closed_form(params: SystemParams) -> float:
    """(kappa/2) sqrt(1 + C): the resonant zero of D for a Lorentzian ensemble."""
    return 0.5 * params.kappa * math.sqrt(1.0 + params.cooperativity)


def threshold_analytic(kappa, gamma_inh, g_eff):
    """Exact Lorentzian threshold from both branches of Im(z_S z_I) = 0 (vectorized).

    With a = kappa/2, b = Gamma/2 the product z_S z_I is real at w = 0 and, when
    kappa > Gamma, also at w^2 = G^2 (a - b) / kappa - b^2. The second branch is
    the normal-mode-split regime where the first instability is off resonance.
    """
    kappa, gamma, g = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (kappa, gamma_inh, g_eff)))
    a, b = 0.5 * kappa, 0.5 * gamma
    resonant = a * a + g * g * a / b
    with np.errstate(divide="ignore", invalid="ignore"):
        w2 = g * g * (a - b) / kappa - b * b
        split = a * a - w2 + kappa * (a * b + w2) / (a - b)
    use = (w2 > 0) & (split > 0) & (split < resonant)
    lam2 = np.where(use, split, resonant)
    out = np.sqrt(lam2)
    return out if out.ndim else float(out)


def threshold_scan(params: SystemParams) -> tuple[float, float]:
    """Smallest drive with a real zero of D, and the detuning where it occurs.

    Real zeros of D need z_S z_I real and positive; those detunings are located
    as sign changes of Im(z_S z_I) on the scan grid and polished with Brent's
    method, and lambda is then root-found on Re D at each candidate.
    """
    span = SCAN_SPAN * max(params.kappa, params.gamma_inh, params.g_eff)
    # Linear samples plus log samples so that zeros far below the linear
    # spacing (kappa >> G, Gamma) are still bracketed.
    logs = np.geomspace(1e-6 * min(params.kappa, params.gamma_inh), span, SCAN_POINTS // 2)
    grid = np.unique(np.concatenate([np.linspace(-span, span, SCAN_POINTS), logs, -logs]))
    im = _denominator_product(params, grid).imag

    def im_at(w):
        return _denominator_product(params, w).imag

    candidates = {0.0}
    for i in np.flatnonzero(np.sign(im[:-1]) * np.sign(im[1:]) < 0):
        candidates.add(brentq(im_at, grid[i], grid[i + 1], xtol=1e-14 * span))
    for i in np.flatnonzero(im == 0.0):
        candidates.add(float(grid[i]))

    best_lam, best_omega = math.inf, 0.0
    for w in sorted(candidates, key=abs):
        prod = _denominator_product(params, w)
        if prod.real <= 0 or abs(prod.imag) > 1e-9 * abs(prod):
            continue
        lam = _root_find_drive(params, w, math.sqrt(prod.real))
        if lam < best_lam * (1 - 1e-12):
            best_lam, best_omega = lam, w
    return best_lam, best_omega


def _root_find_drive(params: SystemParams, omega: float, guess: float) -> float:
    def re_d(lam):
        return float(susceptibilities(params.replace(lam=lam), omega)[2].real)

    return brentq(re_d, 0.0, 2.0 * guess, xtol=1e-15 * guess, rtol=1e-15)


@functools.lru_cache(maxsize=4096)
def _cached_threshold(key: SystemParams) -> float:
    return threshold_scan(key)[0]


def stability_threshold(params: SystemParams) -> float:
    """Instability threshold lambda_crit (``params.lam`` is ignored)."""
    return _cached_threshold(params.replace(lam=0.0))


def check_stable(params: SystemParams) -> float:
    """Raise :class:`InstabilityError` unless the drive is below threshold."""
    lam_c = stability_threshold(params)
    if not params.lam < lam_c:
        raise InstabilityError(params.lam, lam_c)
    return lam_c


def afc_effective_params(params: SystemParams, afc: AfcParams) -> SystemParams:
    """Fold the comb finesse into a uniformly rescaled density (scale 1/F)."""
    if afc.finesse == 1:
        return params
    return params.replace(
        memory_model=MemoryModel.AFC_EFFECTIVE,
        density_scale=1.0 / afc.finesse,
    )
