"""Brute-force check of the analytic scattering matrix.

The memory continuum is replaced by N discrete modes at the midpoints of
uniform bins on [-W, W], each with coupling g_k = G sqrt(s rho(w_k) dw) and a
small damping eps into its own bath. At detuning w the steady state solves

    (-iw + k/2) c   - i lam a      = sqrt(k) b_I^dagger
    (-iw + k/2) a   + i lam c + i sum_k g_k m_k = sqrt(k) b_S
    (i(w_k - w) + eps) m_k + i g_k a = sqrt(2 eps) f_k

with c the idler conjugate. The signal couples to the baths only through the
collective combination sum_k w_k f_k, so projecting the bath input onto
conj(w)/|w| and the bath output onto w/|w| closes the problem on three ports.
Results at several eps are Richardson-extrapolated to eps -> 0.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np

from .model import ParameterError, SystemParams, check_stable
from .scattering import I, M, S, ScatteringMatrix

MIN_MODES = 10
MIN_WINDOW = 5.0  # in units of gamma_inh
MAX_SPACING = 0.1  # in units of kappa
SINGULAR_COND = 1e13


class OracleConfigError(ParameterError):
    pass


class PoleCollisionWarning(RuntimeWarning):
    pass


@dataclasses.dataclass(frozen=True)
class OracleConfig:
    """Discretization of the memory ensemble.

    ``window`` defaults to 20 gamma_inh. The damping ladder is
    eps_j = regularization + j * ladder_step for j < extrapolation_levels, in
    units of the mode spacing dw. Below about 1.5 dw the discrete sum aliases
    (relative error ~ 2 exp(-2 pi eps / dw)); far above it the polynomial
    extrapolation runs into the radius gamma_inh / 2 of the eps expansion.
    """

    n_memory_modes: int = 400
    window: float | None = None
    regularization: float = 1.5
    extrapolation_levels: int = 4
    ladder_step: float = 0.5
    window_factor: float = 20.0

    def resolve(self, params: SystemParams) -> "ResolvedConfig":
        window = self.window if self.window is not None else self.window_factor * params.gamma_inh
        spacing = 2.0 * window / self.n_memory_modes
        eps = self.regularization * spacing
        if self.n_memory_modes < MIN_MODES:
            raise OracleConfigError(f"need at least {MIN_MODES} memory modes, got {self.n_memory_modes}")
        if window < MIN_WINDOW * params.gamma_inh * (1.0 - 1e-12):
            raise OracleConfigError(
                f"window {window!r} is below {MIN_WINDOW} * gamma_inh = {MIN_WINDOW * params.gamma_inh!r}"
            )
        if spacing > MAX_SPACING * params.kappa * (1.0 + 1e-12):
            raise OracleConfigError(
                f"mode spacing {spacing!r} exceeds {MAX_SPACING} * kappa = {MAX_SPACING * params.kappa!r}"
            )
        if eps <= 0:
            raise OracleConfigError(f"regularization must be positive, got {eps!r}")
        if self.extrapolation_levels < 1:
            raise OracleConfigError("need at least one extrapolation level")
        if self.extrapolation_levels > 1 and self.ladder_step <= 0:
            raise OracleConfigError(f"ladder step must be positive, got {self.ladder_step!r}")
        step = self.ladder_step * spacing
        ladder = tuple(eps + j * step for j in range(self.extrapolation_levels))
        return ResolvedConfig(self.n_memory_modes, window, spacing, ladder)


@dataclasses.dataclass(frozen=True)
class ResolvedConfig:
    n_memory_modes: int
    window: float
    spacing: float
    eps_ladder: tuple[float, ...]


@dataclasses.dataclass(frozen=True)
class DiscretizedModel:
    params: SystemParams
    frequencies: np.ndarray
    couplings: np.ndarray
    config: ResolvedConfig

    @property
    def captured_mass(self) -> float:
        """Riemann sum of s rho over the window (sum g_k^2 / G^2)."""
        if self.params.g_coll == 0.0:
            return float(np.sum(self.params.spectral_density(self.frequencies)) * self.config.spacing)
        return float(np.sum(self.couplings**2) / self.params.g_coll**2)

    def generator(self, omega: float, eps: float) -> np.ndarray:
        """Matrix of the steady-state equations, unknowns (c, a, m_1..m_N)."""
        p = self.params
        n = self.frequencies.size
        a = np.zeros((n + 2, n + 2), dtype=complex)
        a[0, 0] = a[1, 1] = -1j * omega + 0.5 * p.kappa
        a[0, 1] = -1j * p.lam
        a[1, 0] = 1j * p.lam
        a[1, 2:] = 1j * self.couplings
        a[2:, 1] = 1j * self.couplings
        idx = np.arange(2, n + 2)
        a[idx, idx] = 1j * (self.frequencies - omega) + eps
        return a


def build_discretized_model(params: SystemParams, cfg: OracleConfig = OracleConfig()) -> DiscretizedModel:
    resolved = cfg.resolve(params)
    n, dw = resolved.n_memory_modes, resolved.spacing
    freqs = -resolved.window + dw * (np.arange(n) + 0.5)
    g = params.g_coll * np.sqrt(params.spectral_density(freqs) * dw)
    return DiscretizedModel(params, freqs, g, resolved)


def _richardson(values: np.ndarray, eps: tuple[float, ...]) -> np.ndarray:
    """Polynomial extrapolation to eps = 0 (Neville), along the first axis."""
    table = [np.asarray(v) for v in values]
    x = np.asarray(eps)
    for level in range(1, len(table)):
        table = [
            (x[j + level] * table[j] - x[j] * table[j + 1]) / (x[j + level] - x[j])
            for j in range(len(table) - 1)
        ]
    return table[0]


def _solve(model: DiscretizedModel, omega: float, eps: float) -> np.ndarray:
    p = model.params
    a = model.generator(omega, eps)
    if np.linalg.cond(a) > SINGULAR_COND:
        raise np.linalg.LinAlgError("near-singular steady-state system")
    n = model.frequencies.size
    # Collective bath mode seen by the signal.
    w = -1j * model.couplings * math.sqrt(2.0 * eps) / (1j * (model.frequencies - omega) + eps)
    norm = float(np.linalg.norm(w))
    coupled = norm > 0.0
    x = np.conj(w) / norm if coupled else np.zeros(n)
    y = w / norm if coupled else np.zeros(n)

    rhs = np.zeros((n + 2, 3), dtype=complex)
    rhs[0, I] = math.sqrt(p.kappa)
    rhs[1, S] = math.sqrt(p.kappa)
    rhs[2:, M] = math.sqrt(2.0 * eps) * x
    sol = np.linalg.solve(a, rhs)

    t = np.empty((3, 3), dtype=complex)
    t[I] = math.sqrt(p.kappa) * sol[0]
    t[S] = math.sqrt(p.kappa) * sol[1]
    t[I, I] -= 1.0
    t[S, S] -= 1.0
    if coupled:
        bath_out = math.sqrt(2.0 * eps) * sol[2:]
        bath_out[:, M] -= x
        t[M] = np.conj(y) @ bath_out
    else:
        t[M] = (0.0, 0.0, 1.0)
    return t


def linear_response_scattering(
    model: DiscretizedModel, omega: float, cfg: OracleConfig | None = None
) -> ScatteringMatrix:
    """Oracle T(w) from direct solves of the discretized model.

    ``cfg`` is accepted for symmetry with ``build_discretized_model``; the
    eps ladder stored on the model is what is used.
    """
    check_stable(model.params)
    ladder = model.config.eps_ladder
    try:
        ts = [_solve(model, omega, eps) for eps in ladder]
    except np.linalg.LinAlgError:
        shifted = omega + 0.5 * model.config.spacing
        warnings.warn(
            f"steady-state system singular at omega={omega!r}; shifted to {shifted!r}",
            PoleCollisionWarning,
        )
        omega = shifted
        ts = [_solve(model, omega, eps) for eps in ladder]
    return ScatteringMatrix(omega, _richardson(np.array(ts), ladder))


def oracle_self_energy(model: DiscretizedModel, omega) -> np.ndarray:
    """sum_k g_k^2 / (eps + i(w_k - w)), extrapolated to eps -> 0."""
    omega = np.asarray(omega, dtype=float)
    ladder = model.config.eps_ladder
    g2 = model.couplings**2
    vals = [
        np.sum(g2 / (eps + 1j * (model.frequencies - omega[..., None])), axis=-1) for eps in ladder
    ]
    out = _richardson(np.array(vals), ladder)
    return out if out.ndim else complex(out)


def output_moments(t) -> dict[str, float]:
    """Phase-invariant vacuum-input second moments of the output modes.

    Keys are n_I, n_S, n_M (occupations) and |<a_u a_v>| / |<a_u^dag a_v>| for
    each pair, written as e.g. "|IM|" and "|I*M|".
    """
    t = np.asarray(t.t if isinstance(t, ScatteringMatrix) else t)
    a = np.array([[np.conj(t[0, 0]), 0, 0], [0, t[1, 1], t[1, 2]], [0, t[2, 1], t[2, 2]]])
    b = np.array([[0, np.conj(t[0, 1]), np.conj(t[0, 2])], [t[1, 0], 0, 0], [t[2, 0], 0, 0]])
    anomalous = a @ b.T  # <a_u a_v>
    normal = np.conj(b) @ b.T  # <a_u^dag a_v>
    names = "ISM"
    out = {f"n_{names[u]}": float(normal[u, u].real) for u in range(3)}
    for u in range(3):
        for v in range(u + 1, 3):
            out[f"|{names[u]}{names[v]}|"] = float(abs(anomalous[u, v]))
            out[f"|{names[u]}*{names[v]}|"] = float(abs(normal[u, v]))
    return out


def max_relative_discrepancy(reference: dict[str, float], other: dict[str, float], floor: float = 1e-12) -> float:
    """Largest |x - y| / max(|x|, floor) relative to the overall scale of the entries."""
    scale = max(max(abs(v) for v in reference.values()), floor)
    worst = 0.0
    for key, ref in reference.items():
        denom = max(abs(ref), 1e-3 * scale, floor)
        worst = max(worst, abs(other[key] - ref) / denom)
    return worst
