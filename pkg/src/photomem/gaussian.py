"""Covariance-matrix algebra for Gaussian states.

Quadratures are interleaved (x1, p1, x2, p2, ...) with x = a + a^dagger and
p = -i(a - a^dagger), so the vacuum covariance is the identity and a thermal
mode with occupation n has symplectic eigenvalue 2n + 1.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Sequence

import numpy as np

from .scattering import InvariantViolation, ScatteringMatrix, bogoliubov_residuals

PHYSICAL_TOL = 1e-9
SYMMETRIC_TOL = 1e-12
IMBALANCE_TOL = 1e-6
PPT_TOL = 1e-12  # nu_- within this of 1 counts as separable
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class UnphysicalStateError(ValueError):
    pass


class Method(str, enum.Enum):
    EXACT_SYMMETRIC = "ExactSymmetric"
    BOUND_GENERAL = "BoundGeneral"
    PURE_STATE_ENTROPY = "PureStateEntropy"


@dataclasses.dataclass(frozen=True)
class CovarianceMatrix:
    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
            raise ValueError(f"covariance must be 2n x 2n, got shape {sigma.shape}")
        scale = max(1.0, float(np.max(np.abs(sigma))))
        if np.max(np.abs(sigma - sigma.T)) > SYMMETRIC_TOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n_modes(self) -> int:
        return self.sigma.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        return self.sigma[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]

    def occupation(self, mode: int) -> float:
        """Mean photon number of ``mode`` (zero displacement assumed)."""
        return 0.25 * (float(np.trace(self.block(mode, mode))) - 2.0)


@dataclasses.dataclass(frozen=True)
class EntanglementResult:
    ebits: float
    method: Method
    log_negativity: float
    imbalance: float


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def vacuum(n_modes: int) -> CovarianceMatrix:
    return CovarianceMatrix(np.eye(2 * n_modes))


def thermal(n_bar: float) -> CovarianceMatrix:
    return CovarianceMatrix((2.0 * n_bar + 1.0) * np.eye(2))


def two_mode_squeezed_vacuum(r: float) -> CovarianceMatrix:
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return CovarianceMatrix(np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]]))


def bogoliubov_symplectic(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Real symplectic matrix of the map a_out = A a_in + B a_in^dagger."""
    n = a.shape[0]
    plus, minus = a + b, a - b
    blocked = np.block([[plus.real, -minus.imag], [plus.imag, minus.real]])
    perm = np.empty(2 * n, dtype=int)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n, 2 * n)
    return blocked[np.ix_(perm, perm)]


def covariance_from_scattering(T: ScatteringMatrix, tol: float = 1e-8) -> CovarianceMatrix:
    """Three-mode (I, S, M) output covariance for vacuum/ground-state inputs."""
    t = T.t
    scale = max(1.0, float(np.max(np.abs(t)) ** 2))
    if np.max(np.abs(bogoliubov_residuals(t))) > tol * scale:
        raise InvariantViolation("scattering matrix violates the Bogoliubov identities")
    # Output annihilation operators in terms of input annihilation/creation.
    a = np.array(
        [
            [np.conj(t[0, 0]), 0, 0],
            [0, t[1, 1], t[1, 2]],
            [0, t[2, 1], t[2, 2]],
        ]
    )
    b = np.array(
        [
            [0, np.conj(t[0, 1]), np.conj(t[0, 2])],
            [t[1, 0], 0, 0],
            [t[2, 0], 0, 0],
        ]
    )
    s = bogoliubov_symplectic(a, b)
    return CovarianceMatrix(s @ s.T)


def reduce(cov: CovarianceMatrix, modes: Sequence[int]) -> CovarianceMatrix:
    """Partial trace: keep the quadrature pairs of ``modes``."""
    modes = list(modes)
    if not modes:
        raise ValueError("mode subset must be nonempty")
    if len(set(modes)) != len(modes) or any(m < 0 or m >= cov.n_modes for m in modes):
        raise IndexError(f"bad mode subset {modes} for a {cov.n_modes}-mode state")
    idx = [2 * m + q for m in modes for q in (0, 1)]
    return CovarianceMatrix(cov.sigma[np.ix_(idx, idx)])


def symplectic_eigenvalues(cov: CovarianceMatrix, tol: float = PHYSICAL_TOL) -> np.ndarray:
    """Williamson spectrum, sorted descending."""
    n = cov.n_modes
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov.sigma)
    nu = np.sort(np.abs(ev))[::-1]
    nu = 0.5 * (nu[0::2] + nu[1::2])
    if nu[-1] < 1.0 - tol:
        raise UnphysicalStateError(f"symplectic eigenvalue {nu[-1]!r} < 1")
    return nu


def g_entropy(nu):
    """Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue nu."""
    nu = np.maximum(np.asarray(nu, dtype=float), 1.0)
    plus, minus = 0.5 * (nu + 1.0), 0.5 * (nu - 1.0)
    safe = np.where(minus > 0, minus, 1.0)
    out = plus * np.log2(plus) - np.where(minus > 0, minus * np.log2(safe), 0.0)
    return out if out.ndim else float(out)


def tms_entanglement(r):
    """Entanglement (bits) of a two-mode squeezed vacuum with parameter r."""
    return g_entropy(np.cosh(2.0 * np.asarray(r, dtype=float)))


def entropy_of_entanglement(
    cov: CovarianceMatrix, partition: Sequence[int], tol: float = 1e-8
) -> float:
    """Entropy of the reduced state on ``partition`` for a globally pure state."""
    nu_global = symplectic_eigenvalues(cov)
    if np.max(np.abs(nu_global - 1.0)) > tol * max(1.0, float(np.max(cov.sigma))):
        raise UnphysicalStateError(
            "entropy of entanglement needs a pure global state; "
            f"symplectic spectrum {nu_global}"
        )
    return float(np.sum(g_entropy(symplectic_eigenvalues(reduce(cov, partition)))))


def _check_two_mode(cov: CovarianceMatrix):
    if cov.n_modes != 2:
        raise ValueError(f"expected a two-mode state, got {cov.n_modes} modes")


def pt_min_eigenvalue(cov: CovarianceMatrix) -> float:
    """Smaller symplectic eigenvalue of the partial transpose."""
    return float(_pt_min_standard(*standard_form(cov)))


def log_negativity(cov: CovarianceMatrix) -> float:
    nu = pt_min_eigenvalue(cov)
    if nu >= 1.0 - PPT_TOL:
        return 0.0
    return -math.log2(nu) if nu > 0 else math.inf


def standard_form(cov: CovarianceMatrix) -> tuple[float, float, float, float]:
    """Local-symplectic invariants (a, b, c1, c2) with c1 >= |c2|.

    The state is locally equivalent to [[a I, diag(c1, c2)], [diag(c1, c2), b I]].
    """
    _check_two_mode(cov)

    def whiten(block):
        # sqrt(det) * block^(-1/2) is symplectic and maps block to sqrt(det) * I.
        w, v = np.linalg.eigh(block)
        root_det = math.sqrt(w[0] * w[1])
        return root_det, math.sqrt(root_det) * (v / np.sqrt(w)) @ v.T

    a, sa = whiten(cov.block(0, 0))
    b, sb = whiten(cov.block(1, 1))
    corr = sa @ cov.block(0, 1) @ sb.T
    sv = np.linalg.svd(corr, compute_uv=False)
    c2 = math.copysign(float(sv[1]), float(np.linalg.det(corr))) if sv[1] > 0 else 0.0
    return a, b, float(sv[0]), c2


def imbalance(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    denom = a + b - 2.0
    out = np.where(denom > 1e-300, np.abs(a - b) / np.where(denom > 1e-300, denom, 1.0), 0.0)
    return out if out.ndim else float(out)


def _pt_min_standard(a, b, c1, c2):
    # nu^2 are the eigenvalues of X P~ with X = [[a, c1], [c1, b]] and
    # P~ = [[a, -c2], [-c2, b]]. The discriminant is written from the entries so
    # nearly degenerate spectra (product states) keep full precision.
    half_gap = 0.5 * (a * a - b * b)
    off = (b * c1 - a * c2) * (a * c1 - b * c2)
    mean = 0.5 * (a * a + b * b) - c1 * c2
    big = mean + np.sqrt(np.maximum(half_gap**2 + off, 0.0))
    det = (a * b - c1**2) * (a * b - c2**2)
    return np.sqrt(np.maximum(det, 0.0) / np.where(big > 0, big, 1.0))


def eof_symmetric(a, c1, c2):
    """Exact EoF of a symmetric (a = b) two-mode Gaussian state in standard form."""
    nu = np.sqrt(np.maximum((a - np.abs(c1)) * (a - np.abs(c2)), 0.0))
    nu = np.minimum(nu, 1.0)
    # e^{-2r} = nu for the optimal two-mode squeezed vacuum.
    return tms_entanglement(-0.5 * np.log(np.where(nu > 0, nu, np.finfo(float).tiny)))


def _segment_min_corr_sq(y11, y12, y22, m11, m12, m22):
    """min over s in [0, 1] of rho^2(Y + s M); the stationarity condition is linear in s."""
    lin = m12 * y11 * m22 + m12 * m11 * y22 - 2.0 * m11 * m22 * y12
    const = 2.0 * m12 * y11 * y22 - m11 * y12 * y22 - m22 * y12 * y11
    with np.errstate(divide="ignore", invalid="ignore"):
        s_star = np.where(lin != 0, -const / np.where(lin != 0, lin, 1.0), 0.0)
    s_star = np.clip(s_star, 0.0, 1.0)
    best = None
    for s in (np.zeros_like(y11), np.ones_like(y11), s_star):
        g12 = y12 + s * m12
        val = g12 * g12 / ((y11 + s * m11) * (y22 + s * m22))
        best = val if best is None else np.minimum(best, val)
    return best


def _angle_corr_sq(theta, y11, y12, y22, h11, h12, h22):
    """rho^2 of Gamma = P^-1 + q q^T with q = (X - P^-1)^(1/2) (-sin t, cos t)."""
    cos, sin = np.cos(theta), np.sin(theta)
    q1 = -h11 * sin + h12 * cos
    q2 = -h12 * sin + h22 * cos
    g12 = y12 + q1 * q2
    return g12 * g12 / ((y11 + q1 * q1) * (y22 + q2 * q2))


def _angle_min_corr_sq(y11, y12, y22, m11, m12, m22, root_det, grid, xtol):
    norm = np.sqrt(m11 + m22 + 2.0 * root_det)
    h = ((m11 + root_det) / norm, m12 / norm, (m22 + root_det) / norm)
    coeffs = (y11, y12, y22) + h
    thetas = np.linspace(0.0, np.pi, grid, endpoint=False)
    values = _angle_corr_sq(thetas[None, :], *(c[:, None] for c in coeffs))
    k = np.argmin(values, axis=1)
    step = np.pi / grid
    lo, hi = thetas[k] - step, thetas[k] + step

    # Vectorized golden-section search on each bracket.
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = _angle_corr_sq(x1, *coeffs)
    f2 = _angle_corr_sq(x2, *coeffs)
    while np.max(hi - lo) > xtol:
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x2n = np.where(left, x1, lo + _GOLDEN * (hi - lo))
        x1n = np.where(left, hi - _GOLDEN * (hi - lo), x2)
        x1, x2 = x1n, x2n
        fn = _angle_corr_sq(np.where(left, x1, x2), *coeffs)
        f1, f2 = np.where(left, fn, f2), np.where(left, f1, fn)
    return np.minimum(np.minimum(f1, f2), values.min(axis=1))


def eof_standard_form(
    a, b, c1, c2, grid: int = 64, xtol: float = 1e-10, rank_tol: float = 1e-12, rank_one: bool | None = None
):
    """Gaussian entanglement of formation from standard-form parameters (vectorized).

    The optimal pure state below sigma has an x-block Gamma with
    P^-1 <= Gamma <= X (X, P the x- and p-blocks of sigma), and its entanglement
    is g(1/sqrt(1 - rho^2)) with rho the correlation coefficient of Gamma. The
    minimum sits where Gamma touches both bounds: Gamma = P^-1 + q q^T with
    q q^T <= M = X - P^-1. For rank-one M (mixed reductions of pure three-mode
    states) that is the segment P^-1 + s M, minimized in closed form; otherwise
    q = M^(1/2) (-sin t, cos t) and t is found by a grid scan and golden section.

    det M = (nu_1^2 - 1)(nu_2^2 - 1) / det P, so M has rank one exactly when a
    symplectic eigenvalue is 1. Callers that know this (``rank_one=True``) skip
    the numerical test, which loses precision for weakly occupied modes.
    """
    a, b, c1, c2 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c1, c2)))
    shape = a.shape
    a, b, c1, c2 = (v.ravel() for v in (a, b, c1, c2))
    out = np.zeros(a.shape)

    entangled = _pt_min_standard(a, b, c1, c2) < 1.0 - PPT_TOL
    if np.any(entangled):
        a, b, c1, c2 = a[entangled], b[entangled], c1[entangled], c2[entangled]
        det_p = a * b - c2**2
        y11, y12, y22 = b / det_p, -c2 / det_p, a / det_p
        m11, m12, m22 = a - y11, c1 - y12, b - y22
        # det M = (det sigma - Delta + 1) / det P, Delta = a^2 + b^2 + 2 c1 c2.
        det_m = ((a * b - c1**2) * det_p - (a**2 + b**2 + 2.0 * c1 * c2) + 1.0) / det_p
        det_m = np.maximum(det_m, 0.0)
        if rank_one is None:
            rank_one = det_m <= rank_tol * (m11 + m22) ** 2
        else:
            rank_one = np.full(a.shape, bool(rank_one))
        rho_sq = np.empty(a.shape)
        if np.any(rank_one):
            sel = rank_one
            rho_sq[sel] = _segment_min_corr_sq(y11[sel], y12[sel], y22[sel], m11[sel], m12[sel], m22[sel])
        if not np.all(rank_one):
            sel = ~rank_one
            rho_sq[sel] = _angle_min_corr_sq(
                y11[sel], y12[sel], y22[sel], m11[sel], m12[sel], m22[sel],
                np.sqrt(det_m[sel]), grid, xtol,
            )
        rho_sq = np.clip(rho_sq, 0.0, np.nextafter(1.0, 0.0))
        out[entangled] = g_entropy(1.0 / np.sqrt(1.0 - rho_sq))
    return out.reshape(shape) if shape else float(out[0])


def eof_two_mode(cov: CovarianceMatrix) -> EntanglementResult:
    """Entanglement of formation of a two-mode Gaussian state."""
    _check_two_mode(cov)
    symplectic_eigenvalues(cov)
    a, b, c1, c2 = standard_form(cov)
    imb = imbalance(a, b)
    e_n = log_negativity(cov)
    if imb < IMBALANCE_TOL:
        ebits = float(eof_symmetric(0.5 * (a + b), c1, c2))
        method = Method.EXACT_SYMMETRIC
    else:
        ebits = float(eof_standard_form(a, b, c1, c2))
        method = Method.BOUND_GENERAL
    if e_n == 0.0:
        ebits = 0.0
    return EntanglementResult(ebits=ebits, method=method, log_negativity=e_n, imbalance=imb)
