import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photomem.metrics import (
    DegenerateInputError,
    MemoryDecoupledWarning,
    Port,
    Which,
    ef_spectrum,
    entanglement_rate,
    heralding_efficiency,
    heralding_efficiency_weak_drive,
    idler_memory_ebits,
    memory_vs_both_ebits,
    occupations,
    photon_flux,
    photons_per_time_bin,
)
from photomem.model import InstabilityError, SystemParams, stability_threshold
from photomem.scattering import scattering_array

from conftest import log_uniform, stable_params


def _dense_rate(p, measure, n=200001):
    u = np.linspace(-math.pi / 2, math.pi / 2, n)[1:-1]
    scale = max(p.kappa, p.gamma_inh)
    w = scale * np.tan(u)
    f = measure(scattering_array(p, w)) * scale / np.cos(u) ** 2
    return np.trapezoid(f, u) / (2 * math.pi)


@pytest.mark.parametrize(
    "p",
    [
        SystemParams(1.0, 0.5, 0.5, 1.0),
        SystemParams(1.0, 0.2, 2.0, 0.5),
        SystemParams(2.0, 0.9, 0.3, 3.0),
    ],
    ids=["c1", "strong", "wide"],
)
def test_rates_against_dense_trapezoid(p):
    for which, measure in ((Which.IDLER_MEMORY, idler_memory_ebits), (Which.MEMORY_VS_BOTH, memory_vs_both_ebits)):
        assert entanglement_rate(p, which).value == pytest.approx(_dense_rate(p, measure), rel=1e-3)


def test_fast_path_matches_state_by_state(c1_params):
    p = c1_params.replace(lam=0.5)
    ws = np.linspace(-3, 3, 13)
    spec = ef_spectrum(p, ws)
    t = scattering_array(p, ws)
    np.testing.assert_allclose(spec.ef_idler_memory, idler_memory_ebits(t), atol=1e-8)
    np.testing.assert_allclose(spec.ef_memory_vs_both, memory_vs_both_ebits(t), atol=1e-8)
    np.testing.assert_allclose(spec.n_idler, occupations(t)[Port.IDLER], rtol=1e-10)


def test_spectrum_selection(c1_params):
    spec = ef_spectrum(c1_params, [0.0, 1.0], which=Which.IDLER_MEMORY)
    assert spec.ef_memory_vs_both is None
    assert spec.ef_idler_memory.shape == (2,)


@given(stable_params(max_fraction=0.9), st.floats(-10, 10))
def test_pair_conservation(p, x):
    # Every idler photon has a partner in the signal or the memory.
    occ = occupations(scattering_array(p, x * p.kappa))
    assert occ[Port.IDLER] == pytest.approx(occ[Port.SIGNAL] + occ[Port.MEMORY], rel=1e-9, abs=1e-15)


@given(stable_params(max_fraction=0.9), st.floats(-10, 10))
def test_idler_memory_below_memory_vs_both(p, x):
    t = scattering_array(p, x * p.kappa)
    assert idler_memory_ebits(t) <= memory_vs_both_ebits(t) + 1e-9


@settings(max_examples=20)
@given(stable_params(max_fraction=0.9))
def test_heralding_in_unit_interval(p):
    if p.lam == 0.0 or p.g_coll == 0.0:
        return
    eta = heralding_efficiency(p)
    assert 0.0 <= eta <= 1.0


@settings(max_examples=15)
@given(stable_params(max_fraction=0.9), log_uniform(1e-3, 1e3))
def test_scale_invariance(p, s):
    q = p.scaled(s)
    # A subnormal drive or coupling can underflow to zero under scaling.
    if 0.0 in (p.lam, p.g_coll, q.lam, q.g_coll):
        return
    assert entanglement_rate(q).value == pytest.approx(s * entanglement_rate(p).value, rel=1e-7)
    assert heralding_efficiency(q) == pytest.approx(heralding_efficiency(p), rel=1e-7)


def test_weak_drive_limit():
    p = SystemParams(1.0, 0.0, 0.5, 1.0)
    limit = heralding_efficiency_weak_drive(p)
    assert heralding_efficiency(p.replace(lam=1e-4)) == pytest.approx(limit, rel=1e-6)
    assert heralding_efficiency(p.replace(lam=0.3)) > limit


def test_no_drive_is_exactly_zero():
    p = SystemParams(1.0, 0.0, 0.5, 1.0)
    assert entanglement_rate(p).value == 0.0
    assert entanglement_rate(p, Which.MEMORY_VS_BOTH).value == 0.0
    for port in Port:
        assert photon_flux(p, port).value == 0.0
    with pytest.raises(DegenerateInputError):
        heralding_efficiency(p)


def test_no_memory():
    p = SystemParams(1.0, 0.3, 0.0, 1.0)
    with pytest.warns(MemoryDecoupledWarning):
        assert heralding_efficiency(p) == 0.0
    assert entanglement_rate(p).value == 0.0
    assert photon_flux(p, Port.MEMORY).value == 0.0
    assert photon_flux(p, Port.IDLER).value == pytest.approx(photon_flux(p, Port.SIGNAL).value, rel=1e-9)
    assert heralding_efficiency_weak_drive(p) == 0.0


def test_flux_balance(c1_params):
    p = c1_params.replace(lam=0.5)
    idler = photon_flux(p, Port.IDLER).value
    assert idler == pytest.approx(photon_flux(p, Port.SIGNAL).value + photon_flux(p, Port.MEMORY).value, rel=1e-8)
    assert photons_per_time_bin(p) == pytest.approx(idler / p.kappa)


def test_rates_grow_with_drive(c1_params):
    rates = [entanglement_rate(c1_params.replace(lam=l)).value for l in np.linspace(0.05, 0.7, 8)]
    assert np.all(np.diff(rates) > 0)


def test_near_threshold_converges(c1_params):
    lam_c = stability_threshold(c1_params)
    vals = [entanglement_rate(c1_params.replace(lam=f * lam_c)).value for f in (0.99, 0.999, 0.9999)]
    assert np.all(np.isfinite(vals))
    assert np.all(np.diff(vals) > 0)


def test_unstable_rejected(c1_params):
    with pytest.raises(InstabilityError):
        entanglement_rate(c1_params.replace(lam=0.8))
    with pytest.raises(InstabilityError):
        heralding_efficiency(c1_params.replace(lam=0.8))
