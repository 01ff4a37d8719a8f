import math

import numpy as np
import pytest

from photomem.config import Units, load_table1
from photomem.model import SystemParams
from photomem.sweep import (
    Axis,
    Metric,
    Status,
    SweepResult,
    SweepSpec,
    argmax_distance_from_matching,
    check_table1,
    evaluate_cell,
    fig2a_spec,
    fig2b_specs,
    fig4_spec,
    impedance_matching_curve,
    is_monotone_increasing,
    run_sweep,
    spec_from_config,
    threshold_curve,
)


@pytest.fixture
def small_spec():
    return SweepSpec(
        axis1=Axis.make("lambda", 0.1, 0.9, 5),
        axis2=Axis.make("g_coll", 0.2, 1.0, 3),
        fixed=SystemParams(kappa=1.0, lam=0.1, g_coll=0.5, gamma_inh=1.0),
        metric=Metric.RATE_IDLER_MEMORY,
        label="small",
    )


def test_axis_validation():
    with pytest.raises(ValueError):
        Axis("finesse", (1.0, 2.0))
    with pytest.raises(ValueError):
        Axis("kappa", (1.0,))
    with pytest.raises(ValueError):
        Axis.make("kappa", 0.0, 1.0, 3, "log")
    np.testing.assert_allclose(Axis.make("kappa", 1, 100, 3, "log").values, [1, 10, 100])


def test_statuses_follow_threshold(small_spec):
    res = run_sweep(small_spec)
    lam_c = threshold_curve(small_spec).values
    lam = np.array(res.axis1)[:, None]
    above = lam >= lam_c
    assert np.array_equal(res.status == Status.ABOVE_THRESHOLD.value, above)
    assert np.all(np.isnan(res.values[above]))
    assert np.all(res.values[~above] > 0)


def test_parallel_matches_serial(small_spec):
    serial = run_sweep(small_spec, threads=1)
    parallel = run_sweep(small_spec, threads=2)
    np.testing.assert_array_equal(serial.values, parallel.values)
    assert np.array_equal(serial.status, parallel.status)


@pytest.mark.parametrize("suffix", [".csv", ".json"])
def test_round_trip(small_spec, tmp_path, suffix):
    res = run_sweep(small_spec)
    path = tmp_path / f"out{suffix}"
    res.write(path)
    back = SweepResult.read(path)
    assert back.axis1 == res.axis1 and back.axis2 == res.axis2
    np.testing.assert_array_equal(back.values, res.values)
    assert np.array_equal(back.status, res.status)
    assert back.provenance == res.provenance


def test_csv_layout(small_spec):
    text = run_sweep(small_spec).to_csv()
    lines = text.splitlines()
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "axis1,axis2,value,status"
    assert any(l.startswith("# metric:") for l in lines)
    assert any(l.endswith(",,above_threshold") for l in lines)


def test_one_dimensional_round_trip(tmp_path):
    spec = fig2b_specs(points=4)[0]
    res = run_sweep(spec)
    assert res.axis2 is None and res.values.shape == (4,)
    back = SweepResult.from_csv(res.to_csv())
    np.testing.assert_array_equal(back.values, res.values)


def test_errors_are_recorded_not_raised():
    # A zero-width inhomogeneous line is rejected per cell.
    spec = SweepSpec(
        axis1=Axis("gamma_inh", (0.0, 1.0)),
        axis2=None,
        fixed=SystemParams(kappa=1.0, lam=0.1, g_coll=0.5, gamma_inh=1.0),
        metric=Metric.HERALDING,
    )
    res = run_sweep(spec)
    assert list(res.status) == [Status.ERROR.value, Status.OK.value]
    assert "ParameterError" in res.messages[(0,)]


def test_evaluate_cell_units():
    spec = fig4_spec(lam_points=2, kappa_points=2)
    value, status, _ = evaluate_cell(spec, (0, 1))
    assert status == Status.OK.value and value > 0
    assert spec.value_unit() == "MHz"
    params = spec.cell_params((0, 1))
    assert params.kappa == pytest.approx(300e6)
    assert params.lam == pytest.approx(1e6)
    # Strong drive on a narrow cavity sits above threshold.
    assert evaluate_cell(spec, (1, 0))[1] == Status.ABOVE_THRESHOLD.value


def test_normalized_provenance():
    prov = fig2a_spec(points=3).provenance()
    assert prov["units"] == "normalized"
    assert prov["value_unit"] == "per kappa"
    assert prov["axes"][0]["name"] == "g_coll"


def test_spec_from_config():
    cfg = load_table1()
    with pytest.raises(ValueError):
        spec_from_config(cfg)


def test_helpers():
    np.testing.assert_allclose(impedance_matching_curve([1.0, 4.0]), [0.5, 1.0])
    assert is_monotone_increasing([1, 2, 3])
    assert not is_monotone_increasing([1, 1, 2])


def test_matching_distance():
    g = tuple(np.geomspace(0.1, 1.0, 11))
    gammas = (1.0, 2.0)
    values = np.zeros((11, 2))
    values[5, 0] = 1.0  # G = 10^-0.5 vs matching G = 0.5 at Gamma = 1
    res = SweepResult(g, gammas, values, np.full((11, 2), "ok", dtype=object), {})
    expected = abs(math.log(g[5]) - math.log(0.5)) / (math.log(10) / 10)
    assert argmax_distance_from_matching(res) == pytest.approx(expected)


def test_check_table1():
    ok = check_table1({"entanglement_rate_idler_memory_MHz": 30.0, "heralding_efficiency": 0.66})
    assert all(ok.values())
    bad = check_table1({"entanglement_rate_idler_memory_MHz": 40.0})
    assert not any(bad.values())


def test_fig4_spec_uses_angular_mhz():
    spec = fig4_spec(lam_points=3, kappa_points=3)
    assert spec.units is Units.ANGULAR
    assert spec.axis2.values[0] == pytest.approx(10e6)
    assert spec.afc.finesse == 3.0
