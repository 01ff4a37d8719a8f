import math

import pytest
from hypothesis import given, strategies as st

from photomem.config import (
    ConfigError,
    Kind,
    Units,
    bundled_config_path,
    load_table1,
    parse_config,
    parse_config_text,
    parse_quantity,
)
from photomem.model import MemoryModel

BASE = """\
[system]
kappa = 150 MHz
lambda = 40 MHz
g_coll = 0.3 GHz
gamma_inh = 150 MHz
"""


@pytest.mark.parametrize(
    "text, kind, expected",
    [
        ("150 MHz", Kind.RATE, 1.5e8),
        ("0.3GHz", Kind.RATE, 3e8),
        ("2.5e3 kHz", Kind.RATE, 2.5e6),
        ("7 Hz", Kind.RATE, 7.0),
        ("1 us", Kind.TIME, 1e-6),
        ("20 ns", Kind.TIME, 2e-8),
        ("3", Kind.NUMBER, 3.0),
        ("400", Kind.INTEGER, 400),
    ],
)
def test_parse_quantity(text, kind, expected):
    assert parse_quantity(text, kind) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "text, kind",
    [("150", Kind.RATE), ("150 mhz", Kind.RATE), ("1 us", Kind.RATE), ("3 MHz", Kind.NUMBER),
     ("1.5", Kind.INTEGER), ("fast", Kind.NUMBER), ("1 MHz", Kind.TIME)],
)
def test_parse_quantity_rejects(text, kind):
    with pytest.raises(ValueError):
        parse_quantity(text, kind, "k")


def test_default_units_are_ordinary():
    cfg = parse_config_text(BASE)
    assert cfg.units is Units.ORDINARY
    assert cfg.params.kappa == pytest.approx(2 * math.pi * 1.5e8)


def test_units_override():
    cfg = parse_config_text(BASE, units="angular")
    assert cfg.params.kappa == pytest.approx(1.5e8)
    assert parse_config_text("[system]\nunits = angular\n" + BASE.split("\n", 1)[1]).units is Units.ANGULAR


def test_bundled_example():
    cfg = load_table1()
    assert cfg.units is Units.ANGULAR
    assert cfg.afc.finesse == 3.0
    eff = cfg.effective_params
    assert eff.memory_model is MemoryModel.AFC_EFFECTIVE
    assert eff.cooperativity == pytest.approx(16 / 3)
    assert cfg.storage_time == pytest.approx(1e-6)
    assert cfg.warnings == ()
    assert bundled_config_path().exists()


def test_round_trip():
    cfg = load_table1()
    again = parse_config_text(cfg.to_text())
    assert again.params == cfg.params
    assert again.afc == cfg.afc
    assert again.units == cfg.units
    assert again.storage_time == pytest.approx(cfg.storage_time)


@given(st.floats(1.0, 1e4), st.floats(0.0, 1.0), st.floats(0.0, 1e4), st.floats(1.0, 1e4), st.sampled_from(list(Units)))
def test_round_trip_property(kappa, frac, g, gamma, units):
    text = (
        f"[system]\nunits = {units.value}\nkappa = {kappa!r} MHz\nlambda = {frac * kappa!r} MHz\n"
        f"g_coll = {g!r} MHz\ngamma_inh = {gamma!r} MHz\n"
    )
    cfg = parse_config_text(text)
    again = parse_config_text(cfg.to_text())
    for name in ("kappa", "lam", "g_coll", "gamma_inh"):
        assert getattr(again.params, name) == pytest.approx(getattr(cfg.params, name), rel=1e-14)


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        (BASE.replace("150 MHz\nlambda", "150\nlambda"), "missing unit", 2),
        (BASE + "kappa = 1 MHz\n", "duplicate key", 6),
        (BASE + "speed = 3 MHz\n", "unknown key", 6),
        (BASE + "[extras]\nx = 1\n", "unknown section", 6),
        (BASE.replace("lambda = 40 MHz\n", ""), "missing key 'lambda'", 1),
        (BASE.replace("kappa = 150 MHz", "kappa = 150 Mhz"), "unit", 2),
        (BASE + "units = weird\n", "units must be", 6),
        (BASE.replace("kappa = 150 MHz", "kappa = -1 MHz"), "kappa must be positive", 1),
        (BASE + "[afc]\nfinesse = 3\n", "comb_spacing", 6),
        (BASE + "memory_model = afc\n", "needs an [afc]", 6),
        ("kappa = 1 MHz\n", "outside of any section", 1),
    ],
)
def test_errors_name_line_and_key(text, fragment, line):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text, path="dev.cfg")
    msg = str(info.value)
    assert fragment in msg
    assert msg.startswith(f"dev.cfg:{line}:")


def test_storage_time_mismatch_warns():
    cfg = parse_config_text(BASE + "[afc]\nfinesse = 3\ncomb_spacing = 1 MHz\nstorage_time = 2 us\n")
    assert len(cfg.warnings) == 1 and "storage_time" in cfg.warnings[0]


def test_sweep_section():
    text = BASE + (
        "[sweep]\nmetric = heralding\naxis1 = lambda\naxis1_min = 1 MHz\naxis1_max = 50 MHz\naxis1_points = 5\n"
        "axis2 = kappa\naxis2_min = 10 MHz\naxis2_max = 300 MHz\naxis2_points = 4\naxis2_spacing = log\n"
    )
    cfg = parse_config_text(text, units="angular")
    ax1, ax2 = cfg.sweep["axes"]
    assert (ax1.name, ax1.points, ax1.stop) == ("lambda", 5, 5e7)
    assert ax2.spacing == "log"
    with pytest.raises(ConfigError, match="axis1 must be one of"):
        parse_config_text(text.replace("axis1 = lambda", "axis1 = finesse"))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "absent.cfg")


def test_inline_comments(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(BASE.replace("kappa = 150 MHz", "kappa = 150 MHz  ; cavity"))
    assert parse_config(path).params.kappa == pytest.approx(2 * math.pi * 1.5e8)
