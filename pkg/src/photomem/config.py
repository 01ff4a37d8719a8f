"""Sectioned parameter files.

    [system]
    units = angular          ; or ordinary (quoted rates are multiplied by 2 pi)
    kappa = 150 MHz
    lambda = 40 MHz
    g_coll = 0.3 GHz
    gamma_inh = 150 MHz

    [afc]
    finesse = 3
    comb_spacing = 1 MHz
    storage_time = 1 us

    [sweep]
    metric = rate_idler_memory
    axis1 = lambda
    axis1_min = 1 MHz
    axis1_max = 60 MHz
    axis1_points = 40
    axis2 = kappa
    ...

    [numerics]
    rtol = 1e-6
    threads = 4

Rates must carry one of Hz, kHz, MHz, GHz and times one of s, ms, us, ns;
everything else is a plain number. Internally rates are angular in rad/s.
"""

from __future__ import annotations

import configparser
import dataclasses
import enum
import math
import re
from pathlib import Path

from .model import AfcParams, MemoryModel, SystemParams, afc_effective_params

RATE_UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")


class ConfigError(ValueError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path, self.line = path, line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class Units(str, enum.Enum):
    ORDINARY = "ordinary"
    ANGULAR = "angular"

    @property
    def factor(self) -> float:
        """Multiplier from a quoted rate (in Hz) to rad/s."""
        return 2.0 * math.pi if self is Units.ORDINARY else 1.0


class Kind(enum.Enum):
    RATE = "rate"
    TIME = "time"
    NUMBER = "number"
    INTEGER = "integer"
    WORD = "word"


_SCHEMA: dict[str, dict[str, Kind]] = {
    "system": {
        "units": Kind.WORD,
        "kappa": Kind.RATE,
        "lambda": Kind.RATE,
        "g_coll": Kind.RATE,
        "gamma_inh": Kind.RATE,
        "memory_model": Kind.WORD,
    },
    "afc": {
        "finesse": Kind.NUMBER,
        "comb_spacing": Kind.RATE,
        "tooth_width": Kind.RATE,
        "storage_time": Kind.TIME,
    },
    "sweep": {
        "metric": Kind.WORD,
        "port": Kind.WORD,
        **{
            f"axis{i}{suffix}": kind
            for i in (1, 2)
            for suffix, kind in (
                ("", Kind.WORD),
                ("_min", Kind.RATE),
                ("_max", Kind.RATE),
                ("_points", Kind.INTEGER),
                ("_spacing", Kind.WORD),
            )
        },
    },
    "numerics": {
        "rtol": Kind.NUMBER,
        "threads": Kind.INTEGER,
        "oracle_modes": Kind.INTEGER,
        "oracle_window": Kind.NUMBER,
    },
}
_REQUIRED_SYSTEM = ("kappa", "lambda", "g_coll", "gamma_inh")
SWEEP_AXES = ("kappa", "lambda", "g_coll", "gamma_inh")


def parse_quantity(text: str, kind: Kind, key: str = "value") -> float:
    """Parse ``"150 MHz"`` to 1.5e8 (Hz) or ``"1 us"`` to 1e-6 (s)."""
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"{key}: cannot parse {text!r} as a number")
    number, unit = float(m.group(1)), m.group(2)
    if kind is Kind.RATE:
        if not unit:
            raise ValueError(f"{key}: missing unit suffix (one of {', '.join(RATE_UNITS)})")
        if unit not in RATE_UNITS:
            raise ValueError(f"{key}: unknown rate unit {unit!r}")
        return number * RATE_UNITS[unit]
    if kind is Kind.TIME:
        if not unit:
            raise ValueError(f"{key}: missing unit suffix (one of {', '.join(TIME_UNITS)})")
        if unit not in TIME_UNITS:
            raise ValueError(f"{key}: unknown time unit {unit!r}")
        return number * TIME_UNITS[unit]
    if unit:
        raise ValueError(f"{key}: expected a dimensionless number, got unit {unit!r}")
    if kind is Kind.INTEGER:
        if number != int(number):
            raise ValueError(f"{key}: expected an integer, got {text!r}")
        return int(number)
    return number


@dataclasses.dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float
    stop: float
    points: int
    spacing: str = "linear"


@dataclasses.dataclass(frozen=True)
class Config:
    """Parsed parameter file; rates in rad/s, times in s."""

    params: SystemParams
    units: Units
    afc: AfcParams | None = None
    storage_time: float | None = None
    sweep: dict | None = None
    numerics: dict = dataclasses.field(default_factory=dict)
    path: str | None = None
    warnings: tuple[str, ...] = ()

    @property
    def effective_params(self) -> SystemParams:
        if self.afc is None:
            return self.params
        return afc_effective_params(self.params, self.afc)

    def to_text(self) -> str:
        """Render as a parameter file (quoted rates in MHz)."""
        f = self.units.factor

        def rate(x):
            return f"{x / f / 1e6!r} MHz"

        p = self.params
        lines = [
            "[system]",
            f"units = {self.units.value}",
            f"kappa = {rate(p.kappa)}",
            f"lambda = {rate(p.lam)}",
            f"g_coll = {rate(p.g_coll)}",
            f"gamma_inh = {rate(p.gamma_inh)}",
        ]
        if self.afc is not None:
            lines += [
                "",
                "[afc]",
                f"finesse = {self.afc.finesse!r}",
                f"comb_spacing = {rate(self.afc.comb_spacing)}",
                f"tooth_width = {rate(self.afc.tooth_width)}",
            ]
            if self.storage_time is not None:
                lines.append(f"storage_time = {self.storage_time / 1e-6!r} us")
        return "\n".join(lines) + "\n"


def _line_map(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> 1-based line number, for error messages."""
    where: dict[tuple[str, str], int] = {}
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            where.setdefault((section, ""), n)
        elif section is not None and ("=" in line or ":" in line):
            key = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
            where.setdefault((section, key), n)
    return where


def parse_config_text(text: str, path: str | None = None, units: Units | str | None = None) -> Config:
    """Parse parameter-file text; ``units`` overrides the file's [system] units."""
    parser = configparser.ConfigParser(
        strict=True, interpolation=None, inline_comment_prefixes=(";", "#"), default_section="\0"
    )
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", path, exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", path, exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any section", path, exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"malformed line {exc.errors[0][1] if exc.errors else ''}", path, line) from None

    lines = _line_map(text)
    values: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", path, lines.get((section, "")))
        values[section] = {}
        for key, raw in parser.items(section):
            line = lines.get((section, key))
            kind = _SCHEMA[section].get(key)
            if kind is None:
                raise ConfigError(f"unknown key {key!r} in [{section}]", path, line)
            if kind is Kind.WORD:
                values[section][key] = raw.strip()
                continue
            try:
                values[section][key] = parse_quantity(raw, kind, key)
            except ValueError as exc:
                raise ConfigError(str(exc), path, line) from None

    def err(message, section, key=""):
        return ConfigError(message, path, lines.get((section, key), lines.get((section, ""))))

    system = values.get("system")
    if system is None:
        raise ConfigError("missing [system] section", path)
    for key in _REQUIRED_SYSTEM:
        if key not in system:
            raise err(f"missing key {key!r}", "system")
    try:
        chosen = Units(units if units is not None else system.get("units", Units.ORDINARY.value))
    except ValueError:
        raise err(f"units must be 'ordinary' or 'angular', got {system.get('units')!r}", "system", "units") from None
    f = chosen.factor

    afc = None
    storage_time = None
    notes: list[str] = []
    if "afc" in values:
        sec = values["afc"]
        for key in ("finesse", "comb_spacing"):
            if key not in sec:
                raise err(f"missing key {key!r}", "afc")
        tooth = sec.get("tooth_width")
        try:
            afc = AfcParams(
                finesse=float(sec["finesse"]),
                comb_spacing=float(sec["comb_spacing"]) * f,
                tooth_width=None if tooth is None else float(tooth) * f,
            )
        except ValueError as exc:
            raise err(str(exc), "afc") from None
        storage_time = sec.get("storage_time")
        if storage_time is not None:
            # The comb stores for 1/Delta with Delta as quoted.
            expected = 1.0 / float(sec["comb_spacing"])
            if abs(storage_time - expected) > 1e-9 * expected:
                notes.append(
                    f"storage_time {storage_time!r} s differs from 1/comb_spacing = {expected!r} s"
                )

    model = system.get("memory_model")
    if model is not None:
        try:
            model = MemoryModel(model)
        except ValueError:
            raise err(f"unknown memory_model {model!r}", "system", "memory_model") from None
        if model is MemoryModel.AFC_EFFECTIVE and afc is None:
            raise err("memory_model = afc needs an [afc] section", "system", "memory_model")
        if model is MemoryModel.LORENTZIAN and afc is not None:
            raise err("memory_model = lorentzian conflicts with the [afc] section", "system", "memory_model")
    try:
        params = SystemParams(
            kappa=float(system["kappa"]) * f,
            lam=float(system["lambda"]) * f,
            g_coll=float(system["g_coll"]) * f,
            gamma_inh=float(system["gamma_inh"]) * f,
        )
    except ValueError as exc:
        raise err(str(exc), "system") from None

    sweep = None
    if "sweep" in values:
        sweep = _sweep_section(values["sweep"], f, err)

    return Config(
        params=params,
        units=chosen,
        afc=afc,
        storage_time=storage_time,
        sweep=sweep,
        numerics=dict(values.get("numerics", {})),
        path=path,
        warnings=tuple(notes),
    )


def _sweep_section(sec: dict, factor: float, err) -> dict:
    metric = sec.get("metric")
    if metric is None:
        raise err("missing key 'metric'", "sweep")
    axes = []
    for i in (1, 2):
        name = sec.get(f"axis{i}")
        if name is None:
            raise err(f"missing key 'axis{i}'", "sweep")
        if name not in SWEEP_AXES:
            raise err(f"axis{i} must be one of {SWEEP_AXES}, got {name!r}", "sweep", f"axis{i}")
        for suffix in ("_min", "_max", "_points"):
            if f"axis{i}{suffix}" not in sec:
                raise err(f"missing key 'axis{i}{suffix}'", "sweep")
        spacing = sec.get(f"axis{i}_spacing", "linear")
        if spacing not in ("linear", "log"):
            raise err(f"axis{i}_spacing must be linear or log", "sweep", f"axis{i}_spacing")
        axes.append(
            AxisSpec(
                name=name,
                start=float(sec[f"axis{i}_min"]) * factor,
                stop=float(sec[f"axis{i}_max"]) * factor,
                points=int(sec[f"axis{i}_points"]),
                spacing=spacing,
            )
        )
    out = {"metric": metric, "axes": tuple(axes)}
    if "port" in sec:
        out["port"] = sec["port"]
    return out


def parse_config(path: str | Path, units: Units | str | None = None) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    return parse_config_text(text, str(path), units)


def bundled_config_path(name: str = "table1.cfg") -> Path:
    return Path(__file__).parent / "data" / name


def load_table1(units: Units | str | None = None) -> Config:
    return parse_config(bundled_config_path("table1.cfg"), units)
