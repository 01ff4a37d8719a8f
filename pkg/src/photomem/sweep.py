"""Parameter sweeps, figure presets and their CSV/JSON serialization."""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import enum
import io
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import Config, Units
from .metrics import Port, Which, entanglement_rate, heralding_efficiency, photon_flux
from .model import AFC_SCALING_LAW, AfcParams, SystemParams, afc_effective_params, stability_threshold

AXIS_FIELDS = {"kappa": "kappa", "lambda": "lam", "g_coll": "g_coll", "gamma_inh": "gamma_inh"}
CSV_HEADER = ("axis1", "axis2", "value", "status")


class Metric(str, enum.Enum):
    RATE_IDLER_MEMORY = "rate_idler_memory"
    RATE_MEMORY_VS_BOTH = "rate_memory_vs_both"
    HERALDING = "heralding"
    THRESHOLD = "threshold"
    PHOTON_FLUX = "photon_flux"

    @property
    def is_rate(self) -> bool:
        return self is not Metric.HERALDING


class Status(str, enum.Enum):
    OK = "ok"
    ABOVE_THRESHOLD = "above_threshold"
    ERROR = "error"


@dataclasses.dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_FIELDS:
            raise ValueError(f"cannot sweep {self.name!r}; choose from {tuple(AXIS_FIELDS)}")
        if len(self.values) < 2:
            raise ValueError(f"axis {self.name} needs at least 2 points")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def make(cls, name: str, start: float, stop: float, points: int, spacing: str = "linear") -> Axis:
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ValueError("log-spaced axes need positive bounds")
            values = np.geomspace(start, stop, points)
        elif spacing == "linear":
            values = np.linspace(start, stop, points)
        else:
            raise ValueError(f"spacing must be linear or log, got {spacing!r}")
        return cls(name, tuple(values), spacing)


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    """A grid over one or two parameters.

    Axis values are in the same internal units as ``fixed``. With ``units`` set,
    outputs are quoted in MHz of that convention; ``units=None`` marks a
    normalized (kappa = 1) run whose outputs are dimensionless.
    """

    axis1: Axis
    axis2: Axis | None
    fixed: SystemParams
    metric: Metric
    units: Units | None = None
    afc: AfcParams | None = None
    port: Port = Port.IDLER
    rtol: float = 1e-6
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "metric", Metric(self.metric))
        object.__setattr__(self, "port", Port(self.port))
        if self.units is not None:
            object.__setattr__(self, "units", Units(self.units))
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ValueError("swept axes must be distinct")

    @property
    def shape(self) -> tuple[int, ...]:
        if self.axis2 is None:
            return (len(self.axis1.values),)
        return (len(self.axis1.values), len(self.axis2.values))

    def cell_params(self, index) -> SystemParams:
        """Bare parameters (before the AFC rescale) for one grid cell."""
        changes = {AXIS_FIELDS[self.axis1.name]: self.axis1.values[index[0]]}
        if self.axis2 is not None:
            changes[AXIS_FIELDS[self.axis2.name]] = self.axis2.values[index[1]]
        return self.fixed.replace(**changes)

    def _quoted_rate(self) -> float:
        """Divisor from an internal angular rate to the quoted unit."""
        return 1.0 if self.units is None else self.units.factor * 1e6

    def _count_rate(self) -> float:
        """Divisor from events per unit time to the quoted unit."""
        return 1.0 if self.units is None else 1e6

    def value_unit(self) -> str:
        if self.metric is Metric.HERALDING:
            return "dimensionless"
        if self.units is None:
            return "per kappa" if self.metric is not Metric.THRESHOLD else "kappa"
        return "MHz"

    def provenance(self) -> dict:
        axes = [self.axis1] + ([self.axis2] if self.axis2 is not None else [])
        scale = self._quoted_rate()
        return {
            "artifact": "photomem",
            "version": __version__,
            "label": self.label,
            "metric": self.metric.value,
            "port": self.port.value if self.metric is Metric.PHOTON_FLUX else None,
            "value_unit": self.value_unit(),
            "units": self.units.value if self.units is not None else "normalized",
            "axis_unit": "MHz" if self.units is not None else "kappa",
            "axes": [
                {
                    "name": a.name,
                    "spacing": a.spacing,
                    "min": a.values[0] / scale,
                    "max": a.values[-1] / scale,
                    "points": len(a.values),
                }
                for a in axes
            ],
            "fixed": {
                k: (v / scale if isinstance(v, float) and k in AXIS_FIELDS.values() else v)
                for k, v in self.fixed.as_dict().items()
            },
            "afc": None
            if self.afc is None
            else {
                "finesse": self.afc.finesse,
                "comb_spacing": self.afc.comb_spacing / scale,
                "tooth_width": self.afc.tooth_width / scale,
            },
            "afc_scaling_law": AFC_SCALING_LAW if self.afc is not None else None,
            "rtol": self.rtol,
        }


@dataclasses.dataclass(frozen=True)
class SweepResult:
    axis1: tuple[float, ...]
    axis2: tuple[float, ...] | None
    values: np.ndarray
    status: np.ndarray
    provenance: dict
    messages: dict = dataclasses.field(default_factory=dict)

    def ok(self) -> np.ndarray:
        return self.status == Status.OK.value

    def argmax(self) -> tuple[int, ...]:
        masked = np.where(self.ok(), self.values, -np.inf)
        return tuple(int(i) for i in np.unravel_index(np.argmax(masked), masked.shape))

    def max(self) -> float:
        return float(np.max(np.where(self.ok(), self.values, -np.inf)))

    # Serialization ---------------------------------------------------------

    def rows(self):
        for idx in np.ndindex(self.values.shape):
            a1 = self.axis1[idx[0]]
            a2 = self.axis2[idx[1]] if self.axis2 is not None else None
            status = str(self.status[idx])
            value = float(self.values[idx]) if status == Status.OK.value else None
            yield a1, a2, value, status

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.provenance.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for a1, a2, value, status in self.rows():
            writer.writerow([repr(a1), "" if a2 is None else repr(a2), "" if value is None else repr(value), status])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "provenance": self.provenance,
            "columns": list(CSV_HEADER),
            "rows": [list(r) for r in self.rows()],
            "messages": {",".join(map(str, k)): v for k, v in self.messages.items()},
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    def write(self, path: str | Path) -> None:
        path = Path(path)
        text = self.to_json() if path.suffix == ".json" else self.to_csv()
        path.write_text(text)

    @classmethod
    def from_json(cls, text: str) -> SweepResult:
        payload = json.loads(text)
        return cls._from_rows(payload["rows"], payload["provenance"])

    @classmethod
    def from_csv(cls, text: str) -> SweepResult:
        provenance = {}
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, raw = line[1:].strip().partition(": ")
                provenance[key] = json.loads(raw)
            else:
                body.append(line)
        reader = csv.reader(body)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for a1, a2, value, status in reader:
            rows.append((float(a1), float(a2) if a2 else None, float(value) if value else None, status))
        return cls._from_rows(rows, provenance)

    @classmethod
    def _from_rows(cls, rows, provenance) -> SweepResult:
        ax1 = list(dict.fromkeys(r[0] for r in rows))
        two_d = rows[0][1] is not None
        ax2 = list(dict.fromkeys(r[1] for r in rows)) if two_d else None
        shape = (len(ax1), len(ax2)) if two_d else (len(ax1),)
        values = np.full(shape, np.nan)
        status = np.empty(shape, dtype=object)
        for n, (_, _, value, st) in enumerate(rows):
            idx = np.unravel_index(n, shape)
            status[idx] = st
            if value is not None:
                values[idx] = value
        return cls(tuple(ax1), tuple(ax2) if two_d else None, values, status, provenance)

    @classmethod
    def read(cls, path: str | Path) -> SweepResult:
        path = Path(path)
        text = path.read_text()
        return cls.from_json(text) if path.suffix == ".json" else cls.from_csv(text)


def evaluate_cell(spec: SweepSpec, index) -> tuple[float, str, str | None]:
    """Metric at one grid cell as (value in quoted units, status, error message)."""
    try:
        params = spec.cell_params(index)
        if spec.afc is not None:
            params = afc_effective_params(params, spec.afc)
        lam_c = stability_threshold(params)
        if spec.metric is Metric.THRESHOLD:
            return lam_c / spec._quoted_rate(), Status.OK.value, None
        if params.lam >= lam_c:
            return math.nan, Status.ABOVE_THRESHOLD.value, None
        if spec.metric is Metric.RATE_IDLER_MEMORY:
            value = entanglement_rate(params, Which.IDLER_MEMORY, spec.rtol).value / spec._count_rate()
        elif spec.metric is Metric.RATE_MEMORY_VS_BOTH:
            value = entanglement_rate(params, Which.MEMORY_VS_BOTH, spec.rtol).value / spec._count_rate()
        elif spec.metric is Metric.PHOTON_FLUX:
            value = photon_flux(params, spec.port, spec.rtol).value / spec._count_rate()
        else:
            value = heralding_efficiency(params, spec.rtol)
        return float(value), Status.OK.value, None
    except Exception as exc:  # recorded per cell; a sweep never aborts
        return math.nan, Status.ERROR.value, f"{type(exc).__name__}: {exc}"


def _evaluate_chunk(spec: SweepSpec, indices):
    return [evaluate_cell(spec, idx) for idx in indices]


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Evaluate the metric on the grid; cell order in the output never depends on ``threads``."""
    indices = list(np.ndindex(spec.shape))
    if threads <= 1 or len(indices) < 2:
        results = _evaluate_chunk(spec, indices)
    else:
        n_chunks = min(len(indices), 4 * threads)
        chunks = [indices[i::n_chunks] for i in range(n_chunks)]
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_evaluate_chunk, [spec] * n_chunks, chunks))
        results = [None] * len(indices)
        for i, part in enumerate(parts):
            results[i::n_chunks] = part

    values = np.full(spec.shape, np.nan)
    status = np.empty(spec.shape, dtype=object)
    messages = {}
    for idx, (value, st, msg) in zip(indices, results):
        values[idx] = value
        status[idx] = st
        if msg is not None:
            messages[idx] = msg
    scale = spec._quoted_rate()
    return SweepResult(
        axis1=tuple(v / scale for v in spec.axis1.values),
        axis2=None if spec.axis2 is None else tuple(v / scale for v in spec.axis2.values),
        values=values,
        status=status,
        provenance=spec.provenance(),
        messages=messages,
    )


def threshold_curve(spec: SweepSpec, threads: int = 1) -> SweepResult:
    return run_sweep(dataclasses.replace(spec, metric=Metric.THRESHOLD), threads)


# Figure presets -------------------------------------------------------------

FIG2A_G = (0.05, 2.0)
FIG2A_GAMMA = (0.1, 4.0)
FIG2A_POINTS = 61
FIG2A_LAMBDA = 0.1
FIG2B_LAMBDA_MAX = 0.705
FIG4_LAMBDA_MHZ = (1.0, 50.0)
FIG4_KAPPA_MHZ = (10.0, 300.0)
TABLE1_G_MHZ = 300.0
TABLE1_GAMMA_MHZ = 150.0
TABLE1_FINESSE = 3.0


def fig2a_spec(points: int = FIG2A_POINTS, lam: float = FIG2A_LAMBDA) -> SweepSpec:
    """E_R / kappa over (G, Gamma) at fixed weak drive, kappa = 1."""
    return SweepSpec(
        axis1=Axis.make("g_coll", *FIG2A_G, points, "log"),
        axis2=Axis.make("gamma_inh", *FIG2A_GAMMA, points, "log"),
        fixed=SystemParams(kappa=1.0, lam=lam, g_coll=0.5, gamma_inh=1.0),
        metric=Metric.RATE_IDLER_MEMORY,
        label="fig2a",
    )


def fig2b_specs(points: int = 36) -> tuple[SweepSpec, SweepSpec]:
    """One-dimensional lambda sweeps at 2G = Gamma = kappa = 1, one per measure."""
    lam = tuple(FIG2B_LAMBDA_MAX * k / points for k in range(1, points + 1))
    base = SystemParams(kappa=1.0, lam=0.1, g_coll=0.5, gamma_inh=1.0)
    return tuple(
        SweepSpec(
            axis1=Axis("lambda", lam),
            axis2=None,
            fixed=base,
            metric=m,
            label=f"fig2b-{m.value}",
        )
        for m in (Metric.RATE_IDLER_MEMORY, Metric.RATE_MEMORY_VS_BOTH)
    )


def table1_afc(units: Units = Units.ANGULAR) -> AfcParams:
    return AfcParams(finesse=TABLE1_FINESSE, comb_spacing=1e6 * units.factor)


def fig4_spec(
    metric: Metric = Metric.RATE_IDLER_MEMORY,
    lam_points: int = 50,
    kappa_points: int = 30,
    units: Units = Units.ANGULAR,
    config: Config | None = None,
) -> SweepSpec:
    """(lambda, kappa) map at G = 0.3 GHz, Gamma = 150 MHz, AFC finesse 3."""
    f = units.factor * 1e6
    fixed = SystemParams(kappa=150 * f, lam=40 * f, g_coll=TABLE1_G_MHZ * f, gamma_inh=TABLE1_GAMMA_MHZ * f)
    afc = table1_afc(units)
    if config is not None:
        fixed, afc, units = config.params, config.afc, config.units
        f = units.factor * 1e6
    return SweepSpec(
        axis1=Axis.make("lambda", FIG4_LAMBDA_MHZ[0] * f, FIG4_LAMBDA_MHZ[1] * f, lam_points),
        axis2=Axis.make("kappa", FIG4_KAPPA_MHZ[0] * f, FIG4_KAPPA_MHZ[1] * f, kappa_points),
        fixed=fixed,
        metric=metric,
        units=units,
        afc=afc,
        label=f"fig4-{Metric(metric).value}",
    )


def spec_from_config(config: Config, metric: str | None = None) -> SweepSpec:
    if config.sweep is None:
        raise ValueError("config has no [sweep] section")
    sec = config.sweep
    axes = [Axis.make(a.name, a.start, a.stop, a.points, a.spacing) for a in sec["axes"]]
    return SweepSpec(
        axis1=axes[0],
        axis2=axes[1],
        fixed=config.params,
        metric=Metric(metric or sec["metric"]),
        units=config.units,
        afc=config.afc,
        port=Port(sec.get("port", Port.IDLER.value)),
        rtol=float(config.numerics.get("rtol", 1e-6)),
        label=Path(config.path).stem if config.path else "",
    )


# Figure checks --------------------------------------------------------------


def impedance_matching_curve(gammas: Sequence[float], kappa: float = 1.0) -> np.ndarray:
    """G on the line 4 G^2 = kappa Gamma."""
    return 0.5 * np.sqrt(kappa * np.asarray(gammas, dtype=float))


def argmax_distance_from_matching(result: SweepResult, kappa: float = 1.0) -> float:
    """Distance, in G-grid cells, of the (G, Gamma) argmax from the C = 1 curve.

    Needs axis1 = G and axis2 = Gamma on log grids.
    """
    i, j = result.argmax()
    g = np.log(np.asarray(result.axis1))
    step = (g[-1] - g[0]) / (len(g) - 1)
    g_match = math.log(impedance_matching_curve([result.axis2[j]], kappa)[0])
    return abs(g[i] - g_match) / step


def is_monotone_increasing(values: Sequence[float]) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) > 0))


# Table 1 --------------------------------------------------------------------


def report_table1(config: Config) -> dict:
    """Headline numbers for a Table-1 style config (rates in MHz of its units)."""
    f = config.units.factor * 1e6
    bare = config.params
    eff = config.effective_params
    lam_c = stability_threshold(eff)
    out = {
        "units": config.units.value,
        "afc_scaling_law": AFC_SCALING_LAW if config.afc is not None else None,
        "params": {
            "kappa_MHz": bare.kappa / f,
            "lambda_MHz": bare.lam / f,
            "g_coll_MHz": bare.g_coll / f,
            "gamma_inh_MHz": bare.gamma_inh / f,
            "finesse": config.afc.finesse if config.afc is not None else None,
            "storage_time_us": None if config.storage_time is None else config.storage_time * 1e6,
        },
        "cooperativity": bare.bare_cooperativity,
        "cooperativity_eff": eff.cooperativity,
        "lambda_crit_MHz": lam_c / f,
        "lambda_crit_no_afc_MHz": stability_threshold(bare) / f,
        "version": __version__,
        "warnings": list(config.warnings),
    }
    if eff.lam < lam_c:
        out["entanglement_rate_idler_memory_MHz"] = entanglement_rate(eff, Which.IDLER_MEMORY).value / 1e6
        out["entanglement_rate_memory_vs_both_MHz"] = entanglement_rate(eff, Which.MEMORY_VS_BOTH).value / 1e6
        out["heralding_efficiency"] = heralding_efficiency(eff)
        for port in Port:
            flux = photon_flux(eff, port).value
            out[f"flux_{port.value}_MHz"] = flux / 1e6
            out[f"photons_per_bin_{port.value}"] = flux / eff.kappa
    else:
        out["status"] = Status.ABOVE_THRESHOLD.value
    return out


TABLE1_TARGETS = {
    "entanglement_rate_idler_memory_MHz": (30.3, 0.15, "relative"),
    "heralding_efficiency": (0.70, 0.05, "absolute"),
}


def check_table1(report: dict) -> dict[str, bool]:
    out = {}
    for key, (target, tol, mode) in TABLE1_TARGETS.items():
        value = report.get(key)
        if value is None:
            out[key] = False
        elif mode == "relative":
            out[key] = abs(value - target) <= tol * target
        else:
            out[key] = abs(value - target) <= tol
    return out
