"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 failed acceptance check (``table1 --check``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, oracle
from .config import ConfigError, Units, load_table1, parse_config
from .gaussian import UnphysicalStateError
from .metrics import (
    DegenerateInputError,
    Port,
    Which,
    ef_spectrum,
    entanglement_rate,
    heralding_efficiency,
    photon_flux,
)
from .model import (
    AFC_SCALING_LAW,
    AfcParams,
    InstabilityError,
    ParameterError,
    SystemParams,
    afc_effective_params,
    stability_threshold,
    threshold_closed_form,
    threshold_scan,
)
from .quadrature import QuadratureError
from .scattering import MODES, beam_splitter_angle_sq, decompose_circuit, scattering_matrix
from . import sweep as sw

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4


class Context:
    """Parameters resolved from --config, the parameter flags and --units."""

    def __init__(self, args):
        self.args = args
        self.config = None
        if args.config:
            self.config = parse_config(args.config, args.units)
            for note in self.config.warnings:
                warnings.warn(note)
        if args.normalized:
            self.units = None
        elif self.config is not None:
            self.units = self.config.units
        else:
            self.units = Units(args.units or Units.ORDINARY.value)

    @property
    def rate_scale(self) -> float:
        """Internal angular rate per quoted unit (MHz, or 1 when normalized)."""
        return 1.0 if self.units is None else self.units.factor * 1e6

    @property
    def count_scale(self) -> float:
        return 1.0 if self.units is None else 1e6

    def params(self) -> SystemParams:
        a, f = self.args, self.rate_scale
        if self.config is not None:
            base, afc = self.config.params, self.config.afc
        else:
            base, afc = None, None
        values = {}
        for flag, field in (("kappa", "kappa"), ("lam", "lam"), ("g_coll", "g_coll"), ("gamma_inh", "gamma_inh")):
            v = getattr(a, flag)
            if v is not None:
                values[field] = v * f
            elif base is not None:
                values[field] = getattr(base, field)
            else:
                raise ConfigError(f"missing --{flag.replace('_', '-')} (or give --config)")
        params = SystemParams(**values)
        if a.finesse is not None:
            afc = AfcParams(finesse=a.finesse, comb_spacing=(afc.comb_spacing if afc else f))
        return afc_effective_params(params, afc) if afc is not None else params

    def meta(self) -> dict:
        p = self.params()
        f = self.rate_scale
        return {
            "version": __version__,
            "units": self.units.value if self.units is not None else "normalized",
            "rate_unit": "MHz" if self.units is not None else "kappa",
            "params": {
                "kappa": p.kappa / f,
                "lambda": p.lam / f,
                "g_coll": p.g_coll / f,
                "g_eff": p.g_eff / f,
                "gamma_inh": p.gamma_inh / f,
                "density_scale": p.density_scale,
            },
            "afc_scaling_law": AFC_SCALING_LAW if p.density_scale != 1.0 else None,
        }


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _omega_grid(args, ctx: Context) -> np.ndarray:
    return np.linspace(args.omega_min, args.omega_max, args.points) * ctx.rate_scale


def cmd_scatter(args, ctx):
    p = ctx.params()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega"] + [f"{k}_{part}" for k in (u + v for u in MODES for v in MODES) for part in ("re", "im")])
    for omega in _omega_grid(args, ctx):
        t = scattering_matrix(p, omega).t
        w.writerow([repr(float(omega / ctx.rate_scale))] + [repr(float(x)) for z in t.ravel() for x in (z.real, z.imag)])
    _emit(args, buf.getvalue())


def cmd_decompose(args, ctx):
    p = ctx.params()
    omega = args.omega * ctx.rate_scale
    d = decompose_circuit(scattering_matrix(p, omega))
    _emit(
        args,
        _json(
            {
                **ctx.meta(),
                "omega": args.omega,
                "r": d.r,
                "gain_cosh2r": d.gain,
                "theta1": d.theta1,
                "theta2": d.theta2,
                "tan2_theta_analytic": float(beam_splitter_angle_sq(p, omega)),
            }
        ),
    )


def cmd_spectrum(args, ctx):
    p = ctx.params()
    spec = ef_spectrum(p, _omega_grid(args, ctx))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "ef_idler_memory", "ef_memory_vs_both", "n_idler", "n_memory"])
    for k in range(spec.omegas.size):
        w.writerow(
            [
                repr(float(spec.omegas[k] / ctx.rate_scale)),
                repr(float(spec.ef_idler_memory[k])),
                repr(float(spec.ef_memory_vs_both[k])),
                repr(float(spec.n_idler[k])),
                repr(float(spec.n_memory[k])),
            ]
        )
    _emit(args, buf.getvalue())


def cmd_rate(args, ctx):
    p = ctx.params()
    r = entanglement_rate(p, Which(args.which), args.rtol)
    _emit(
        args,
        _json({**ctx.meta(), "which": args.which, "rate": r.value / ctx.count_scale, "error": r.error / ctx.count_scale}),
    )


def cmd_herald(args, ctx):
    p = ctx.params()
    out = {**ctx.meta(), "heralding_efficiency": heralding_efficiency(p, args.rtol)}
    for port in Port:
        flux = photon_flux(p, port, args.rtol).value
        out[f"flux_{port.value}"] = flux / ctx.count_scale
        out[f"photons_per_bin_{port.value}"] = flux / p.kappa
    _emit(args, _json(out))


def cmd_threshold(args, ctx):
    p = ctx.params()
    lam_scan, omega = threshold_scan(p)
    _emit(
        args,
        _json(
            {
                **ctx.meta(),
                "lambda_crit": stability_threshold(p) / ctx.rate_scale,
                "closed_form": threshold_closed_form(p) / ctx.rate_scale,
                "scan": lam_scan / ctx.rate_scale,
                "omega_at_threshold": omega / ctx.rate_scale,
                # The closed form is the threshold only when the first zero is at w = 0.
                "resonant": omega == 0.0,
                "cooperativity": p.cooperativity,
            }
        ),
    )


def _write_result(args, result: sw.SweepResult, suffix: str = "") -> None:
    if args.out:
        path = Path(args.out)
        if suffix:
            path = path.with_name(f"{path.stem}-{suffix}{path.suffix}")
        result.write(path)
    else:
        sys.stdout.write(result.to_json() + "\n" if args.format == "json" else result.to_csv())


def cmd_sweep(args, ctx):
    if ctx.config is None:
        raise ConfigError("sweep needs --config with a [sweep] section")
    spec = sw.spec_from_config(ctx.config, args.metric)
    threads = args.threads or int(ctx.config.numerics.get("threads", 1))
    _write_result(args, sw.run_sweep(spec, threads))


def cmd_fig2a(args, ctx):
    spec = sw.fig2a_spec(args.points)
    result = sw.run_sweep(spec, args.threads or 1)
    _write_result(args, result)
    dist = sw.argmax_distance_from_matching(result)
    sys.stderr.write(f"argmax {result.argmax()} is {dist:.2f} grid cells from 4G^2 = kappa Gamma\n")


def cmd_fig2b(args, ctx):
    for spec in sw.fig2b_specs(args.points):
        _write_result(args, sw.run_sweep(spec, args.threads or 1), spec.metric.value)


def cmd_fig4(args, ctx):
    metrics = [sw.Metric(args.metric)] if args.metric else [sw.Metric.RATE_IDLER_MEMORY, sw.Metric.HERALDING]
    units = ctx.units or Units.ANGULAR
    for metric in metrics:
        spec = sw.fig4_spec(metric, args.lam_points, args.kappa_points, units, ctx.config)
        result = sw.run_sweep(spec, args.threads or 1)
        _write_result(args, result, metric.value if len(metrics) > 1 else "")
        sys.stderr.write(f"{metric.value}: grid max {result.max():.6g} {spec.value_unit()}\n")


def cmd_table1(args, ctx):
    config = ctx.config if ctx.config is not None else load_table1(args.units)
    report = sw.report_table1(config)
    checks = sw.check_table1(report)
    report["checks"] = checks
    _emit(args, _json(report))
    if args.check and not all(checks.values()):
        return EXIT_CHECK
    return EXIT_OK


def cmd_oracle_validate(args, ctx):
    p = ctx.params()
    cfg = oracle.OracleConfig(n_memory_modes=args.modes, window_factor=args.window)
    model = oracle.build_discretized_model(p, cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "quantity", "analytic", "oracle", "relative_discrepancy"])
    for omega in np.asarray(args.omegas, dtype=float) * p.kappa:
        t_a = scattering_matrix(p, omega)
        t_o = oracle.linear_response_scattering(model, omega)
        rows = [(f"|T_{u}{v}|", abs(t_a.t[i, j]), abs(t_o.t[i, j])) for i, u in enumerate(MODES) for j, v in enumerate(MODES)]
        m_a, m_o = oracle.output_moments(t_a), oracle.output_moments(t_o)
        rows += [(k, m_a[k], m_o[k]) for k in m_a]
        for name, ref, val in rows:
            rel = abs(val - ref) / ref if ref > 0 else abs(val)
            w.writerow([repr(float(omega / p.kappa)), name, repr(float(ref)), repr(float(val)), repr(float(rel))])
    _emit(args, buf.getvalue())


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # Subcommands repeat the global flags; SUPPRESS keeps their unset defaults
    # from overwriting values given before the subcommand name.
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--config", help="parameter file ([system], [afc], [sweep], [numerics])", **kw)
    g.add_argument("--out", help="output file (default stdout); .json selects JSON for sweeps", **kw)
    g.add_argument("--units", choices=[u.value for u in Units], help="quoted rates are ordinary (x 2 pi) or angular", **kw)
    g.add_argument("--threads", type=int, help="worker processes for sweeps", **kw)
    g.add_argument(
        "--normalized", action="store_true", help="rates are plain numbers in units of your choosing", **kw
    )
    p = common.add_argument_group("parameters (MHz, or plain numbers with --normalized)")
    p.add_argument("--kappa", type=float, **kw)
    p.add_argument("--lam", "--lambda", dest="lam", type=float, **kw)
    p.add_argument("--g-coll", dest="g_coll", type=float, **kw)
    p.add_argument("--gamma-inh", dest="gamma_inh", type=float, **kw)
    p.add_argument("--finesse", type=float, help="AFC finesse; applies G_eff^2 = G^2 / F", **kw)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags(suppress=True)
    parser = argparse.ArgumentParser(prog="photomem", description="Photon-memory entanglement simulator", parents=[_common_flags(suppress=False)])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=func)
        return sp

    def grid(sp):
        sp.add_argument("--omega-min", type=float, default=-3.0)
        sp.add_argument("--omega-max", type=float, default=3.0)
        sp.add_argument("--points", type=int, default=61)

    grid(add("scatter", cmd_scatter, "dump T(omega) on a grid (CSV)"))
    add("decompose", cmd_decompose, "equivalent-circuit parameters at one detuning").add_argument(
        "--omega", type=float, default=0.0
    )
    grid(add("spectrum", cmd_spectrum, "per-mode entanglement and occupations (CSV)"))
    sp = add("rate", cmd_rate, "entanglement rate")
    sp.add_argument("--which", choices=[w.value for w in Which], default=Which.IDLER_MEMORY.value)
    sp.add_argument("--rtol", type=float, default=1e-6)
    add("herald", cmd_herald, "heralding efficiency and photon fluxes").add_argument("--rtol", type=float, default=1e-6)
    add("threshold", cmd_threshold, "instability threshold")
    sp = add("sweep", cmd_sweep, "grid sweep from the [sweep] section of --config")
    sp.add_argument("--metric", choices=[m.value for m in sw.Metric])
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp = add("fig2a", cmd_fig2a, "E_R/kappa over (G, Gamma) at lambda = 0.1 kappa")
    sp.add_argument("--points", type=int, default=sw.FIG2A_POINTS)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp = add("fig2b", cmd_fig2b, "E_R/kappa against lambda at 2G = Gamma = kappa")
    sp.add_argument("--points", type=int, default=36)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp = add("fig4", cmd_fig4, "entanglement rate and heralding efficiency over (lambda, kappa)")
    sp.add_argument("--metric", choices=[sw.Metric.RATE_IDLER_MEMORY.value, sw.Metric.HERALDING.value])
    sp.add_argument("--lam-points", type=int, default=50)
    sp.add_argument("--kappa-points", type=int, default=30)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    add("table1", cmd_table1, "headline numbers for the example device (JSON)").add_argument(
        "--check", action="store_true", help="exit 4 unless the quoted targets are met"
    )
    sp = add("oracle-validate", cmd_oracle_validate, "analytic vs discretized-ensemble discrepancy report (CSV)")
    sp.add_argument("--omegas", type=float, nargs="+", default=[0.0, 0.3, 1.0, 3.0], help="in units of kappa")
    sp.add_argument("--modes", type=int, default=400)
    sp.add_argument("--window", type=float, default=20.0, help="half-width in units of gamma_inh")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ctx = Context(args)
        code = args.func(args, ctx)
        return EXIT_OK if code is None else code
    except (InstabilityError, QuadratureError, UnphysicalStateError, ArithmeticError) as exc:
        sys.stderr.write(f"photomem: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except (ConfigError, ParameterError, DegenerateInputError, ValueError) as exc:
        sys.stderr.write(f"photomem: error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
