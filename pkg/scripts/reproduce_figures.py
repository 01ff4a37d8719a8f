"""Regenerate the sweep grids behind the rate and heralding figures.

Writes CSV files plus a short JSON summary into the output directory.

    python3 scripts/reproduce_figures.py --out results/ --threads 4
"""

import argparse
import json
import time
from pathlib import Path

from photomem import sweep as sw
from photomem.config import load_table1


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--quick", action="store_true", help="coarse grids for a smoke run")
    args = parser.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)

    summary = {}
    start = time.perf_counter()

    fig2a = sw.run_sweep(sw.fig2a_spec(points=11 if args.quick else sw.FIG2A_POINTS), args.threads)
    fig2a.write(args.out / "fig2a_rate_vs_g_gamma.csv")
    i, j = fig2a.argmax()
    summary["fig2a"] = {
        "argmax_g_coll": fig2a.axis1[i],
        "argmax_gamma_inh": fig2a.axis2[j],
        "cells_from_matching": sw.argmax_distance_from_matching(fig2a),
    }

    for spec in sw.fig2b_specs(points=8 if args.quick else 36):
        res = sw.run_sweep(spec, args.threads)
        res.write(args.out / f"fig2b_{spec.metric.value}.csv")
        summary[f"fig2b_{spec.metric.value}_monotone"] = sw.is_monotone_increasing(res.values)

    lam_points, kappa_points = (6, 5) if args.quick else (50, 30)
    for metric in (sw.Metric.RATE_IDLER_MEMORY, sw.Metric.HERALDING):
        res = sw.run_sweep(sw.fig4_spec(metric, lam_points, kappa_points), args.threads)
        res.write(args.out / f"fig4_{metric.value}.csv")
        summary[f"fig4_{metric.value}_max"] = res.max()

    report = sw.report_table1(load_table1())
    report["checks"] = sw.check_table1(report)
    summary["table1"] = report
    summary["elapsed_s"] = time.perf_counter() - start

    (args.out / "summary.json").write_text(json.dumps(summary, indent=2, default=str) + "\n")
    print(json.dumps(summary, indent=2, default=str))


if __name__ == "__main__":
    main()
