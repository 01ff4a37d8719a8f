"""Where the resonant closed form for the threshold stops being the threshold.

For each (Gamma/kappa, C) cell prints the scanned threshold, the resonant
closed form, and the detuning of the first zero of the denominator.

    python3 scripts/threshold_map.py > threshold_map.csv
"""

import argparse
import csv
import math
import sys

from photomem.model import SystemParams, threshold_analytic, threshold_closed_form, threshold_scan


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ratios", type=float, nargs="+", default=[0.05, 0.1, 0.25, 0.5, 1.0, 2.0])
    parser.add_argument("--cooperativities", type=float, nargs="+", default=[0.25, 1.0, 4.0, 16.0, 32.0])
    args = parser.parse_args(argv)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["gamma_over_kappa", "cooperativity", "threshold", "closed_form", "analytic", "omega_star"])
    for ratio in args.ratios:
        for coop in args.cooperativities:
            gamma = ratio
            p = SystemParams(kappa=1.0, lam=0.0, g_coll=0.5 * math.sqrt(coop * gamma), gamma_inh=gamma)
            lam_c, omega_star = threshold_scan(p)
            out.writerow([ratio, coop, repr(lam_c), repr(threshold_closed_form(p)),
                          repr(float(threshold_analytic(p.kappa, p.gamma_inh, p.g_coll))),
                          repr(abs(omega_star))])


if __name__ == "__main__":
    main()
