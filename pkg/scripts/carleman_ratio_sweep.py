#!/usr/bin/env python3
"""Sweep the weighted-inequality probe over a gamma grid and dump the
per-gamma ratios (both normalizations) as CSV.

The output is heuristic evidence on a sampled family, consistent with the
estimate but never a proof of it.

Example:
    python scripts/carleman_ratio_sweep.py --mu linear --T 0.3 \
        --gammas 8,16,32,64,128,256 --out /tmp/ratios.csv
"""

import argparse
import math
import sys

from osgoodlab.carleman import (CarlemanProbeConfig, build_weight_table,
                                probe_carleman)
from osgoodlab.modulus import modulus_from_name


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", default="linear")
    ap.add_argument("--T", type=float, default=0.3)
    ap.add_argument("--gammas", default="8,16,32,64,128,256")
    ap.add_argument("--resolution", type=int, default=256)
    ap.add_argument("--family", default="sine-mode")
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args()

    gammas = tuple(float(g) for g in args.gammas.split(","))
    cfg = CarlemanProbeConfig(T=args.T, gamma_grid=gammas,
                              resolution=args.resolution,
                              test_family=args.family)
    wt = build_weight_table(modulus_from_name(args.mu),
                            math.exp(min(gammas[-1] * args.T * 1.02, 700.0)))
    rep = probe_carleman(cfg, wt)

    lines = ["gamma,lhs,bracket,ratio_sqrt,ratio_gamma"]
    for g, l, b, r1, r2 in zip(rep.gammas, rep.lhs, rep.rhs_bracket,
                               rep.ratios, rep.ratios_gamma):
        lines.append(f"{g:.17g},{l:.17g},{b:.17g},{r1:.17g},{r2:.17g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"# gamma0={rep.gamma0} constant={rep.constant} "
          f"feasible={rep.feasible}", file=sys.stderr)
    print(f"# {rep.statement}", file=sys.stderr)


if __name__ == "__main__":
    main()
