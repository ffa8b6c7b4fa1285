#!/usr/bin/env python3
"""Sweep the mollifier approximation constants across dyadic scales.

Prints, per eps: the sup distance to the input, the sup of the mollified
time derivative, and the two fitted constants.  Use --family pliss-l with a
small --k0 to place the coefficient's segment scales inside the sweep.

Example:
    python scripts/mollifier_constant_sweep.py --mu sqrt --family sawtooth
"""

import argparse

import numpy as np

from osgoodlab.modulus import modulus_from_name, normalize_sqrt_cap
from osgoodlab.mollify import (make_kernel, make_mu_sawtooth,
                               verify_mollifier_bounds)
from osgoodlab.pliss import build_sequences, l_from_sequences, make_cutoffs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", default="sqrt")
    ap.add_argument("--family", default="sawtooth",
                    choices=("sawtooth", "pliss-l"))
    ap.add_argument("--k0", type=int, default=30)
    ap.add_argument("--segments", type=int, default=400)
    ap.add_argument("--jmin", type=int, default=4)
    ap.add_argument("--jmax", type=int, default=12)
    args = ap.parse_args()

    mu = modulus_from_name(args.mu)
    kern = make_kernel()
    if args.family == "sawtooth":
        fam = make_mu_sawtooth(mu, depth=args.jmax + 6)
        tg = np.linspace(-0.5, 0.5, 513)
    else:
        mu = normalize_sqrt_cap(mu)
        seqs = build_sequences(mu, args.k0, args.segments)
        cuts = make_cutoffs()
        fam = l_from_sequences(seqs, cuts)
        tg = [np.linspace(seqs.a[0], seqs.a[-1], 801)]
        for n in range(0, seqs.n_segments, max(1, seqs.n_segments // 200)):
            tg.append(seqs.a[n] + seqs.r[n]
                      * np.array([cuts.j_peak_pos, cuts.j_peak_neg]))
        tg = np.unique(np.concatenate(tg))
    eps = [2.0**-j for j in range(args.jmin, args.jmax + 1)]
    _rep, sweep = verify_mollifier_bounds(fam, mu, kern, eps, tg)

    print("eps,sup_diff,sup_deriv,C,Ctilde")
    for row in zip(sweep.eps, sweep.sup_diff, sweep.sup_deriv, sweep.c_fit,
                   sweep.ctilde_fit):
        print(",".join(f"{v:.8g}" for v in row))
    print(f"# family={fam.name}")
    print(f"# C: stepwise {sweep.stepwise_spread('c'):.4g}, "
          f"global {sweep.global_spread('c'):.4g}")
    print(f"# Ctilde: stepwise {sweep.stepwise_spread('ctilde'):.4g}, "
          f"global {sweep.global_spread('ctilde'):.4g}")


if __name__ == "__main__":
    main()
