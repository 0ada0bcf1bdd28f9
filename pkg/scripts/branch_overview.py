#!/usr/bin/env python3
"""Trace iso-kappa branches of diatomic waves from the equal-mass limit
toward small mass, recording (sigma, m, alpha_P) landscape data.

One CSV per kappa under --out; sign changes of alpha_P mark solitary-wave
candidates.
"""

import argparse
from pathlib import Path

from fputw import diatomic as di
from fputw import monatomic as mono
from fputw.cli import write_csv
from fputw.continuation import BRANCH_COLUMNS, continue_branch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappas", type=float, nargs="+",
                    default=[1.5, 2.0, 2.5, 3.0])
    ap.add_argument("--m-to", dest="m_to", type=float, default=0.1)
    ap.add_argument("--step", type=float, default=0.02,
                    help="mass step along the branch")
    ap.add_argument("--out", default="results/branches")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = di.DiatomicConfig()
    for kappa in args.kappas:
        mw = mono.solve_profile(kappa, cfg.monatomic())
        seed = di.seed_from_monatomic(mw, cfg)
        branch = continue_branch(seed, "mu", args.m_to, args.step, cfg,
                                 step_in_m=True, max_points=600)
        name = f"branch_k{kappa:.6g}.csv"
        write_csv(out / name, BRANCH_COLUMNS, [p.values() for p in branch.points])
        marks = ", ".join(f"m={branch.points[i].m:.5f}"
                          for i in branch.sign_changes) or "none"
        print(f"kappa={kappa}: {len(branch.points)} points "
              f"({branch.terminated_reason}); alpha_P sign changes: {marks}")


if __name__ == "__main__":
    main()
