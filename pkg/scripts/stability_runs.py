#!/usr/bin/env python3
"""Stability study: build the kappa = 5/2 wave family near the solitary
mass, sample each solitary core onto the lattice and integrate, recording
core energy loss and outer amplitude; a monatomic run provides the baseline.
"""

import argparse
from pathlib import Path

from fputw import diatomic as di
from fputw import lattice as lat
from fputw import monatomic as mono
from fputw.cli import write_csv
from fputw.continuation import continue_branch, find_solitary

MASSES = (0.33797458, 0.32800968, 0.32711659, 0.32702829, 0.32701947)


def diagnostics_csv(path, series):
    rows = zip(series.times, series.energy_full, series.energy_core,
               series.gamma_core, series.a_out, series.shift_total,
               series.alarms)
    write_csv(path, ("t", "E_full", "E_core", "Gamma_core", "A_out",
                     "shift_total", "alarm"), rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa", type=float, default=2.5)
    ap.add_argument("--T", type=float, default=5000.0)
    ap.add_argument("--out", default="results/stability")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = di.DiatomicConfig()
    sim = lat.SimConfig(horizon=args.T)

    mw = mono.solve_profile(args.kappa, cfg.monatomic())
    seed = di.seed_from_monatomic(mw, cfg)
    branch = continue_branch(seed, "mu", 2.3, 0.1, cfg,
                             stop_when=lambda p: p.sign_change)
    solitary = find_solitary(branch, cfg).waves[0]
    waves = []
    for m in MASSES:
        mu = 1.0 / m - 1.0
        guess = min(branch.waves + [solitary], key=lambda w: abs(w.mu - mu))
        waves.append(di.solve_wave(args.kappa, "mu", mu, guess, cfg))
    waves.append(solitary)

    summary = []
    for wave in waves:
        state = lat.sample_initial_condition(wave, resolution=512)
        series = lat.run_simulation(state, sim)
        tag = f"m{wave.m:.8f}"
        diagnostics_csv(out / f"diatomic_{tag}.csv", series)
        summary.append((wave.m, wave.alpha_p, series.gamma_at(args.T),
                        max(series.a_out)))
        print(f"m={wave.m:.8f} alpha_P={wave.alpha_p:+.3e} "
              f"Gamma({args.T:g})={series.gamma_at(args.T):+.3e}")

    state = lat.sample_initial_condition(mw, resolution=512)
    series = lat.run_simulation(state, sim)
    diagnostics_csv(out / "monatomic_baseline.csv", series)
    print(f"monatomic baseline Gamma({args.T:g})={series.gamma_at(args.T):+.3e}")
    write_csv(out / "summary.csv", ("m", "alpha_P", "Gamma_final", "A_out_max"),
              summary)


if __name__ == "__main__":
    main()
