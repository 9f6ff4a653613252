"""Stop a slow-light pulse with a counterpropagating control and compare the spectral path with the closed form."""

import argparse
from pathlib import Path

import numpy as np

from mclight.gaussian import evolve_gaussian
from mclight.propagator import SpectralGrid, dark_residual, evolve, init_probe, observables, synthesize
from mclight.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=str(ROOT / "scenarios" / "stationary.yaml"))
    ap.add_argument("--times", type=float, nargs="+", default=[0.0, 100.0, 500.0, 1000.0, 2000.0, 4000.0])
    args = ap.parse_args()
    sc = load_scenario(args.scenario)
    med, ch, sch = sc.medium, list(sc.channels), sc.schedule
    grid = SpectralGrid(sc.run.nk, med.length)
    state = init_probe(sc.pulse, grid, med, ch, sch, sc.probe_label)
    print(f"{'t':>8} {'centroid':>10} {'closed':>10} {'width':>8} {'closed':>8} {'N':>8} {'closed':>8} {'dark':>9}")
    for t in args.times:
        state = evolve(state, med, ch, sch, t)
        obs = observables(state)
        rep = evolve_gaussian(sc.pulse, med, ch, sch, t, sc.probe_label)
        il = rep.labels.index(sc.probe_label)
        try:
            dark = dark_residual(synthesize(state, med, ch), grid, med, ch, sch, t)
        except ValueError:
            dark = np.nan
        print(
            f"{t:8.1f} {obs.centroid:10.5f} {rep.center[il]:10.5f} {obs.width:8.5f} {rep.width[il]:8.5f} "
            f"{obs.polariton_number:8.5f} {rep.polariton_number:8.5f} {dark:9.2e}"
        )


if __name__ == "__main__":
    main()
