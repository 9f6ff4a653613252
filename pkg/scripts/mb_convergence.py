"""Maxwell-Bloch vs adiabatic errors on successively halved grids."""

import argparse
from pathlib import Path

from mclight.mboracle import MBGrid, ProbeInjection, adiabatic_from_mb, compare_adiabatic, simulate_mb
from mclight.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=str(ROOT / "scenarios" / "mb_stationary.yaml"))
    ap.add_argument("--levels", type=int, default=3, help="number of grids, starting at run.nz")
    args = ap.parse_args()
    sc = load_scenario(args.scenario)
    med, ch, sch = sc.medium, list(sc.channels), sc.schedule
    nz = sc.run.nz
    for _ in range(args.levels):
        run = simulate_mb(med, ch, sch, sc.probe_label, ProbeInjection.from_pulse(sc.pulse), MBGrid(nz, med.length), sc.run.snapshots, keep_atoms=False)
        rows = compare_adiabatic(run.snapshots, adiabatic_from_mb(run.snapshots, med, ch, sch, sc.probe_label))
        cells = "  ".join(f"{r.t:.0f}/{r.channel}:{r.l2_err:.3e}" for r in rows)
        print(f"n_z={nz:5d}  {cells}")
        nz = 2 * nz - 1


if __name__ == "__main__":
    main()
