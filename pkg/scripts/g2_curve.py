"""g2 of a spreading two-photon state, crossover to classical statistics and the photon count there."""

import argparse

import numpy as np

from mclight.twophoton import TwoPhotonSpec, classical_crossover, counts, g2, g2_limit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=10.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--s-max", type=float, default=1600.0)
    ap.add_argument("--n", type=int, default=17)
    args = ap.parse_args()
    spec = TwoPhotonSpec(args.a, args.b)
    print(f"{'s':>10} {'g2':>10} {'N2':>10} {'N':>10}")
    for s in np.linspace(0.0, args.s_max, args.n):
        c = counts(spec, s)
        print(f"{s:10.2f} {g2(spec, s):10.5f} {c.n2:10.5f} {c.n:10.5f}")
    s_star = classical_crossover(spec)
    print(f"\ng2 = 1 at s = {s_star:.6f} (sqrt(s)/b = {np.sqrt(s_star) / args.b:.4f}), N there = {counts(spec, s_star).n:.5f}")
    print(f"large-s limit of g2 = {g2_limit(spec):.6f}")


if __name__ == "__main__":
    main()
