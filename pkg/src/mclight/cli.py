"""Command line front end: scenario runs and figure tables, all emitted as CSV."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import dispersion as disp
from . import gaussian as gs
from . import mboracle as mb
from . import propagator as prop
from . import twophoton as tp
from .medium import derive_coefficients
from .scenario import Scenario, SchemaError, load_scenario

FMT = "%.12e"
FIGURES = ("fig2", "fig3", "fig4")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return FMT % x


def write_csv(path: Path, header: Sequence[str], columns: Sequence[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    return path


def _scenario(args) -> Scenario:
    if not args.scenario:
        raise SchemaError("--scenario is required for this subcommand")
    return load_scenario(args.scenario)


def _out_dir(args, sc: Scenario | None) -> Path:
    if args.out:
        return Path(args.out)
    return Path(sc.run.out if sc is not None else "out")


def _nk(args, sc: Scenario) -> int:
    return args.nk if args.nk is not None else sc.run.nk


def _nz(args, sc: Scenario) -> int:
    return args.nz if args.nz is not None else sc.run.nz


# ---------------------------------------------------------------- subcommands


def cmd_dispersion(args) -> list[Path]:
    sc = _scenario(args)
    t = args.t if args.t is not None else sc.run.snapshots[0]
    co = derive_coefficients(sc.medium, sc.channels, sc.schedule, t)
    xi_l = co.xi_of(sc.probe_label)
    n = args.nk if args.nk is not None else 257
    k = sc.medium.k0 + np.linspace(-8.0, 8.0, n) / sc.pulse.l0
    rep = disp.dispersion_report(co, xi_l, sc.pulse.l0, k, sc.medium.k0)
    header = sc.header_lines() + [
        f"t = {t!r}",
        f"v = {FMT % rep.v}",
        f"re_d2 = {FMT % rep.d2.real}",
        f"im_d2 = {FMT % rep.d2.imag}",
        f"stopping_residual = {FMT % rep.stopping_residual}",
        f"spreading_time = {FMT % rep.spreading_time}",
    ]
    rows = [(kk.real, w.real, w.imag) for kk, w in rep.omega_samples]
    return [write_csv(_out_dir(args, sc) / "dispersion.csv", header, ["k", "re_omega", "im_omega"], rows)]


def cmd_propagate(args) -> list[Path]:
    sc = _scenario(args)
    out = _out_dir(args, sc)
    grid = prop.SpectralGrid(_nk(args, sc), sc.medium.length)
    state = prop.init_probe(sc.pulse, grid, sc.medium, sc.channels, sc.schedule, sc.probe_label)
    labels = [ch.label for ch in sc.channels]
    cols = ["z"]
    for lbl in labels:
        cols += [f"re_psi_{lbl}", f"im_psi_{lbl}"]
    for lbl in labels:
        cols += [f"re_A_{lbl}", f"im_A_{lbl}"]
    summary = []
    paths = []
    for i, t in enumerate(sc.run.snapshots):
        state = prop.evolve(state, sc.medium, sc.channels, sc.schedule, t)
        env = prop.synthesize(state, sc.medium, sc.channels)
        amps = prop.to_amplitudes(env, grid, sc.medium, sc.channels, sc.schedule, t)
        data = [grid.z]
        for lbl in labels:
            data += [env[lbl].real, env[lbl].imag]
        for lbl in labels:
            data += [amps[lbl].real, amps[lbl].imag]
        paths.append(write_csv(out / f"propagate_{i:03d}.csv", sc.header_lines() + [f"t = {t!r}"], cols, zip(*data)))
        obs = prop.observables(state)
        try:
            res = prop.dark_residual(env, grid, sc.medium, sc.channels, sc.schedule, t)
        except ValueError:
            res = float("nan")
        summary.append((t, obs.centroid, obs.width, obs.polariton_number, res))
    paths.append(
        write_csv(
            out / "propagate_summary.csv",
            sc.header_lines(),
            ["t", "centroid", "width", "polariton_number", "dark_residual"],
            summary,
        )
    )
    return paths


def cmd_gaussian(args) -> list[Path]:
    sc = _scenario(args)
    labels = [ch.label for ch in sc.channels]
    cols = ["t", "center", "width", "N"] + [f"absA_{lbl}" for lbl in labels] + [f"W_{lbl}" for lbl in labels] + ["W_out"]
    rows = []
    for t in sc.run.snapshots:
        rep = gs.evolve_gaussian(sc.pulse, sc.medium, sc.channels, sc.schedule, t, sc.probe_label)
        il = labels.index(sc.probe_label)
        try:
            en = gs.emitted_pulse_and_energies(sc.pulse, sc.medium, sc.channels, sc.schedule, t, sc.probe_label)
            w = [en.pulses[lbl].energy for lbl in labels] + [en.w_out]
        except ValueError:
            w = [float("nan")] * (len(labels) + 1)
        rows.append([t, rep.center[il], rep.width[il], rep.polariton_number, *np.abs(rep.amplitude), *w])
    return [write_csv(_out_dir(args, sc) / "gaussian.csv", sc.header_lines(), cols, rows)]


def cmd_mb_check(args) -> list[Path]:
    sc = _scenario(args)
    grid = mb.MBGrid(_nz(args, sc), sc.medium.length)
    inj = mb.ProbeInjection.from_pulse(sc.pulse)
    run = mb.simulate_mb(sc.medium, sc.channels, sc.schedule, sc.probe_label, inj, grid, sc.run.snapshots)
    ad = mb.adiabatic_from_mb(run.snapshots, sc.medium, sc.channels, sc.schedule, sc.probe_label, _nk(args, sc))
    rows = [(r.t, r.channel, r.l2_err, r.centroid_err, r.width_err) for r in mb.compare_adiabatic(run.snapshots, ad)]
    header = sc.header_lines() + [f"mb.n_z = {grid.n_z}", f"mb.dt = {grid.step!r}", f"mb.scheme = {grid.scheme}"]
    cols = ["t", "channel", "l2_err", "centroid_err", "width_err"]
    return [write_csv(_out_dir(args, sc) / "mb_check.csv", header, cols, rows)]


# ---------------------------------------------------------------- two-photon tables


def fig2_tables(spec: tp.TwoPhotonSpec, s_values: Sequence[float], out: Path, n: int = 161) -> list[Path]:
    paths = []
    for s in s_values:
        st = spec.spread(s)
        half = 4.0 * st.l_l2
        z = np.linspace(-half, half, n)
        Z1, Z2 = np.meshgrid(z, z, indexing="ij")
        psi = np.abs(tp.two_polariton_wavefunction(spec, s, Z1, Z2))
        header = [
            f"a = {spec.a!r}",
            f"b = {spec.b!r}",
            f"delta_l2 = {spec.delta_l2!r}",
            f"s = {s!r}",
            f"l_l2 = {FMT % st.l_l2}",
            f"l_coh2 = {FMT % st.l_coh2}",
        ]
        rows = zip(Z1.ravel(), Z2.ravel(), psi.ravel())
        name = f"fig2_s{np.sqrt(s) / spec.b:g}b.csv"
        paths.append(write_csv(out / name, header, ["Z1", "Z2", "abs_psi_II"], rows))
    return paths


def fig3_table(spec: tp.TwoPhotonSpec, s_max: float, n: int, out: Path) -> Path:
    rows = []
    for s in np.linspace(0.0, s_max, n):
        c = tp.counts(spec, s)
        rows.append((s, c.n2, c.n))
    header = [f"a = {spec.a!r}", f"b = {spec.b!r}", f"delta_l2 = {spec.delta_l2!r}"]
    return write_csv(out / "fig3.csv", header, ["s", "N2", "N"], rows)


def fig4_table(spec: tp.TwoPhotonSpec, s_max: float, n: int, out: Path) -> Path:
    s_star = tp.classical_crossover(spec)
    rows = [(0.0, tp.g2(spec, 0.0), "g2=0.5")]
    for s in np.linspace(0.0, s_max, n)[1:]:
        rows.append((s, tp.g2(spec, s), ""))
    if np.isfinite(s_star):
        rows.append((s_star, tp.g2(spec, s_star), "g2=1"))
    rows.append((float("inf"), tp.g2_limit(spec), "asymptote"))
    header = [f"a = {spec.a!r}", f"b = {spec.b!r}", f"delta_l2 = {spec.delta_l2!r}", f"s_classical = {FMT % s_star}"]
    return write_csv(out / "fig4.csv", header, ["s", "g2", "note"], rows)


def cmd_twophoton(args) -> list[Path]:
    spec = tp.TwoPhotonSpec(args.a, args.b, args.delta_l2)
    out = _out_dir(args, None)
    paths = []
    if args.fig2:
        paths += fig2_tables(spec, args.fig2, out)
    if args.fig3:
        paths.append(fig3_table(spec, args.fig3[0], int(args.fig3[1]), out))
    if args.fig4:
        paths.append(fig4_table(spec, args.fig4[0], int(args.fig4[1]), out))
    if not paths:
        raise SchemaError("twophoton: choose at least one of --fig2, --fig3, --fig4")
    return paths


def emit_figure(fig_id: str, out: Path, a: float = 10.0, b: float = 1.0) -> list[Path]:
    if fig_id not in FIGURES:
        raise ValueError(f"unknown figure id {fig_id!r}; expected one of {', '.join(FIGURES)}")
    spec = tp.TwoPhotonSpec(a, b)
    if fig_id == "fig2":
        return fig2_tables(spec, [(r * b) ** 2 for r in (5, 20, 40)], out)
    if fig_id == "fig3":
        return [fig3_table(spec, (40 * b) ** 2, 401, out)]
    return [fig4_table(spec, (40 * b) ** 2, 401, out)]


def cmd_figure(args) -> list[Path]:
    return emit_figure(args.id, _out_dir(args, None), args.a, args.b)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario YAML file")
    common.add_argument("--out", help="output directory (default: run.out or ./out)")
    common.add_argument("--nk", type=int, help="spectral grid size / k samples")
    common.add_argument("--nz", type=int, help="Maxwell-Bloch spatial nodes")
    common.add_argument("--seed", type=int, default=0, help="reserved; every computation is deterministic")

    parser = argparse.ArgumentParser(prog="mclight", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("dispersion", parents=[common], help="dispersion relation and design quantities")
    p.add_argument("--t", type=float, help="evaluation time (default: first snapshot)")
    p.set_defaults(func=cmd_dispersion)
    sub.add_parser("propagate", parents=[common], help="spectral propagation snapshots").set_defaults(func=cmd_propagate)
    sub.add_parser("gaussian", parents=[common], help="closed-form Gaussian pulse").set_defaults(func=cmd_gaussian)
    sub.add_parser("mb-check", parents=[common], help="Maxwell-Bloch vs adiabatic").set_defaults(func=cmd_mb_check)

    p = sub.add_parser("twophoton", parents=[common], help="two-photon correlation tables")
    p.add_argument("--a", type=float, default=10.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--delta-l2", type=float, default=0.0)
    p.add_argument("--fig2", type=float, nargs="+", metavar="S", help="spreading values s (length^2)")
    p.add_argument("--fig3", type=float, nargs=2, metavar=("S_MAX", "N"))
    p.add_argument("--fig4", type=float, nargs=2, metavar=("S_MAX", "N"))
    p.set_defaults(func=cmd_twophoton)

    p = sub.add_parser("figure", parents=[common], help="figure tables (fig2, fig3, fig4)")
    p.add_argument("id")
    p.add_argument("--a", type=float, default=10.0)
    p.add_argument("--b", type=float, default=1.0)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        paths = args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, ZeroDivisionError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
