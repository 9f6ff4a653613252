import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single_channel, travel_then_stop
from mclight.gaussian import (
    GaussianPulseSpec,
    emitted_pulse_and_energies,
    energy_budget,
    evolve_gaussian,
    kinematic_shifts,
    polariton_number,
    stationary_amplitudes,
)
from mclight.medium import ChannelSpec, MediumSpec, derive_coefficients, step_schedule
from mclight.scenario import load_scenario

ROOT = __import__("pathlib").Path(__file__).resolve().parents[1]


def pulse(a=1.0, l0=1.0, v=0.01, t0=0.0):
    return GaussianPulseSpec(a_l=a, l0=l0, z0=-10.0, theta_l=0.0, v_l=v, t0=t0)


def test_pulse_spec():
    p = pulse(a=2.0, l0=2.0, v=0.01)
    assert p.delta_t0 == 200.0
    assert p.center0 == 10.0
    assert p.A_lo == pytest.approx(2.0 / np.sqrt(np.sqrt(np.pi) * 200.0))
    with pytest.raises(ValueError):
        pulse(l0=-1.0)


def test_single_channel_is_rigid():
    med, ch, sch = single_channel()
    p = pulse(a=1.5)
    for t in (0.0, 700.0):
        rep = evolve_gaussian(p, med, ch, sch, t, "l")
        assert rep.center[0] == pytest.approx(10.0 + 0.01 * t)
        assert rep.width[0] == pytest.approx(1.0)
        assert rep.polariton_number == pytest.approx(2.25)
        assert abs(rep.amplitude[0]) == pytest.approx(p.A_lo)


def test_stationary_pair_example(resonant_pair):
    med, ch = resonant_pair
    sch = travel_then_stop()
    p = pulse()
    tau = 1000.0
    rep = evolve_gaussian(p, med, ch, sch, 100.0 + tau, "l")
    assert rep.spread == pytest.approx(4e-4 * tau)
    assert rep.base_center == pytest.approx(11.0)
    # the probe sits 1/xi behind the joint envelope, the backward channel 1/xi ahead
    assert rep.shift[0] == pytest.approx(-0.01)
    assert rep.shift[1] == pytest.approx(0.01)
    assert rep.center[1] - rep.center[0] == pytest.approx(-0.02)
    l = np.sqrt(1.0 + 4e-4 * tau - rep.dl2[0].real)
    assert rep.width[0] == pytest.approx(l)
    assert rep.polariton_number == pytest.approx(1.0 / l)
    amps = stationary_amplitudes(p, med, ch, sch, 100.0 + tau, "l")
    assert abs(amps["n"]) == pytest.approx(abs(amps["l"]))


def test_polariton_number_at_double_width(resonant_pair):
    med, ch = resonant_pair
    sch = travel_then_stop(t_end=1e5)
    p = pulse(a=2.0)
    rep = evolve_gaussian(p, med, ch, sch, 100.0, "l")
    # width^2 grows to 4 l0^2 after 3 l0^2 / d2 of storage
    t = 100.0 + (3.0 + rep.dl2[0].real) / 4e-4
    assert evolve_gaussian(p, med, ch, sch, t, "l").width[0] == pytest.approx(2.0)
    assert polariton_number(p, med, ch, sch, t, "l") == pytest.approx(2.0)


def test_unbalanced_amplitudes():
    med = MediumSpec(n_line=100.0, length=40.0)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("n", "backward", 2.0, 1.0)]
    sch = step_schedule([0.0, 100.0, 3000.0], {"l": [1.0, 1.0], "n": [0.0, 2.0]})
    amps = stationary_amplitudes(pulse(), med, ch, sch, 500.0, "l")
    # equal v_p; the per-channel widths differ only at order 1/xi^2
    assert abs(amps["n"]) == pytest.approx(abs(amps["l"]), rel=1e-3)
    sch2 = step_schedule([0.0, 100.0, 3000.0], {"l": [1.0, 1.0], "n": [0.0, 1.0]})
    with pytest.raises(ValueError):
        stationary_amplitudes(pulse(), med, ch, sch2, 500.0, "l")
    rep = evolve_gaussian(pulse(), med, ch, sch2, 500.0, "l")
    ratio = np.sqrt(0.0025 / 0.01) * rep.width[0] / rep.width[1]
    assert abs(rep.amplitude[1] / rep.amplitude[0]) == pytest.approx(ratio)


def test_control_phase_carries_to_amplitude(resonant_pair):
    from mclight.medium import ChannelControl, ControlSchedule

    med, ch = resonant_pair
    sch = ControlSchedule(
        {"l": ChannelControl((0.0, 3000.0), (1.0,), 0.3), "n": ChannelControl((0.0, 100.0, 3000.0), (0.0, 1.0), 1.1)}
    )
    rep = evolve_gaussian(pulse(a=1j), med, ch, sch, 500.0, "l")
    assert np.angle(rep.amplitude[0]) == pytest.approx(np.pi / 2)
    assert np.angle(rep.amplitude[1]) == pytest.approx(np.pi / 2 + 0.8)


def test_off_optimal_detuning_refused():
    med = MediumSpec(n_line=100.0, length=40.0)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0, 0.5), ChannelSpec("n", "backward", 1.0, 1.0, 0.5)]
    sch = step_schedule([0.0, 100.0, 3000.0], {"l": [1.0, 1.0], "n": [0.0, 1.0]})
    with pytest.raises(ValueError, match="complex second-order"):
        evolve_gaussian(pulse(), med, ch, sch, 500.0, "l")
    ok = [ChannelSpec("l", "forward", 1.0, 1.0, 0.5), ChannelSpec("n", "backward", 1.0, 1.0, -0.5)]
    evolve_gaussian(pulse(), med, ok, sch, 500.0, "l")


def test_decay():
    med = MediumSpec(n_line=100.0, length=40.0, gamma2=1e-3)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0)]
    sch = step_schedule([0.0, 3000.0], {"l": [1.0]})
    rep = evolve_gaussian(pulse(), med, ch, sch, 500.0, "l")
    assert rep.decay == pytest.approx(np.exp(-0.5))
    assert rep.polariton_number == pytest.approx(np.exp(-1.0))


def test_shifts_vanish_with_controls_off():
    med = MediumSpec(n_line=100.0, length=40.0)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("n", "backward", 1.0, 1.0)]
    co = derive_coefficients(med, ch, step_schedule([0.0, 1.0], {"l": [0.0], "n": [0.0]}), 0.0)
    dz, dl2, B = kinematic_shifts(co, "l")
    assert np.all(dz == 0) and np.all(dl2 == 0) and B == 0


def test_release_scenario():
    sc = load_scenario(ROOT / "scenarios" / "release.yaml")
    args = (sc.pulse, sc.medium, list(sc.channels), sc.schedule)
    rep = evolve_gaussian(*args, 1500.0, "l")
    im = rep.labels.index("m")
    # released into a channel with the probe's xi: no kinematic offset remains
    assert rep.shift[im] == pytest.approx(0.0, abs=1e-15)
    assert rep.dl2[im] == pytest.approx(0.0, abs=1e-15)
    en = emitted_pulse_and_energies(*args, 1500.0, "l")
    l = np.sqrt(1.0 + 4e-4 * 1000.0)
    assert en.width == pytest.approx(l)
    assert en.w_out == pytest.approx(2.0 / l)
    assert en.pulses["m"].energy == pytest.approx(en.w_out)
    assert en.pulses["n"].energy == 0.0
    assert en.pulses["m"].duration == pytest.approx(l / 0.01)
    with pytest.raises(ValueError, match="backward"):
        emitted_pulse_and_energies(*args, 500.0, "l")


def test_energy_budget_examples():
    w_m, w_out = energy_budget(1.0, [1.0], [0.01], 1.0, 1.0, 1.0)
    assert w_out == pytest.approx(1.0) and w_m[0] == pytest.approx(1.0)
    w_m, w_out = energy_budget(1.0, [2.0], [0.01], 1.0, 1.0, 1.2)
    assert w_out == pytest.approx(2.0 / 1.2)
    assert w_out > 1.0
    with pytest.raises(ValueError):
        energy_budget(1.0, [1.0], [0.0], 1.0, 1.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0.1, 5.0), st.floats(1e-4, 0.1)), min_size=1, max_size=6),
    st.floats(0.1, 10.0),
    st.floats(0.5, 3.0),
    st.floats(0.5, 3.0),
)
def test_energy_additivity(rows, w_lo, omega_l, width):
    om = np.array([r[0] for r in rows])
    v = np.array([r[1] for r in rows])
    w_m, w_out = energy_budget(w_lo, om, v, omega_l, 1.0, width)
    assert w_m.sum() == pytest.approx(w_out, rel=1e-12)
    omega_bar = np.sum(om * v) / v.sum()
    assert (w_out > w_lo) == (omega_bar / omega_l > width / 1.0)
