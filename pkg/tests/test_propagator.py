import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rel_l2, single_channel, travel_then_stop
from mclight.gaussian import GaussianPulseSpec, evolve_gaussian
from mclight.medium import ChannelSpec, MediumSpec, constant_schedule, step_schedule
from mclight.propagator import (
    SpectralGrid,
    Synthesis,
    dark_residual,
    envelope_moments,
    evolve,
    init_from_envelope,
    init_probe,
    observables,
    synthesize,
    to_amplitudes,
)


def pulse_for(v, z0=-10.0, l0=1.0, a=1.0, t0=0.0, theta=0.0):
    return GaussianPulseSpec(a_l=a, l0=l0, z0=z0, theta_l=theta, v_l=v, t0=t0)


def test_grid_round_trip_and_norm():
    g = SpectralGrid(256, 10.0)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=256) + 1j * rng.normal(size=256)
    assert np.allclose(g.to_space(g.to_spectrum(psi)), psi)
    # unitary convention: L2 norm in z equals L2 norm in k
    assert np.sum(abs(psi) ** 2) * g.dz == pytest.approx(np.sum(abs(g.to_spectrum(psi)) ** 2) * g.dk)
    with pytest.raises(ValueError):
        SpectralGrid(100, 10.0)
    with pytest.raises(ValueError):
        SpectralGrid(32, 10.0)


def test_initial_state_matches_gaussian():
    med, ch, sch = single_channel()
    p = pulse_for(0.01, a=2.0 + 1.0j)
    st_ = init_probe(p, SpectralGrid(4096, 40.0), med, ch, sch, "l")
    obs = observables(st_)
    assert obs.centroid == pytest.approx(10.0, abs=1e-10)
    assert obs.width == pytest.approx(1.0, rel=1e-10)
    assert obs.polariton_number == pytest.approx(5.0, rel=1e-10)
    assert np.abs(st_.probe_envelope).max() == pytest.approx(p.psi_peak0, rel=1e-6)


def test_evolve_to_t0_is_identity():
    med, ch, sch = single_channel()
    st0 = init_probe(pulse_for(0.01), SpectralGrid(1024, 40.0), med, ch, sch, "l")
    assert evolve(st0, med, ch, sch, 0.0) is st0
    with pytest.raises(ValueError):
        evolve(st0, med, ch, sch, -1.0)


def test_single_channel_is_rigid_advection():
    med, ch, sch = single_channel()
    grid = SpectralGrid(4096, 40.0)
    st0 = init_probe(pulse_for(0.01), grid, med, ch, sch, "l")
    st1 = evolve(st0, med, ch, sch, 2000.0)
    ref = init_probe(pulse_for(0.01, z0=-30.0), grid, med, ch, sch, "l")
    peak = np.abs(ref.probe_envelope).max()
    assert np.abs(st1.probe_envelope - ref.probe_envelope).max() < 1e-6 * peak
    assert np.allclose(np.abs(st1.probe_spectrum), np.abs(st0.probe_spectrum), rtol=1e-12)


def test_composition(resonant_pair):
    med, ch = resonant_pair
    sch = travel_then_stop()
    grid = SpectralGrid(2048, 40.0)
    st0 = init_probe(pulse_for(0.01), grid, med, ch, sch, "l")
    direct = evolve(st0, med, ch, sch, 900.0)
    staged = evolve(evolve(evolve(st0, med, ch, sch, 50.0), med, ch, sch, 100.0), med, ch, sch, 900.0)
    assert np.allclose(direct.probe_spectrum, staged.probe_spectrum, rtol=1e-12, atol=1e-14)


def test_stopped_pulse_stays_put(resonant_pair):
    med, ch = resonant_pair
    sch = travel_then_stop()
    grid = SpectralGrid(4096, 40.0)
    st0 = init_probe(pulse_for(0.01), grid, med, ch, sch, "l")
    a = observables(evolve(st0, med, ch, sch, 200.0))
    b = observables(evolve(st0, med, ch, sch, 1200.0))
    assert abs(b.centroid - a.centroid) < 1e-3
    # width^2 grows by d2 * dt with d2 = 4e-4
    assert b.width**2 - a.width**2 == pytest.approx(4e-4 * 1000, rel=0.02)


def test_matches_closed_form(resonant_pair):
    med, ch = resonant_pair
    sch = travel_then_stop()
    p = pulse_for(0.01)
    st0 = init_probe(p, SpectralGrid(4096, 40.0), med, ch, sch, "l")
    for t in (50.0, 600.0, 2000.0):
        obs = observables(evolve(st0, med, ch, sch, t))
        rep = evolve_gaussian(p, med, ch, sch, t, "l")
        assert obs.centroid == pytest.approx(rep.center[0], abs=1e-6)
        assert obs.width == pytest.approx(rep.width[0], rel=1e-6)
        assert obs.polariton_number == pytest.approx(rep.polariton_number, rel=1e-6)


def test_synthesis_paths_agree(resonant_pair):
    med, ch = resonant_pair
    sch = travel_then_stop()
    grid = SpectralGrid(4096, 40.0)
    state = evolve(init_probe(pulse_for(0.01), grid, med, ch, sch, "l"), med, ch, sch, 500.0)
    spec = synthesize(state, med, ch, Synthesis.SPECTRAL)
    kern = synthesize(state, med, ch, Synthesis.KERNEL)
    dense = synthesize(state, med, ch, Synthesis.DENSE)
    assert np.array_equal(kern["l"], spec["l"])
    assert rel_l2(kern["n"], spec["n"]) < 1e-3
    assert rel_l2(dense["n"], spec["n"]) < 1e-3


def test_kernel_with_phase_mismatch():
    med = MediumSpec(n_line=100.0, length=40.0, k0=0.3)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("n", "backward", 1.0, 1.0), ChannelSpec("m", "forward", 1.5, 1.0)]
    sch = step_schedule([0.0, 100.0, 3000.0], {"l": [1.0, 1.0], "n": [0.0, 1.3], "m": [0.0, 0.8]})
    grid = SpectralGrid(4096, 40.0)
    state = evolve(init_probe(pulse_for(0.01), grid, med, ch, sch, "l"), med, ch, sch, 400.0)
    spec = synthesize(state, med, ch)
    kern = synthesize(state, med, ch, "kernel")
    for lbl in ("n", "m"):
        assert rel_l2(kern[lbl], spec[lbl]) < 2e-3


def test_equal_xi_forward_channel_copies_probe():
    med = MediumSpec(n_line=100.0, length=40.0)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("m", "forward", 1.0, 1.0)]
    sch = constant_schedule({"l": 1.0, "m": 0.5}, 0, 1000)
    grid = SpectralGrid(2048, 40.0)
    state = evolve(init_probe(pulse_for(0.01), grid, med, ch, sch, "l"), med, ch, sch, 300.0)
    env = synthesize(state, med, ch)
    assert np.allclose(env["m"], env["l"], atol=1e-12)
    assert dark_residual(env, grid, med, ch, sch, 300.0) < 1e-12


def test_amplitudes_scale_with_control(resonant_pair):
    med, ch = resonant_pair
    sch = step_schedule([0.0, 100.0, 3000.0], {"l": [1.0, 1.0], "n": [0.0, 1.0]})
    grid = SpectralGrid(2048, 40.0)
    state = evolve(init_probe(pulse_for(0.01), grid, med, ch, sch, "l"), med, ch, sch, 50.0)
    amps = to_amplitudes(synthesize(state, med, ch), grid, med, ch, sch, 50.0)
    assert np.all(amps["n"] == 0)
    env = synthesize(state, med, ch)
    assert np.allclose(amps["l"], env["l"] / 10.0)


def test_dark_residual_needs_two_channels():
    med, ch, sch = single_channel()
    grid = SpectralGrid(1024, 40.0)
    state = init_probe(pulse_for(0.01), grid, med, ch, sch, "l")
    with pytest.raises(ValueError):
        dark_residual(synthesize(state, med, ch), grid, med, ch, sch, 0.0)


def test_dark_residual_shrinks_with_density():
    out = []
    for n_line in (100.0, 1000.0):
        med = MediumSpec(n_line=n_line, length=40.0)
        ch = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("n", "backward", 1.0, 1.0)]
        sch = travel_then_stop(t_end=1e6)
        grid = SpectralGrid(4096, 40.0)
        v = 1.0 / n_line
        st0 = init_probe(pulse_for(v, z0=-10.0, t0=0.0), grid, med, ch, sch, "l")
        state = evolve(st0, med, ch, sch, 200.0)
        out.append(dark_residual(synthesize(state, med, ch), grid, med, ch, sch, 200.0))
    assert out[1] < out[0] / 5


def test_input_errors():
    med, ch, sch = single_channel()
    with pytest.raises(ValueError):
        pulse_for(0.01, l0=0.0)
    with pytest.raises(ValueError):
        init_probe(pulse_for(0.01, z0=-2.0), SpectralGrid(4096, 40.0), med, ch, sch, "l")
    with pytest.raises(ValueError):
        init_probe(pulse_for(0.01, l0=0.1), SpectralGrid(256, 40.0), med, ch, sch, "l")
    with pytest.raises(ValueError):
        init_probe(pulse_for(0.01), SpectralGrid(1024, 30.0), med, ch, sch, "l")
    with pytest.raises(ValueError):
        init_from_envelope(np.zeros(10), SpectralGrid(1024, 40.0), 0.0, med, ch, sch, "l")
    off = step_schedule([0.0, 10.0, 20.0], {"l": [1.0, 0.0]})
    st0 = init_probe(pulse_for(0.01), SpectralGrid(1024, 40.0), med, ch, off, "l")
    with pytest.raises(ZeroDivisionError):
        evolve(st0, med, ch, off, 15.0)
    with pytest.raises(ValueError):
        envelope_moments(np.arange(4.0), np.zeros(4), 1.0)


def test_boundary_leak_warns():
    med, ch, sch = single_channel()
    st0 = init_probe(pulse_for(0.01), SpectralGrid(2048, 40.0), med, ch, sch, "l")
    with pytest.warns(UserWarning):
        evolve(st0, med, ch, sch, 2950.0)


def test_kernel_warns_for_thin_medium():
    med = MediumSpec(n_line=5.0, length=40.0)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("n", "backward", 1.0, 1.0)]
    sch = constant_schedule({"l": 0.5, "n": 0.0}, 0, 100)
    st0 = init_probe(pulse_for(0.05), SpectralGrid(2048, 40.0), med, ch, sch, "l")
    with pytest.warns(UserWarning):
        synthesize(st0, med, ch, "kernel")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        synthesize(st0, med, ch, "spectral")


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 1.2), st.floats(0.0, 1500.0), st.floats(0.7, 1.5), st.floats(-np.pi, np.pi))
def test_spectral_path_tracks_closed_form(om_n, t, l0, theta):
    """Moments agree up to third-order dispersion, which the closed form omits.

    The cubic term shifts the centroid by less than t sum(v_p) / (xi l0)^2 and vanishes for a
    balanced symmetric pair.
    """
    med = MediumSpec(n_line=100.0, length=40.0)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("n", "backward", 1.0, 1.0)]
    sch = step_schedule([0.0, 100.0, 3000.0], {"l": [1.0, 1.0], "n": [0.0, om_n]})
    p = pulse_for(0.01, l0=l0, theta=theta)
    st0 = init_probe(p, SpectralGrid(4096, 40.0), med, ch, sch, "l")
    obs = observables(evolve(st0, med, ch, sch, t))
    rep = evolve_gaussian(p, med, ch, sch, t, "l")
    third = t * (0.01 + 0.01 * om_n**2) / (100.0 * l0) ** 2
    assert obs.centroid == pytest.approx(rep.center[0], abs=2e-6 + third)
    assert obs.width == pytest.approx(rep.width[0], rel=1e-6 + 0.05 * third)


def test_spurious_gain_modes_are_truncated():
    # detuned thin medium: the adiabatic relation has Im omega > 0 near |k| ~ |xi|
    med = MediumSpec(n_line=20.0 * np.sqrt(2.0), length=40.0)
    ch = [ChannelSpec("l", "forward", 1.0, 1.0, 1.0), ChannelSpec("n", "backward", 1.0, 1.0, -1.0)]
    sch = step_schedule([0.0, 100.0, 5000.0], {"l": [1.0, 1.0], "n": [0.0, 1.0]})
    st0 = init_probe(pulse_for(1.0 / med.n_line), SpectralGrid(4096, 40.0), med, ch, sch, "l")
    state = evolve(st0, med, ch, sch, 400.0)
    assert state.gain_mask.any()
    env = state.probe_envelope
    assert np.all(np.isfinite(env))
    assert observables(state).polariton_number < 1.0
