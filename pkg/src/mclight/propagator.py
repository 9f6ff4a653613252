"""Exact adiabatic evolution of the probe polariton spectrum and channel synthesis.

Fourier convention (unitary, periodic box ``[0, L)``)::

    psi(k) = (2 pi)^-1/2 int dz exp(-ikz) Psi(z)
    Psi(z) = (2 pi)^-1/2 int dk exp(+ikz) psi(k)

The spectrum at time ``t`` is ``(I(t0)/I(t)) exp(-i int omega~ dt') psi(t0)``.
``omega~`` is constant on every schedule segment, so the time integral is exact.

Off resonance the adiabatic relation has spurious gain (``Im omega~ > 0``) for
``|k|`` of order ``|xi|``, outside its range of validity.  Modes whose
accumulated phase has net gain are truncated; ``evolve`` warns if they carried
a non-negligible part of the initial norm.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .dispersion import beta, eta_from_xi
from .gaussian import GaussianPulseSpec
from .medium import C_LIGHT, ChannelSpec, ControlSchedule, DerivedCoeffs, MediumSpec, derive_coefficients

EDGE_FRACTION = 1.0 / 32
LEAK_TOL = 1e-4
GAIN_TOL = 1e-10


class Synthesis(str, Enum):
    SPECTRAL = "spectral"
    KERNEL = "kernel"
    DENSE = "dense"


@dataclass(frozen=True)
class SpectralGrid:
    n_k: int
    length: float

    def __post_init__(self):
        if self.n_k < 64 or self.n_k & (self.n_k - 1):
            raise ValueError("n_k must be a power of two >= 64")
        if not self.length > 0:
            raise ValueError("length must be > 0")

    @property
    def dz(self) -> float:
        return self.length / self.n_k

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.n_k) * self.dz

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_k, self.dz)

    @property
    def dk(self) -> float:
        return 2 * np.pi / self.length

    @property
    def k_min(self) -> float:
        return float(self.k.min())

    @property
    def k_max(self) -> float:
        return float(self.k.max())

    def to_space(self, psi_k: np.ndarray) -> np.ndarray:
        return np.fft.ifft(psi_k) * (self.n_k * self.dk / np.sqrt(2 * np.pi))

    def to_spectrum(self, psi_z: np.ndarray) -> np.ndarray:
        return np.fft.fft(psi_z) * (self.dz / np.sqrt(2 * np.pi))


@dataclass(frozen=True)
class MCState:
    """Probe polariton state; ``spectrum0`` is the spectrum at ``t0``."""

    t: float
    t0: float
    grid: SpectralGrid
    probe_label: str
    spectrum0: np.ndarray
    phase_accumulator: np.ndarray
    I_t0: np.ndarray
    I_t: np.ndarray

    @property
    def gain_mask(self) -> np.ndarray:
        """Modes with net accumulated gain; these lie outside the adiabatic band."""
        return self.phase_accumulator.imag > 0

    @property
    def probe_spectrum(self) -> np.ndarray:
        acc = np.where(self.gain_mask, 0.0, self.phase_accumulator)
        out = (self.I_t0 / self.I_t) * np.exp(-1j * acc) * self.spectrum0
        out[self.gain_mask] = 0.0
        return out

    @property
    def probe_envelope(self) -> np.ndarray:
        return self.grid.to_space(self.probe_spectrum)


def _require_mu(co: DerivedCoeffs) -> complex:
    if co.mu == 0:
        raise ZeroDivisionError(f"mu = 0 at t = {co.t}: no active control and gamma12 = 0")
    return co.mu


def _probe_xi(co: DerivedCoeffs, probe_label: str) -> complex:
    if not co.forward[co.index(probe_label)]:
        raise ValueError("the probe channel must be forward")
    return co.xi_of(probe_label)


def i_factor(co: DerivedCoeffs, probe_label: str, k, k0: float = 0.0) -> np.ndarray:
    mu = _require_mu(co)
    b = beta(co, _probe_xi(co, probe_label), k, k0)
    return 1.0 - co.gamma12 / mu + 1j * b / mu


def omega_tilde(co: DerivedCoeffs, probe_label: str, k, k0: float = 0.0) -> np.ndarray:
    mu = _require_mu(co)
    xi_l = _probe_xi(co, probe_label)
    k = np.asarray(k, dtype=float)
    b = beta(co, xi_l, k, k0)
    I = 1.0 - co.gamma12 / mu + 1j * b / mu
    return (-1j * co.gamma12 + mu * (k - k0) / xi_l - b) / I


def gaussian_spectrum(pulse: GaussianPulseSpec, k: np.ndarray, phi_l: float = 0.0) -> np.ndarray:
    """Unit-norm Gaussian spectrum centred at ``v_l t0 - z0`` in space."""
    l0 = pulse.l0
    return (l0 / np.sqrt(np.pi)) ** 0.5 * np.exp(
        -(k**2) * l0**2 / 2 + 1j * k * (pulse.z0 - pulse.v_l * pulse.t0) + 1j * (pulse.theta_l - phi_l)
    )


def _state_at(spectrum0, grid, t0, medium, channels, schedule, probe_label) -> MCState:
    co = derive_coefficients(medium, channels, schedule, t0)
    I0 = i_factor(co, probe_label, grid.k, medium.k0)
    return MCState(
        t=float(t0),
        t0=float(t0),
        grid=grid,
        probe_label=probe_label,
        spectrum0=spectrum0,
        phase_accumulator=np.zeros(grid.n_k, complex),
        I_t0=I0,
        I_t=I0.copy(),
    )


def init_probe(
    pulse: GaussianPulseSpec,
    grid: SpectralGrid,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    probe_label: str,
) -> MCState:
    if abs(grid.length - medium.length) > 1e-12 * medium.length:
        raise ValueError("grid length must equal the medium length")
    if pulse.l0 < 4 * grid.dz:
        raise ValueError(f"l0 = {pulse.l0} is not resolved by dz = {grid.dz} (need l0 >= 4 dz)")
    zc = pulse.center0
    if zc - 4 * pulse.l0 <= 0 or zc + 4 * pulse.l0 >= medium.length:
        raise ValueError(f"pulse centre {zc} +- 4 l0 is clipped by the medium [0, {medium.length}]")
    phi_l = schedule.phase(probe_label)
    spec = pulse.a_l * gaussian_spectrum(pulse, grid.k, phi_l)
    return _state_at(spec, grid, pulse.t0, medium, channels, schedule, probe_label)


def init_from_envelope(
    psi_z: np.ndarray,
    grid: SpectralGrid,
    t0: float,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    probe_label: str,
) -> MCState:
    """Start from a sampled probe ratio field ``Psi_l(z)`` on the grid nodes."""
    psi_z = np.asarray(psi_z, dtype=complex)
    if psi_z.shape != (grid.n_k,):
        raise ValueError("envelope must be sampled on the grid nodes")
    return _state_at(grid.to_spectrum(psi_z), grid, t0, medium, channels, schedule, probe_label)


def _leak_fraction(grid: SpectralGrid, psi_z: np.ndarray) -> float:
    w = np.abs(psi_z) ** 2
    total = w.sum()
    if total == 0:
        return 0.0
    m = max(1, int(grid.n_k * EDGE_FRACTION))
    return float((w[:m].sum() + w[-m:].sum()) / total)


def evolve(
    state: MCState,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t_target: float,
) -> MCState:
    if t_target < state.t:
        raise ValueError("t_target must be >= state.t")
    if t_target == state.t:
        return state
    k = state.grid.k
    acc = state.phase_accumulator.copy()
    for a, b in schedule.segments(state.t, t_target):
        co = derive_coefficients(medium, channels, schedule, a)
        acc += omega_tilde(co, state.probe_label, k, medium.k0) * (b - a)
    co = derive_coefficients(medium, channels, schedule, t_target)
    new = replace(state, t=float(t_target), phase_accumulator=acc, I_t=i_factor(co, state.probe_label, k, medium.k0))
    w0 = np.abs(state.spectrum0) ** 2
    dropped = float(w0[new.gain_mask].sum() / w0.sum()) if w0.sum() > 0 else 0.0
    if dropped > GAIN_TOL:
        warnings.warn(f"{dropped:.2e} of the initial norm sits in modes with spurious adiabatic gain; truncated")
    leak = _leak_fraction(state.grid, new.probe_envelope)
    if leak > LEAK_TOL:
        warnings.warn(f"{leak:.2e} of the probe norm sits at the medium boundary at t = {t_target}")
    return new


def _static_xi(medium: MediumSpec, channels: Sequence[ChannelSpec]) -> np.ndarray:
    g = np.array([ch.g for ch in channels])
    gt = np.array([ch.gamma - 1j * ch.delta for ch in channels])
    return medium.n_line * g**2 / (C_LIGHT * gt)


def _exp_convolve(psi: np.ndarray, a: complex, h: float) -> np.ndarray:
    """``C(z_j) = int_0^{z_j} exp(-a (z_j - z')) Psi(z') dz'`` for piecewise-linear ``Psi``."""
    ah = a * h
    E = np.exp(-ah)
    # weights of Psi_j (far end) and Psi_{j+1} (near end) over one cell
    j1 = (1.0 - E - ah * E) / a**2
    w_far = j1 / h
    w_near = (1.0 - E) / a - w_far
    x = np.empty_like(psi)
    x[0] = 0.0
    x[1:] = w_near * psi[1:] + w_far * psi[:-1]
    return lfilter([1.0], [1.0, -E], x)


def synthesize(
    state: MCState,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    method: Synthesis | str = Synthesis.SPECTRAL,
) -> dict:
    """Ratio-field envelopes ``Psi_p(z)`` of every channel on the grid nodes."""
    method = Synthesis(method)
    grid = state.grid
    labels = [ch.label for ch in channels]
    forward = np.array([ch.forward for ch in channels])
    xi = _static_xi(medium, channels)
    il = labels.index(state.probe_label)
    xi_l = xi[il]
    k0 = medium.k0
    psi_k = state.probe_spectrum
    if method is not Synthesis.SPECTRAL:
        l_rms = observables(state).width
        if np.abs(xi_l) * l_rms < 10:
            warnings.warn(f"xi_l * l = {np.abs(xi_l) * l_rms:.3g} < 10: kernel forms are poorly conditioned")

    if method is Synthesis.SPECTRAL:
        e = eta_from_xi(xi, forward, xi_l, grid.k, k0)
        return {lbl: grid.to_space((1.0 + 1j * e[i]) * psi_k) for i, lbl in enumerate(labels)}

    out = {}
    if method is Synthesis.KERNEL:
        psi_z = grid.to_space(psi_k)
        h = grid.dz
        for i, lbl in enumerate(labels):
            if i == il:
                out[lbl] = psi_z.copy()
                continue
            x = xi[i]
            a = x - 1j * k0
            if forward[i]:
                conv = _exp_convolve(psi_z, a, h)
                out[lbl] = x * (1.0 - x / xi_l) * conv + (x / xi_l) * psi_z
            else:
                conv = _exp_convolve(psi_z[::-1], a, h)[::-1]
                out[lbl] = x * (1.0 - 2j * k0 / xi_l + x / xi_l) * conv - (x / xi_l) * psi_z
        return out

    # dense-medium form: one-sided kernel acting on the probe shifted by 1/xi_l
    u = 1.0 / (xi_l * (1.0 - 1j * k0 / xi_l))
    k = grid.k
    shifted = np.exp(1j * k * u) * psi_k
    for i, lbl in enumerate(labels):
        if i == il:
            out[lbl] = grid.to_space(psi_k)
            continue
        x = xi[i]
        pref = x * (1.0 - 1j * k0 / xi_l)
        den = (x - 1j * k0 + 1j * k) if forward[i] else (x - 1j * k0 - 1j * k)
        out[lbl] = grid.to_space(pref * shifted / den)
    return out


def to_amplitudes(
    envelopes: dict,
    grid: SpectralGrid,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t: float,
) -> dict:
    """Electromagnetic envelopes ``A_p = Omega_p exp(-+ i k0 z) Psi_p / (sqrt(N) g_p)``."""
    z = grid.z
    out = {}
    for ch in channels:
        om = schedule.rabi(ch.label, t)
        if om == 0:
            out[ch.label] = np.zeros(grid.n_k, complex)
            continue
        sgn = -1.0 if ch.forward else 1.0
        out[ch.label] = om * np.exp(sgn * 1j * medium.k0 * z) * envelopes[ch.label] / (np.sqrt(medium.n_line) * ch.g)
    return out


def dark_residual(
    envelopes: dict,
    grid: SpectralGrid,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t: float,
) -> float:
    """Largest relative L2 distance between the k0-dephased envelopes of active channels."""
    active = [ch for ch in channels if schedule.amplitude(ch.label, t) > 0]
    if len(active) < 2:
        raise ValueError("dark residual needs at least two active channels")
    z = grid.z
    deph = {}
    for ch in active:
        sgn = -1.0 if ch.forward else 1.0
        deph[ch.label] = np.exp(sgn * 1j * medium.k0 * z) * envelopes[ch.label]
    worst = 0.0
    labels = list(deph)
    for i, p in enumerate(labels):
        for q in labels[i + 1 :]:
            scale = max(np.linalg.norm(deph[p]), np.linalg.norm(deph[q]))
            worst = max(worst, float(np.linalg.norm(deph[p] - deph[q]) / scale))
    return worst


@dataclass(frozen=True)
class Observables:
    centroid: float
    width: float
    polariton_number: float


def envelope_moments(z: np.ndarray, psi_z: np.ndarray, dz: float) -> Observables:
    """Moments of ``|Psi|^2``; ``width = sqrt(2 var)`` equals ``l`` of ``exp(-z^2/2l^2)``."""
    w = np.abs(psi_z) ** 2
    norm = w.sum() * dz
    if norm == 0:
        raise ValueError("zero-norm state: moments undefined")
    c = float((z * w).sum() * dz / norm)
    var = float(((z - c) ** 2 * w).sum() * dz / norm)
    return Observables(centroid=c, width=float(np.sqrt(2 * var)), polariton_number=float(norm))


def observables(state: MCState) -> Observables:
    g = state.grid
    return envelope_moments(g.z, state.probe_envelope, g.dz)
