"""Closed-form evolution of Gaussian probe pulses through a control schedule.

Position convention: at ``t0`` the probe envelope is centred at ``v_l t0 - z0``.
Afterwards the joint envelope moves by ``int v dt`` and each channel sits at a
kinematic offset ``-Re(dz_p)`` from that point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dispersion import D2Mode, group_velocity, is_stationary, second_order_dispersion
from .medium import C_LIGHT, ChannelSpec, ControlSchedule, DerivedCoeffs, MediumSpec, derive_coefficients

IMAG_RTOL = 1e-6


@dataclass(frozen=True)
class GaussianPulseSpec:
    a_l: complex
    l0: float
    z0: float
    theta_l: float
    v_l: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.l0 > 0:
            raise ValueError("l0 must be > 0")
        if not self.v_l > 0:
            raise ValueError("v_l must be > 0")

    @property
    def delta_t0(self) -> float:
        return self.l0 / self.v_l

    @property
    def center0(self) -> float:
        return self.v_l * self.t0 - self.z0

    @property
    def A_lo(self) -> complex:
        """Peak electromagnetic amplitude of the input pulse (modulus scale, no phase)."""
        return abs(self.a_l) * (np.sqrt(np.pi) * C_LIGHT * self.delta_t0) ** -0.5

    @property
    def psi_peak0(self) -> float:
        """Peak of the probe ratio field at ``t0``."""
        return abs(self.a_l) * (np.sqrt(np.pi) * self.l0) ** -0.5


def _integrals(medium, channels, schedule, t0, t) -> tuple[float, float]:
    """``(int v dt, int d2 dt)`` over ``[t0, t]``, exact for piecewise-constant controls."""
    if t < t0:
        raise ValueError("t must be >= t0")
    dist = 0.0
    spread = 0.0
    for a, b in schedule.segments(t0, t):
        co = derive_coefficients(medium, channels, schedule, a)
        dist += group_velocity(co) * (b - a)
        if np.any(co.active):
            d2 = second_order_dispersion(co, D2Mode.GENERAL)
            if abs(d2.imag) > IMAG_RTOL * max(abs(d2), 1e-300):
                raise ValueError(
                    f"complex second-order dispersion {d2:.6g} on [{a}, {b}]: widths are not real "
                    "off the optimal detunings; use the spectral propagator instead"
                )
            spread += d2.real * (b - a)
    return dist, spread


def kinematic_shifts(coeffs: DerivedCoeffs, probe_label: str) -> tuple[np.ndarray, np.ndarray, complex]:
    """Per-channel ``(dz_p, dl2_p)`` and the common ``B_l``.

    ``dz_m = v/mu - 1/xi_m`` forward, ``dz_n = v/mu + 1/xi_n`` backward; the
    width corrections follow from the same second-order expansion of ``ln I``.
    Everything vanishes when no control is active.
    """
    n = len(coeffs.labels)
    if not np.any(coeffs.active) or coeffs.mu == 0:
        return np.zeros(n, complex), np.zeros(n, complex), 0j
    mu = coeffs.mu
    v = group_velocity(coeffs)
    inv = 1.0 / coeffs.xi
    il = coeffs.index(probe_label)
    inv_l = 1.0 / coeffs.xi[il]
    dz = v / mu - coeffs.signed_inv_xi
    B = (2.0 / mu) * (np.sum(coeffs.v * inv) - v * inv_l)
    dz_l = dz[il]
    cross = np.where(coeffs.forward, 2 * inv * (inv_l - inv), -2 * inv * (inv_l + inv))
    dl2 = dz * (dz - 2 * dz_l) + cross + B
    return dz, dl2, complex(B)


@dataclass(frozen=True)
class GaussianReport:
    t: float
    labels: tuple
    base_center: float
    spread: float
    center: np.ndarray
    width: np.ndarray
    shift: np.ndarray
    dl2: np.ndarray
    B_l: complex
    psi_peak: np.ndarray
    amplitude: np.ndarray
    polariton_number: float
    decay: float = field(default=1.0)

    def channel(self, label: str) -> dict:
        i = self.labels.index(label)
        return {
            "center": self.center[i],
            "width": self.width[i],
            "shift": self.shift[i],
            "dl2": self.dl2[i],
            "psi_peak": self.psi_peak[i],
            "amplitude": self.amplitude[i],
        }


def _probe_xi(medium, channels, probe_label) -> complex:
    ch = next((c for c in channels if c.label == probe_label), None)
    if ch is None:
        raise KeyError(f"probe label {probe_label!r} not found")
    return medium.n_line * ch.g**2 / (C_LIGHT * (ch.gamma - 1j * ch.delta))


def evolve_gaussian(
    pulse: GaussianPulseSpec,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t: float,
    probe_label: str,
) -> GaussianReport:
    xi_l = _probe_xi(medium, channels, probe_label)
    if abs(xi_l) * pulse.l0 < 10:
        warnings.warn(f"xi_l * l0 = {abs(xi_l) * pulse.l0:.3g} < 10: dense-medium expansion is poor")
    if medium.k0 * pulse.l0 > 0 and medium.k0 / abs(xi_l) > 0.1:
        warnings.warn("k0/xi_l is not small; closed-form shifts assume k0 ~ 0")
    dist, spread = _integrals(medium, channels, schedule, pulse.t0, t)
    co = derive_coefficients(medium, channels, schedule, t)
    dz, dl2, B = kinematic_shifts(co, probe_label)
    width2 = pulse.l0**2 - dl2.real + spread
    if np.any(width2 <= 0):
        raise ValueError("non-positive width^2: pulse too short for the closed form")
    width = np.sqrt(width2)
    base = pulse.center0 + dist
    decay = float(np.exp(-medium.gamma2 * (t - pulse.t0)))

    il = co.index(probe_label)
    phase = np.angle(pulse.a_l) + pulse.theta_l
    phi = np.array([schedule.phase(lbl) for lbl in co.labels])
    psi_peak = pulse.psi_peak0 * (pulse.l0 / width) * decay
    # A_p = Omega_p Psi_p / (sqrt(N) g_p), i.e. sqrt(v_p/v_l) * (l0/l) * A_lo
    amp = np.sqrt(co.v / pulse.v_l) * (pulse.l0 / width) * pulse.A_lo * decay
    amp = amp * np.exp(1j * (phase + phi - phi[il]))
    n_pol = float(abs(pulse.a_l) ** 2 * pulse.l0 / width[il] * decay**2)
    return GaussianReport(
        t=float(t),
        labels=co.labels,
        base_center=float(base),
        spread=float(spread),
        center=base - dz.real,
        width=width,
        shift=dz,
        dl2=dl2,
        B_l=B,
        psi_peak=psi_peak,
        amplitude=amp,
        polariton_number=n_pol,
        decay=decay,
    )


def stationary_amplitudes(
    pulse: GaussianPulseSpec,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t: float,
    probe_label: str,
) -> dict:
    """Peak electromagnetic amplitudes of all channels during stationary light."""
    co = derive_coefficients(medium, channels, schedule, t)
    if not is_stationary(co):
        raise ValueError("stopping condition violated at t; amplitudes are not stationary")
    rep = evolve_gaussian(pulse, medium, channels, schedule, t, probe_label)
    return dict(zip(rep.labels, rep.amplitude))


def polariton_number(
    pulse: GaussianPulseSpec,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t: float,
    probe_label: str,
) -> float:
    return evolve_gaussian(pulse, medium, channels, schedule, t, probe_label).polariton_number


@dataclass(frozen=True)
class EmittedPulse:
    label: str
    duration: float
    energy: float


@dataclass(frozen=True)
class EnergyReport:
    pulses: dict
    w_out: float
    w_lo: float
    omega_bar: float
    v_travel: float
    width: float


def energy_budget(
    w_lo: float,
    omega_opt: np.ndarray,
    v: np.ndarray,
    omega_l: float,
    l0: float,
    width: float,
    gamma2: float = 0.0,
    elapsed: float = 0.0,
) -> tuple[np.ndarray, float]:
    """Per-channel ``W_m`` and the average-frequency form of ``W_out``."""
    omega_opt = np.asarray(omega_opt, dtype=float)
    v = np.asarray(v, dtype=float)
    v_travel = v.sum()
    if not v_travel > 0:
        raise ValueError("no active forward channel")
    scale = w_lo * (l0 / width) * np.exp(-2 * gamma2 * elapsed)
    w_m = scale * (omega_opt / omega_l) * (v / v_travel)
    omega_bar = float(np.sum(omega_opt * v) / v_travel)
    return w_m, float(scale * omega_bar / omega_l)


def emitted_pulse_and_energies(
    pulse: GaussianPulseSpec,
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t_out: float,
    probe_label: str,
    w_lo: float | None = None,
) -> EnergyReport:
    """Output pulses once the field is released as traveling light.

    ``w_lo`` defaults to ``|a_l|^2 omega_l`` (photon number times carrier frequency).
    Backward channels carry no energy to ``z = L``.
    """
    co = derive_coefficients(medium, channels, schedule, t_out)
    fwd = co.forward & co.active
    if not np.any(fwd):
        raise ValueError("no active forward channel at t_out")
    if np.any(co.active & ~co.forward):
        raise ValueError("backward channels still active at t_out: field is not released")
    rep = evolve_gaussian(pulse, medium, channels, schedule, t_out, probe_label)
    by_label = {ch.label: ch for ch in channels}
    omega_l = by_label[probe_label].omega_opt
    if w_lo is None:
        w_lo = abs(pulse.a_l) ** 2 * omega_l
    il = co.index(probe_label)
    width = float(rep.width[il])
    omegas = np.array([by_label[lbl].omega_opt for lbl in co.labels])
    v_fwd = np.where(fwd, co.v, 0.0)
    w_m, w_out = energy_budget(w_lo, omegas, v_fwd, omega_l, pulse.l0, width, medium.gamma2, t_out - pulse.t0)
    v_travel = float(v_fwd.sum())
    pulses = {
        lbl: EmittedPulse(lbl, float(rep.width[i] / v_travel) if fwd[i] else 0.0, float(w_m[i]))
        for i, lbl in enumerate(co.labels)
    }
    omega_bar = float(np.sum(omegas * v_fwd) / v_travel)
    return EnergyReport(pulses=pulses, w_out=w_out, w_lo=float(w_lo), omega_bar=omega_bar, v_travel=v_travel, width=width)
