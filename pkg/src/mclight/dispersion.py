"""Dispersion relation of the coupled multi-color field and derived design quantities."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .medium import C_LIGHT, ChannelSpec, DerivedCoeffs

STATIONARY_RTOL = 1e-9


class D2Mode(str, Enum):
    GENERAL = "general"
    TRAVELING_OPTIMAL = "traveling_optimal"
    STATIONARY = "stationary"
    STATIONARY_OPTIMAL = "stationary_optimal"


def eta_from_xi(xi, forward, xi_l: complex, k, k0: float = 0.0) -> np.ndarray:
    """Coupling functions ``eta_{p,l}(k, k0)``, shape ``(n_channels, len(k))``.

    ``psi_p(k) = (1 + i eta_{p,l}) psi_l(k)`` relates every channel to the probe.
    Only the static ``xi`` and propagation directions enter.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    inv_l = 1.0 / xi_l
    inv = (1.0 / np.asarray(xi))[:, None]
    km = k[None, :] - k0
    kp = k[None, :] + k0
    fwd = (inv_l - inv) * km / (1.0 + 1j * inv * km)
    bwd = (inv_l * km + inv * kp) / (1.0 - 1j * inv * kp)
    return np.where(np.asarray(forward)[:, None], fwd, bwd)


def eta(coeffs: DerivedCoeffs, xi_l: complex, k, k0: float = 0.0) -> np.ndarray:
    return eta_from_xi(coeffs.xi, coeffs.forward, xi_l, k, k0)


def beta(coeffs: DerivedCoeffs, xi_l: complex, k, k0: float = 0.0) -> np.ndarray:
    return (coeffs.Gamma[:, None] * eta(coeffs, xi_l, k, k0)).sum(axis=0)


def _require_mu(coeffs: DerivedCoeffs) -> complex:
    if coeffs.mu == 0:
        raise ZeroDivisionError("mu = 0: no active control and gamma12 = 0")
    return coeffs.mu


def dispersion_relation(coeffs: DerivedCoeffs, xi_l: complex, k, k0: float = 0.0) -> np.ndarray:
    """Complex ``omega(k)`` of the joint envelope (dissipative part in ``Im``)."""
    mu = _require_mu(coeffs)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    b = beta(coeffs, xi_l, k, k0)
    return ((k - k0) * mu / xi_l - b) / (1.0 + 1j * b / mu)


def group_velocity(coeffs: DerivedCoeffs) -> float:
    return float(np.sum(coeffs.sign * coeffs.v))


def stopping_residual(coeffs: DerivedCoeffs) -> float:
    """``sum_m Omega_m^2/g_m^2 - sum_n Omega_n^2/g_n^2``; zero at the stopping point."""
    return float(np.sum(coeffs.sign * np.abs(coeffs.omega) ** 2 / coeffs.g**2))


def is_stationary(coeffs: DerivedCoeffs, rtol: float = STATIONARY_RTOL) -> bool:
    scale = float(np.sum(np.abs(coeffs.omega) ** 2 / coeffs.g**2))
    return abs(stopping_residual(coeffs)) <= rtol * scale


def second_order_dispersion(coeffs: DerivedCoeffs, mode: D2Mode | str = D2Mode.GENERAL) -> complex:
    """Second-order dispersion coefficient ``d2`` in ``omega ~ v k - i d2 k^2 / 2``.

    ``general`` sums over unordered channel pairs,
    ``2/mu * sum_{p<q} Gamma_p Gamma_q (s_p - s_q)^2`` with ``s = +1/xi`` forward and
    ``-1/xi`` backward.  ``stationary`` / ``stationary_optimal`` are the ``v = 0``
    reductions with complex and on-resonance ``xi``; ``traveling_optimal`` uses
    on-resonance ``xi`` for forward-only configurations.
    """
    mode = D2Mode(mode)
    act = coeffs.active
    if mode is D2Mode.GENERAL:
        mu = _require_mu(coeffs)
        s = coeffs.signed_inv_xi[act]
        G = coeffs.Gamma[act]
        diff2 = (s[:, None] - s[None, :]) ** 2
        pair = np.triu(G[:, None] * G[None, :] * diff2, k=1)
        return complex(2.0 * pair.sum() / mu)
    if mode is D2Mode.TRAVELING_OPTIMAL:
        if np.any(act & ~coeffs.forward):
            raise ValueError("traveling_optimal requires no active backward channel")
        mu = _require_mu(coeffs)
        inv0 = 1.0 / coeffs.xi0[act]
        G = coeffs.Gamma[act]
        pair = np.triu(G[:, None] * G[None, :] * (inv0[:, None] - inv0[None, :]) ** 2, k=1)
        return complex(2.0 * pair.sum() / mu)
    if not is_stationary(coeffs):
        raise ValueError(
            f"{mode.value} mode needs the stopping condition; residual = {stopping_residual(coeffs):.3e}"
        )
    if mode is D2Mode.STATIONARY:
        return complex(2.0 * np.sum(coeffs.v[act] / coeffs.xi[act]))
    return complex(2.0 * np.sum(coeffs.v[act] / coeffs.xi0[act]))


def optimal_detunings(channels: Sequence[ChannelSpec], probe_label: str, delta_l: float) -> dict:
    """Detunings minimising stationary spreading, referenced to the probe channel.

    Forward channels get ``delta_l g_m^2/g_l^2``, backward ones ``-delta_l g_n^2/g_l^2``.
    """
    probe = next((ch for ch in channels if ch.label == probe_label), None)
    if probe is None:
        raise KeyError(f"probe label {probe_label!r} not found")
    if not probe.forward:
        raise ValueError("the probe channel must be forward")
    ref = delta_l / probe.g**2
    return {ch.label: (ref if ch.forward else -ref) * ch.g**2 for ch in channels}


def detuning_balance(coeffs: DerivedCoeffs) -> float:
    """``sum_p v_p Delta_p / g_p^2`` over all channels; zero when spreading is minimal."""
    delta = -coeffs.gamma_tilde.imag
    return float(np.sum(coeffs.v * delta / coeffs.g**2))


def spreading_time(l0: float, coeffs: DerivedCoeffs) -> float:
    """``l0^2 / (2 sum_p v_p / xi0_p)``; infinite when every control is off."""
    if l0 < 0:
        raise ValueError("l0 must be >= 0")
    denom = 2.0 * float(np.sum(coeffs.v / coeffs.xi0))
    if denom == 0:
        return float("inf")
    return l0**2 / denom


@dataclass(frozen=True)
class DispersionReport:
    v: float
    d2: complex
    stopping_residual: float
    spreading_time: float
    omega_samples: np.ndarray | None = None


def dispersion_report(
    coeffs: DerivedCoeffs,
    xi_l: complex,
    l0: float,
    k=None,
    k0: float = 0.0,
) -> DispersionReport:
    samples = None
    if k is not None:
        k = np.asarray(k, dtype=float)
        samples = np.column_stack([k, dispersion_relation(coeffs, xi_l, k, k0)])
    return DispersionReport(
        v=group_velocity(coeffs),
        d2=second_order_dispersion(coeffs, D2Mode.GENERAL),
        stopping_residual=stopping_residual(coeffs),
        spreading_time=spreading_time(l0, coeffs),
        omega_samples=samples,
    )


def velocity_from_residual(coeffs: DerivedCoeffs) -> np.ndarray:
    """Per-channel ``c Omega^2/(N g^2)``; same algebra as the stopping residual scaled by ``c/N``."""
    return C_LIGHT * np.abs(coeffs.omega) ** 2 / (coeffs.n_line * coeffs.g**2)
