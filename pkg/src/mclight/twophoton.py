"""Two-polariton (EPR pair) correlations under stationary-light spreading.

Every function takes the accumulated spreading ``s = int d2 dt`` (length^2)
directly, so the correlation math is independent of the control schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class TwoPhotonSpec:
    a: float
    b: float
    delta_l2: float = 0.0

    def __post_init__(self):
        if not (self.a > self.b > 0):
            raise ValueError("need a > b > 0")
        if self.delta_l2 < 0:
            raise ValueError("delta_l2 must be >= 0")

    def spread(self, s: float) -> "SpreadState":
        return SpreadState.from_spec(self, s)


@dataclass(frozen=True)
class SpreadState:
    s: float
    a: float
    b: float
    b_tau: float
    b1: float
    l_l2: float
    l_coh2: float
    l_l1: float
    l_coh1: float
    l_l2_0: float
    l_l1_0: float

    @classmethod
    def from_spec(cls, spec: TwoPhotonSpec, s: float) -> "SpreadState":
        if s < 0:
            raise ValueError("accumulated spreading s must be >= 0")
        a, b = spec.a, spec.b
        b_tau2 = b**2 + s
        b12 = b_tau2 + spec.delta_l2
        l_l1 = np.sqrt(a**2 + b12)
        l_l1_0 = np.sqrt(a**2 + b**2)
        l_coh1 = np.sqrt(2.0) * (l_l1 / a**2) * np.sqrt(l_l1**2 * l_l1_0**2 - a**4)
        return cls(
            s=float(s),
            a=a,
            b=b,
            b_tau=float(np.sqrt(b_tau2)),
            b1=float(np.sqrt(b12)),
            l_l2=float(np.sqrt(2 * a**2 + b12)),
            l_coh2=float(np.sqrt(b12) * np.sqrt(2 + b12 / a**2)),
            l_l1=float(l_l1),
            l_coh1=float(l_coh1),
            l_l2_0=float(np.sqrt(2 * a**2 + b**2)),
            l_l1_0=float(l_l1_0),
        )


def _n2(st: SpreadState) -> float:
    return (st.b / st.b1) * (st.l_l2_0 / st.l_l2)


def two_polariton_wavefunction(spec: TwoPhotonSpec, s: float, Z1, Z2):
    """``sqrt(N2) * Y_norm(Z1, Z2)``; ``Y_norm`` is unit-normalised over the plane."""
    st = spec.spread(s)
    Z1 = np.asarray(Z1, dtype=float)
    Z2 = np.asarray(Z2, dtype=float)
    y = (np.pi * st.a * st.l_coh2) ** -0.5
    y = y * np.exp(-(Z1**2 + Z2**2) / (2 * st.l_l2**2)) * np.exp(-((Z2 - Z1) ** 2) / (2 * st.l_coh2**2))
    return np.sqrt(_n2(st)) * y + 0j


def antidiagonal_width(spec: TwoPhotonSpec, s: float) -> float:
    """Closed-form ``sqrt(2 var_w)`` of ``|Psi_II|^2`` along ``w = (Z2 - Z1)/sqrt(2)``."""
    st = spec.spread(s)
    return float((1.0 / st.l_l2**2 + 2.0 / st.l_coh2**2) ** -0.5)


@dataclass(frozen=True)
class Counts:
    n2: float
    n: float
    p_detect: float


def counts(spec: TwoPhotonSpec, s: float) -> Counts:
    st = spec.spread(s)
    n2 = _n2(st)
    n = 2.0 * np.sqrt(2.0) / np.sqrt(1.0 + st.b1**2 / st.b**2)
    return Counts(n2=float(n2), n=float(n), p_detect=float(n2 / 2))


def correlator_II(spec: TwoPhotonSpec, s: float, Z1, Z2):
    """Second-order field correlator on the coincidence plane, real and non-negative."""
    st = spec.spread(s)
    Z1 = np.asarray(Z1, dtype=float)
    Z2 = np.asarray(Z2, dtype=float)
    pref = (4.0 / np.sqrt(np.pi)) * st.l_l2_0 * st.b / (st.l_coh1 * st.a**2)
    return pref * np.exp(-(Z1**2 + Z2**2) / (2 * st.l_l1**2)) * np.exp(-((Z1 - Z2) ** 2) / (2 * st.l_coh1**2))


def g2(spec: TwoPhotonSpec, s: float) -> float:
    st = spec.spread(s)
    num = st.a**2 + st.l_l1_0**2 * st.b1**2 / st.b**2
    return float((st.b / (2 * st.b_tau)) * num / (st.l_l2_0 * st.l_l2))


def g2_limit(spec: TwoPhotonSpec) -> float:
    """Exact ``s -> inf`` limit of ``g2`` (``delta_l2`` is irrelevant there)."""
    a, b = spec.a, spec.b
    return float((a**2 + b**2) / (2 * b * np.sqrt(2 * a**2 + b**2)))


def classical_crossover(spec: TwoPhotonSpec, s_max: float | None = None) -> float:
    """Spreading ``s`` at which ``g2`` reaches 1, or ``inf`` if it never does.

    Returns 0 when a delayed partner (``delta_l2 > 0``) already starts at ``g2 >= 1``.
    """
    if g2(spec, 0.0) >= 1.0:
        return 0.0
    if g2_limit(spec) <= 1.0:
        return float("inf")
    hi = s_max if s_max is not None else spec.b**2
    while g2(spec, hi) < 1.0:
        hi *= 2.0
    return float(brentq(lambda s: g2(spec, s) - 1.0, 0.0, hi, xtol=1e-14, rtol=1e-14))


def preservation_margin(spec: TwoPhotonSpec, s: float) -> tuple[float, bool]:
    if s < 0:
        raise ValueError("accumulated spreading s must be >= 0")
    margin = spec.b**2 - s
    return float(margin), bool(margin >= 0)
