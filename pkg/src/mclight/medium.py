"""Static medium/channel parameters, control schedules and derived coefficients.

Natural units with ``c = 1`` are used throughout the package.  A channel is one
Lambda sub-system: a weak quantum field coupled on ``|1> -> |p>`` and a strong
control field on ``|2> -> |p>``.  Forward channels propagate along +z,
backward channels along -z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

C_LIGHT = 1.0

_TIME_EPS = 1e-12


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @classmethod
    def parse(cls, value: "str | Direction") -> "Direction":
        if isinstance(value, Direction):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"direction must be 'forward' or 'backward', got {value!r}") from None


@dataclass(frozen=True)
class ChannelSpec:
    label: str
    direction: Direction
    g: float
    gamma: float
    delta: float = 0.0
    omega_opt: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        if not self.g > 0:
            raise ValueError(f"channel {self.label!r}: g must be > 0")
        if not self.gamma > 0:
            raise ValueError(f"channel {self.label!r}: gamma must be > 0")
        if not self.omega_opt > 0:
            raise ValueError(f"channel {self.label!r}: omega_opt must be > 0")

    @property
    def forward(self) -> bool:
        return self.direction is Direction.FORWARD


@dataclass(frozen=True)
class MediumSpec:
    n_line: float
    length: float
    k0: float = 0.0
    gamma12: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        if not self.n_line > 0:
            raise ValueError("n_line must be > 0")
        if not self.length > 0:
            raise ValueError("length must be > 0")
        if self.gamma12 < 0 or self.gamma2 < 0:
            raise ValueError("gamma12 and gamma2 must be >= 0")
        if self.k0 < 0:
            raise ValueError("k0 must be >= 0")


@dataclass(frozen=True)
class ChannelControl:
    """Piecewise-constant control amplitude: ``values[i]`` holds on ``[times[i], times[i+1])``."""

    times: tuple
    values: tuple
    phase: float = 0.0

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if len(times) < 2:
            raise ValueError("a control needs at least two breakpoints")
        if len(values) != len(times) - 1:
            raise ValueError("need exactly len(times) - 1 control values")
        if np.any(np.diff(times) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if min(values) < 0:
            raise ValueError("control amplitudes must be >= 0")

    @classmethod
    def constant(cls, value: float, t_start: float, t_end: float, phase: float = 0.0):
        return cls((t_start, t_end), (value,), phase)

    def amplitude(self, t: float) -> float:
        if t < self.times[0] - _TIME_EPS or t > self.times[-1] + _TIME_EPS:
            raise ValueError(f"t={t} outside schedule domain [{self.times[0]}, {self.times[-1]}]")
        i = int(np.searchsorted(self.times, t + _TIME_EPS, side="right")) - 1
        return self.values[min(max(i, 0), len(self.values) - 1)]


@dataclass(frozen=True)
class ControlSchedule:
    controls: dict = field(default_factory=dict)

    @property
    def labels(self):
        return tuple(self.controls)

    @property
    def domain(self) -> tuple[float, float]:
        starts = [c.times[0] for c in self.controls.values()]
        ends = [c.times[-1] for c in self.controls.values()]
        return max(starts), min(ends)

    def breakpoints(self) -> np.ndarray:
        pts = sorted({t for c in self.controls.values() for t in c.times})
        return np.asarray(pts)

    def rabi(self, label: str, t: float) -> complex:
        """Complex Rabi frequency ``Omega_o(t) * exp(i phi)``."""
        ctrl = self._control(label)
        return ctrl.amplitude(t) * np.exp(1j * ctrl.phase)

    def amplitude(self, label: str, t: float) -> float:
        return self._control(label).amplitude(t)

    def phase(self, label: str) -> float:
        return self._control(label).phase

    def _control(self, label: str) -> ChannelControl:
        try:
            return self.controls[label]
        except KeyError:
            raise KeyError(f"unknown channel label {label!r}") from None

    def segments(self, t_a: float, t_b: float) -> list[tuple[float, float]]:
        """Split ``[t_a, t_b]`` at the schedule breakpoints.

        Every returned interval has constant controls, evaluated at its left end.
        """
        lo, hi = self.domain
        if t_a < lo - _TIME_EPS or t_b > hi + _TIME_EPS:
            raise ValueError(f"interval [{t_a}, {t_b}] outside schedule domain [{lo}, {hi}]")
        if t_b < t_a:
            raise ValueError("t_b must be >= t_a")
        inner = [t for t in self.breakpoints() if t_a + _TIME_EPS < t < t_b - _TIME_EPS]
        edges = [t_a, *inner, t_b]
        return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    def check_channels(self, channels: Sequence[ChannelSpec]) -> None:
        known = {ch.label for ch in channels}
        extra = set(self.controls) - known
        if extra:
            raise KeyError(f"unknown channel label(s) in schedule: {sorted(extra)}")
        missing = known - set(self.controls)
        if missing:
            raise KeyError(f"no control schedule for channel(s): {sorted(missing)}")


@dataclass(frozen=True)
class DerivedCoeffs:
    """Per-channel coefficients at one instant, arrays ordered like ``labels``.

    ``gamma_tilde = gamma - i delta``, ``xi = N g^2 / (c gamma_tilde)``,
    ``Gamma = Omega_o^2 / gamma_tilde``, ``v = c Omega_o^2 / (N g^2)`` and
    ``mu = gamma12 + sum(Gamma)``.
    """

    t: float
    labels: tuple
    forward: np.ndarray
    g: np.ndarray
    omega: np.ndarray
    gamma_tilde: np.ndarray
    xi: np.ndarray
    xi0: np.ndarray
    Gamma: np.ndarray
    v: np.ndarray
    mu: complex
    gamma12: float
    n_line: float

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown channel label {label!r}") from None

    def xi_of(self, label: str) -> complex:
        return complex(self.xi[self.index(label)])

    @property
    def active(self) -> np.ndarray:
        return np.abs(self.omega) > 0

    @property
    def sign(self) -> np.ndarray:
        """+1 for forward channels, -1 for backward ones."""
        return np.where(self.forward, 1.0, -1.0)

    @property
    def signed_inv_xi(self) -> np.ndarray:
        """``1/xi`` for forward channels and ``-1/xi`` for backward ones."""
        return self.sign / self.xi


def derive_coefficients(
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t: float,
) -> DerivedCoeffs:
    schedule.check_channels(channels)
    lo, hi = schedule.domain
    if t < lo - _TIME_EPS or t > hi + _TIME_EPS:
        raise ValueError(f"t={t} outside schedule domain [{lo}, {hi}]")

    g = np.array([ch.g for ch in channels], dtype=float)
    gamma = np.array([ch.gamma for ch in channels], dtype=float)
    delta = np.array([ch.delta for ch in channels], dtype=float)
    omega = np.array([schedule.rabi(ch.label, t) for ch in channels], dtype=complex)
    amp2 = np.abs(omega) ** 2

    gamma_tilde = gamma - 1j * delta
    xi = medium.n_line * g**2 / (C_LIGHT * gamma_tilde)
    xi0 = medium.n_line * g**2 / (C_LIGHT * gamma)
    Gamma = amp2 / gamma_tilde
    v = C_LIGHT * amp2 / (medium.n_line * g**2)
    mu = medium.gamma12 + Gamma.sum()
    return DerivedCoeffs(
        t=float(t),
        labels=tuple(ch.label for ch in channels),
        forward=np.array([ch.forward for ch in channels]),
        g=g,
        omega=omega,
        gamma_tilde=gamma_tilde,
        xi=xi,
        xi0=xi0,
        Gamma=Gamma,
        v=v,
        mu=complex(mu),
        gamma12=medium.gamma12,
        n_line=medium.n_line,
    )


def dark_weights(
    medium: MediumSpec,
    channels: Sequence[ChannelSpec],
    schedule: ControlSchedule,
    t: float,
) -> tuple[dict, float]:
    """Light and atomic weights of the dark multi-color polariton.

    Returns ``({label: w_p}, w_a)`` with ``w_p = (Omega_p/g_p)/sqrt(D)`` and
    ``w_a = -sqrt(n_line)/sqrt(D)``, ``D = n_line + sum |Omega_p/g_p|^2``.
    """
    schedule.check_channels(channels)
    ratios = {ch.label: schedule.rabi(ch.label, t) / ch.g for ch in channels}
    D = medium.n_line + sum(abs(r) ** 2 for r in ratios.values())
    if D == 0:
        raise ValueError("degenerate dark state: all weights vanish")
    root = np.sqrt(D)
    return {k: complex(r / root) for k, r in ratios.items()}, float(-np.sqrt(medium.n_line) / root)


def constant_schedule(values: dict, t_start: float, t_end: float, phases: dict | None = None) -> ControlSchedule:
    phases = phases or {}
    return ControlSchedule(
        {k: ChannelControl.constant(v, t_start, t_end, phases.get(k, 0.0)) for k, v in values.items()}
    )


def step_schedule(times: Iterable[float], values: dict, phases: dict | None = None) -> ControlSchedule:
    """Schedule sharing one set of breakpoints across channels."""
    times = tuple(times)
    phases = phases or {}
    return ControlSchedule({k: ChannelControl(times, tuple(v), phases.get(k, 0.0)) for k, v in values.items()})
