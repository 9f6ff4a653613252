"""Scenario files: YAML documents with sections medium, channels, schedule, probe, run."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .gaussian import GaussianPulseSpec
from .medium import C_LIGHT, ChannelControl, ChannelSpec, ControlSchedule, MediumSpec

SECTIONS = {"medium", "channels", "schedule", "probe", "run"}
MEDIUM_KEYS = {"n_line", "length", "k0", "gamma12", "gamma2"}
CHANNEL_KEYS = {"label", "direction", "g", "gamma", "delta", "omega_opt"}
SCHEDULE_KEYS = {"times", "values", "phase"}
PROBE_KEYS = {"label", "a", "l0", "z0", "theta", "t0"}
RUN_KEYS = {"nk", "nz", "snapshots", "out"}


class SchemaError(ValueError):
    """Invalid scenario document; the message names the offending key path."""


@dataclass(frozen=True)
class RunSpec:
    nk: int = 4096
    nz: int = 256
    snapshots: tuple = ()
    out: str = "out"


@dataclass(frozen=True)
class Scenario:
    medium: MediumSpec
    channels: tuple
    schedule: ControlSchedule
    probe_label: str
    pulse: GaussianPulseSpec
    run: RunSpec = field(default_factory=RunSpec)
    raw: dict = field(default_factory=dict, compare=False)

    def header_lines(self) -> list[str]:
        """Resolved parameters, one ``key = value`` per line, in a fixed order."""
        lines = [f"medium.{k} = {v!r}" for k, v in asdict(self.medium).items()]
        for ch in self.channels:
            lines.append(
                f"channel.{ch.label} = direction={ch.direction.value} g={ch.g!r} gamma={ch.gamma!r} "
                f"delta={ch.delta!r} omega_opt={ch.omega_opt!r}"
            )
        for lbl, ctrl in self.schedule.controls.items():
            lines.append(f"schedule.{lbl} = times={list(ctrl.times)} values={list(ctrl.values)} phase={ctrl.phase!r}")
        p = self.pulse
        lines.append(f"probe.label = {self.probe_label}")
        lines.append(
            f"probe = a={p.a_l!r} l0={p.l0!r} z0={p.z0!r} theta={p.theta_l!r} t0={p.t0!r} v_l={p.v_l!r}"
        )
        r = self.run
        lines.append(f"run = nk={r.nk} nz={r.nz} snapshots={list(r.snapshots)} out={r.out}")
        return lines


def _check_keys(obj, allowed: set, where: str, required: set = frozenset()):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a mapping")
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown key(s) {', '.join(f'{where}.{k}' for k in sorted(unknown))}")
    missing = set(required) - set(obj)
    if missing:
        raise SchemaError(f"missing key(s): {', '.join(f'{where}.{k}' for k in sorted(missing))}")


def _wrap(where: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except SchemaError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SchemaError(f"{where}: {exc}") from None


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise SchemaError("scenario: expected a mapping at top level")
    _check_keys(doc, SECTIONS, "scenario", required={"medium", "channels", "schedule", "probe"})

    _check_keys(doc["medium"], MEDIUM_KEYS, "medium", required={"n_line", "length"})
    medium = _wrap("medium", MediumSpec, **doc["medium"])

    if not isinstance(doc["channels"], list) or not doc["channels"]:
        raise SchemaError("channels: expected a non-empty list")
    channels = []
    for i, ch in enumerate(doc["channels"]):
        where = f"channels[{i}]"
        _check_keys(ch, CHANNEL_KEYS, where, required={"label", "direction", "g", "gamma"})
        channels.append(_wrap(where, ChannelSpec, **ch))
    labels = [ch.label for ch in channels]
    if len(set(labels)) != len(labels):
        raise SchemaError("channels: duplicate labels")

    sched = doc["schedule"]
    if not isinstance(sched, dict):
        raise SchemaError("schedule: expected a mapping of channel label to table")
    controls = {}
    for lbl, tab in sched.items():
        where = f"schedule.{lbl}"
        _check_keys(tab, SCHEDULE_KEYS, where, required={"times", "values"})
        controls[lbl] = _wrap(where, ChannelControl, tuple(tab["times"]), tuple(tab["values"]), float(tab.get("phase", 0.0)))
    schedule = ControlSchedule(controls)
    _wrap("schedule", schedule.check_channels, channels)

    probe = doc["probe"]
    _check_keys(probe, PROBE_KEYS, "probe", required={"label", "a", "l0", "z0"})
    label = probe["label"]
    if label not in labels:
        raise SchemaError(f"probe.label: unknown channel {label!r}")
    ch_l = channels[labels.index(label)]
    if not ch_l.forward:
        raise SchemaError("probe.label: the probe channel must be forward")
    t0 = float(probe.get("t0", schedule.domain[0]))
    om = _wrap("probe.t0", schedule.amplitude, label, t0)
    if om <= 0:
        raise SchemaError("probe.t0: the probe control must be on at t0")
    v_l = C_LIGHT * om**2 / (medium.n_line * ch_l.g**2)
    a = probe["a"]
    a = complex(a) if not isinstance(a, (int, float)) else float(a)
    pulse = _wrap(
        "probe",
        GaussianPulseSpec,
        a_l=a,
        l0=float(probe["l0"]),
        z0=float(probe["z0"]),
        theta_l=float(probe.get("theta", 0.0)),
        v_l=v_l,
        t0=t0,
    )

    run_doc = doc.get("run", {}) or {}
    _check_keys(run_doc, RUN_KEYS, "run")
    run = RunSpec(
        nk=int(run_doc.get("nk", RunSpec.nk)),
        nz=int(run_doc.get("nz", RunSpec.nz)),
        snapshots=tuple(float(t) for t in run_doc.get("snapshots", (t0,))),
        out=str(run_doc.get("out", RunSpec.out)),
    )
    return Scenario(medium, tuple(channels), schedule, label, pulse, run, doc)


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"{path}: not valid YAML ({exc})") from None
    return parse_scenario(doc)
