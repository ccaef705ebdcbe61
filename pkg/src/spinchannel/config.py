"""Run-configuration files: parsing, validation and defaulting.

The file is TOML with one ``[channel.<id>]`` section per channel (ids 0-2)
and a ``[reservoir]`` section. Frequencies carry an ``_hz`` suffix: plain
rates (gamma_*, *_rabi) are used as 1/s directly, while the field-like
quantities (delta_b_hz, larmor_hz) are cycles and get multiplied by 2 pi
internally. Unknown keys are hard errors, and validation reports every
problem in one pass rather than stopping at the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .network import (
    CONTROL_RABI_DEFAULT,
    PROBE_RABI_DEFAULT,
    ChannelConfig,
    ReservoirConfig,
)

TWO_PI = 2.0 * math.pi

CHANNEL_KEYS = {
    "control_phase_rad": float,
    "probe_phase_rad": float,
    "control_rabi_hz": float,
    "probe_rabi_hz": float,
    "probe_on": bool,
    "polarization": str,
}
CHANNEL_DEFAULTS = {
    "control_phase_rad": 0.0,
    "probe_phase_rad": 0.0,
    "control_rabi_hz": CONTROL_RABI_DEFAULT,
    "probe_rabi_hz": PROBE_RABI_DEFAULT,
    "probe_on": True,
    "polarization": "normal",
}
RESERVOIR_KEYS = {
    "gamma_c_hz": float,
    "gamma_s_hz": float,
    "delta_b_hz": float,
    "larmor_hz": float,
    "memory_modes": int,
}


class ConfigError(ValueError):
    """Validation failure; ``errors`` holds one message per problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class RunConfig:
    channels: tuple[ChannelConfig, ...]
    reservoir: ReservoirConfig
    defaulted: tuple[str, ...]   # key paths filled in from defaults

    def summary_lines(self):
        """Normalized echo of the configuration, defaults annotated."""
        filled = set(self.defaulted)

        def mark(path):
            return "  (default)" if path in filled else ""

        lines = []
        for ch in self.channels:
            p = f"channel.{ch.id}"
            lines.append(f"[{p}]")
            lines.append(f"control_phase_rad = {ch.control_phase!r}{mark(p + '.control_phase_rad')}")
            lines.append(f"probe_phase_rad = {ch.probe_phase!r}{mark(p + '.probe_phase_rad')}")
            lines.append(f"control_rabi_hz = {ch.control_rabi!r}{mark(p + '.control_rabi_hz')}")
            lines.append(f"probe_rabi_hz = {ch.probe_rabi!r}{mark(p + '.probe_rabi_hz')}")
            lines.append(f"probe_on = {str(ch.probe_on).lower()}{mark(p + '.probe_on')}")
            lines.append(f"polarization = \"{ch.polarization}\"{mark(p + '.polarization')}")
        r = self.reservoir
        lines.append("[reservoir]")
        lines.append(f"gamma_c_hz = {r.exchange_rate!r}{mark('reservoir.gamma_c_hz')}")
        lines.append(f"gamma_s_hz = {r.spin_decay!r}{mark('reservoir.gamma_s_hz')}")
        lines.append(f"delta_b_hz = {r.two_photon_detuning / TWO_PI!r}{mark('reservoir.delta_b_hz')}")
        lines.append(f"larmor_hz = {r.larmor_frequency / TWO_PI!r}{mark('reservoir.larmor_hz')}")
        lines.append(f"memory_modes = {r.memory_modes}{mark('reservoir.memory_modes')}")
        return lines


def _find_line(text: str, token: str):
    for n, line in enumerate(text.splitlines(), start=1):
        if token in line:
            return n
    return None


def _loc(text: str, token: str) -> str:
    n = _find_line(text, token)
    return f" (line {n})" if n is not None else ""


def _coerce(value, want):
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return None
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            return None
        return value
    if not isinstance(value, want):
        return None
    return value


def validate_config(path) -> RunConfig:
    """Load and validate a run configuration, raising :class:`ConfigError`
    with the complete error list on any problem."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{path.name}: invalid syntax: {exc}"]) from exc

    errors: list[str] = []
    defaulted: list[str] = []

    for section in raw:
        if section not in ("channel", "reservoir"):
            errors.append(f"{section}: unknown section{_loc(text, section)}")

    channel_tables = raw.get("channel")
    if not isinstance(channel_tables, dict) or not channel_tables:
        errors.append("channel: missing section (need at least one [channel.<id>])")
        channel_tables = {}
    reservoir_table = raw.get("reservoir")
    if not isinstance(reservoir_table, dict):
        errors.append("reservoir: missing section")
        reservoir_table = {}

    channels = []
    for cid_str, table in sorted(channel_tables.items()):
        prefix = f"channel.{cid_str}"
        if cid_str not in ("0", "1", "2"):
            errors.append(f"{prefix}: channel id must be 0, 1 or 2{_loc(text, f'channel.{cid_str}')}")
            continue
        if not isinstance(table, dict):
            errors.append(f"{prefix}: expected a table")
            continue
        values = {}
        for key, value in table.items():
            if key not in CHANNEL_KEYS:
                errors.append(f"{prefix}.{key}: unknown key{_loc(text, key)}")
                continue
            coerced = _coerce(value, CHANNEL_KEYS[key])
            if coerced is None:
                errors.append(f"{prefix}.{key}: expected {CHANNEL_KEYS[key].__name__}, "
                              f"got {value!r}{_loc(text, key)}")
                continue
            values[key] = coerced
        for key, default in CHANNEL_DEFAULTS.items():
            if key not in values:
                values[key] = default
                defaulted.append(f"{prefix}.{key}")
        for key in ("control_phase_rad", "probe_phase_rad"):
            if not math.isfinite(values[key]):
                errors.append(f"{prefix}.{key}: must be finite{_loc(text, key)}")
        if values["control_rabi_hz"] <= 0:
            errors.append(f"{prefix}.control_rabi_hz: must be > 0, got "
                          f"{values['control_rabi_hz']}{_loc(text, 'control_rabi_hz')}")
        if values["probe_rabi_hz"] < 0:
            errors.append(f"{prefix}.probe_rabi_hz: must be >= 0, got "
                          f"{values['probe_rabi_hz']}{_loc(text, 'probe_rabi_hz')}")
        if values["polarization"] not in ("normal", "reversed"):
            errors.append(f"{prefix}.polarization: must be \"normal\" or \"reversed\", got "
                          f"{values['polarization']!r}{_loc(text, 'polarization')}")
        channels.append((int(cid_str), values))

    res_values = {}
    for key, value in reservoir_table.items():
        if key not in RESERVOIR_KEYS:
            errors.append(f"reservoir.{key}: unknown key{_loc(text, key)}")
            continue
        coerced = _coerce(value, RESERVOIR_KEYS[key])
        if coerced is None:
            errors.append(f"reservoir.{key}: expected {RESERVOIR_KEYS[key].__name__}, "
                          f"got {value!r}{_loc(text, key)}")
            continue
        res_values[key] = coerced
    if "gamma_s_hz" not in res_values:
        res_values["gamma_s_hz"] = ReservoirConfig.spin_decay
        defaulted.append("reservoir.gamma_s_hz")
    if "gamma_c_hz" not in res_values:
        res_values["gamma_c_hz"] = 0.1 * res_values["gamma_s_hz"]
        defaulted.append("reservoir.gamma_c_hz")
    for key, default in (("delta_b_hz", 0.0), ("larmor_hz", ReservoirConfig.larmor_frequency / TWO_PI),
                         ("memory_modes", 1)):
        if key not in res_values:
            res_values[key] = default
            defaulted.append(f"reservoir.{key}")
    for key in ("gamma_c_hz", "gamma_s_hz", "larmor_hz"):
        if not res_values[key] > 0 or not math.isfinite(res_values[key]):
            errors.append(f"reservoir.{key}: must be > 0, got {res_values[key]}{_loc(text, key)}")
    if not math.isfinite(res_values["delta_b_hz"]):
        errors.append(f"reservoir.delta_b_hz: must be finite{_loc(text, 'delta_b_hz')}")
    if res_values["memory_modes"] < 0:
        errors.append(f"reservoir.memory_modes: must be >= 0, got "
                      f"{res_values['memory_modes']}{_loc(text, 'memory_modes')}")

    ids = [cid for cid, _ in channels]
    if channels and len(set(ids)) != len(ids):
        errors.append(f"channel: duplicate ids {ids}")
    if len(channels) > 3:
        errors.append(f"channel: at most 3 channels supported, got {len(channels)}")

    if errors:
        raise ConfigError(errors)

    channel_objs = tuple(
        ChannelConfig(
            id=cid,
            control_phase=v["control_phase_rad"],
            probe_phase=v["probe_phase_rad"],
            control_rabi=v["control_rabi_hz"],
            probe_rabi=v["probe_rabi_hz"],
            probe_on=v["probe_on"],
            polarization=v["polarization"],
        )
        for cid, v in channels
    )
    reservoir = ReservoirConfig(
        exchange_rate=res_values["gamma_c_hz"],
        spin_decay=res_values["gamma_s_hz"],
        two_photon_detuning=TWO_PI * res_values["delta_b_hz"],
        larmor_frequency=TWO_PI * res_values["larmor_hz"],
        memory_modes=res_values["memory_modes"],
    )
    return RunConfig(channels=channel_objs, reservoir=reservoir, defaulted=tuple(defaulted))
