"""Mean-field light transport: transparency window, phase-sweep
interference, directional transport spectra and isolation.

Light transferred between channels rides on the collective spin wave, so
its phase at the receiving channel is the local control phase minus the
source channel's spin phase. Interference of transferred and local probe
light makes every intensity below a function of spin-phase differences
only; a common offset on all optical phases drops out.

The read-out channel of a transport measurement has its probe switched off
by procedure, and power that is not transferred is absorbed by the atoms
rather than redistributed, so outputs need not sum to the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import ChannelConfig, ReservoirConfig, wrap_phase

PERIODICITY_TOL = 1e-9


@dataclass(frozen=True)
class PhaseSweepResult:
    """Output intensities of channels 1 and 2 versus the channel-0 spin
    phase, each normalized to unit peak."""

    theta0: np.ndarray
    i1: np.ndarray
    i2: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.theta0, dtype=float)
        i1 = np.asarray(self.i1, dtype=float)
        i2 = np.asarray(self.i2, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ValueError("theta0 grid must be 1-D and strictly increasing")
        if i1.shape != t.shape or i2.shape != t.shape:
            raise ValueError("intensity arrays must match the grid")
        if abs((t[-1] - t[0]) - 2.0 * math.pi) < 1e-12:
            for arr in (i1, i2):
                if abs(arr[-1] - arr[0]) > PERIODICITY_TOL:
                    raise ValueError("intensities on a full 2-pi grid must close periodically")
        object.__setattr__(self, "theta0", t)
        object.__setattr__(self, "i1", i1)
        object.__setattr__(self, "i2", i2)


@dataclass(frozen=True)
class TransportResult:
    """Two-direction transported power over a detuning grid, plus the
    resonance isolation figure."""

    detunings: np.ndarray
    t12: np.ndarray
    t21: np.ndarray
    isolation_db: float
    floor: float

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        t12 = np.asarray(self.t12, dtype=float)
        t21 = np.asarray(self.t21, dtype=float)
        if d.ndim != 1 or np.any(np.diff(d) <= 0):
            raise ValueError("detuning grid must be 1-D and strictly increasing")
        if t12.shape != d.shape or t21.shape != d.shape:
            raise ValueError("power arrays must match the grid")
        if np.min(t12) < 0 or np.min(t21) < 0:
            raise ValueError("transported powers must be non-negative")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "t12", t12)
        object.__setattr__(self, "t21", t21)


def eit_transmission(delta_b, omega_c: float, gamma_opt: float, gamma_s: float,
                     peak: float = 1.0):
    """Two-photon transmission window: a Lorentzian of power-broadened width
    w = gamma_s + omega_c^2 / gamma_opt, maximal at zero detuning.

    ``delta_b`` may be a scalar or array (rad/s or 1/s, same units as the
    rates).
    """
    for name, v in (("omega_c", omega_c), ("gamma_opt", gamma_opt), ("gamma_s", gamma_s)):
        if not v > 0:
            raise ValueError(f"{name} must be > 0, got {v}")
    if not 0.0 < peak <= 1.0:
        raise ValueError(f"peak transmission must be in (0, 1], got {peak}")
    w = gamma_s + omega_c ** 2 / gamma_opt
    delta_b = np.asarray(delta_b, dtype=float)
    out = peak * w ** 2 / (w ** 2 + delta_b ** 2)
    return float(out) if out.ndim == 0 else out


def eit_width(omega_c: float, gamma_opt: float, gamma_s: float) -> float:
    """Half width (at half maximum) of the transmission window."""
    return gamma_s + omega_c ** 2 / gamma_opt


def _superpose(amplitudes, visibility: float) -> float:
    """Intensity of interfering amplitudes with an interference-contrast
    limiter: visibility 1 is the fully coherent sum, 0 the incoherent one."""
    incoherent = sum(abs(a) ** 2 for a in amplitudes)
    coherent = abs(sum(amplitudes)) ** 2
    return incoherent + visibility * (coherent - incoherent)


def _channel_map(channels) -> dict[int, ChannelConfig]:
    by_id = {c.id: c for c in channels}
    if len(by_id) != len(list(channels)):
        raise ValueError("duplicate channel ids")
    return by_id


def phase_sweep(channels, reservoir: ReservoirConfig, theta0_grid,
                beta: float | None = None, visibility: float = 1.0) -> PhaseSweepResult:
    """Sweep the channel-0 spin phase and record channels 1 and 2.

    Each output superposes the local probe (unit amplitude, when on) with
    the light transferred from every other probe-on channel (amplitude
    ``beta`` and phase theta_out - theta_in). ``beta`` defaults to the
    reservoir's derived beam-splitter ratio; pass 1.0 for the idealized
    equal-weight interference limit. Intensities are normalized to unit
    peak per channel.
    """
    by_id = _channel_map(channels)
    for cid in (0, 1, 2):
        if cid not in by_id:
            raise ValueError(f"phase sweep needs channels 0, 1, 2; missing {cid}")
    if beta is None:
        beta = reservoir.beta
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    if not 0.0 < visibility <= 1.0:
        raise ValueError(f"visibility must be in (0, 1], got {visibility}")

    grid = np.asarray(theta0_grid, dtype=float)
    thetas = {cid: by_id[cid].theta for cid in (0, 1, 2)}
    probe_on = {cid: by_id[cid].probe_on for cid in (0, 1, 2)}

    intensities = {1: np.empty(grid.size), 2: np.empty(grid.size)}
    for k, th0 in enumerate(grid):
        thetas[0] = th0
        for out in (1, 2):
            amps = []
            if probe_on[out]:
                amps.append(1.0 + 0.0j)
            for src in (0, 1, 2):
                if src != out and probe_on[src]:
                    amps.append(beta * np.exp(1j * (thetas[out] - thetas[src])))
            intensities[out][k] = _superpose(amps, visibility)
    for out in (1, 2):
        peak = intensities[out].max()
        if peak > 0:
            intensities[out] = intensities[out] / peak
    return PhaseSweepResult(theta0=grid, i1=intensities[1], i2=intensities[2])


def transport_matrix(theta0: float, theta1: float, theta2: float, beta: float,
                     peak: float = 1.0) -> tuple[float, float]:
    """Resonant transported powers (T12, T21) between channels 1 and 2.

    Injected light interferes at the read-out channel with the light the
    reservoir channel feeds in, giving T12 proportional to
    1 + cos(theta0 - theta1) and T21 to 1 + cos(theta0 - theta2), each
    scaled by beta^2 and the transparency peak.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    t12 = beta ** 2 * peak * 0.5 * (1.0 + math.cos(theta0 - theta1))
    t21 = beta ** 2 * peak * 0.5 * (1.0 + math.cos(theta0 - theta2))
    return t12, t21


def reciprocal_phase(theta1: float, theta2: float) -> float:
    """Channel-0 spin phase at which the two transport directions have
    equal power: the mean of the node phases (mod pi)."""
    return wrap_phase(0.5 * (theta1 + theta2))


def isolation_db(t_fwd: float, t_bwd: float, floor: float) -> float:
    """Directionality in dB, 10 log10((T_fwd + floor)/(T_bwd + floor)).

    ``floor`` models the residual transmission/detection background and
    must be positive so perfect destructive interference stays finite.
    """
    if not floor > 0:
        raise ValueError(f"floor must be > 0, got {floor}")
    if t_fwd < 0 or t_bwd < 0:
        raise ValueError("transported powers must be non-negative")
    return 10.0 * math.log10((t_fwd + floor) / (t_bwd + floor))


def transport_spectrum(channels, reservoir: ReservoirConfig, delta_grid,
                       input_channel: int = 1, output_channel: int = 2,
                       beta: float | None = None, floor: float | None = None,
                       peak: float = 1.0) -> TransportResult:
    """Two-direction transport between two channels versus two-photon
    detuning.

    For each direction the read-out probe is off (measurement procedure)
    and the interference of injected and reservoir-fed light scales the
    transparency window. ``floor`` defaults to 1/79.4 of the larger
    resonance power; the isolation figure is evaluated at the resonance.
    """
    if input_channel == output_channel:
        raise ValueError("input and output channels must differ")
    by_id = _channel_map(channels)
    for cid in (input_channel, output_channel):
        if cid not in by_id:
            raise ValueError(f"channel {cid} not configured")
    others = set(by_id) - {input_channel, output_channel}
    if len(others) != 1:
        raise ValueError("transport spectrum needs exactly three channels")
    reservoir_ch = others.pop()

    if beta is None:
        beta = reservoir.beta
    th = {cid: by_id[cid].theta for cid in by_id}
    ch_in = by_id[input_channel]
    ch_out = by_id[output_channel]

    fwd_res, _ = transport_matrix(th[reservoir_ch], th[input_channel], th[output_channel], beta, peak)
    bwd_res, _ = transport_matrix(th[reservoir_ch], th[output_channel], th[input_channel], beta, peak)

    grid = np.asarray(delta_grid, dtype=float)
    win_fwd = eit_transmission(grid, ch_in.control_rabi, reservoir.optical_decay,
                               reservoir.spin_decay)
    win_bwd = eit_transmission(grid, ch_out.control_rabi, reservoir.optical_decay,
                               reservoir.spin_decay)
    t_fwd = fwd_res * win_fwd
    t_bwd = bwd_res * win_bwd

    if floor is None:
        ref = max(fwd_res, bwd_res)
        floor = ref / 79.4 if ref > 0 else 1e-12
    iso = isolation_db(fwd_res, bwd_res, floor)
    return TransportResult(detunings=grid, t12=t_fwd, t21=t_bwd,
                           isolation_db=iso, floor=floor)


def write_phase_sweep_csv(result: PhaseSweepResult, path) -> None:
    lines = ["theta0_rad,i1,i2"]
    for t, a, b in zip(result.theta0, result.i1, result.i2):
        lines.append(f"{float(t)!r},{float(a)!r},{float(b)!r}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_transport_csv(result: TransportResult, path) -> None:
    lines = ["delta_b_rad_s,t12,t21"]
    for d, a, b in zip(result.detunings, result.t12, result.t21):
        lines.append(f"{float(d)!r},{float(a)!r},{float(b)!r}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
