"""Coupled-mode network construction and its linear drift/diffusion form.

Each optical channel is reduced to one composite probe/spin-wave mode: the
optical coherence decays orders of magnitude faster than every other rate,
so it is adiabatically eliminated and only the slow collective spin degree
of freedom per channel survives. The unilluminated atoms are represented by
a configurable number of explicit memory modes (default one) coupled to all
channels.

Mode amplitudes are referenced to each channel's local probe phase, so a
beam-splitter edge carries the phase mismatch between transferred and local
probe light, theta_j - theta_i, and squeezing edges carry zero phase under
the adopted convention. Memory modes hold reservoir spin excitations and
count as phase-zero: every channel exchanges excitations with the memory
(BS), except that a reversed-polarization channel's composite mode is the
conjugated spin wave, which flips the sign of its memory exchange (a pi
phase shift). In this frame a common offset on all optical phases drops
out of the compiled matrices.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

GAMMA_S_DEFAULT = 1.0 / 30e-3       # ground-state spin decay, 30 ms lifetime
GAMMA_OPT_DEFAULT = 1.0 / 20e-9     # optical coherence decay, 20 ns lifetime
LARMOR_DEFAULT = 2.0 * math.pi * 352e3
CONTROL_RABI_DEFAULT = 1.0e7
PROBE_RABI_DEFAULT = 4.0e6

TWO_PI = 2.0 * math.pi


class Interaction(enum.Enum):
    BS = "bs"    # excitation-conserving exchange
    TMS = "tms"  # pair-creation (squeezing) coupling


def wrap_phase(phi: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi}")
    r = math.remainder(phi, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class ChannelConfig:
    """Per-channel optical settings.

    Phases in radians, Rabi frequencies in 1/s. ``polarization`` is
    "normal" or "reversed"; reversing a channel flips its couplings from
    beam-splitter to two-mode-squeezing type.
    """

    id: int
    control_phase: float = 0.0
    probe_phase: float = 0.0
    control_rabi: float = CONTROL_RABI_DEFAULT
    probe_rabi: float = PROBE_RABI_DEFAULT
    probe_on: bool = True
    polarization: str = "normal"

    def __post_init__(self):
        if self.id not in (0, 1, 2):
            raise ValueError(f"channel id must be 0, 1 or 2, got {self.id}")
        if not (math.isfinite(self.control_phase) and math.isfinite(self.probe_phase)):
            raise ValueError("channel phases must be finite")
        if not self.control_rabi > 0:
            raise ValueError(f"control Rabi frequency must be > 0, got {self.control_rabi}")
        if self.probe_rabi < 0:
            raise ValueError(f"probe Rabi frequency must be >= 0, got {self.probe_rabi}")
        if self.polarization not in ("normal", "reversed"):
            raise ValueError(f"polarization must be 'normal' or 'reversed', got {self.polarization!r}")

    @property
    def theta(self) -> float:
        return local_spin_phase(self)


@dataclass(frozen=True)
class ReservoirConfig:
    """Reservoir and rate parameters.

    ``exchange_rate`` defaults to one tenth of the spin decay, the regime
    where all bundled configurations are stable. The optical decay only
    enters transmission line widths; it is kept far above the spin rates,
    consistent with its adiabatic elimination.
    """

    exchange_rate: float | None = None       # Gamma_c, 1/s
    spin_decay: float = GAMMA_S_DEFAULT      # Gamma_s, 1/s
    optical_decay: float = GAMMA_OPT_DEFAULT  # Gamma_opt, 1/s
    two_photon_detuning: float = 0.0         # delta_B, rad/s
    larmor_frequency: float = LARMOR_DEFAULT  # omega_L, rad/s
    memory_modes: int = 1

    def __post_init__(self):
        if self.exchange_rate is None:
            object.__setattr__(self, "exchange_rate", 0.1 * self.spin_decay)
        for name in ("exchange_rate", "spin_decay", "optical_decay", "larmor_frequency"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite rate, got {v}")
        if not math.isfinite(self.two_photon_detuning):
            raise ValueError("two_photon_detuning must be finite")
        if self.memory_modes < 0:
            raise ValueError(f"memory_modes must be >= 0, got {self.memory_modes}")
        if self.optical_decay < 1e3 * max(self.exchange_rate, self.spin_decay):
            warnings.warn(
                "optical decay is less than 1000x the spin rates; the "
                "single-mode-per-channel reduction becomes questionable",
                stacklevel=2,
            )

    @property
    def beta(self) -> float:
        """Diagnostic beam-splitter ratio Gamma_c / (Gamma_c + Gamma_s)."""
        return self.exchange_rate / (self.exchange_rate + self.spin_decay)


@dataclass(frozen=True)
class Edge:
    """Coupling between modes i < j; ``phase`` is the transfer phase i -> j."""

    i: int
    j: int
    kind: Interaction
    strength: float
    phase: float

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("self-edges are not allowed")
        if self.strength < 0:
            raise ValueError(f"edge strength must be >= 0, got {self.strength}")


@dataclass(frozen=True)
class CoupledModeNetwork:
    mode_names: tuple[str, ...]
    edges: tuple[Edge, ...]
    decay_rates: tuple[float, ...]   # local decay per mode, 1/s
    detuning: float                  # common detuning, rad/s
    # conjugated modes (reversed-polarization channels) precess the other
    # way, so they see the opposite detuning sign
    conjugated: tuple[bool, ...] | None = None

    def __post_init__(self):
        n = len(self.mode_names)
        if self.conjugated is None:
            object.__setattr__(self, "conjugated", tuple(False for _ in range(n)))
        if len(self.decay_rates) != n or len(self.conjugated) != n:
            raise ValueError("one decay rate and conjugation flag per mode required")
        for e in self.edges:
            if not (0 <= e.i < n and 0 <= e.j < n):
                raise ValueError(f"edge ({e.i},{e.j}) out of range for {n} modes")

    @property
    def n_modes(self) -> int:
        return len(self.mode_names)


@dataclass(frozen=True)
class DriftDiffusion:
    """Quadrature-space drift A and diffusion D, ordering (x_1, p_1, ...)."""

    A: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        a = np.array(self.A, dtype=float)
        d = np.array(self.D, dtype=float)
        if a.shape != d.shape or a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
            raise ValueError(f"A and D must be equal even-dimensioned square, got {a.shape}, {d.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("drift matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(d))) if d.size else 0.0)
        if np.max(np.abs(d - d.T)) > 1e-12 * scale:
            raise ValueError("diffusion matrix must be symmetric")
        d = 0.5 * (d + d.T)
        if np.min(np.linalg.eigvalsh(d)) < -1e-12 * scale:
            raise ValueError("diffusion matrix must be positive semidefinite")
        a.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "D", d)

    @property
    def n_modes(self) -> int:
        return self.A.shape[0] // 2


@dataclass(frozen=True)
class HurwitzReport:
    ok: bool
    max_real_part: float
    worst_eigenvalue: complex


def local_spin_phase(channel: ChannelConfig) -> float:
    """Phase of the channel's local spin wave: control minus probe phase,
    reduced to (-pi, pi]."""
    return wrap_phase(channel.control_phase - channel.probe_phase)


def transferred_probe_phase(src: ChannelConfig, dst: ChannelConfig) -> float:
    """Phase of probe light transferred from ``src`` to ``dst``: the
    destination control phase minus the source spin phase, in (-pi, pi]."""
    if src.id == dst.id:
        raise ValueError(f"source and destination channels are identical (id {src.id})")
    return wrap_phase(dst.control_phase - local_spin_phase(src))


def interaction_type(pol_i: str, pol_j: str) -> Interaction:
    """Same polarization configuration exchanges excitations (BS); opposite
    configurations pair-create (TMS)."""
    for p in (pol_i, pol_j):
        if p not in ("normal", "reversed"):
            raise ValueError(f"polarization must be 'normal' or 'reversed', got {p!r}")
    return Interaction.BS if pol_i == pol_j else Interaction.TMS


def _edge_phase(kind: Interaction, theta_i: float, theta_j: float) -> float:
    # BS: transferred-vs-local probe phase mismatch; TMS: zero by the
    # adopted squeezing-phase convention (probe-referenced frame).
    if kind is Interaction.BS:
        return wrap_phase(theta_j - theta_i)
    return 0.0


def build_network(
    channels,
    reservoir: ReservoirConfig,
    strength_overrides: dict | None = None,
) -> CoupledModeNetwork:
    """Assemble the coupled-mode network for 1-3 channels plus memory modes.

    All pairs of channels are coupled with rate ``Gamma_c`` (overridable per
    id pair through ``strength_overrides``), with the interaction type set
    by their polarization configurations. Each channel also exchanges spin
    excitations with the first memory mode (BS; sign-flipped for a
    reversed-polarization channel, whose composite mode is the conjugated
    spin wave); additional memory modes form a chain. Every mode decays at
    ``Gamma_s`` into its own vacuum port.
    """
    channels = sorted(channels, key=lambda c: c.id)
    if not 1 <= len(channels) <= 3:
        raise ValueError(f"need 1-3 channels, got {len(channels)}")
    ids = [c.id for c in channels]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate channel ids: {ids}")
    overrides = {tuple(sorted(k)): v for k, v in (strength_overrides or {}).items()}

    names = [f"ch{c.id}" for c in channels]
    thetas = [c.theta for c in channels]
    pols = [c.polarization for c in channels]
    for m in range(reservoir.memory_modes):
        names.append(f"mem{m}")
        thetas.append(0.0)
        pols.append("normal")

    gc = reservoir.exchange_rate
    edges = []
    nch = len(channels)
    for i in range(nch):
        for j in range(i + 1, nch):
            kind = interaction_type(pols[i], pols[j])
            strength = overrides.get((ids[i], ids[j]), gc)
            edges.append(Edge(i, j, kind, strength, _edge_phase(kind, thetas[i], thetas[j])))
    if reservoir.memory_modes > 0:
        first_mem = nch
        for i in range(nch):
            shift = math.pi if pols[i] == "reversed" else 0.0
            edges.append(Edge(i, first_mem, Interaction.BS, gc,
                              wrap_phase(shift - thetas[i])))
        for m in range(first_mem, nch + reservoir.memory_modes - 1):
            edges.append(Edge(m, m + 1, Interaction.BS, gc, 0.0))

    return CoupledModeNetwork(
        mode_names=tuple(names),
        edges=tuple(edges),
        decay_rates=tuple(reservoir.spin_decay for _ in names),
        detuning=reservoir.two_photon_detuning,
        conjugated=tuple(p == "reversed" for p in pols),
    )


def _exchange_block(c: complex) -> np.ndarray:
    """Quadrature block for a term (c * a_j) in da_i/dt."""
    return np.array([[c.real, -c.imag], [c.imag, c.real]])


def _squeeze_block(c: complex) -> np.ndarray:
    """Quadrature block for a term (c * a_j^dagger) in da_i/dt."""
    return np.array([[c.real, c.imag], [c.imag, -c.real]])


def drift_diffusion(net: CoupledModeNetwork) -> DriftDiffusion:
    """Compile the network to quadrature drift/diffusion matrices.

    Mode equations: da_i/dt = -(gamma_i/2 + i delta_i) a_i
    (delta_i = -delta for conjugated modes, which precess backwards, so
    pair creation with them stays resonant under a common bias detuning)
    + sum over BS edges of -i g e^{i phi} a_j (exchange; the coupling
    matrix is anti-Hermitian, so excitation number is conserved and the
    compiled matrices are covariant under relabeling of the modes)
    + sum over TMS edges of g e^{i phi} a_j^dagger (pair creation, same
    coefficient both ways), realified onto the (x, p) basis. Each mode's
    vacuum decay port contributes a diagonal diffusion block gamma_i * I2,
    which makes any purely-BS network hold the vacuum as its steady state.
    """
    n = net.n_modes
    a = np.zeros((2 * n, 2 * n))
    d = np.zeros((2 * n, 2 * n))
    for k, gamma in enumerate(net.decay_rates):
        sl = slice(2 * k, 2 * k + 2)
        delta = net.detuning * (1.0 if net.conjugated[k] else -1.0)
        a[sl, sl] = _exchange_block(complex(-0.5 * gamma, delta))
        d[sl, sl] = gamma * np.eye(2)
    for e in net.edges:
        si, sj = slice(2 * e.i, 2 * e.i + 2), slice(2 * e.j, 2 * e.j + 2)
        if e.kind is Interaction.BS:
            c = -1j * e.strength * cmath.exp(1j * e.phase)
            a[sj, si] += _exchange_block(c)
            a[si, sj] += _exchange_block(-c.conjugate())
        else:
            blk = _squeeze_block(e.strength * cmath.exp(1j * e.phase))
            a[sj, si] += blk
            a[si, sj] += blk
    return DriftDiffusion(A=a, D=d)


def hurwitz_check(a) -> HurwitzReport:
    """Stability check: pass iff every eigenvalue real part is < -1e-12."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    eig = np.linalg.eigvals(m)
    worst = eig[np.argmax(eig.real)]
    return HurwitzReport(ok=bool(worst.real < -1e-12), max_real_part=float(worst.real),
                         worst_eigenvalue=complex(worst))
