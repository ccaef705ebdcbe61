"""Gaussian-state algebra on quadrature covariance matrices.

Conventions used throughout the package:

* Quadrature ordering is ``(x_1, p_1, ..., x_N, p_N)``.
* The vacuum has unit variance per quadrature, so the vacuum covariance
  matrix is the identity and physical states have all symplectic
  eigenvalues >= 1.
* Entropies (and hence Gaussian discord) are measured in bits (log base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10
PHYSICALITY_TOL = 1e-9
DISCORD_CLAMP = 1e-12


class UnphysicalCovarianceError(ValueError):
    """Raised when an operation requires a physical state but got none."""


@dataclass(frozen=True)
class Covariance:
    """Immutable 2N x 2N quadrature covariance matrix.

    Construction checks shape, finiteness and symmetry (within 1e-10);
    physicality is checked separately by :func:`validate_covariance` or by
    operations that require it.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        _check_square_even(m)
        if not np.all(np.isfinite(m)):
            raise ValueError("covariance matrix has non-finite entries")
        asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
        if asym > SYMMETRY_TOL:
            raise ValueError(f"covariance matrix asymmetry {asym:.3e} exceeds {SYMMETRY_TOL}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @staticmethod
    def vacuum(n_modes: int) -> "Covariance":
        return Covariance(np.eye(2 * n_modes))

    @staticmethod
    def thermal(nbar) -> "Covariance":
        """Product of thermal states with mean occupations ``nbar`` (scalar or per-mode)."""
        nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
        diag = np.repeat(2.0 * nbar + 1.0, 2)
        return Covariance(np.diag(diag))

    @staticmethod
    def two_mode_squeezed(r: float) -> "Covariance":
        """Two-mode squeezed vacuum with squeezing parameter ``r``.

        The x-difference and p-sum quadratures are squeezed:
        Var((x1 - x2)/sqrt(2)) = exp(-2r).
        """
        ch, sh = math.cosh(2.0 * r), math.sinh(2.0 * r)
        z = np.diag([1.0, -1.0])
        m = np.block([[ch * np.eye(2), sh * z], [sh * z, ch * np.eye(2)]])
        return Covariance(m)


@dataclass(frozen=True)
class ModePair:
    """Unordered pair of distinct mode indices, normalized so i < j."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("mode pair indices must differ")
        if self.i < 0 or self.j < 0:
            raise ValueError("mode pair indices must be non-negative")
        if self.i > self.j:
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    min_symplectic_eigenvalue: float
    asymmetry: float


def _check_square_even(m: np.ndarray):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] % 2 != 0 or m.shape[0] == 0:
        raise ValueError(f"covariance dimension must be a positive even number, got {m.shape[0]}")


def _as_matrix(sigma) -> np.ndarray:
    if isinstance(sigma, Covariance):
        return sigma.matrix
    m = np.asarray(sigma, dtype=float)
    _check_square_even(m)
    return m


def symplectic_form(n_modes: int) -> np.ndarray:
    """Canonical symplectic form for (x_1, p_1, ..., x_N, p_N) ordering."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, descending.

    The eigenvalues of ``i Omega sigma`` come in pairs +-nu; the returned
    array holds each nu once, sorted in descending order. Physical states
    have all nu >= 1.
    """
    m = _as_matrix(sigma)
    if not np.all(np.isfinite(m)):
        raise ValueError("covariance matrix has non-finite entries")
    m = 0.5 * (m + m.T)
    n = m.shape[0] // 2
    eig = np.linalg.eigvals(symplectic_form(n) @ m)
    return np.sort(np.abs(eig))[::-1][::2].copy()


def validate_covariance(sigma) -> ValidityReport:
    """Check symmetry and physicality, reporting the diagnostics.

    ``ok`` requires asymmetry <= 1e-10 and min symplectic eigenvalue
    >= 1 - 1e-9 (vacuum-normalized convention).
    """
    m = _as_matrix(sigma)
    asym = float(np.max(np.abs(m - m.T)))
    nu_min = float(symplectic_eigenvalues(m)[-1])
    ok = asym <= SYMMETRY_TOL and nu_min >= 1.0 - PHYSICALITY_TOL
    return ValidityReport(ok=ok, min_symplectic_eigenvalue=nu_min, asymmetry=asym)


def is_physical(sigma) -> bool:
    return validate_covariance(sigma).ok


def reduce(sigma: Covariance, modes) -> Covariance:
    """Reduced state on the listed modes (order preserved)."""
    m = _as_matrix(sigma)
    n = m.shape[0] // 2
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise ValueError(f"mode indices must be distinct, got {modes}")
    for k in modes:
        if not 0 <= k < n:
            raise ValueError(f"mode index {k} out of range for {n} modes")
    idx = np.array([q for k in modes for q in (2 * k, 2 * k + 1)], dtype=int)
    return Covariance(m[np.ix_(idx, idx)])


def joint_quadrature_variance(sigma, i: int, j: int, sign: int = -1, quadrature: str = "x") -> float:
    """Variance of the joint quadrature ((q_i + sign * q_j)/sqrt(2)).

    ``quadrature`` selects "x" or "p"; two independent vacua give 1 for
    either sign (the shot-noise level).
    """
    m = _as_matrix(sigma)
    n = m.shape[0] // 2
    pair = ModePair(i, j)
    if pair.j >= n:
        raise ValueError(f"mode index {pair.j} out of range for {n} modes")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if quadrature not in ("x", "p"):
        raise ValueError("quadrature must be 'x' or 'p'")
    off = 0 if quadrature == "x" else 1
    qi, qj = 2 * i + off, 2 * j + off
    return 0.5 * float(m[qi, qi] + m[qj, qj] + 2 * sign * m[qi, qj])


def rotate_mode(sigma: Covariance, mode: int, angle: float) -> Covariance:
    """Apply an in-plane (x, p) rotation to one mode; symplectic, so
    physicality and the symplectic spectrum are preserved."""
    m = _as_matrix(sigma)
    n = m.shape[0] // 2
    if not 0 <= mode < n:
        raise ValueError(f"mode index {mode} out of range for {n} modes")
    s = np.eye(2 * n)
    c, sn = math.cos(angle), math.sin(angle)
    s[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] = [[c, -sn], [sn, c]]
    out = s @ m @ s.T
    return Covariance(0.5 * (out + out.T))


def entropy_f(x: float) -> float:
    """Entropic function of a symplectic eigenvalue, in bits.

    f(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2), with
    f(x) = 0 for x <= 1 (pure normal mode).
    """
    if x <= 1.0:
        return 0.0
    xp = 0.5 * (x + 1.0)
    xm = 0.5 * (x - 1.0)
    return xp * math.log2(xp) - xm * math.log2(xm)


def gaussian_discord(sigma) -> float:
    """Gaussian quantum discord of a two-mode state, measured on mode 2.

    Uses the closed form over the symplectic invariants (determinants of
    the two diagonal blocks, the off-diagonal block, and the full matrix),
    minimizing the conditional entropy over general single-mode Gaussian
    measurements on the second mode. Returns bits; results within 1e-12
    below zero are clamped to 0.
    """
    m = _as_matrix(sigma)
    if m.shape[0] != 4:
        raise ValueError(f"gaussian_discord needs exactly two modes, got shape {m.shape}")
    nus = symplectic_eigenvalues(m)
    if nus[-1] < 1.0 - PHYSICALITY_TOL:
        raise UnphysicalCovarianceError(
            f"covariance is unphysical: min symplectic eigenvalue {nus[-1]:.12g} < 1"
        )
    c_block = m[0:2, 2:4]
    if np.max(np.abs(c_block)) <= 1e-10:
        return 0.0

    a = float(np.linalg.det(m[0:2, 0:2]))
    b = float(np.linalg.det(m[2:4, 2:4]))
    c = float(np.linalg.det(c_block))
    d = float(np.linalg.det(m))

    e_min = _minimized_conditional_determinant(a, b, c, d)
    if e_min is None:
        return 0.0
    value = (
        entropy_f(math.sqrt(max(b, 1.0)))
        - entropy_f(float(nus[0]))
        - entropy_f(float(nus[1]))
        + entropy_f(math.sqrt(max(e_min, 1.0)))
    )
    if -DISCORD_CLAMP < value < 0.0:
        return 0.0
    return value


def _minimized_conditional_determinant(a, b, c, d):
    """Minimum determinant of the conditioned single-mode state over
    Gaussian measurements on mode 2, from the block-determinant invariants.

    Returns None when mode 2 is vacuum to working precision (physicality
    then forces a product state, i.e. zero discord).
    """
    if (d - a * b) ** 2 <= (1.0 + b) * c * c * (a + d):
        denom = (b - 1.0) ** 2
        if denom < 1e-20:
            return None
        root = math.sqrt(max(c * c + (b - 1.0) * (d - a), 0.0))
        return (2.0 * c * c + (b - 1.0) * (d - a) + 2.0 * abs(c) * root) / denom
    inner = c ** 4 + (d - a * b) ** 2 - 2.0 * c * c * (a * b + d)
    return (a * b - c * c + d - math.sqrt(max(inner, 0.0))) / (2.0 * b)


def write_covariance_csv(sigma, path) -> None:
    """Serialize to CSV: header row ``n_modes,<N>`` then 2N rows of 2N
    entries, lossless on round trip."""
    m = _as_matrix(sigma)
    n = m.shape[0] // 2
    lines = [f"n_modes,{n}"]
    for row in m:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_covariance_csv(path) -> Covariance:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty covariance file")
    head = lines[0].split(",")
    if len(head) != 2 or head[0] != "n_modes":
        raise ValueError(f"{path}: expected header 'n_modes,<N>', got {lines[0]!r}")
    n = int(head[1])
    rows = [np.array([float(v) for v in ln.split(",")]) for ln in lines[1:]]
    m = np.vstack(rows)
    if m.shape != (2 * n, 2 * n):
        raise ValueError(f"{path}: expected {2 * n}x{2 * n} matrix, got {m.shape}")
    return Covariance(m)
