"""Spin-s operators, the tilted-axis rotation generator, and exact evolution.

Conventions: hbar = 1; the rotation axis n = (sin theta, 0, cos theta)
lives in the x-z plane, which keeps the generator real-symmetric and its
eigenvectors real. Evolution uses spectral exponentiation, exact at any
angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateSpectrum, InvalidSpin


@dataclass(frozen=True)
class SpinSystem:
    """Spin quantum number s, dimension m = 2s+1, and the three spin matrices."""

    s: float
    dim: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


@dataclass(frozen=True)
class AxisSpec:
    """Polar angle theta of the rotation axis n = (sin theta, 0, cos theta)."""

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta) or not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def direction(self) -> tuple[float, float, float]:
        return (math.sin(self.theta), 0.0, math.cos(self.theta))


@dataclass(frozen=True)
class HamiltonianSpectrum:
    """Energies descending (s, s-1, ..., -s) and eigenstates as rows of `states`."""

    energies: np.ndarray
    states: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size

    def state(self, i: int) -> np.ndarray:
        """Eigenstate for the i-th largest energy (0-based)."""
        return self.states[i]


def make_spin_system(s) -> SpinSystem:
    """Spin operators for quantum number s (2s a positive integer).

    sz = diag(s, s-1, ..., -s); sx, sy follow from the ladder operators.
    """
    s = float(s)
    two_s = 2.0 * s
    if not math.isfinite(s) or s <= 0 or abs(two_s - round(two_s)) > 1e-12:
        raise InvalidSpin(f"2s must be a positive integer, got s={s}")
    m = int(round(two_s)) + 1
    mvals = s - np.arange(m)  # magnetic quantum numbers, descending
    raising = np.zeros((m, m), dtype=complex)
    for i in range(1, m):
        # raises m_i -> m_i + 1, i.e. column i feeds row i-1
        raising[i - 1, i] = math.sqrt(s * (s + 1) - mvals[i] * (mvals[i] + 1))
    lowering = raising.conj().T
    sx = (raising + lowering) / 2.0
    sy = (raising - lowering) / 2.0j
    sz = np.diag(mvals).astype(complex)
    return SpinSystem(s=s, dim=m, sx=sx, sy=sy, sz=sz)


def hamiltonian(sys: SpinSystem, axis: AxisSpec) -> np.ndarray:
    """Rotation generator S.n = sx sin(theta) + sz cos(theta); real-symmetric."""
    return sys.sx * math.sin(axis.theta) + sys.sz * math.cos(axis.theta)


def spectrum(sys: SpinSystem, axis: AxisSpec) -> HamiltonianSpectrum:
    """Spectral decomposition of the generator; energies are exactly
    {s, s-1, ..., -s} for a unit axis, so degeneracy signals a fault."""
    eig = linalg.hermitian_eig(hamiltonian(sys, axis))
    if eig.degenerate:
        raise DegenerateSpectrum("generator spectrum is degenerate")
    return HamiltonianSpectrum(energies=eig.values, states=eig.vectors.T.copy())


def evolution_from_spectrum(spec: HamiltonianSpectrum, beta: float) -> np.ndarray:
    """U = exp(-i beta H) assembled from a precomputed spectrum."""
    phases = np.exp(-1j * beta * spec.energies)
    r = spec.states
    return (r.T * phases) @ r.conj()


def evolution_operator(sys: SpinSystem, axis: AxisSpec, beta: float) -> np.ndarray:
    """U = exp(-i beta S.n) via spectral exponentiation."""
    return evolution_from_spectrum(spectrum(sys, axis), beta)


def evolve(sys: SpinSystem, axis: AxisSpec, beta: float, state) -> np.ndarray:
    """Apply U = exp(-i beta S.n) to a ket; norm-preserving."""
    state = linalg.as_ket(state)
    spec = spectrum(sys, axis)
    amps = spec.states.conj() @ state
    amps = amps * np.exp(-1j * beta * spec.energies)
    return amps @ spec.states
