"""Classical and quantum Fisher information, optimal probes, and the
Cramer-Rao bound arithmetic.

The optimal probe for estimating the rotation angle is an equal
superposition of the extreme generator eigenstates; measuring in the
basis built from those superpositions saturates the quantum bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import linalg, spin
from .errors import DivergentFI, NotNormalized

DEAD_PROB_TOL = 1e-12
DEAD_DERIV_TOL = 1e-9


@dataclass(frozen=True)
class OptimalBasis:
    """Measurement basis {n+, interior eigenstates, n-}; row i of `states`
    is the i-th outcome vector."""

    states: np.ndarray

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @property
    def n_plus(self) -> np.ndarray:
        return self.states[0]

    @property
    def n_minus(self) -> np.ndarray:
        return self.states[-1]

    def overlaps(self, ket) -> np.ndarray:
        """Amplitudes <phi_i|ket> for every outcome i."""
        return self.states.conj() @ np.asarray(ket, dtype=complex)


@dataclass(frozen=True)
class FisherReport:
    """Classical and quantum Fisher information plus the variance floor
    1/(N*F) they imply for N measurements (quantum bound used)."""

    cfi: float
    qfi: float
    crb: float


def optimal_states(spec: spin.HamiltonianSpectrum, alpha: float = 0.0):
    """Equal superpositions (|E_1> +- e^{i alpha}|E_m>)/sqrt(2) of the
    extreme eigenstates; both maximize the QFI at (E_1 - E_m)^2."""
    top = spec.states[0]
    bottom = spec.states[-1]
    phase = np.exp(1j * alpha)
    n_plus = (top + phase * bottom) / math.sqrt(2.0)
    n_minus = (top - phase * bottom) / math.sqrt(2.0)
    return n_plus, n_minus


def optimal_basis(spec: spin.HamiltonianSpectrum, alpha: float = 0.0) -> OptimalBasis:
    """Complete orthonormal basis with n+ first, n- last, and the interior
    generator eigenstates in between."""
    n_plus, n_minus = optimal_states(spec, alpha)
    rows = np.vstack([n_plus, spec.states[1:-1], n_minus])
    return OptimalBasis(states=rows)


def qfi_pure(state, h) -> float:
    """QFI of a pure state under generator h: 4 * variance of h, clamped
    to be non-negative."""
    state = linalg.as_ket(state)
    h = np.asarray(h, dtype=complex)
    hs = h @ state
    mean = np.real(np.vdot(state, hs))
    second = np.real(np.vdot(hs, hs))
    return max(4.0 * (second - mean * mean), 0.0)


def cfi(probabilities: Iterable[tuple[float, float]]) -> float:
    """Fisher information sum (dP_i)^2 / P_i over live outcomes.

    Outcomes with P <= 1e-12 contribute nothing when their derivative
    also vanishes (|dP| <= 1e-9); a dead outcome with a live derivative
    means the basis is pathological at this angle and raises DivergentFI.
    """
    pairs = list(probabilities)
    p = np.array([float(pi) for pi, _ in pairs])
    dp = np.array([float(di) for _, di in pairs])
    if np.any(p < -DEAD_PROB_TOL):
        raise NotNormalized(f"negative probability {p.min():.3e}")
    if abs(p.sum() - 1.0) > 1e-10:
        raise NotNormalized(f"probabilities sum to {p.sum():.12f}")
    live = p > DEAD_PROB_TOL
    bad = ~live & (np.abs(dp) > DEAD_DERIV_TOL)
    if np.any(bad):
        i = int(np.nonzero(bad)[0][0])
        raise DivergentFI(f"outcome {i}: P={p[i]:.3e} but dP={dp[i]:.3e}")
    return float(np.sum(dp[live] ** 2 / p[live]))


def probe_measurement_probs(sys, axis, beta, probe, basis: OptimalBasis) -> np.ndarray:
    """Outcome probabilities |<phi_i|U(beta)|probe>|^2."""
    amps = basis.overlaps(spin.evolve(sys, axis, beta, probe))
    return np.abs(amps) ** 2


def measurement_statistics(sys, axis, beta, probe, basis: OptimalBasis):
    """(P_i, dP_i/dbeta) pairs, with the derivative taken analytically
    through d/dbeta U(beta)|probe> = -i H U(beta)|probe>."""
    h = spin.hamiltonian(sys, axis)
    evolved = spin.evolve(sys, axis, beta, probe)
    amps = basis.overlaps(evolved)
    damps = basis.overlaps(-1j * (h @ evolved))
    p = np.abs(amps) ** 2
    dp = 2.0 * np.real(np.conj(amps) * damps)
    return list(zip(p.tolist(), dp.tolist()))


def measurement_statistics_fd(sys, axis, beta, probe, basis: OptimalBasis, h: float = 1e-6):
    """Finite-difference cross-check of `measurement_statistics`."""
    p = probe_measurement_probs(sys, axis, beta, probe, basis)
    p_hi = probe_measurement_probs(sys, axis, beta + h, probe, basis)
    p_lo = probe_measurement_probs(sys, axis, beta - h, probe, basis)
    dp = (p_hi - p_lo) / (2.0 * h)
    return list(zip(p.tolist(), dp.tolist()))


def measurement_prob_model(sys, axis, probe, basis: OptimalBasis) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized map beta -> outcome probabilities, precomputed so that
    likelihood scans over a beta grid cost one matrix product."""
    spec = spin.spectrum(sys, axis)
    overlap = basis.states.conj() @ spec.states.T  # <phi_i|E_k>
    weights = spec.states.conj() @ linalg.as_ket(probe)  # <E_k|probe>
    coeff = overlap * weights  # (m, m): outcome i, energy k
    energies = spec.energies

    def probs(beta) -> np.ndarray:
        beta_arr = np.atleast_1d(np.asarray(beta, dtype=float))
        phases = np.exp(-1j * np.outer(energies, beta_arr))  # (m, n)
        amps = coeff @ phases  # (m_outcomes, n)
        p = (np.abs(amps) ** 2).T  # (n, m_outcomes)
        return p[0] if np.isscalar(beta) or np.asarray(beta).ndim == 0 else p

    return probs


def crb(fisher: float, shots: int) -> float:
    """Variance floor 1/(N*F) for N independent measurements."""
    return 1.0 / (shots * fisher)


def fisher_report(sys, axis, beta, probe, basis: OptimalBasis, shots: int) -> FisherReport:
    """Bundle CFI (for this basis), QFI, and the quantum variance floor."""
    f_c = cfi(measurement_statistics(sys, axis, beta, probe, basis))
    f_q = qfi_pure(probe, spin.hamiltonian(sys, axis))
    return FisherReport(cfi=f_c, qfi=f_q, crb=crb(f_q, shots))
