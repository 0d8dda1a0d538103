"""Bipartite probe-ancilla states: Schmidt form, decomposition over the
optimal probe basis, and the special encoding states (maximally
entangled; the unit-success family built from the optimal states).

A joint pure state is stored as its m x m coefficient matrix chi over
the computational product basis, chi[i, j] multiplying |i-1>_A |j-1>_B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fisher, linalg, spin
from .errors import BadCoefficients, NotNormalized

PRESENCE_TOL = 1e-12


@dataclass(frozen=True)
class BipartiteState:
    """Probe-ancilla pure state; chi holds the coefficients, probe index
    first. Normalized so the squared entries sum to 1."""

    chi: np.ndarray

    @property
    def dim(self) -> int:
        return self.chi.shape[0]

    def ket(self) -> np.ndarray:
        """Joint state as a flat vector, probe index major."""
        return self.chi.reshape(-1)


def bipartite_state(chi) -> BipartiteState:
    """Validate and wrap a coefficient matrix."""
    chi = linalg.as_matrix(chi)
    if chi.shape[0] != chi.shape[1]:
        raise ValueError(f"coefficient matrix must be square, got {chi.shape}")
    total = float(np.sum(np.abs(chi) ** 2))
    if abs(total - 1.0) > 1e-12:
        raise NotNormalized(f"squared coefficients sum to {total:.15f}")
    return BipartiteState(chi=chi)


@dataclass(frozen=True)
class SchmidtForm:
    """Diagonal form sum_k xi_k |u_k>|v_k>; xis descending, u/v vectors
    stored as rows of `us` / `vs`."""

    xis: np.ndarray
    us: np.ndarray
    vs: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.sum(self.xis > 1e-10))

    def reconstruct(self) -> np.ndarray:
        return (self.us.T * self.xis) @ self.vs


@dataclass(frozen=True)
class AncillaDecomposition:
    """Expansion sum_i c_i |phi_i>_A |psi_i>_B over the optimal probe basis.

    Row i of `tilde` is the unnormalized ancilla branch (<phi_i| x I)|Psi>;
    `cs` are its norms, `present` marks branches with c_i above tolerance,
    and rows of `psis` are the normalized branch states (zero rows where
    absent). `gram[i, j] = <psi_i|psi_j>` is filled for present pairs.
    """

    cs: np.ndarray
    psis: np.ndarray
    tilde: np.ndarray
    present: np.ndarray
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return self.cs.size

    def present_indices(self) -> np.ndarray:
        return np.nonzero(self.present)[0]


def schmidt(psi: BipartiteState) -> SchmidtForm:
    """Schmidt decomposition via SVD of the coefficient matrix."""
    sigma, u, vh = linalg.svd(psi.chi)
    return SchmidtForm(xis=sigma, us=u.T.copy(), vs=vh)


def ancilla_decomposition(psi: BipartiteState, basis: fisher.OptimalBasis) -> AncillaDecomposition:
    """Decompose the joint state over the optimal probe basis."""
    m = psi.dim
    if basis.dim != m:
        raise ValueError(f"basis dimension {basis.dim} != state dimension {m}")
    tilde = basis.states.conj() @ psi.chi  # row i = (<phi_i| x I)|Psi>
    cs = np.linalg.norm(tilde, axis=1)
    present = cs > PRESENCE_TOL
    psis = np.zeros_like(tilde)
    psis[present] = tilde[present] / cs[present, None]
    gram = np.zeros((m, m), dtype=complex)
    idx = np.nonzero(present)[0]
    if idx.size:
        block = psis[idx].conj() @ psis[idx].T
        gram[np.ix_(idx, idx)] = block
    return AncillaDecomposition(cs=cs, psis=psis, tilde=tilde, present=present, gram=gram)


def maximally_entangled(m: int) -> BipartiteState:
    """Equal-weight state sum_k |k-1>|k-1> / sqrt(m)."""
    if m < 2:
        raise ValueError(f"dimension must be >= 2, got {m}")
    return BipartiteState(chi=np.eye(m, dtype=complex) / math.sqrt(m))


def max_prob_state(spec: spin.HamiltonianSpectrum, xi1: float, xi2: float) -> BipartiteState:
    """Encoding state xi1 |n+>|n-> - xi2 |n->|n+> whose ancilla branches
    exhaust the success outcomes, so postselection succeeds with
    certainty for this generator."""
    xi1 = float(xi1)
    xi2 = float(xi2)
    if xi1 <= 0 or xi2 <= 0:
        raise BadCoefficients(f"coefficients must be positive, got ({xi1}, {xi2})")
    if abs(xi1 * xi1 + xi2 * xi2 - 1.0) > 1e-12:
        raise BadCoefficients(f"xi1^2 + xi2^2 = {xi1 * xi1 + xi2 * xi2:.15f}, expected 1")
    n_plus, n_minus = fisher.optimal_states(spec)
    chi = xi1 * np.outer(n_plus, n_minus) - xi2 * np.outer(n_minus, n_plus)
    return bipartite_state(chi)
