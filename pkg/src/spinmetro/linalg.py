"""Dense complex linear algebra kernel.

Hermitian eigendecomposition, SVD, inner products and projections onto
orthogonal complements, on plain numpy arrays. Factorizations are
delegated to LAPACK through numpy; this module owns the ordering, phase
and tolerance conventions the rest of the library relies on.

All functions are pure; safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotHermitian

HERMITIAN_TOL = 1e-12
DEGENERACY_GAP = 1e-9
PHASE_ENTRY_TOL = 1e-9
UNIT_NORM_TOL = 1e-12


def as_ket(v) -> np.ndarray:
    """Coerce to a 1-D complex vector, rejecting non-finite entries."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite entries in vector")
    return v


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-D complex matrix, rejecting non-finite entries."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("non-finite entries in matrix")
    return m


def inner(a, b) -> complex:
    """Hermitian inner product <a|b> (conjugate-linear in the first slot)."""
    return complex(np.vdot(a, b))


def norm(v) -> float:
    return float(np.linalg.norm(v))


def is_unit(v, tol: float = UNIT_NORM_TOL) -> bool:
    return abs(norm(v) ** 2 - 1.0) <= tol


def hermiticity_defect(m) -> float:
    """Largest entrywise deviation of M from its conjugate transpose."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def fix_phase(v: np.ndarray, tol: float = PHASE_ENTRY_TOL) -> np.ndarray:
    """Rotate the global phase so the last entry with magnitude > tol is
    real and positive. Vectors with no such entry are returned unchanged."""
    idx = np.nonzero(np.abs(v) > tol)[0]
    if idx.size == 0:
        return v
    pivot = v[idx[-1]]
    return v * (np.conj(pivot) / abs(pivot))


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data of a Hermitian matrix.

    values are real and sorted descending; column k of `vectors` is the
    unit eigenvector for values[k], phase-fixed by `fix_phase`. The
    `degenerate` flag reports any eigenvalue gap below DEGENERACY_GAP
    (flagged, never resolved here).
    """

    values: np.ndarray
    vectors: np.ndarray
    degenerate: bool

    def pairs(self) -> list[tuple[float, np.ndarray]]:
        return [(float(self.values[k]), self.vectors[:, k]) for k in range(self.values.size)]


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises NotHermitian when the symmetry defect exceeds `tol`.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect >= tol:
        raise NotHermitian(f"symmetry defect {defect:.3e} exceeds {tol:.1e}")
    values, vectors = np.linalg.eigh(m)
    order = np.argsort(values)[::-1]
    values = values[order]
    vectors = vectors[:, order]
    for k in range(values.size):
        vectors[:, k] = fix_phase(vectors[:, k])
    degenerate = bool(values.size > 1 and np.min(np.abs(np.diff(values))) < DEGENERACY_GAP)
    return EigenDecomposition(values=values, vectors=vectors, degenerate=degenerate)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition M = U @ diag(sigma) @ Vh.

    Returns (sigma, U, Vh) with sigma non-negative and descending;
    columns of U and rows of Vh are orthonormal families.
    """
    m = as_matrix(m)
    u, sigma, vh = np.linalg.svd(m, full_matrices=False)
    return sigma, u, vh


def orthonormalize(vectors: Iterable, drop_tol: float = 1e-12) -> list[np.ndarray]:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Near-null input directions (residual below drop_tol relative to the
    input norm) are dropped rather than normalized into noise.
    """
    basis: list[np.ndarray] = []
    for v in vectors:
        v = as_ket(v)
        r = v.copy()
        for _ in range(2):
            for q in basis:
                r = r - q * np.vdot(q, r)
        scale = max(1.0, norm(v))
        n = norm(r)
        if n > drop_tol * scale:
            basis.append(r / n)
    return basis


def project_complement(vectors: Sequence, target) -> np.ndarray:
    """Component of `target` orthogonal to span(vectors): (I - P)|target>.

    A zero vector is a valid return (target inside the span); the caller
    interprets it.
    """
    target = as_ket(target)
    basis = orthonormalize(vectors)
    r = target.copy()
    for _ in range(2):  # second pass kills cancellation residue
        for q in basis:
            r = r - q * np.vdot(q, r)
    return r


def orthonormal_completion(vectors: Sequence, dim: int) -> list[np.ndarray]:
    """Extend an orthonormal family to a full orthonormal basis of C^dim.

    Completion vectors are chosen greedily from the projected standard
    basis (largest residual first), so the result is deterministic.
    """
    basis = [as_ket(v) for v in vectors]
    while len(basis) < dim:
        residuals = []
        for i in range(dim):
            e = np.zeros(dim, dtype=complex)
            e[i] = 1.0
            residuals.append(project_complement(basis, e))
        best = max(residuals, key=norm)
        n = norm(best)
        if n < 1e-8:  # unreachable for a genuinely incomplete family
            raise ValueError("cannot complete basis: family already spans the space")
        basis.append(best / n)
    return basis
