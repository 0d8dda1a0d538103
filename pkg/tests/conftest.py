"""Shared closed-form oracles and helpers for the test suite.

Everything here is computed independently of the library code paths it
checks: eigenvectors from trigonometric closed forms, probabilities
from hand-derived expressions.
"""

import math

import numpy as np
import pytest


def qubit_eigvecs(theta: float) -> np.ndarray:
    """Closed-form eigenvectors of (sx sin + sz cos)/... for s=1/2,
    rows ordered by descending eigenvalue (+1/2, -1/2)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, s], [-s, c]])


def spin1_eigvecs(theta: float) -> np.ndarray:
    """Closed-form eigenvectors for s=1, rows for eigenvalues (1, 0, -1)."""
    c2 = math.cos(theta / 2.0) ** 2
    s2 = math.sin(theta / 2.0) ** 2
    sn = math.sin(theta)
    r = 1.0 / math.sqrt(2.0)
    return np.array([
        [c2, sn * r, s2],
        [-sn * r, math.cos(theta), sn * r],
        [s2, -sn * r, c2],
    ])


def spin1_hamiltonian(theta: float) -> np.ndarray:
    sn, cs = math.sin(theta), math.cos(theta)
    r = sn / math.sqrt(2.0)
    return np.array([[cs, r, 0.0], [r, 0.0, r], [0.0, r, -cs]])


def spin1_branches(xi, theta: float) -> np.ndarray:
    """Unnormalized ancilla branch vectors for the diagonal spin-1
    encoding state, rows ordered (n+ branch, middle, n- branch)."""
    xi1, xi2, xi3 = xi
    sn, cs = math.sin(theta), math.cos(theta)
    r = 1.0 / math.sqrt(2.0)
    return np.array([
        [xi1 * r, 0.0, xi3 * r],
        [-xi1 * sn * r, xi2 * cs, xi3 * sn * r],
        [xi1 * cs * r, xi2 * sn, -xi3 * cs * r],
    ])


def spin1_measure_direction(xi, theta: float) -> np.ndarray:
    """Closed-form optimal measurement direction for the diagonal spin-1
    encoding state (generic, all coefficients positive)."""
    xi1, xi2, xi3 = xi
    sn, cs = math.sin(theta), math.cos(theta)
    norm = math.sqrt(0.5 * xi2**2 * (xi1**2 + xi3**2) * cs**2 + (xi1 * xi3 * sn) ** 2)
    r = 1.0 / math.sqrt(2.0)
    return np.array([
        xi2 * xi3 * cs * r / norm,
        xi1 * xi3 * sn / norm,
        -xi1 * xi2 * cs * r / norm,
    ])


def qubit_unit_success_chi(xi1: float, xi2: float, theta: float) -> np.ndarray:
    """Closed-form coefficient matrix of the certainty-success qubit
    encoding state."""
    sn, cs = math.sin(theta), math.cos(theta)
    return np.array([
        [0.5 * (xi1 - xi2) * cs, -0.5 * xi1 * (1 - sn) - 0.5 * xi2 * (1 + sn)],
        [0.5 * xi1 * (1 + sn) + 0.5 * xi2 * (1 - sn), -0.5 * (xi1 - xi2) * cs],
    ])


def random_unit(rng: np.random.Generator, m: int) -> np.ndarray:
    v = rng.normal(size=m) + 1j * rng.normal(size=m)
    return v / np.linalg.norm(v)


def random_xi_triple(rng: np.random.Generator, low: float = 0.15) -> np.ndarray:
    xi = rng.uniform(low, 1.0, size=3)
    return xi / np.linalg.norm(xi)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260811)
