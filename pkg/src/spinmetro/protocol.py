"""Postselection protocols that prepare an optimal probe after the axis
is revealed.

Once the encoding unitary has acted, the ancilla is measured and only
designated outcomes are kept; on success the probe collapses to an
evolved optimal state. Two measurement constructions are dispatched
automatically from the Gram matrix of the ancilla branch states:

* orthogonal branches - measure the branch states directly; both
  extreme outcomes are kept and the success probability is the summed
  weight of the two extreme branches.
* non-orthogonal branches - build a single measurement vector by
  projecting the target branch onto the subspace orthogonal to every
  unwanted branch; keeping that outcome collapses the probe onto the
  evolved n- state. When the n+ branch happens to be orthogonal to all
  others it can be kept as a second outcome, and the combined success
  probability is reported as well.

Every probability is produced twice: from the closed form and from a
brute-force Born-rule projection of the full joint state; reports carry
both so the agreement is checkable at every call site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import entangle, fisher, linalg, rng, spin
from .errors import (
    NonOrthogonalAncilla,
    NotNormalized,
    NotSpecialCase,
    OutOfDomain,
    UnreachableCase,
    ZeroProjection,
)

GRAM_IDENTITY_TOL = 1e-8
COMBINED_ORTHO_TOL = 1e-10
ZERO_PROJECTION_TOL = 1e-10

BRANCH_PLUS = "n+"
BRANCH_MINUS = "n-"
BRANCH_BOTH = "both"
BRANCH_NONE = "none"


@dataclass(frozen=True)
class MeasurementVector:
    """Ancilla measurement direction phi plus an orthonormal completion
    (rows of completed_basis); phi is orthogonal to every unwanted
    present branch."""

    phi: np.ndarray
    completed_basis: np.ndarray


@dataclass(frozen=True)
class ProtocolReport:
    """Outcome of one protocol evaluation.

    p_closed and p_bruteforce are the success probability from the
    closed form and from joint-state simulation. post_state is the
    probe state after a successful measurement (None when success is
    impossible). p_total/p_total_bruteforce appear when a combined
    two-outcome measurement is available.
    """

    branch: str
    p_closed: float
    p_bruteforce: float
    post_state: np.ndarray | None
    qfi_achieved: float
    p_total: float | None = None
    p_total_bruteforce: float | None = None


@dataclass(frozen=True)
class Spin1Probabilities:
    """Spin-1 closed forms: success probability for the given Schmidt
    triple, its maximum over xi1 at fixed (xi2, theta), and the combined
    two-outcome total (present only when xi1 = xi3)."""

    p: float
    p_max: float
    p_total: float | None


@dataclass(frozen=True)
class ShotResult:
    outcome: int
    kept: bool
    post_state: np.ndarray | None
    branch: str | None


@dataclass(frozen=True)
class ShotSampler:
    """Precomputed Born-rule sampler for one protocol configuration.

    Outcome k of a shot is drawn with probabilities[k]; kept flags mark
    the success branches and post_states rows hold the collapsed probe
    state for each outcome (zero rows where the outcome never fires).
    Draw k for shot i depends only on (seed, i), so shots may be
    sampled in any order or in parallel.
    """

    outcome_vectors: np.ndarray
    probabilities: np.ndarray
    kept: np.ndarray
    branches: tuple
    post_states: np.ndarray
    p_keep: float

    def sample(self, seed: int, index: int = 0) -> ShotResult:
        outcome = int(self.sample_outcomes(seed, 1, start=index)[0])
        kept = bool(self.kept[outcome])
        post = self.post_states[outcome] if kept else None
        return ShotResult(outcome=outcome, kept=kept, post_state=post,
                          branch=self.branches[outcome])

    def sample_outcomes(self, seed: int, n: int, start: int = 0) -> np.ndarray:
        """Outcome indices for shots [start, start + n)."""
        edges = np.cumsum(self.probabilities)
        u = rng.uniforms(rng.derive_key(seed), np.arange(start, start + n, dtype=np.uint64))
        return np.minimum(np.searchsorted(edges, u, side="right"), self.probabilities.size - 1)


def _brute_amplitudes(chi_beta: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Unnormalized probe state after ancilla outcome w: (I x <w|)|Psi_beta>."""
    return chi_beta @ w.conj()


def _prepare(psi, sys, axis, alpha=0.0):
    spec = spin.spectrum(sys, axis)
    basis = fisher.optimal_basis(spec, alpha)
    dec = entangle.ancilla_decomposition(psi, basis)
    return spec, basis, dec


def _gram_defect(dec: entangle.AncillaDecomposition) -> float:
    idx = dec.present_indices()
    if idx.size == 0:
        return 0.0
    block = dec.gram[np.ix_(idx, idx)]
    return float(np.max(np.abs(block - np.eye(idx.size))))


def _ancilla_basis_orthogonal(dec: entangle.AncillaDecomposition) -> np.ndarray:
    """Measurement rows for the orthogonal path: present branch states in
    their outcome slots, absent slots filled with an arbitrary
    orthonormal completion (those outcomes count as failures)."""
    m = dec.dim
    present = dec.present_indices()
    completion = linalg.orthonormal_completion([dec.psis[i] for i in present], m)
    fill = iter(completion[present.size:])
    rows = np.zeros((m, m), dtype=complex)
    for i in range(m):
        rows[i] = dec.psis[i] if dec.present[i] else next(fill)
    return rows


def orthogonal_protocol(psi: entangle.BipartiteState, sys, axis, beta,
                        alpha: float = 0.0) -> ProtocolReport:
    """Measure the ancilla in the (orthogonal) branch states; keep the
    two extreme outcomes. Success probability c_1^2 + c_m^2."""
    spec, basis, dec = _prepare(psi, sys, axis, alpha)
    defect = _gram_defect(dec)
    if defect > GRAM_IDENTITY_TOL:
        raise NonOrthogonalAncilla(
            f"branch Gram matrix deviates from identity by {defect:.3e}")
    m = dec.dim
    vectors = _ancilla_basis_orthogonal(dec)
    kept_idx = [i for i in (0, m - 1) if dec.present[i]]
    branch_map = {0: BRANCH_PLUS, m - 1: BRANCH_MINUS}
    p_closed = float(dec.cs[0] ** 2 + dec.cs[m - 1] ** 2)
    u = spin.evolution_from_spectrum(spec, beta)
    chi_beta = u @ psi.chi
    p_brute = 0.0
    post = None
    for i in kept_idx:
        amp = _brute_amplitudes(chi_beta, vectors[i])
        w = float(np.real(np.vdot(amp, amp)))
        p_brute += w
        if post is None and w > 1e-30:
            post = amp / math.sqrt(w)
    h = spin.hamiltonian(sys, axis)
    qfi = fisher.qfi_pure(post, h) if post is not None else 0.0
    if len(kept_idx) == 2:
        branch = BRANCH_BOTH
    elif len(kept_idx) == 1:
        branch = branch_map[kept_idx[0]]
    else:
        branch = BRANCH_NONE
    return ProtocolReport(branch=branch, p_closed=p_closed, p_bruteforce=p_brute,
                          post_state=post, qfi_achieved=qfi)


def _measurement_direction(dec: entangle.AncillaDecomposition) -> np.ndarray:
    m = dec.dim
    if not dec.present[m - 1]:
        raise ZeroProjection("the n- branch carries no weight")
    others = [dec.psis[i] for i in dec.present_indices() if i != m - 1]
    residual = linalg.project_complement(others, dec.psis[m - 1])
    n = linalg.norm(residual)
    if n < ZERO_PROJECTION_TOL:
        raise ZeroProjection(
            f"target branch lies inside the unwanted span (residual {n:.3e})")
    return residual / n


def measurement_vector(dec: entangle.AncillaDecomposition) -> MeasurementVector:
    """Optimal single measurement direction: the normalized projection of
    the n- branch onto the subspace orthogonal to every other present
    branch. Maximizes the success probability (Cauchy-Schwarz)."""
    phi = _measurement_direction(dec)
    completion = linalg.orthonormal_completion([phi], dec.dim)[1:]
    return MeasurementVector(phi=phi, completed_basis=np.array(completion))


def _combined_available(dec: entangle.AncillaDecomposition) -> bool:
    """The n+ branch can be kept as a second outcome iff it is present
    and orthogonal to every other present branch."""
    if not dec.present[0]:
        return False
    others = [i for i in dec.present_indices() if i != 0]
    return all(abs(dec.gram[0, i]) <= COMBINED_ORTHO_TOL for i in others)


def nonorthogonal_protocol(psi: entangle.BipartiteState, sys, axis, beta) -> ProtocolReport:
    """Keep the single constructed outcome (probe collapses onto the
    evolved n- state), success probability c_m^2 |<phi|psi_m>|^2; report
    the combined two-outcome total when the n+ branch is orthogonal to
    all other present branches."""
    spec, basis, dec = _prepare(psi, sys, axis)
    m = dec.dim
    phi = _measurement_direction(dec)
    overlap = linalg.inner(phi, dec.psis[m - 1])
    p_closed = float(dec.cs[m - 1] ** 2 * abs(overlap) ** 2)
    u = spin.evolution_from_spectrum(spec, beta)
    chi_beta = u @ psi.chi
    amp = _brute_amplitudes(chi_beta, phi)
    p_brute = float(np.real(np.vdot(amp, amp)))
    post = amp / math.sqrt(p_brute) if p_brute > 1e-30 else None
    h = spin.hamiltonian(sys, axis)
    qfi = fisher.qfi_pure(post, h) if post is not None else 0.0
    p_total = None
    p_total_brute = None
    if _combined_available(dec):
        p_total = p_closed + float(dec.cs[0] ** 2)
        amp_plus = _brute_amplitudes(chi_beta, dec.psis[0])
        p_total_brute = p_brute + float(np.real(np.vdot(amp_plus, amp_plus)))
    return ProtocolReport(branch=BRANCH_MINUS, p_closed=p_closed, p_bruteforce=p_brute,
                          post_state=post, qfi_achieved=qfi,
                          p_total=p_total, p_total_bruteforce=p_total_brute)


def run_protocol(psi: entangle.BipartiteState, sys, axis, beta) -> ProtocolReport:
    """Dispatch on the branch Gram matrix: identity within tolerance runs
    the direct branch measurement, anything else the projected-vector
    protocol."""
    _, _, dec = _prepare(psi, sys, axis)
    if _gram_defect(dec) <= GRAM_IDENTITY_TOL:
        return orthogonal_protocol(psi, sys, axis, beta)
    return nonorthogonal_protocol(psi, sys, axis, beta)


def _check_xi_triple(xi) -> tuple[float, float, float]:
    xi1, xi2, xi3 = (float(x) for x in xi)
    total = xi1 * xi1 + xi2 * xi2 + xi3 * xi3
    if abs(total - 1.0) > 1e-12:
        raise NotNormalized(f"xi squared sum {total:.15f}, expected 1")
    return xi1, xi2, xi3


def spin1_closed_forms(xi, theta: float) -> Spin1Probabilities:
    """Closed-form spin-1 success probabilities for the diagonal encoding
    state with Schmidt triple xi = (xi1, xi2, xi3), all positive."""
    xi1, xi2, xi3 = _check_xi_triple(xi)
    if xi1 <= 0 or xi2 <= 0 or xi3 <= 0:
        raise OutOfDomain(f"all coefficients must be positive, got {xi}")
    s2 = math.sin(theta) ** 2
    c2 = math.cos(theta) ** 2
    q2 = xi2 * xi2
    norm_sq = 0.5 * q2 * (xi1 * xi1 + xi3 * xi3) * c2 + (xi1 * xi3) ** 2 * s2
    if norm_sq < 1e-20:
        raise OutOfDomain("measurement-vector normalizer vanishes for these inputs")
    p = q2 / (q2 * (1.0 - q2) * c2 / (2.0 * (xi1 * xi3) ** 2) + s2)
    p_max = q2 * (1.0 - q2) / (2.0 * q2 * c2 + (1.0 - q2) * s2)
    p_total = p + 0.5 * (1.0 - q2) if abs(xi1 - xi3) <= 1e-12 else None
    return Spin1Probabilities(p=p, p_max=p_max, p_total=p_total)


def _diag_state(xi1: float, xi2: float, xi3: float) -> entangle.BipartiteState:
    return entangle.bipartite_state(np.diag([xi1, xi2, xi3]).astype(complex))


def appendix_special_cases(xi, theta: float) -> ProtocolReport:
    """Degenerate spin-1 regimes where the generic measurement-vector
    normalizer vanishes, evaluated in closed form and by brute force.

    Covers (xi2 = 0, theta in {0, pi}) and (theta = pi/2 with xi1 = 0 or
    xi3 = 0); anything else is rejected."""
    xi1, xi2, xi3 = _check_xi_triple(xi)
    tol = 1e-12
    axis_aligned = min(abs(theta), abs(theta - math.pi)) <= tol
    equator = abs(theta - math.pi / 2) <= tol
    if abs(xi2) <= tol:
        if not axis_aligned:
            raise UnreachableCase(
                "with xi2 = 0 the n- collapse only exists for theta in {0, pi}")
        p_closed = 2.0 * xi3 * xi3 * (1.0 - xi3 * xi3)
        p_total = 1.0 if abs(xi1 - xi3) <= tol else None
    elif equator and (abs(xi1) <= tol or abs(xi3) <= tol):
        p_closed = xi2 * xi2
        p_total = None
    else:
        raise NotSpecialCase(f"(xi={xi}, theta={theta}) matches no degenerate branch")

    if p_closed <= 1e-30:  # product-state corner: success impossible
        return ProtocolReport(branch=BRANCH_NONE, p_closed=0.0, p_bruteforce=0.0,
                              post_state=None, qfi_achieved=0.0,
                              p_total=p_total, p_total_bruteforce=p_total)

    sys = spin.make_spin_system(1)
    axis = spin.AxisSpec(theta)
    psi = _diag_state(xi1, xi2, xi3)
    spec, basis, dec = _prepare(psi, sys, axis)
    phi = _measurement_direction(dec)
    chi = psi.chi
    amp = _brute_amplitudes(chi, phi)
    p_brute = float(np.real(np.vdot(amp, amp)))
    post = amp / math.sqrt(p_brute)
    qfi = fisher.qfi_pure(post, spin.hamiltonian(sys, axis))
    p_total_brute = None
    if p_total is not None:
        amp_plus = _brute_amplitudes(chi, dec.psis[0])
        p_total_brute = p_brute + float(np.real(np.vdot(amp_plus, amp_plus)))
    branch = BRANCH_BOTH if p_total is not None else BRANCH_MINUS
    return ProtocolReport(branch=branch, p_closed=float(p_closed), p_bruteforce=p_brute,
                          post_state=post, qfi_achieved=qfi,
                          p_total=p_total, p_total_bruteforce=p_total_brute)


def shot_sampler(psi: entangle.BipartiteState, sys, axis, beta,
                 two_outcome: bool = True) -> ShotSampler:
    """Build the Born-rule sampler for the dispatched protocol.

    For the projected-vector path, two_outcome=True also keeps the n+
    branch whenever the combined measurement exists; set False for the
    single-outcome protocol regardless.
    """
    spec, basis, dec = _prepare(psi, sys, axis)
    m = dec.dim
    if _gram_defect(dec) <= GRAM_IDENTITY_TOL:
        vectors = _ancilla_basis_orthogonal(dec)
        kept = np.zeros(m, dtype=bool)
        branches: list = [None] * m
        if dec.present[0]:
            kept[0] = True
            branches[0] = BRANCH_PLUS
        if dec.present[m - 1]:
            kept[m - 1] = True
            branches[m - 1] = BRANCH_MINUS
    else:
        family = [_measurement_direction(dec)]
        branches = [BRANCH_MINUS]
        if two_outcome and _combined_available(dec):
            family.append(dec.psis[0])
            branches.append(BRANCH_PLUS)
        rows = linalg.orthonormal_completion(family, m)
        vectors = np.array(rows)
        kept = np.zeros(m, dtype=bool)
        kept[: len(family)] = True
        branches = branches + [None] * (m - len(branches))

    u = spin.evolution_from_spectrum(spec, beta)
    chi_beta = u @ psi.chi
    probs = np.empty(m)
    posts = np.zeros((m, m), dtype=complex)
    for i in range(m):
        amp = _brute_amplitudes(chi_beta, vectors[i])
        w = float(np.real(np.vdot(amp, amp)))
        probs[i] = w
        if w > 1e-30:
            posts[i] = amp / math.sqrt(w)
    total = probs.sum()
    if abs(total - 1.0) > 1e-10:
        raise NotNormalized(f"outcome probabilities sum to {total:.15f}")
    return ShotSampler(outcome_vectors=vectors, probabilities=probs, kept=kept,
                       branches=tuple(branches), post_states=posts,
                       p_keep=float(probs[kept].sum()))


def sample_shot(psi: entangle.BipartiteState, sys, axis, beta,
                seed: int, index: int = 0, two_outcome: bool = True) -> ShotResult:
    """Draw one postselection shot; the result depends only on the
    configuration and (seed, index)."""
    return shot_sampler(psi, sys, axis, beta, two_outcome).sample(seed, index)
