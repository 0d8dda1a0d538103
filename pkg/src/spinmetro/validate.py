"""Structural invariant suites behind the `validate` CLI command.

Each check recomputes a core identity from scratch on a deterministic
set of inputs and returns the worst deviation seen; the runner prints
one line per check and fails on any violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import entangle, fisher, linalg, protocol, spin


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_state(rng: np.random.Generator, m: int) -> np.ndarray:
    v = rng.normal(size=m) + 1j * rng.normal(size=m)
    return v / np.linalg.norm(v)


def _random_chi(rng: np.random.Generator, m: int) -> entangle.BipartiteState:
    chi = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    chi /= np.linalg.norm(chi)
    return entangle.BipartiteState(chi=chi)


def check_commutators(seed: int) -> CheckResult:
    worst = 0.0
    for two_s in range(1, 9):
        sys = spin.make_spin_system(two_s / 2.0)
        comm = sys.sx @ sys.sy - sys.sy @ sys.sx - 1j * sys.sz
        casimir = sys.sx @ sys.sx + sys.sy @ sys.sy + sys.sz @ sys.sz
        expected = sys.s * (sys.s + 1.0) * np.eye(sys.dim)
        worst = max(worst, float(np.max(np.abs(comm))),
                    float(np.max(np.abs(casimir - expected))))
    return CheckResult("spin-commutators", worst < 1e-10,
                       f"max residual {worst:.2e} (tol 1e-10)")


def check_spectrum(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for two_s in range(1, 13):
        sys = spin.make_spin_system(two_s / 2.0)
        for theta in rng.uniform(0.0, math.pi, size=10):
            spec = spin.spectrum(sys, spin.AxisSpec(theta))
            expected = sys.s - np.arange(sys.dim)
            worst = max(worst, float(np.max(np.abs(spec.energies - expected))))
    return CheckResult("spectrum-ladder", worst < 1e-10,
                       f"max energy deviation {worst:.2e} (tol 1e-10)")


def check_schmidt_roundtrip(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 9))
        psi = _random_chi(rng, m)
        form = entangle.schmidt(psi)
        worst = max(worst, float(np.max(np.abs(form.reconstruct() - psi.chi))))
    return CheckResult("schmidt-roundtrip", worst < 1e-10,
                       f"max reconstruction error {worst:.2e} (tol 1e-10)")


def check_gram_orthogonality(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in (2, 3, 4, 6):
        sys = spin.make_spin_system((m - 1) / 2.0)
        for theta in rng.uniform(0.0, math.pi, size=5):
            spec = spin.spectrum(sys, spin.AxisSpec(theta))
            basis = fisher.optimal_basis(spec)
            dec = entangle.ancilla_decomposition(entangle.maximally_entangled(m), basis)
            defect = np.max(np.abs(dec.gram - np.eye(m)))
            worst = max(worst, float(defect))
    return CheckResult("maximal-entanglement-gram", worst < 1e-10,
                       f"max Gram defect {worst:.2e} (tol 1e-10)")


def check_beta_independence(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    sys = spin.make_spin_system(1)
    worst = 0.0
    for _ in range(5):
        theta = float(rng.uniform(0.2, math.pi - 0.2))
        xi = rng.uniform(0.2, 1.0, size=3)
        xi /= np.linalg.norm(xi)
        psi = entangle.bipartite_state(np.diag(xi).astype(complex))
        axis = spin.AxisSpec(theta)
        probs = [protocol.run_protocol(psi, sys, axis, beta).p_bruteforce
                 for beta in np.linspace(0.0, 2.0, 7)]
        worst = max(worst, float(np.ptp(probs)))
        maximal = entangle.maximally_entangled(3)
        probs = [protocol.run_protocol(maximal, sys, axis, beta).p_bruteforce
                 for beta in np.linspace(0.0, 2.0, 7)]
        worst = max(worst, float(np.ptp(probs)))
    return CheckResult("success-prob-beta-independent", worst < 1e-12,
                       f"max spread over beta {worst:.2e} (tol 1e-12)")


def check_post_state_fidelity(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 1.0
    for m in (2, 3, 4):
        sys = spin.make_spin_system((m - 1) / 2.0)
        for _ in range(5):
            theta = float(rng.uniform(0.1, math.pi - 0.1))
            beta = float(rng.uniform(0.0, 2.0))
            axis = spin.AxisSpec(theta)
            spec = spin.spectrum(sys, axis)
            n_plus, n_minus = fisher.optimal_states(spec)
            sampler = protocol.shot_sampler(entangle.maximally_entangled(m), sys, axis, beta)
            target = {protocol.BRANCH_PLUS: spin.evolve(sys, axis, beta, n_plus),
                      protocol.BRANCH_MINUS: spin.evolve(sys, axis, beta, n_minus)}
            for i in np.nonzero(sampler.kept)[0]:
                fid = abs(linalg.inner(sampler.post_states[i],
                                       target[sampler.branches[i]])) ** 2
                worst = min(worst, float(fid))
    sys1 = spin.make_spin_system(1)
    for _ in range(5):
        theta = float(rng.uniform(0.2, math.pi - 0.2))
        beta = float(rng.uniform(0.0, 2.0))
        xi = rng.uniform(0.2, 1.0, size=3)
        xi /= np.linalg.norm(xi)
        axis = spin.AxisSpec(theta)
        rep = protocol.nonorthogonal_protocol(
            entangle.bipartite_state(np.diag(xi).astype(complex)), sys1, axis, beta)
        spec = spin.spectrum(sys1, axis)
        _, n_minus = fisher.optimal_states(spec)
        fid = abs(linalg.inner(rep.post_state, spin.evolve(sys1, axis, beta, n_minus))) ** 2
        worst = min(worst, float(fid))
    return CheckResult("post-state-fidelity", worst > 1.0 - 1e-10,
                       f"min fidelity 1-{1.0 - worst:.2e} (tol 1e-10)")


def check_closed_vs_bruteforce(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in range(2, 9):
        sys = spin.make_spin_system((m - 1) / 2.0)
        theta = float(rng.uniform(0.1, math.pi - 0.1))
        beta = float(rng.uniform(0.0, 2.0))
        rep = protocol.orthogonal_protocol(
            entangle.maximally_entangled(m), sys, spin.AxisSpec(theta), beta)
        worst = max(worst, abs(rep.p_closed - rep.p_bruteforce))
    sys1 = spin.make_spin_system(1)
    for _ in range(10):
        theta = float(rng.uniform(0.1, math.pi - 0.1))
        xi = rng.uniform(0.15, 1.0, size=3)
        xi /= np.linalg.norm(xi)
        rep = protocol.nonorthogonal_protocol(
            entangle.bipartite_state(np.diag(xi).astype(complex)),
            sys1, spin.AxisSpec(theta), float(rng.uniform(0.0, 2.0)))
        worst = max(worst, abs(rep.p_closed - rep.p_bruteforce))
    return CheckResult("closed-vs-bruteforce", worst < 1e-10,
                       f"max |p_closed - p_brute| {worst:.2e} (tol 1e-10)")


ALL_CHECKS: list[Callable[[int], CheckResult]] = [
    check_commutators,
    check_spectrum,
    check_schmidt_roundtrip,
    check_gram_orthogonality,
    check_beta_independence,
    check_post_state_fidelity,
    check_closed_vs_bruteforce,
]


def run_all(seed: int) -> list[CheckResult]:
    return [check(seed) for check in ALL_CHECKS]
