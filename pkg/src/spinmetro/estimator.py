"""Monte Carlo phase estimation against the Cramer-Rao bound.

Each trial samples postselection shots until N are kept, measures the
collapsed probe in the optimal basis, and maximum-likelihood estimates
the rotation angle on its fundamental domain (0, pi/(2s)) - the
interval on which the optimal-probe statistics are injective. The
spread of the estimates across trials is compared with 1/(N*F).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fisher, protocol, rng, spin
from .errors import FlatLikelihood

GRID_POINTS = 1024
REFINE_WIDTH = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# stream tags for per-trial substreams
_SHOT_STREAM = 0
_PROBE_STREAM = 1


@dataclass(frozen=True)
class EstimationConfig:
    """One experiment: true angle, kept shots per trial, trial count, seed."""

    beta_true: float
    shots: int
    trials: int
    seed: int


@dataclass(frozen=True)
class EstimationResult:
    beta_hats: np.ndarray
    empirical_variance: float
    crb: float
    kept_fraction: float
    mean_beta: float
    fisher: float
    total_attempts: int
    total_kept: int

    @property
    def normalized_variance(self) -> float:
        """N * F * var(beta_hat); 1.0 at exact saturation of the bound."""
        return self.empirical_variance / self.crb


def likelihood(counts, sys, axis, probe, basis, beta: float) -> float:
    """Multinomial log-likelihood of per-outcome counts at angle beta.

    Outcomes with zero model probability contribute 0 when their count
    is zero and -inf otherwise.
    """
    counts = np.asarray(counts, dtype=float)
    if np.any(counts < 0):
        raise ValueError("counts must be non-negative")
    probs = fisher.probe_measurement_probs(sys, axis, beta, probe, basis)
    total = 0.0
    for c, p in zip(counts, probs):
        if c == 0:
            continue
        if p <= 0.0:
            return -math.inf
        total += c * math.log(p)
    return total


def _grid(domain: tuple[float, float], n: int = GRID_POINTS) -> np.ndarray:
    lo, hi = domain
    return np.linspace(lo, hi, n + 2)[1:-1]  # open interval


def _log_lik_on_grid(counts: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Sum of counts * log(probs) along outcomes, for stacked grid rows."""
    live = counts > 0
    if not np.any(live):
        return np.zeros(probs.shape[0])
    with np.errstate(divide="ignore"):
        logp = np.log(probs[:, live])
    return logp @ counts[live]


def _golden_refine(f: Callable[[float], float], lo: float, hi: float,
                   width: float = REFINE_WIDTH) -> float:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def mle(counts, model: Callable, domain: tuple[float, float]) -> float:
    """Maximum-likelihood angle: 1024-point grid scan over the open
    domain, then golden-section refinement of the bracketing interval.

    `model` maps an angle array to stacked outcome-probability rows
    matching `counts`.
    """
    counts = np.asarray(counts, dtype=float)
    grid = _grid(domain)
    probs = np.asarray(model(grid), dtype=float)
    ll = _log_lik_on_grid(counts, probs)
    finite = ll[np.isfinite(ll)]
    if finite.size == 0 or float(finite.max() - finite.min()) < 1e-12:
        raise FlatLikelihood("likelihood varies by < 1e-12 across the search grid")
    k = int(np.argmax(ll))
    lo = grid[k - 1] if k > 0 else domain[0]
    hi = grid[k + 1] if k < grid.size - 1 else domain[1]

    def objective(beta: float) -> float:
        row = np.asarray(model(np.array([beta])), dtype=float)
        return float(_log_lik_on_grid(counts, row)[0])

    return _golden_refine(objective, lo, hi)


def _draw_counts(probs: np.ndarray, n: int, key: int, start: int) -> np.ndarray:
    """Tally n independent categorical draws from probs."""
    if n == 0:
        return np.zeros(probs.size, dtype=np.int64)
    edges = np.cumsum(probs)
    u = rng.uniforms(key, np.arange(start, start + n, dtype=np.uint64))
    outcomes = np.minimum(np.searchsorted(edges, u, side="right"), probs.size - 1)
    return np.bincount(outcomes, minlength=probs.size).astype(np.int64)


def run_estimation(cfg: EstimationConfig, psi, sys, axis) -> EstimationResult:
    """Full Monte Carlo experiment for one protocol configuration.

    Per trial: sample shots until cfg.shots are kept (total attempts
    recorded), draw the probe outcome for every kept shot from the
    branch it collapsed to, and maximize the joint likelihood over the
    fundamental domain. Trials use independent (seed, trial) substreams.
    """
    s = sys.s
    hi = math.pi / (2.0 * s)
    margin = 0.05 * hi
    if not margin < cfg.beta_true < hi - margin:
        raise ValueError(
            f"beta_true={cfg.beta_true} outside identifiable range "
            f"({margin:.4f}, {hi - margin:.4f}) for s={s}")
    if cfg.shots < 1 or cfg.trials < 2:
        raise ValueError("need shots >= 1 and trials >= 2")

    sampler = protocol.shot_sampler(psi, sys, axis, cfg.beta_true)
    if sampler.p_keep <= 0.0:
        raise ValueError("keep probability is zero for this configuration")
    spec = spin.spectrum(sys, axis)
    basis = fisher.optimal_basis(spec)

    kept_branches = sorted({b for b, k in zip(sampler.branches, sampler.kept) if k})
    branch_probe = {protocol.BRANCH_PLUS: basis.n_plus,
                    protocol.BRANCH_MINUS: basis.n_minus}
    models = {b: fisher.measurement_prob_model(sys, axis, branch_probe[b], basis)
              for b in kept_branches}
    outcome_branch = np.array([kept_branches.index(b) if b in kept_branches else -1
                               for b in sampler.branches])
    truth = {b: models[b](np.array([cfg.beta_true]))[0] for b in kept_branches}

    def stacked_model(betas: np.ndarray) -> np.ndarray:
        return np.hstack([models[b](betas) for b in kept_branches])

    domain = (0.0, hi)
    beta_hats = np.empty(cfg.trials)
    total_attempts = 0
    total_kept = 0
    batch = max(256, int(1.2 * cfg.shots / sampler.p_keep))

    for t in range(cfg.trials):
        shot_key = rng.derive_key(cfg.seed, t, _SHOT_STREAM)
        probe_key = rng.derive_key(cfg.seed, t, _PROBE_STREAM)
        edges = np.cumsum(sampler.probabilities)
        kept_per_branch = np.zeros(len(kept_branches), dtype=np.int64)
        attempts = 0
        kept = 0
        while kept < cfg.shots:
            u = rng.uniforms(shot_key, np.arange(attempts, attempts + batch, dtype=np.uint64))
            outcomes = np.minimum(np.searchsorted(edges, u, side="right"),
                                  sampler.probabilities.size - 1)
            flags = sampler.kept[outcomes]
            need = cfg.shots - kept
            cum = np.cumsum(flags)
            if cum[-1] >= need:  # stop mid-batch exactly at the N-th keep
                stop = int(np.searchsorted(cum, need)) + 1
                outcomes = outcomes[:stop]
                flags = flags[:stop]
            labels = outcome_branch[outcomes[flags]]
            kept_per_branch += np.bincount(labels, minlength=len(kept_branches))
            kept += int(flags.sum())
            attempts += outcomes.size
        total_attempts += attempts
        total_kept += kept

        counts = []
        drawn = 0
        for bi, b in enumerate(kept_branches):
            n_b = int(kept_per_branch[bi])
            counts.append(_draw_counts(truth[b], n_b, probe_key, drawn))
            drawn += n_b
        beta_hats[t] = mle(np.concatenate(counts), stacked_model, domain)

    f_max = 4.0 * s * s
    variance = float(np.var(beta_hats, ddof=1))
    return EstimationResult(
        beta_hats=beta_hats,
        empirical_variance=variance,
        crb=fisher.crb(f_max, cfg.shots),
        kept_fraction=total_kept / total_attempts,
        mean_beta=float(beta_hats.mean()),
        fisher=f_max,
        total_attempts=total_attempts,
        total_kept=total_kept,
    )
