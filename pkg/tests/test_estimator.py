import math

import numpy as np
import pytest

from spinmetro import entangle, estimator, fisher, spin
from spinmetro.errors import FlatLikelihood


def spin1_config(theta=0.7):
    sys = spin.make_spin_system(1)
    axis = spin.AxisSpec(theta)
    spec = spin.spectrum(sys, axis)
    basis = fisher.optimal_basis(spec)
    return sys, axis, spec, basis


def two_level_model(sys, axis, basis):
    return fisher.measurement_prob_model(sys, axis, basis.n_plus, basis)


class TestLikelihood:
    def test_all_counts_on_first_outcome_peaks_at_origin(self):
        sys, axis, _, basis = spin1_config()
        counts = [40, 0, 0]
        values = [estimator.likelihood(counts, sys, axis, basis.n_plus, basis, b)
                  for b in np.linspace(0.01, 1.5, 40)]
        assert values == sorted(values, reverse=True)

    def test_binomial_argmax_closed_form(self):
        sys, axis, _, basis = spin1_config()
        counts = np.array([73, 0, 27])
        model = two_level_model(sys, axis, basis)
        beta_hat = estimator.mle(counts, model, (0.0, math.pi / 2.0))
        assert abs(beta_hat - math.acos(math.sqrt(0.73))) < 1e-6

    def test_exact_proportions_recover_truth(self):
        sys, axis, _, basis = spin1_config()
        beta0 = 0.62
        n = 10_000
        probs = fisher.probe_measurement_probs(sys, axis, beta0, basis.n_plus, basis)
        counts = probs * n
        model = two_level_model(sys, axis, basis)
        beta_hat = estimator.mle(counts, model, (0.0, math.pi / 2.0))
        assert abs(beta_hat - beta0) < 1e-6

    def test_impossible_count_gives_minus_infinity(self):
        # axis along z makes the interior outcome probability exactly zero
        sys, axis, _, basis = spin1_config(theta=0.0)
        value = estimator.likelihood([5, 1, 4], sys, axis, basis.n_plus, basis, 0.4)
        assert value == -math.inf
        finite = estimator.likelihood([5, 0, 4], sys, axis, basis.n_plus, basis, 0.4)
        assert math.isfinite(finite)

    def test_symmetric_counts_give_quarter_turn(self):
        sys, axis, _, basis = spin1_config()
        model = two_level_model(sys, axis, basis)
        beta_hat = estimator.mle(np.array([50, 0, 50]), model, (0.0, math.pi / 2.0))
        assert abs(beta_hat - math.pi / 4.0) < 1e-6

    def test_flat_likelihood_raises(self):
        sys, axis, _, basis = spin1_config()
        model = two_level_model(sys, axis, basis)
        with pytest.raises(FlatLikelihood):
            estimator.mle(np.zeros(3), model, (0.0, math.pi / 2.0))


class TestRunEstimation:
    def test_reproducible(self):
        sys, axis, _, _ = spin1_config()
        cfg = estimator.EstimationConfig(beta_true=0.4, shots=500, trials=10, seed=5)
        psi = entangle.maximally_entangled(3)
        a = estimator.run_estimation(cfg, psi, sys, axis)
        b = estimator.run_estimation(cfg, psi, sys, axis)
        assert np.array_equal(a.beta_hats, b.beta_hats)
        assert a.total_attempts == b.total_attempts

    def test_bias_within_statistical_error(self):
        sys, axis, _, _ = spin1_config()
        cfg = estimator.EstimationConfig(beta_true=0.5, shots=4000, trials=80, seed=2)
        res = estimator.run_estimation(cfg, entangle.maximally_entangled(3), sys, axis)
        bound = 3.0 * math.sqrt(res.empirical_variance / cfg.trials)
        assert abs(res.mean_beta - cfg.beta_true) < bound

    def test_variance_scales_inversely_with_shots(self):
        sys, axis, _, _ = spin1_config()
        psi = entangle.maximally_entangled(3)
        base = estimator.run_estimation(
            estimator.EstimationConfig(beta_true=0.4, shots=1000, trials=300, seed=8),
            psi, sys, axis)
        double = estimator.run_estimation(
            estimator.EstimationConfig(beta_true=0.4, shots=2000, trials=300, seed=9),
            psi, sys, axis)
        ratio = base.empirical_variance / double.empirical_variance
        assert 2.0 * 0.75 < ratio < 2.0 * 1.25

    def test_unit_keep_rate_for_certainty_family(self):
        sys = spin.make_spin_system(0.5)
        axis = spin.AxisSpec(1.0)
        spec = spin.spectrum(sys, axis)
        r = 1.0 / math.sqrt(2.0)
        psi = entangle.max_prob_state(spec, r, r)
        cfg = estimator.EstimationConfig(beta_true=0.8, shots=800, trials=10, seed=3)
        res = estimator.run_estimation(cfg, psi, sys, axis)
        assert abs(res.kept_fraction - 1.0) < 1e-12
        assert res.total_attempts == res.total_kept

    def test_never_statistically_below_bound(self):
        # repeated acceptance-size runs: at most one may undershoot
        sys, axis, _, _ = spin1_config()
        psi = entangle.maximally_entangled(3)
        low = 0
        for seed in range(20):
            cfg = estimator.EstimationConfig(beta_true=0.4, shots=10_000,
                                             trials=200, seed=seed)
            res = estimator.run_estimation(cfg, psi, sys, axis)
            if res.normalized_variance < 0.85:
                low += 1
        assert low <= 1

    def test_identifiability_margin_enforced(self):
        sys, axis, _, _ = spin1_config()
        psi = entangle.maximally_entangled(3)
        for bad in (0.01, math.pi / 2.0 - 0.01, -0.3):
            cfg = estimator.EstimationConfig(beta_true=bad, shots=100, trials=5, seed=0)
            with pytest.raises(ValueError):
                estimator.run_estimation(cfg, psi, sys, axis)
