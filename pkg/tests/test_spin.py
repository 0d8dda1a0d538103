import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinmetro import spin
from spinmetro.errors import InvalidSpin

from conftest import qubit_eigvecs, spin1_eigvecs, spin1_hamiltonian, random_unit


def commutator_residual(sys):
    pairs = [(sys.sx, sys.sy, sys.sz), (sys.sy, sys.sz, sys.sx), (sys.sz, sys.sx, sys.sy)]
    return max(float(np.max(np.abs(a @ b - b @ a - 1j * c))) for a, b, c in pairs)


class TestMakeSpinSystem:
    def test_half_spin_is_half_pauli(self):
        sys = spin.make_spin_system(0.5)
        assert np.allclose(sys.sx, np.array([[0, 1], [1, 0]]) / 2.0)
        assert np.allclose(sys.sy, np.array([[0, -1j], [1j, 0]]) / 2.0)
        assert np.allclose(sys.sz, np.array([[1, 0], [0, -1]]) / 2.0)

    def test_spin1_matrices(self):
        sys = spin.make_spin_system(1)
        r = 1.0 / math.sqrt(2.0)
        assert np.allclose(sys.sx, np.array([[0, r, 0], [r, 0, r], [0, r, 0]]))
        assert np.allclose(sys.sz, np.diag([1.0, 0.0, -1.0]))

    def test_commutators_spin_three_half(self):
        assert commutator_residual(spin.make_spin_system(1.5)) < 1e-12

    @pytest.mark.parametrize("s", [0, -0.5, 0.3, 1.2, float("nan")])
    def test_invalid_spin_rejected(self, s):
        with pytest.raises(InvalidSpin):
            spin.make_spin_system(s)

    def test_casimir(self):
        for two_s in range(1, 9):
            sys = spin.make_spin_system(two_s / 2.0)
            total = sys.sx @ sys.sx + sys.sy @ sys.sy + sys.sz @ sys.sz
            expected = sys.s * (sys.s + 1.0) * np.eye(sys.dim)
            assert np.max(np.abs(total - expected)) < 1e-10


class TestHamiltonian:
    def test_axis_along_z(self):
        sys = spin.make_spin_system(1.5)
        h = spin.hamiltonian(sys, spin.AxisSpec(0.0))
        assert np.allclose(h, sys.sz)

    def test_spin1_closed_form(self):
        sys = spin.make_spin_system(1)
        for theta in (0.3, 1.1, 2.7):
            h = spin.hamiltonian(sys, spin.AxisSpec(theta))
            assert np.max(np.abs(h - spin1_hamiltonian(theta))) < 1e-14
            assert np.max(np.abs(h.imag)) < 1e-14

    def test_traceless(self):
        for s in (0.5, 1.0, 2.5):
            sys = spin.make_spin_system(s)
            for theta in (0.0, 0.9, math.pi):
                assert abs(np.trace(spin.hamiltonian(sys, spin.AxisSpec(theta)))) < 1e-12

    def test_axis_validation(self):
        with pytest.raises(ValueError):
            spin.AxisSpec(-0.1)
        with pytest.raises(ValueError):
            spin.AxisSpec(math.pi + 0.1)


class TestSpectrum:
    def test_spin1_eigvecs_closed_form(self):
        sys = spin.make_spin_system(1)
        for theta in (0.4, 1.3, 2.2):
            spec = spin.spectrum(sys, spin.AxisSpec(theta))
            assert np.max(np.abs(spec.states - spin1_eigvecs(theta))) < 1e-10

    def test_qubit_eigvecs_closed_form(self):
        sys = spin.make_spin_system(0.5)
        for theta in (0.2, 1.0, 2.5):
            spec = spin.spectrum(sys, spin.AxisSpec(theta))
            assert np.max(np.abs(spec.states - qubit_eigvecs(theta))) < 1e-10

    def test_residual_spin2(self):
        sys = spin.make_spin_system(2)
        axis = spin.AxisSpec(0.7)
        h = spin.hamiltonian(sys, axis)
        spec = spin.spectrum(sys, axis)
        for e, v in zip(spec.energies, spec.states):
            assert np.max(np.abs(h @ v - e * v)) < 1e-10

    def test_energy_ladder_all_spins(self):
        rng = np.random.default_rng(7)
        for two_s in range(1, 13):  # s up to 6
            sys = spin.make_spin_system(two_s / 2.0)
            expected = sys.s - np.arange(sys.dim)
            for theta in rng.uniform(0.0, math.pi, size=50):
                spec = spin.spectrum(sys, spin.AxisSpec(float(theta)))
                assert np.max(np.abs(spec.energies - expected)) < 1e-10

    def test_eigenstates_real_orthonormal(self):
        sys = spin.make_spin_system(2.5)
        spec = spin.spectrum(sys, spin.AxisSpec(1.9))
        assert np.max(np.abs(spec.states.imag)) < 1e-10
        gram = spec.states.conj() @ spec.states.T
        assert np.max(np.abs(gram - np.eye(sys.dim))) < 1e-10


class TestEvolve:
    def test_zero_angle_identity(self, rng):
        sys = spin.make_spin_system(1.5)
        state = random_unit(rng, sys.dim)
        out = spin.evolve(sys, spin.AxisSpec(0.8), 0.0, state)
        assert np.max(np.abs(out - state)) < 1e-12

    def test_eigenstate_picks_up_phase_only(self):
        sys = spin.make_spin_system(1)
        axis = spin.AxisSpec(0.6)
        spec = spin.spectrum(sys, axis)
        out = spin.evolve(sys, axis, 0.9, spec.states[0])
        expected = np.exp(-1j * 0.9 * sys.s) * spec.states[0]
        assert np.max(np.abs(out - expected)) < 1e-12
        assert abs(abs(np.vdot(out, spec.states[0])) - 1.0) < 1e-12

    def test_matches_taylor_series(self, rng):
        sys = spin.make_spin_system(1)
        axis = spin.AxisSpec(math.pi / 3.0)
        beta = 0.4
        state = random_unit(rng, 3)
        h = spin.hamiltonian(sys, axis)
        term = state.astype(complex)
        series = term.copy()
        for k in range(1, 20):
            term = (-1j * beta) * (h @ term) / k
            series += term
        out = spin.evolve(sys, axis, beta, state)
        assert np.max(np.abs(out - series)) < 1e-10

    def test_norm_preserved(self, rng):
        sys = spin.make_spin_system(2)
        state = random_unit(rng, sys.dim)
        out = spin.evolve(sys, spin.AxisSpec(2.3), 17.0, state)
        assert abs(np.linalg.norm(out) - 1.0) < 1e-12

    @given(st.integers(min_value=1, max_value=6),
           st.floats(min_value=0.01, max_value=3.1),
           st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=-3.0, max_value=3.0),
           st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_group_law(self, two_s, theta, b1, b2, seed):
        sys = spin.make_spin_system(two_s / 2.0)
        axis = spin.AxisSpec(theta)
        state = random_unit(np.random.default_rng(seed), sys.dim)
        once = spin.evolve(sys, axis, b1 + b2, state)
        twice = spin.evolve(sys, axis, b1, spin.evolve(sys, axis, b2, state))
        assert np.max(np.abs(once - twice)) < 1e-10

    @given(st.floats(min_value=0.01, max_value=3.1),
           st.floats(min_value=-4.0, max_value=4.0),
           st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_energy_conserved(self, theta, beta, seed):
        sys = spin.make_spin_system(1.5)
        axis = spin.AxisSpec(theta)
        h = spin.hamiltonian(sys, axis)
        state = random_unit(np.random.default_rng(seed), sys.dim)
        before = np.vdot(state, h @ state).real
        evolved = spin.evolve(sys, axis, beta, state)
        after = np.vdot(evolved, h @ evolved).real
        assert abs(before - after) < 1e-10

    def test_operator_matches_evolve(self, rng):
        sys = spin.make_spin_system(1)
        axis = spin.AxisSpec(1.4)
        u = spin.evolution_operator(sys, axis, 0.7)
        state = random_unit(rng, 3)
        assert np.max(np.abs(u @ state - spin.evolve(sys, axis, 0.7, state))) < 1e-12
        assert np.max(np.abs(u @ u.conj().T - np.eye(3))) < 1e-12
