"""Tripod and ladder Hamiltonian construction."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arosim.hamiltonian import build_ladder, build_tripod, evaluate
from arosim.model import PulseSpec


def gaussian(omega0=18.0):
    return PulseSpec.gaussian(omega0)


class TestTripod:
    def test_field_free_limit_is_diagonal(self):
        h = build_tripod(1.0, 0.0, PulseSpec.gaussian(0.0))
        assert np.array_equal(h.evaluate(5.0), np.diag([-1.0, 0.0, 1.0, 0.0]))

    def test_peak_couplings_at_reference_parameters(self):
        # delta*tau0 = 5, Omega0*tau0 = 18: off-diagonals -9/tau0 at the center
        h = build_tripod(5.0, 0.0, gaussian(18.0))
        m = h.evaluate(5.0)
        for g in range(3):
            assert m[g, 3] == pytest.approx(-9.0, rel=1e-15)
            assert m[3, g] == pytest.approx(-9.0, rel=1e-15)
        assert np.allclose(np.diag(m), [-5.0, 0.0, 5.0, 0.0])

    def test_asymmetric_detuning_on_excited_diagonal(self):
        h = build_tripod(5.0, -5.0, gaussian())
        assert h.evaluate(0.0)[3, 3] == pytest.approx(-5.0)

    def test_matches_three_plus_one_ladder_entrywise(self):
        p = gaussian(7.0)
        tripod = build_tripod(2.5, -1.0, p)
        ladder = build_ladder(3, 1, 2.5, 0.0, -1.0, p)
        for t in (0.0, 3.3, 5.0, 8.1):
            assert np.array_equal(tripod.evaluate(t), ladder.evaluate(t))


class TestLadder:
    def test_five_five_symmetric_system(self):
        h = build_ladder(5, 5, 5.0, 5.0, 0.0, gaussian(10.0))
        m = h.evaluate(5.0)
        assert np.allclose(np.diag(m), [-10, -5, 0, 5, 10, -10, -5, 0, 5, 10])
        assert np.all(m[:5, 5:] == -5.0)
        assert np.all(m[:5, :5] == np.diag(np.diag(m)[:5]))  # no ground-ground coupling
        assert np.all(m[5:, 5:] == np.diag(np.diag(m)[5:]))

    def test_detuning_sign_selects_resonant_extreme_level(self):
        # with excited energies delta_prime*M' + detuning, detuning = +2*delta_prime
        # puts M' = -2 at zero energy (resonant with ground M = 0), while
        # detuning = -2*delta_prime puts M' = +2 there instead
        up = build_ladder(5, 5, 5.0, 5.0, +10.0, gaussian())
        down = build_ladder(5, 5, 5.0, 5.0, -10.0, gaussian())
        assert up.diagonal()[5] == pytest.approx(0.0)  # M' = -2
        assert down.diagonal()[9] == pytest.approx(0.0)  # M' = +2

    def test_different_excited_splitting(self):
        h = build_ladder(5, 5, 5.0, 4.0, 0.0, gaussian())
        assert np.allclose(h.diagonal()[5:], [-8, -4, 0, 4, 8])

    def test_even_sizes_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            build_ladder(4, 4, 1.0, 1.0, 0.0, gaussian())

    def test_weights_scale_individual_couplings(self):
        w = np.array([[1.0, 0.0, 0.5], [0.5, 1.0, 0.0], [0.0, 2.0, 1.0]])
        h = build_ladder(3, 3, 1.0, 1.0, 0.0, PulseSpec.gaussian(2.0), w)
        m = h.evaluate(5.0)  # chi = 1 at the peak
        assert np.array_equal(m[:3, 3:], -w)

    def test_zero_weight_disables_transition(self):
        from arosim.hamiltonian import RwaHamiltonian
        from arosim.model import LevelScheme

        w = np.array([[1.0], [0.0], [1.0]])
        h = RwaHamiltonian(LevelScheme.tripod(1.0, coupling_weights=w), PulseSpec.gaussian(2.0))
        m = h.evaluate(5.0)
        assert m[0, 3] == -1.0
        assert m[1, 3] == 0.0
        assert m[2, 3] == -1.0


class TestEvaluate:
    def test_far_before_pulse_is_bare(self):
        h = build_tripod(5.0, 0.0, gaussian(18.0))
        assert np.array_equal(evaluate(h, -100.0), np.diag([-5.0, 0.0, 5.0, 0.0]))

    @settings(max_examples=50, deadline=None)
    @given(
        st.sampled_from([(3, 1), (3, 3), (5, 5), (5, 1), (7, 3)]),
        st.floats(0.0, 20.0),
        st.floats(-10.0, 10.0),
        st.floats(0.0, 12.0),
    )
    def test_hermiticity_exact(self, sizes, delta, detuning, t):
        ng, ne = sizes
        h = build_ladder(ng, ne, delta, 0.7 * delta, detuning, gaussian(11.0))
        m = h.evaluate(t)
        assert np.array_equal(m, m.T.conj())

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 20.0), st.floats(-10.0, 10.0), st.floats(0.0, 12.0))
    def test_trace_is_time_independent(self, delta, detuning, t):
        h = build_ladder(5, 3, delta, 0.5 * delta, detuning, gaussian(30.0))
        expected = np.sum(h.diagonal())
        assert np.trace(h.evaluate(t)) == pytest.approx(expected, abs=1e-10)

    def test_symmetric_manifold_spectrum_is_symmetric_about_zero(self):
        # centered M, detuning 0, equal splittings: eigenvalues come in +/- pairs
        for ng, ne, t in [(3, 1, 4.0), (5, 5, 5.0), (5, 5, 6.7)]:
            h = build_ladder(ng, ne, 5.0, 5.0 if ne > 1 else 0.0, 0.0, gaussian(18.0))
            w = np.linalg.eigvalsh(h.evaluate(t))
            assert np.allclose(w, -w[::-1], atol=1e-12)

    def test_evaluate_many_matches_pointwise(self):
        h = build_ladder(5, 5, 5.0, 4.0, 2.0, gaussian(10.0))
        times = np.linspace(0.0, 10.0, 7)
        stack = h.evaluate_many(times)
        for k, t in enumerate(times):
            assert np.array_equal(stack[k], h.evaluate(t))

    def test_spectral_bound_dominates_eigenvalues(self):
        h = build_ladder(5, 5, 5.0, 5.0, 10.0, gaussian(37.0))
        bound = h.spectral_bound()
        for t in np.linspace(0.0, 10.0, 21):
            assert np.abs(np.linalg.eigvalsh(h.evaluate(t))).max() <= bound + 1e-12
