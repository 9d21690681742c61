import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from oracles import path_sum, path_sum_distribution
from qwalk import (
    COIN_PULSE,
    INIT_PULSE,
    CoinOperator,
    Direction,
    PulseSpec,
    ShiftConvention,
    WalkPlan,
    WindowError,
    apply_coin,
    apply_shift,
    hadamard_coin,
    identity_coin,
    inverse_coin,
    new_localized,
    position_distribution,
    rotation_from_pulse,
    run_walk,
    spin_vector,
    time_reverse,
    to_density,
)
from qwalk.operators import FIXED_SHIFT, SIGMA_X, SIGMA_Y

S = 1 / np.sqrt(2)
KET0 = np.array([1, 0])
KET1 = np.array([0, 1])
CONVENTIONS = [FIXED_SHIFT, ShiftConvention(alternate_roles=True)]


def equal_up_to_phase(a, b, tol=1e-12):
    a, b = np.asarray(a).ravel(), np.asarray(b).ravel()
    i = np.argmax(np.abs(b))
    phase = a[i] / b[i]
    return abs(abs(phase) - 1) < tol and np.max(np.abs(a - phase * b)) < tol


class TestPulses:
    def test_initialization_pulse(self):
        u = rotation_from_pulse(INIT_PULSE)
        np.testing.assert_allclose(u(KET0), [S, 1j * S], atol=1e-15)

    def test_zero_area_is_identity(self):
        for phase in (0.0, 1.3, 5.0):
            np.testing.assert_allclose(rotation_from_pulse(PulseSpec(0.0, phase)).matrix, np.eye(2))

    def test_coin_pulse_is_minus_hadamard_type_coin(self):
        u = rotation_from_pulse(COIN_PULSE).matrix
        np.testing.assert_allclose(u, -hadamard_coin().matrix, atol=1e-15)

    @given(st.floats(0, 4 * np.pi), st.floats(-10, 10))
    @settings(max_examples=50, deadline=None)
    def test_matches_matrix_exponential(self, area, phase):
        gen = np.cos(phase) * SIGMA_X + np.sin(phase) * SIGMA_Y
        ref = expm(-0.5j * area * gen)
        u = rotation_from_pulse(PulseSpec(area, phase)).matrix
        np.testing.assert_allclose(u, ref, atol=1e-12)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)

    def test_phase_is_wrapped_and_area_checked(self):
        assert PulseSpec(1.0, 2 * np.pi + 0.5).phase == pytest.approx(0.5)
        with pytest.raises(ValueError):
            PulseSpec(-1.0)


class TestCoins:
    def test_hadamard_on_zero(self):
        np.testing.assert_allclose(hadamard_coin()(KET0), [S, -S])

    def test_hadamard_on_one(self):
        np.testing.assert_allclose(hadamard_coin()(KET1), [S, S])

    def test_coin_squared(self):
        c = hadamard_coin()
        np.testing.assert_allclose(c(c(KET0)), [0, -1], atol=1e-15)

    def test_inverse_on_zero(self):
        np.testing.assert_allclose(inverse_coin()(KET0), [S, S])

    def test_inverse_on_one_matches_up_to_sign(self):
        # The exact inverse sends |1> to -(|0> - |1>)/sqrt2.
        assert equal_up_to_phase(inverse_coin()(KET1), [S, -S])

    def test_inverse_times_coin_is_identity(self):
        np.testing.assert_allclose((inverse_coin() @ hadamard_coin()).matrix, np.eye(2), atol=1e-12)

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError, match="unitary"):
            CoinOperator([[1, 1], [0, 1]])


class TestApplyCoin:
    def test_acts_on_spin_only(self):
        psi = apply_coin(new_localized(0, KET0), hadamard_coin())
        assert psi.amplitude(0, 0) == pytest.approx(S)
        assert psi.amplitude(0, 1) == pytest.approx(-S)
        assert position_distribution(psi)[0] == pytest.approx(1.0)

    def test_identity(self, symmetric_origin):
        out = apply_coin(symmetric_origin, identity_coin())
        np.testing.assert_array_equal(out.amplitudes, symmetric_origin.amplitudes)

    def test_coin_then_inverse(self, symmetric_origin):
        back = apply_coin(apply_coin(symmetric_origin, hadamard_coin()), inverse_coin())
        np.testing.assert_allclose(back.amplitudes, symmetric_origin.amplitudes, atol=1e-12)

    def test_density_matches_pure(self, symmetric_origin):
        pure = to_density(apply_coin(symmetric_origin, hadamard_coin()))
        mixed = apply_coin(to_density(symmetric_origin), hadamard_coin())
        np.testing.assert_allclose(mixed.matrix, pure.matrix, atol=1e-12)


class TestApplyShift:
    def test_zero_moves_right(self):
        psi = apply_shift(new_localized(0, KET0), 1, FIXED_SHIFT)
        assert psi.amplitude(1, 0) == 1

    def test_inverse_shift(self, symmetric_origin):
        c = ShiftConvention()
        for k in (1, 2):
            there = apply_shift(symmetric_origin, k, c)
            back = apply_shift(there, k, c, inverted=True)
            np.testing.assert_array_equal(back.amplitudes, symmetric_origin.amplitudes)

    def test_coin_superposition_splits(self):
        psi = apply_coin(new_localized(0, KET0), hadamard_coin())
        psi = apply_shift(psi, 1, FIXED_SHIFT)
        assert psi.amplitude(1, 0) == pytest.approx(S)
        assert psi.amplitude(-1, 1) == pytest.approx(-S)

    def test_role_exchange_on_even_steps(self):
        c = ShiftConvention(alternate_roles=True)
        assert apply_shift(new_localized(0, KET0), 2, c).amplitude(-1, 0) == 1
        assert apply_shift(new_localized(0, KET0), 3, c).amplitude(1, 0) == 1

    def test_first_direction_left(self):
        c = ShiftConvention(alternate_roles=False, first_step_direction=Direction.ZERO_LEFT)
        assert apply_shift(new_localized(0, KET0), 1, c).amplitude(-1, 0) == 1

    def test_overflow_is_an_error(self):
        psi = new_localized(0, KET0, halfwidth=0)
        with pytest.raises(WindowError):
            apply_shift(psi, 1, FIXED_SHIFT)

    def test_density_shift_matches_pure(self, symmetric_origin):
        c = ShiftConvention()
        psi = apply_coin(symmetric_origin, hadamard_coin())
        pure = to_density(apply_shift(psi, 2, c))
        mixed = apply_shift(to_density(psi), 2, c)
        np.testing.assert_array_equal(mixed.matrix, pure.matrix)


class TestRunWalk:
    def test_one_step(self):
        p = position_distribution(run_walk(WalkPlan(1, new_localized(0, KET0), shift=FIXED_SHIFT)))
        assert p[1] == pytest.approx(0.5) and p[-1] == pytest.approx(0.5)

    def test_two_steps(self):
        p = position_distribution(run_walk(WalkPlan(2, new_localized(0, KET0), shift=FIXED_SHIFT)))
        np.testing.assert_allclose([p[-2], p[0], p[2]], [0.25, 0.5, 0.25], atol=1e-12)

    @pytest.mark.parametrize("shift", CONVENTIONS, ids=["fixed", "alternating"])
    def test_six_step_symmetric(self, symmetric_origin, shift):
        p = position_distribution(run_walk(WalkPlan(6, symmetric_origin, shift=shift)))
        np.testing.assert_allclose(p.probabilities, p.probabilities[::-1], atol=1e-12)
        # double peak: the outer-but-one sites dominate
        assert p[4] == pytest.approx(max(p.probabilities), abs=1e-12)
        assert p[4] == pytest.approx(9 / 32, abs=1e-12)

    def test_window_sized_for_steps(self, symmetric_origin):
        psi = run_walk(WalkPlan(5, symmetric_origin))
        assert (psi.site_min, psi.site_max) == (-6, 6)

    @pytest.mark.parametrize("n", range(1, 9))
    @pytest.mark.parametrize("name", ["zero", "one", "symmetric", "antisymmetric"])
    @pytest.mark.parametrize("alternate", [False, True])
    def test_amplitudes_match_path_sum(self, n, name, alternate):
        spin = spin_vector(name)
        plan = WalkPlan(n, new_localized(0, spin), shift=ShiftConvention(alternate_roles=alternate))
        psi = run_walk(plan)
        ref = path_sum(n, spin, hadamard_coin().matrix, alternate)
        for x in psi.sites:
            for s in (0, 1):
                assert abs(psi.amplitude(int(x), s) - ref.get((int(x), s), 0)) < 1e-10

    def test_time_dependent_coin_schedule(self):
        coins = [hadamard_coin(), rotation_from_pulse(PulseSpec(np.pi / 3, 0.4)), hadamard_coin()]
        plan = WalkPlan(3, new_localized(0, KET0), coin=coins, shift=FIXED_SHIFT)
        psi = run_walk(plan)
        # oracle with per-step coins
        ref = {}
        import itertools

        for path in itertools.product((0, 1), repeat=3):
            amp, prev, x = 1.0 + 0j, 0, 0
            for c, s in zip(coins, path):
                amp *= c.matrix[s, prev]
                x += 1 if s == 0 else -1
                prev = s
            ref[(x, path[-1])] = ref.get((x, path[-1]), 0) + amp
        for (x, s), a in ref.items():
            assert psi.amplitude(x, s) == pytest.approx(a, abs=1e-12)

    def test_schedule_length_checked(self):
        with pytest.raises(ValueError):
            WalkPlan(3, new_localized(0, KET0), coin=[hadamard_coin()])

    def test_steps_must_be_positive(self):
        with pytest.raises(ValueError, match="steps must be >= 1"):
            WalkPlan(0, new_localized(0, KET0))


class TestWalkProperties:
    @given(st.integers(1, 14), st.sampled_from(["zero", "one", "symmetric", "antisymmetric"]), st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_norm_and_parity(self, n, name, alternate):
        psi = run_walk(WalkPlan(n, new_localized(0, spin_vector(name)),
                                shift=ShiftConvention(alternate_roles=alternate)))
        assert psi.norm() == pytest.approx(1.0, abs=1e-12)
        p = position_distribution(psi)
        for x, q in zip(p.sites, p.probabilities):
            if (x - n) % 2 or abs(x) > n:
                assert q == 0.0

    @given(st.integers(1, 16), st.booleans())
    @settings(max_examples=30, deadline=None)
    def test_mirror_pairing(self, n, alternate):
        shift = ShiftConvention(alternate_roles=alternate)
        p0 = position_distribution(run_walk(WalkPlan(n, new_localized(0, KET0), shift=shift)))
        p1 = position_distribution(run_walk(WalkPlan(n, new_localized(0, KET1), shift=shift)))
        np.testing.assert_allclose(p0.probabilities, p1.mirrored().probabilities, atol=1e-12)

    @given(st.integers(1, 20), st.booleans())
    @settings(max_examples=30, deadline=None)
    def test_symmetric_input_gives_symmetric_distribution(self, n, alternate):
        p = position_distribution(run_walk(WalkPlan(n, new_localized(0, spin_vector("symmetric")),
                                                    shift=ShiftConvention(alternate_roles=alternate))))
        np.testing.assert_allclose(p.probabilities, p.probabilities[::-1], atol=1e-12)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_role_exchange_mirrors_asymmetric_walks(self, n):
        # Characterized against the path-sum oracle: exchanging the shift roles
        # on even steps turns the |0>-start distribution into the fixed-shift
        # |1>-start one, i.e. its mirror image.
        alt = path_sum_distribution(n, KET0, hadamard_coin().matrix, alternate=True)
        fixed = path_sum_distribution(n, KET0, hadamard_coin().matrix, alternate=False)
        mirrored = {-x: q for x, q in fixed.items()}
        for x in set(alt) | set(mirrored):
            if n == 1:
                assert alt.get(x, 0) == pytest.approx(fixed.get(x, 0), abs=1e-12)
            else:
                assert alt.get(x, 0) == pytest.approx(mirrored.get(x, 0), abs=1e-12)


class TestTimeReverse:
    @pytest.mark.parametrize("shift", CONVENTIONS, ids=["fixed", "alternating"])
    def test_refocuses_six_steps(self, symmetric_origin, shift):
        plan = WalkPlan(6, symmetric_origin, shift=shift)
        back = time_reverse(run_walk(plan), plan)
        assert position_distribution(back)[0] == pytest.approx(1.0, abs=1e-10)
        assert back.fidelity(symmetric_origin) == pytest.approx(1.0, abs=1e-10)

    def test_zero_steps_is_identity(self, symmetric_origin):
        plan = WalkPlan(6, symmetric_origin)
        assert time_reverse(symmetric_origin, plan, steps=0) is symmetric_origin

    def test_partial_reversal(self, symmetric_origin):
        plan6 = WalkPlan(6, symmetric_origin)
        plan4 = WalkPlan(4, symmetric_origin)
        ref = run_walk(plan4)
        got = time_reverse(run_walk(plan6), plan6, steps=2)
        assert got.fidelity(ref) == pytest.approx(1.0, abs=1e-10)

    @given(st.integers(1, 10), st.integers(0, 2**32 - 1), st.booleans())
    @settings(max_examples=30, deadline=None)
    def test_reversal_identity_random_spin(self, n, seed, alternate):
        g = np.random.default_rng(seed)
        v = g.normal(size=2) + 1j * g.normal(size=2)
        psi0 = new_localized(0, v / np.linalg.norm(v))
        plan = WalkPlan(n, psi0, shift=ShiftConvention(alternate_roles=alternate))
        assert time_reverse(run_walk(plan), plan).fidelity(psi0) == pytest.approx(1.0, abs=1e-10)

    def test_density_reversal(self, symmetric_origin):
        plan = WalkPlan(6, to_density(symmetric_origin))
        back = time_reverse(run_walk(plan), plan)
        assert position_distribution(back)[0] == pytest.approx(1.0, abs=1e-10)
