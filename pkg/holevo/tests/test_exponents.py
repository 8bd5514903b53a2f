import math

import numpy as np
from django.test import SimpleTestCase

from holevo.quantum.channel import Prior, ensemble_average
from holevo.quantum.errors import DegenerateInputError, InvalidStateError
from holevo.quantum.exponents import (
    EXPURGATED,
    RANDOM,
    ExponentOptions,
    coarse_bound_expectation,
    expected_tight_bound,
    exponent_curve,
    expurgated_exponent,
    f_of_z,
    gallager_quasiclassical_bound,
    mu,
    mu_tilde,
    random_coding_exponent,
    theorem1_bound,
    theorem1_bound_values,
    typical_coding_estimate,
)
from holevo.quantum.operators import von_neumann_entropy

from .utils import binary_symmetric, orthogonal_pair, overlap_pair, random_mixed_channel, random_pure_channel

MU_ONE = 0.6780719051126377  # -log2(0.625)
C_BAR = 0.8112781244591328
S_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


class MuTests(SimpleTestCase):
    def test_mu_at_zero_and_one(self):
        ch = overlap_pair()
        uniform = Prior.uniform(2)
        assert mu(ch, uniform, 0.0) == 0.0
        assert math.isclose(mu(ch, uniform, 1.0), MU_ONE, abs_tol=1e-12)

    def test_mu_tilde_meets_mu_at_one(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            letters = int(rng.integers(2, 5))
            ch = random_pure_channel(rng, int(rng.integers(2, 5)), letters)
            prior = Prior(rng.dirichlet(np.ones(letters)))
            assert abs(mu_tilde(ch, prior, 1.0) - mu(ch, prior, 1.0)) < 1e-12

    def test_slope_at_zero_is_the_entropy(self):
        rng = np.random.default_rng(16)
        for ch in (overlap_pair(), random_mixed_channel(rng, 3, 3)):
            prior = Prior(rng.dirichlet(np.ones(ch.alphabet_size)))
            h = 1e-6
            slope = (mu(ch, prior, h) - mu(ch, prior, 0.0)) / h
            assert abs(slope - von_neumann_entropy(ensemble_average(ch, prior))) < 1e-4

    def test_nondecreasing_and_concave_in_s(self):
        rng = np.random.default_rng(18)
        s = np.linspace(0.0, 3.0, 61)
        for ch in (overlap_pair(), random_mixed_channel(rng, 3, 3), random_pure_channel(rng, 3, 4)):
            prior = Prior(rng.dirichlet(np.ones(ch.alphabet_size)))
            values = np.array([mu(ch, prior, x) for x in s])
            assert np.all(np.diff(values) >= -1e-12)
            assert np.all(np.diff(values, 2) <= 1e-10)

    def test_domain(self):
        with self.assertRaises(InvalidStateError):
            mu_tilde(overlap_pair(), Prior.uniform(2), 0.0)
        with self.assertRaises(InvalidStateError):
            mu(overlap_pair(), Prior.uniform(2), -0.1)
        with self.assertRaises(DegenerateInputError):
            mu_tilde(random_mixed_channel(np.random.default_rng(0), 2, 2), Prior.uniform(2), 1.0)


class ExponentTests(SimpleTestCase):
    def test_random_coding_below_critical_rate(self):
        point = random_coding_exponent(overlap_pair(), 0.5)
        assert math.isclose(point.value, MU_ONE - 0.5, abs_tol=1e-6)
        assert math.isclose(point.s_opt, 1.0, abs_tol=1e-6)
        assert np.allclose(point.prior.probabilities, 0.5, atol=1e-4)

    def test_random_coding_is_positive_below_capacity(self):
        ch = overlap_pair()
        for rate in np.linspace(0.0, C_BAR - 1e-3, 9):
            assert random_coding_exponent(ch, float(rate)).value > 0
        # second-order behaviour near capacity: (C - R)^2 / (2 ln2 Var[-log2 lambda])
        near = random_coding_exponent(ch, C_BAR - 2e-3)
        assert 5.6e-6 < near.value < 6.6e-6
        assert 0 < near.s_opt < 0.02

    def test_random_coding_vanishes_above_capacity(self):
        point = random_coding_exponent(overlap_pair(), 0.9)
        assert point.value == 0.0
        assert point.s_opt == 0.0

    def test_expurgated_at_the_same_rate(self):
        point = expurgated_exponent(overlap_pair(), 0.5)
        assert math.isclose(point.value, MU_ONE - 0.5, abs_tol=1e-6)
        assert math.isclose(point.s_opt, 1.0, abs_tol=1e-6)
        assert not point.saturated

    def test_expurgated_saturates_for_orthogonal_states(self):
        options = ExponentOptions(s_max=100.0, grid_step=0.01)
        point = expurgated_exponent(orthogonal_pair(), 0.0, options)
        assert point.saturated
        assert math.isclose(point.value, 100.0, abs_tol=1e-6)

    def test_expurgated_needs_pure_letters(self):
        with self.assertRaises(DegenerateInputError):
            expurgated_exponent(random_mixed_channel(np.random.default_rng(2), 2, 2), 0.1)

    def test_negative_rate(self):
        with self.assertRaises(InvalidStateError):
            random_coding_exponent(overlap_pair(), -0.1)

    def test_unknown_kind(self):
        with self.assertRaises(InvalidStateError):
            exponent_curve(overlap_pair(), [0.1], "sphere-packing")

    def test_curves_are_nonincreasing(self):
        rates = np.linspace(0.0, 0.8, 5)
        for kind in (RANDOM, EXPURGATED):
            curve = exponent_curve(overlap_pair(), rates, kind, ExponentOptions(s_max=10.0, grid_step=0.01))
            assert curve.kind == kind
            assert np.allclose(curve.rates, rates)
            assert np.all(np.diff(curve.values) <= 1e-9)
            frame = curve.to_frame()
            assert list(frame.columns) == ["rate", "exponent", "s_opt", "saturated", "prior_0", "prior_1"]
            assert len(frame) == 5


class BlockErrorBoundTests(SimpleTestCase):
    def test_reference_values(self):
        ch = overlap_pair()
        uniform = Prior.uniform(2)
        assert math.isclose(theorem1_bound(ch, uniform, 2, 1), 1.25, abs_tol=1e-12)
        assert math.isclose(theorem1_bound(ch, uniform, 2, 10), 2 * 0.625**10, abs_tol=1e-12)
        assert math.isclose(theorem1_bound(ch, uniform, 2, 10), 0.018190, abs_tol=1e-6)
        assert theorem1_bound(ch, uniform, 5, 3, s=0.0) == 2.0

    def test_s_outside_unit_interval(self):
        with self.assertRaises(InvalidStateError):
            theorem1_bound(overlap_pair(), Prior.uniform(2), 2, 1, s=1.5)

    def test_pure_channels_give_twice_the_gallager_value(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            ch = random_pure_channel(rng, 3, 3)
            prior = Prior(rng.dirichlet(np.ones(3)))
            values = theorem1_bound_values(ch, prior, 4, 3, S_GRID)
            for s, value in zip(S_GRID, values, strict=True):
                gallager = gallager_quasiclassical_bound(ch, prior, 4, 3, s)
                assert abs(value - 2 * gallager.value) < 1e-10

    def test_gallager_matches_the_classical_expression(self):
        ch = binary_symmetric(0.1)
        transition = np.array([[0.9, 0.1], [0.1, 0.9]])
        prior = np.array([0.5, 0.5])
        for s in S_GRID:
            inner = (prior @ transition ** (1 / (1 + s))) ** (1 + s)
            classical = (3.0**s if s > 0 else 1.0) * inner.sum() ** 2
            bound = gallager_quasiclassical_bound(ch, Prior(prior), 4, 2, s)
            assert bound.quasiclassical
            assert abs(bound.value - classical) < 1e-10
        assert not gallager_quasiclassical_bound(overlap_pair(), Prior.uniform(2), 2, 1, 0.5).quasiclassical

    def test_f_of_z(self):
        assert math.isclose(f_of_z(1.0, 2), 2 - math.sqrt(2), abs_tol=1e-12)
        assert math.isclose(f_of_z(1.0, 2), 0.585786, abs_tol=1e-6)
        z = np.linspace(0.0, 1.0, 101)
        for M in (2, 3, 8):
            values = f_of_z(z, M)
            assert np.all(values >= -1e-15)
            middle = z * np.minimum((M - 1) * z, 2.0)
            assert np.all(values <= middle + 1e-12)
            for s in S_GRID:
                assert np.all(values <= 2 * (M - 1) ** s * z ** (1 + s) + 1e-12)
        with self.assertRaises(InvalidStateError):
            f_of_z(1.5, 2)

    def test_closed_form_against_the_block_error_bound(self):
        ch = overlap_pair()
        uniform = Prior.uniform(2)
        value = expected_tight_bound(ch, uniform, 1, 2)
        by_hand = (2 - math.sqrt(1.75) - 0.5) + (2 - math.sqrt(1.25) - math.sqrt(0.75))
        assert math.isclose(value, by_hand, abs_tol=1e-12)
        for n, M in ((2, 3), (3, 4), (4, 4)):
            closed = expected_tight_bound(ch, uniform, n, M)
            assert np.all(closed <= theorem1_bound_values(ch, uniform, M, n, S_GRID) + 1e-12)

    def test_coarse_expectation(self):
        assert math.isclose(coarse_bound_expectation(overlap_pair(), Prior.uniform(2), 2, 3), 2 * 0.625**2)

    def test_typical_coding_estimate(self):
        ch = overlap_pair()
        uniform = Prior.uniform(2)
        estimate = typical_coding_estimate(ch, uniform, 4, 2, 0.2)
        leakage = 1 - 4 * 0.75**3 * 0.25
        entropy = von_neumann_entropy(ensemble_average(ch, uniform))
        assert math.isclose(estimate.leakage, leakage, abs_tol=1e-12)
        assert math.isclose(estimate.value, leakage + 2 ** (-4 * (entropy - 0.2)), abs_tol=1e-12)
        assert estimate.conditional_leakage is None
        mixed = typical_coding_estimate(random_mixed_channel(np.random.default_rng(5), 2, 2), uniform, 3, 2, 0.3)
        assert mixed.conditional_leakage is not None
        assert mixed.value >= 4 * mixed.leakage
