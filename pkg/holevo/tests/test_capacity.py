import math

import numpy as np
from django.test import SimpleTestCase

from holevo.quantum.capacity import (
    CostConstraint,
    OptimizerOptions,
    accessible_information,
    beta_from_noise,
    blahut_arimoto,
    c_tilde,
    constrained_capacity,
    maximize_holevo,
    mirror_ascent,
    photon_capacity,
    tilted_prior,
)
from holevo.quantum.channel import CQChannel, Prior, holevo_quantity, mutual_information, transition_probabilities
from holevo.quantum.errors import InfeasibleInputError, InvalidStateError
from holevo.quantum.exponents import mu

from .utils import binary_symmetric, orthogonal_pair, overlap_pair, random_pure_channel, random_quasiclassical

C_BAR = 0.8112781244591328
C_TILDE = 0.6780719051126377
C_ONE = 0.645392
BSC_CAPACITY = 0.531004

FAST = OptimizerOptions(restarts=2, rounds=5)


class MirrorAscentTests(SimpleTestCase):
    def test_entropy_is_maximized_at_uniform(self):
        def entropy(p):
            logs = np.log(np.maximum(p, 1e-300))
            return -float(p @ logs), -logs - 1.0

        result = mirror_ascent(entropy, np.array([0.7, 0.2, 0.1]), OptimizerOptions(tol=1e-10))
        assert result.converged
        assert np.allclose(result.probabilities, 1 / 3, atol=1e-4)
        assert math.isclose(result.value, math.log(3), abs_tol=1e-9)

    def test_budget_exhaustion_is_reported(self):
        def entropy(p):
            logs = np.log(np.maximum(p, 1e-300))
            return -float(p @ logs), -logs - 1.0

        result = mirror_ascent(entropy, np.array([0.98, 0.01, 0.01]), OptimizerOptions(tol=1e-12, max_iter=1))
        assert result.iterations == 1
        assert not result.converged


class HolevoCapacityTests(SimpleTestCase):
    def test_reference_channels(self):
        assert math.isclose(maximize_holevo(orthogonal_pair()).value, 1.0, abs_tol=1e-9)
        result = maximize_holevo(overlap_pair())
        assert math.isclose(result.value, C_BAR, abs_tol=1e-6)
        assert np.allclose(result.optimizer_prior.probabilities, 0.5, atol=1e-4)
        assert math.isclose(maximize_holevo(binary_symmetric(0.1)).value, BSC_CAPACITY, abs_tol=1e-6)

    def test_single_letter(self):
        ch = CQChannel.from_pure_states([[1.0, 0.0]])
        result = maximize_holevo(ch)
        assert result.value == 0.0
        assert result.optimizer_prior.probabilities.tolist() == [1.0]

    def test_matches_blahut_arimoto_on_commuting_channels(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            ch = random_quasiclassical(rng, 3, 4)
            transition = np.real(np.stack([np.diag(s.matrix) for s in ch.states]))
            classical, _prior = blahut_arimoto(transition)
            result = maximize_holevo(ch)
            assert result.converged
            assert abs(result.value - classical) < 1e-6

    def test_optimizer_prior_certificate(self):
        rng = np.random.default_rng(23)
        ch = random_quasiclassical(rng, 2, 3)
        result = maximize_holevo(ch)
        assert result.details["optimality_gap"] <= 1e-7
        assert math.isclose(holevo_quantity(ch, result.optimizer_prior), result.value, abs_tol=1e-12)


class QuadraticCapacityTests(SimpleTestCase):
    def test_overlap_pair(self):
        result = c_tilde(overlap_pair())
        assert math.isclose(result.value, C_TILDE, abs_tol=1e-6)

    def test_grid_oracle(self):
        grid = np.linspace(0.0, 1.0, 10_001)
        purity = grid**2 + (1 - grid) ** 2 + 2 * grid * (1 - grid) * 0.25
        assert math.isclose(c_tilde(overlap_pair()).value, -math.log2(purity.min()), abs_tol=1e-6)

    def test_maximizes_mu_at_one(self):
        rng = np.random.default_rng(41)
        ch = random_pure_channel(rng, 2, 3)
        result = c_tilde(ch)
        assert math.isclose(mu(ch, result.optimizer_prior, 1.0), result.value, abs_tol=1e-9)
        steps = 200
        best = -math.inf
        for i in range(steps + 1):
            for j in range(steps + 1 - i):
                weights = np.array([i, j, steps - i - j], dtype=float) / steps
                best = max(best, mu(ch, Prior(weights), 1.0))
        assert result.value >= best - 1e-6
        assert result.value - best < 1e-3

    def test_commuting_channel_has_c_tilde_below_c_bar(self):
        ch = binary_symmetric(0.1)
        assert c_tilde(ch).value <= maximize_holevo(ch).value + 1e-9


class AccessibleInformationTests(SimpleTestCase):
    def test_capacity_chain(self):
        ch = overlap_pair()
        c_one = accessible_information(ch, FAST)
        c_tilde_value = c_tilde(ch).value
        c_bar = maximize_holevo(ch).value
        assert abs(c_one.value - C_ONE) < 1e-4
        assert c_one.value < c_tilde_value - 1e-3
        assert c_tilde_value < c_bar - 1e-3

    def test_value_is_attained_by_the_returned_measurement(self):
        ch = overlap_pair()
        result = accessible_information(ch, FAST)
        povm = result.details["povm"]
        assert len(povm) == result.details["outcomes"] == 4
        recomputed = mutual_information(result.optimizer_prior, transition_probabilities(ch, povm))
        assert math.isclose(recomputed, result.value, abs_tol=1e-12)

    def test_orthogonal_states_are_fully_accessible(self):
        assert math.isclose(accessible_information(orthogonal_pair(), FAST).value, 1.0, abs_tol=1e-6)

    def test_commuting_letters_reach_the_holevo_capacity(self):
        assert abs(accessible_information(binary_symmetric(0.1), FAST).value - BSC_CAPACITY) < 1e-6
        rng = np.random.default_rng(43)
        for _ in range(5):
            ch = random_quasiclassical(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
            assert abs(accessible_information(ch, FAST).value - maximize_holevo(ch).value) < 1e-5

    def test_convergence_is_reported_honestly(self):
        unfitted = accessible_information(overlap_pair(), OptimizerOptions(restarts=1, rounds=0))
        assert not unfitted.converged
        assert unfitted.gradient_norm == math.inf
        fitted = accessible_information(overlap_pair(), FAST)
        assert math.isfinite(fitted.gradient_norm)

    def test_blahut_arimoto_on_binary_symmetric_channel(self):
        value, prior = blahut_arimoto(np.array([[0.9, 0.1], [0.1, 0.9]]))
        assert math.isclose(value, BSC_CAPACITY, abs_tol=1e-6)
        assert np.allclose(prior.probabilities, 0.5)


class ConstrainedCapacityTests(SimpleTestCase):
    def test_inactive_budget(self):
        ch = overlap_pair()
        result = constrained_capacity(ch, CostConstraint([0.0, 1.0], 0.8))
        assert abs(result.value - maximize_holevo(ch).value) < 1e-7
        assert result.details["multiplier"] == 0.0
        assert not result.details["active"]

    def test_active_budget_matches_grid_search(self):
        ch = overlap_pair()
        constraint = CostConstraint([0.0, 1.0], 0.3)
        result = constrained_capacity(ch, constraint)
        grid = np.linspace(0.0, 0.3, 3001)
        oracle = max(holevo_quantity(ch, Prior([1 - q, q])) for q in grid)
        assert abs(result.value - oracle) < 1e-5
        assert constraint.mean_cost(result.optimizer_prior) <= 0.3 + 1e-9
        assert result.details["active"]

    def test_nondecreasing_in_the_budget(self):
        rng = np.random.default_rng(47)
        cases = [(overlap_pair(), [0.0, 1.0]), (random_pure_channel(rng, 2, 3), [0.0, 0.5, 1.0])]
        for ch, costs in cases:
            budgets = np.linspace(0.0, 1.0, 11)
            values = [constrained_capacity(ch, CostConstraint(costs, budget)).value for budget in budgets]
            assert all(b >= a - 1e-6 for a, b in zip(values, values[1:], strict=False))

    def test_budget_at_the_cheapest_cost(self):
        result = constrained_capacity(overlap_pair(), CostConstraint([0.0, 1.0], 0.0))
        assert result.value < 1e-12
        assert result.details["multiplier"] == float("inf")

    def test_infeasible_budget(self):
        with self.assertRaises(InfeasibleInputError):
            constrained_capacity(overlap_pair(), CostConstraint([0.5, 1.0], 0.1))

    def test_tilted_prior(self):
        constraint = CostConstraint([0.0, 1.0, 2.0], 0.5)
        uniform = Prior.uniform(3)
        tilted = tilted_prior(uniform, constraint)
        assert abs(constraint.mean_cost(tilted) - 0.5) < 1e-9
        assert tilted.probabilities[0] > tilted.probabilities[1] > tilted.probabilities[2]
        assert tilted_prior(uniform, CostConstraint([0.0, 1.0, 2.0], 5.0)) is uniform
        assert np.allclose(tilted_prior(uniform, constraint, multiplier=0.0).probabilities, 1 / 3)


class PhotonChannelTests(SimpleTestCase):
    def test_closed_form(self):
        assert math.isclose(photon_capacity(0.0, 1.0, 1.0), 2.565100, abs_tol=1e-6)
        assert photon_capacity(1.0, 0.0) == 0.0
        assert photon_capacity(1.0, 2.0) < photon_capacity(0.0, 2.0)

    def test_beta_from_noise(self):
        assert beta_from_noise(0.0) == float("inf")
        beta = beta_from_noise(0.4, hbar=2.0)
        assert math.isclose(2.0 * math.pi**2 / (6 * beta**2), 0.4)

    def test_rejects_negative_inputs(self):
        with self.assertRaises(InvalidStateError):
            photon_capacity(-1.0, 1.0)
        with self.assertRaises(InvalidStateError):
            photon_capacity(0.0, 1.0, hbar=0.0)
