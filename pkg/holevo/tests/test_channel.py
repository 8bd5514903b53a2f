import math

import numpy as np
from django.test import SimpleTestCase

from holevo.quantum.channel import (
    POVM,
    CQChannel,
    Prior,
    Word,
    all_words,
    average_state_power,
    ensemble_average,
    holevo_quantity,
    mutual_information,
    product_channel,
    product_prior,
    quasiclassical_channel,
    quasiclassical_povm,
    transition_probabilities,
    word_state,
    word_vector,
)
from holevo.quantum.errors import DegenerateInputError, InvalidStateError, ShapeMismatchError
from holevo.quantum.operators import pinv_sqrt_matrix

from .utils import (
    binary_symmetric,
    orthogonal_pair,
    overlap_pair,
    random_mixed_channel,
    random_pure_channel,
    random_quasiclassical,
)

H2_075 = 0.8112781244591328


def random_povm(rng: np.random.Generator, dim: int, outcomes: int) -> POVM:
    kets = rng.standard_normal((dim, outcomes)) + 1j * rng.standard_normal((dim, outcomes))
    frame = kets @ kets.conj().T
    return POVM.from_vectors((pinv_sqrt_matrix(frame) @ kets).T)


class PriorTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(InvalidStateError):
            Prior([0.5, 0.6])
        with self.assertRaises(InvalidStateError):
            Prior([1.5, -0.5])
        with self.assertRaises(InvalidStateError):
            Prior([])
        assert Prior.uniform(4).probabilities.tolist() == [0.25] * 4
        assert Prior.point_mass(3, 2).probabilities.tolist() == [0.0, 0.0, 1.0]
        assert np.allclose(Prior.from_weights([1, 3]).probabilities, [0.25, 0.75])


class POVMTests(SimpleTestCase):
    def test_must_resolve_identity(self):
        with self.assertRaises(InvalidStateError):
            POVM((np.diag([1.0, 0.0]), np.diag([0.0, 0.5])))
        with self.assertRaises(InvalidStateError):
            POVM((np.diag([1.5, 0.0]), np.diag([-0.5, 1.0])))
        assert len(POVM.basis(3)) == 3

    def test_quasiclassical_povm(self):
        povm = quasiclassical_povm(np.array([[1.0, 0.2], [0.0, 0.8]]))
        assert np.allclose(sum(e.matrix for e in povm.elements), np.eye(2))


class ChannelTests(SimpleTestCase):
    def test_shape_checks(self):
        ch = overlap_pair()
        assert ch.dim == 2
        assert ch.alphabet_size == 2
        assert ch.is_pure
        with self.assertRaises(ShapeMismatchError):
            ensemble_average(ch, Prior.uniform(3))
        with self.assertRaises(ShapeMismatchError):
            CQChannel(states=(ch.states[0], random_mixed_channel(np.random.default_rng(0), 3, 1).states[0]))

    def test_mixed_letters_have_no_vectors(self):
        ch = random_mixed_channel(np.random.default_rng(1), 2, 2)
        assert ch.pure_flags == (False, False)
        with self.assertRaises(DegenerateInputError):
            word_vector(ch, Word((0, 1)))

    def test_quasiclassical_flag(self):
        assert binary_symmetric(0.1).is_quasiclassical
        assert orthogonal_pair().is_quasiclassical
        assert not overlap_pair().is_quasiclassical

    def test_rejects_non_stochastic_columns(self):
        with self.assertRaises(InvalidStateError):
            quasiclassical_channel(np.array([[0.5, 0.5], [0.4, 0.5]]))


class HolevoQuantityTests(SimpleTestCase):
    def test_reference_values(self):
        assert math.isclose(holevo_quantity(orthogonal_pair(), Prior.uniform(2)), 1.0, abs_tol=1e-12)
        assert math.isclose(holevo_quantity(overlap_pair(), Prior.uniform(2)), H2_075, abs_tol=1e-9)
        assert holevo_quantity(overlap_pair(), Prior.point_mass(2, 0)) < 1e-12

    def test_ensemble_average_spectrum(self):
        values = ensemble_average(overlap_pair(), Prior.uniform(2)).spectrum.eigenvalues
        assert np.allclose(values, [0.75, 0.25])

    def test_information_never_exceeds_holevo_quantity(self):
        rng = np.random.default_rng(2024)
        violations = 0
        for _ in range(500):
            dim = int(rng.integers(2, 5))
            letters = int(rng.integers(1, 5))
            outcomes = int(rng.integers(dim, 7))
            if rng.random() < 0.5:
                ch = random_pure_channel(rng, dim, letters)
            else:
                ch = random_mixed_channel(rng, dim, letters)
            prior = Prior(rng.dirichlet(np.ones(letters)))
            information = mutual_information(prior, transition_probabilities(ch, random_povm(rng, dim, outcomes)))
            if information > holevo_quantity(ch, prior) + 1e-9:
                violations += 1
        assert violations == 0

    def test_commuting_states_attain_the_bound(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            dim = int(rng.integers(2, 5))
            letters = int(rng.integers(2, 5))
            ch = random_quasiclassical(rng, dim, letters)
            prior = Prior(rng.dirichlet(np.ones(letters)))
            information = mutual_information(prior, transition_probabilities(ch, POVM.basis(dim)))
            assert abs(information - holevo_quantity(ch, prior)) < 1e-8

    def test_concave_in_the_prior(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            dim = int(rng.integers(2, 4))
            letters = int(rng.integers(2, 5))
            ch = random_mixed_channel(rng, dim, letters) if rng.random() < 0.5 else random_pure_channel(rng, dim, letters)
            p = rng.dirichlet(np.ones(letters))
            q = rng.dirichlet(np.ones(letters))
            t = float(rng.random())
            mixture = holevo_quantity(ch, Prior(t * p + (1 - t) * q))
            chord = t * holevo_quantity(ch, Prior(p)) + (1 - t) * holevo_quantity(ch, Prior(q))
            assert mixture >= chord - 1e-10

    def test_transition_rows_are_stochastic(self):
        rng = np.random.default_rng(4)
        ch = random_mixed_channel(rng, 3, 4)
        transition = transition_probabilities(ch, random_povm(rng, 3, 5))
        assert transition.shape == (4, 5)
        assert np.allclose(transition.sum(axis=1), 1.0)
        with self.assertRaises(ShapeMismatchError):
            transition_probabilities(ch, POVM.basis(2))


class WordTests(SimpleTestCase):
    def test_word_state_matches_word_vector(self):
        ch = overlap_pair()
        word = Word((0, 1, 1))
        vector = word_vector(ch, word).vector
        assert np.allclose(word_state(ch, word).matrix, np.outer(vector, vector.conj()))
        with self.assertRaises(ShapeMismatchError):
            word_state(ch, Word((0, 2)))

    def test_product_prior_and_words(self):
        words = all_words(2, 3)
        assert len(words) == 8
        assert words[1].letters == (0, 0, 1)
        weights = product_prior(Prior([0.75, 0.25]), 2).probabilities
        assert np.allclose(weights, [0.5625, 0.1875, 0.1875, 0.0625])

    def test_holevo_quantity_is_additive(self):
        rng = np.random.default_rng(8)
        for ch in (overlap_pair(), random_mixed_channel(rng, 2, 2)):
            prior = Prior([0.3, 0.7])
            single = holevo_quantity(ch, prior)
            double = holevo_quantity(product_channel(ch, 2), product_prior(prior, 2))
            assert abs(double - 2 * single) < 1e-9

    def test_average_of_word_states(self):
        ch = random_mixed_channel(np.random.default_rng(12), 2, 3)
        prior = Prior([0.2, 0.3, 0.5])
        words = all_words(3, 2)
        weights = product_prior(prior, 2).probabilities
        total = sum(w * word_state(ch, word).matrix for w, word in zip(weights, words, strict=True))
        assert np.allclose(total, average_state_power(ch, prior, 2).matrix, atol=1e-12)
