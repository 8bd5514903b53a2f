"""
The classical-quantum channel: letter -> state map, priors, ensemble averages,
the Holevo quantity, POVM statistics and the quasiclassical embedding.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import rel_entr

from .constants import (
    POVM_PSD_TOL,
    POVM_SUM_TOL,
    PRIOR_SUM_TOL,
    PURE_STATE_TOL,
    STOCHASTIC_TOL,
    enumeration_cap,
)
from .errors import DegenerateInputError, InvalidStateError, ResourceCapError, ShapeMismatchError
from .operators import (
    LN2,
    DensityOperator,
    HermitianOperator,
    PureState,
    check_dimension,
    entropy_of_eigenvalues,
    tensor_power,
    trusted_density,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Prior:
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float).reshape(-1)
        if p.size == 0 or not np.all(np.isfinite(p)):
            msg = "Prior needs a finite, non-empty probability vector"
            raise InvalidStateError(msg)
        if np.any(p < -PRIOR_SUM_TOL):
            msg = f"Prior has a negative entry ({p.min():.3e})"
            raise InvalidStateError(msg)
        if abs(p.sum() - 1.0) > PRIOR_SUM_TOL:
            msg = f"Prior must sum to 1, got {p.sum():.12g}"
            raise InvalidStateError(msg)
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def uniform(cls, size: int) -> Prior:
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, letter: int) -> Prior:
        p = np.zeros(size)
        p[letter] = 1.0
        return cls(p)

    @classmethod
    def from_weights(cls, weights) -> Prior:
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        return cls(w / w.sum())

    @property
    def size(self) -> int:
        return int(self.probabilities.shape[0])

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"Prior({np.array2string(self.probabilities, precision=6)})"


@dataclass(frozen=True, eq=False)
class POVM:
    """Resolution of identity."""

    elements: tuple[HermitianOperator, ...]

    def __post_init__(self):
        elements = tuple(
            e if isinstance(e, HermitianOperator) else HermitianOperator(e) for e in self.elements
        )
        if not elements:
            msg = "POVM needs at least one element"
            raise InvalidStateError(msg)
        dim = elements[0].dim
        if any(e.dim != dim for e in elements):
            msg = "POVM elements must share one dimension"
            raise ShapeMismatchError(msg)
        for index, element in enumerate(elements):
            smallest = float(element.spectrum.eigenvalues[-1])
            if smallest < -POVM_PSD_TOL:
                msg = f"POVM element {index} is not positive (eigenvalue {smallest:.3e})"
                raise InvalidStateError(msg)
        total = sum(e.matrix for e in elements)
        deviation = float(np.max(np.abs(total - np.eye(dim))))
        if deviation > POVM_SUM_TOL:
            msg = f"POVM elements do not sum to the identity (deviation {deviation:.3e})"
            raise InvalidStateError(msg)
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def from_vectors(cls, vectors) -> POVM:
        """Rank-1 POVM |phi_j><phi_j| from an overcomplete system of (unnormalized) vectors."""
        return cls(tuple(HermitianOperator(np.outer(v, np.conj(v))) for v in np.asarray(vectors)))

    @classmethod
    def basis(cls, dim: int) -> POVM:
        return cls.from_vectors(np.eye(dim, dtype=complex))


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(i) for i in self.letters))
        if not self.letters:
            msg = "A word needs at least one letter"
            raise InvalidStateError(msg)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)


@dataclass(frozen=True, eq=False)
class CQChannel:
    """Finite alphabet with one density operator per letter.

    Pure letters also keep a unit vector (given explicitly or the leading eigenvector).
    """

    states: tuple[DensityOperator, ...]
    vectors: tuple[PureState | None, ...] = ()

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            msg = "A channel needs at least one letter"
            raise InvalidStateError(msg)
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            msg = "All channel states must share one dimension"
            raise ShapeMismatchError(msg)
        vectors = tuple(self.vectors) or (None,) * len(states)
        if len(vectors) != len(states):
            msg = "Channel vectors must match the number of states"
            raise ShapeMismatchError(msg)
        filled = []
        for state, vector in zip(states, vectors, strict=True):
            if vector is None and state.largest_eigenvalue >= 1.0 - PURE_STATE_TOL:
                vector = PureState(state.spectrum.eigenvectors[:, 0])
            filled.append(vector)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "vectors", tuple(filled))

    @classmethod
    def from_pure_states(cls, vectors: Sequence) -> CQChannel:
        pure = tuple(v if isinstance(v, PureState) else PureState(v) for v in vectors)
        return cls(states=tuple(v.projector() for v in pure), vectors=pure)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def alphabet_size(self) -> int:
        return len(self.states)

    @property
    def pure_flags(self) -> tuple[bool, ...]:
        return tuple(v is not None for v in self.vectors)

    @property
    def is_pure(self) -> bool:
        return all(self.pure_flags)

    @cached_property
    def entropies(self) -> np.ndarray:
        """H(S_i) per letter, in bits."""
        return np.array([von_neumann_entropy(s) for s in self.states])

    @cached_property
    def is_quasiclassical(self) -> bool:
        """True when all signal states commute."""
        for a, b in itertools.combinations(self.states, 2):
            commutator = a.matrix @ b.matrix - b.matrix @ a.matrix
            if np.max(np.abs(commutator), initial=0.0) > 1e-10:
                return False
        return True

    @cached_property
    def overlaps(self) -> np.ndarray:
        """<psi_i|psi_j> for pure channels."""
        require_pure(self)
        stacked = np.stack([v.vector for v in self.vectors], axis=1)
        return stacked.conj().T @ stacked

    @cached_property
    def trace_products(self) -> np.ndarray:
        """Tr S_i S_j for every letter pair."""
        stacked = np.stack([s.matrix for s in self.states])
        return np.real(np.einsum("iab,jba->ij", stacked, stacked))

    def __repr__(self) -> str:
        return f"CQChannel(dim={self.dim}, letters={self.alphabet_size}, pure={self.is_pure})"


def require_pure(ch: CQChannel) -> None:
    if not ch.is_pure:
        msg = "This operation needs a pure-state channel"
        raise DegenerateInputError(msg)


def _check_prior(ch: CQChannel, prior: Prior) -> np.ndarray:
    if prior.size != ch.alphabet_size:
        msg = f"Prior has {prior.size} entries but the channel has {ch.alphabet_size} letters"
        raise ShapeMismatchError(msg)
    return prior.probabilities


def ensemble_average(ch: CQChannel, prior: Prior) -> DensityOperator:
    """S-bar = sum_i pi_i S_i"""
    p = _check_prior(ch, prior)
    stacked = np.stack([s.matrix for s in ch.states])
    return trusted_density(np.tensordot(p, stacked, axes=1))


def holevo_quantity(ch: CQChannel, prior: Prior) -> float:
    """H(S-bar) - sum_i pi_i H(S_i), in bits."""
    p = _check_prior(ch, prior)
    average = ensemble_average(ch, prior)
    return entropy_of_eigenvalues(average.spectrum.eigenvalues) - float(p @ ch.entropies)


def transition_probabilities(ch: CQChannel, povm: POVM) -> np.ndarray:
    """P(j|i) = Tr S_i X_j as an (a, outcomes) row-stochastic matrix."""
    if povm.dim != ch.dim:
        msg = f"POVM acts on dimension {povm.dim}, channel on {ch.dim}"
        raise ShapeMismatchError(msg)
    states = np.stack([s.matrix for s in ch.states])
    elements = np.stack([e.matrix for e in povm.elements])
    probabilities = np.real(np.einsum("iab,jba->ij", states, elements))
    return np.clip(probabilities, 0.0, 1.0)


def mutual_information(prior: Prior, transition: np.ndarray) -> float:
    """Shannon information of the classical channel P(j|i) under the prior, in bits."""
    p = prior.probabilities
    transition = np.asarray(transition, dtype=float)
    if transition.shape[0] != p.size:
        msg = f"Transition matrix has {transition.shape[0]} rows, prior has {p.size} entries"
        raise ShapeMismatchError(msg)
    output = p @ transition
    rows = p > 0
    columns = output > 0
    terms = rel_entr(transition[np.ix_(rows, columns)], output[columns][None, :])
    value = float(p[rows] @ terms.sum(axis=1)) / LN2
    return min(max(value, 0.0), float(np.log2(p.size)) if p.size > 1 else 0.0)


def _check_stochastic_columns(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or np.any(matrix < -STOCHASTIC_TOL):
        msg = f"{name} must be a nonnegative 2-D array"
        raise InvalidStateError(msg)
    sums = matrix.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > STOCHASTIC_TOL:
        msg = f"{name} columns must each sum to 1"
        raise InvalidStateError(msg)
    return np.clip(matrix, 0.0, None)


def quasiclassical_channel(transition: np.ndarray) -> CQChannel:
    """Embed S(omega|i), given as an (outputs, inputs) array, as diagonal states."""
    s = _check_stochastic_columns(transition, "Channel transition matrix")
    return CQChannel(states=tuple(trusted_density(np.diag(column)) for column in s.T))


def quasiclassical_povm(decision: np.ndarray) -> POVM:
    """Embed X(j|omega), given as an (outcomes, outputs) array, as diagonal POVM elements."""
    x = _check_stochastic_columns(decision, "Decision matrix")
    return POVM(tuple(HermitianOperator(np.diag(row)) for row in x))


def _check_word(ch: CQChannel, word: Word) -> None:
    if any(i < 0 or i >= ch.alphabet_size for i in word.letters):
        msg = f"Word {word.letters} uses letters outside 0..{ch.alphabet_size - 1}"
        raise ShapeMismatchError(msg)


def word_state(ch: CQChannel, word: Word) -> DensityOperator:
    """S_w = S_{i_1} (x) ... (x) S_{i_n}"""
    _check_word(ch, word)
    check_dimension(ch.dim ** len(word))
    matrix = ch.states[word.letters[0]].matrix
    for letter in word.letters[1:]:
        matrix = np.kron(matrix, ch.states[letter].matrix)
    return trusted_density(matrix)


def word_vector(ch: CQChannel, word: Word) -> PureState:
    """psi_w = psi_{i_1} (x) ... (x) psi_{i_n} for pure channels."""
    require_pure(ch)
    _check_word(ch, word)
    check_dimension(ch.dim ** len(word))
    vector = ch.vectors[word.letters[0]].vector
    for letter in word.letters[1:]:
        vector = np.kron(vector, ch.vectors[letter].vector)
    return PureState(vector)


def product_prior(prior: Prior, n: int) -> Prior:
    """pi_{i_1} ... pi_{i_n} over words in lexicographic order."""
    if prior.size**n > enumeration_cap():
        msg = f"{prior.size}**{n} words exceed the enumeration cap"
        raise ResourceCapError(msg)
    return Prior(tensor_power_vector(prior.probabilities, n))


def tensor_power_vector(values: np.ndarray, n: int) -> np.ndarray:
    result = np.ones(1)
    for _ in range(n):
        result = np.kron(result, values)
    return result


def all_words(alphabet_size: int, n: int) -> list[Word]:
    if alphabet_size**n > enumeration_cap():
        msg = f"{alphabet_size}**{n} words exceed the enumeration cap"
        raise ResourceCapError(msg)
    return [Word(letters) for letters in itertools.product(range(alphabet_size), repeat=n)]


def product_channel(ch: CQChannel, n: int) -> CQChannel:
    """The channel over A^n whose letters are the word states, in lexicographic order."""
    words = all_words(ch.alphabet_size, n)
    if ch.is_pure:
        return CQChannel.from_pure_states([word_vector(ch, w) for w in words])
    return CQChannel(states=tuple(word_state(ch, w) for w in words))


def average_state_power(ch: CQChannel, prior: Prior, n: int) -> DensityOperator:
    return tensor_power(ensemble_average(ch, prior), n)
