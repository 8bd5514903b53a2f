"""
Block-code decoding: Gram matrices, the square-root measurement, exact average error,
the tight and coarse bounds, typical and conditional-typical projectors, the projected
SRM and the mixed-state decision rule with its error estimate.

Words are rows of 0-based letter indices. A decision rule stores only its M code
elements; the "no decision" element I - sum_k X_k is implicit.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .channel import CQChannel, Prior, Word, ensemble_average, require_pure
from .constants import DEGENERACY_TOL, GRAM_RANK_TOL, RULE_PSD_TOL, RULE_SUM_TOL, enumeration_cap
from .errors import DegenerateInputError, InvalidStateError, ResourceCapError, ShapeMismatchError
from .operators import (
    DensityOperator,
    HermitianOperator,
    Spectrum,
    check_dimension,
    entropy_of_eigenvalues,
    group_degenerate,
    pinv_sqrt_matrix,
)

logger = logging.getLogger(__name__)

PROJECTED_ZERO_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class Codebook:
    words: tuple[Word, ...]

    def __post_init__(self):
        words = tuple(w if isinstance(w, Word) else Word(w) for w in self.words)
        if not words:
            msg = "A codebook needs at least one word"
            raise InvalidStateError(msg)
        if len({len(w) for w in words}) != 1:
            msg = "All codewords must have the same length"
            raise ShapeMismatchError(msg)
        object.__setattr__(self, "words", words)

    @classmethod
    def from_letters(cls, letters) -> Codebook:
        return cls(tuple(Word(row) for row in np.asarray(letters, dtype=int).reshape(len(letters), -1)))

    @property
    def n(self) -> int:
        return len(self.words[0])

    @property
    def M(self) -> int:
        return len(self.words)

    @cached_property
    def letters(self) -> np.ndarray:
        """(M, n) integer array of letter indices."""
        array = np.array([w.letters for w in self.words], dtype=int)
        array.setflags(write=False)
        return array

    def __len__(self) -> int:
        return self.M

    def __repr__(self) -> str:
        return f"Codebook(M={self.M}, n={self.n})"


@dataclass(frozen=True, eq=False)
class DecisionRule:
    """M positive operators X_1..X_M with sum_k X_k <= I."""

    elements: np.ndarray

    def __post_init__(self):
        elements = np.array(self.elements, dtype=complex)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
            msg = f"Decision rule elements must be an (M, D, D) array, got shape {elements.shape}"
            raise ShapeMismatchError(msg)
        elements = (elements + elements.conj().transpose(0, 2, 1)) / 2
        for index, element in enumerate(elements):
            smallest = float(np.linalg.eigvalsh(element)[0])
            if smallest < -RULE_PSD_TOL:
                msg = f"Decision element {index} is not positive (eigenvalue {smallest:.3e})"
                raise InvalidStateError(msg)
        largest = float(np.linalg.eigvalsh(elements.sum(axis=0))[-1])
        if largest > 1.0 + RULE_SUM_TOL:
            msg = f"Decision elements sum above the identity (largest eigenvalue {largest:.12g})"
            raise InvalidStateError(msg)
        elements.setflags(write=False)
        object.__setattr__(self, "elements", elements)

    @classmethod
    def from_vectors(cls, vectors: np.ndarray) -> DecisionRule:
        """Rank-1 rule X_k = |v_k><v_k| from the columns of a (D, M) array."""
        return cls(np.einsum("ak,bk->kab", vectors, vectors.conj()))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def completion(self) -> HermitianOperator:
        """X_0 = I - sum_k X_k"""
        return HermitianOperator(np.eye(self.dim) - self.elements.sum(axis=0))


@dataclass(frozen=True, eq=False)
class GramData:
    """Gamma(W) and its spectrum.

    The nonzero spectrum of the Gram operator G(W) = sum_k |psi_k><psi_k| coincides with
    the spectrum of Gamma, so gram_operator_spectrum is taken from the M x M matrix.
    """

    gram: np.ndarray
    gram_operator_spectrum: Spectrum

    @property
    def M(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def gram_sqrt(self) -> np.ndarray:
        values = self.gram_operator_spectrum.eigenvalues
        values = np.where(values > _rank_cutoff(self.gram), values, 0.0)
        vectors = self.gram_operator_spectrum.eigenvectors
        return (vectors * np.sqrt(values)) @ vectors.conj().T


@dataclass(frozen=True, eq=False)
class TypicalProjector:
    """Spectral projector of a (tensor-power or word) state.

    selected_indices index the eigenbasis in Kronecker order; captured_weight is
    Tr S P and largest_selected is the norm of S P (S and P commute).
    """

    projector: HermitianOperator | None
    delta: float
    selected_indices: np.ndarray
    window: tuple[float, float]
    captured_weight: float
    largest_selected: float

    @property
    def empty(self) -> bool:
        return self.selected_indices.size == 0

    @property
    def leakage(self) -> float:
        """Tr S (I - P)"""
        return max(1.0 - self.captured_weight, 0.0)

    def matrix(self) -> np.ndarray:
        if self.projector is None:
            msg = "Projector was built without materializing its matrix"
            raise InvalidStateError(msg)
        return self.projector.matrix


@dataclass(frozen=True, eq=False)
class ProjectedDecoder:
    rule: DecisionRule
    exact_error: float
    modified_bound: float
    modified_bound_trace: float
    projected_gram: np.ndarray


@dataclass(frozen=True, eq=False)
class MixedDecoder:
    rule: DecisionRule
    exact_error: float
    bound: float
    typical: TypicalProjector
    conditional: tuple[TypicalProjector, ...] = field(default_factory=tuple)
    average_entropy: float = 0.0


def _rank_cutoff(matrix: np.ndarray) -> float:
    return GRAM_RANK_TOL * max(float(np.real(np.trace(matrix))), 0.0)


def _support_pinv_sqrt(matrix: np.ndarray) -> np.ndarray:
    matrix = (matrix + matrix.conj().T) / 2
    return pinv_sqrt_matrix(matrix, cutoff=_rank_cutoff(matrix))


def _check_codebook(ch: CQChannel, codebook: Codebook) -> None:
    letters = codebook.letters
    if letters.min() < 0 or letters.max() >= ch.alphabet_size:
        msg = f"Codebook uses letters outside 0..{ch.alphabet_size - 1}"
        raise ShapeMismatchError(msg)


def _word_vectors(ch: CQChannel, codebook: Codebook) -> np.ndarray:
    """Codeword vectors as the columns of a (dim**n, M) array."""
    require_pure(ch)
    _check_codebook(ch, codebook)
    check_dimension(ch.dim**codebook.n)
    letter_vectors = np.stack([v.vector for v in ch.vectors])
    columns = []
    for word in codebook.letters:
        vector = letter_vectors[word[0]]
        for letter in word[1:]:
            vector = np.kron(vector, letter_vectors[letter])
        columns.append(vector)
    return np.stack(columns, axis=1)


def _word_states(ch: CQChannel, codebook: Codebook) -> np.ndarray:
    """Codeword density matrices as an (M, dim**n, dim**n) array."""
    _check_codebook(ch, codebook)
    check_dimension(ch.dim**codebook.n)
    letter_states = [s.matrix for s in ch.states]
    states = []
    for word in codebook.letters:
        matrix = letter_states[word[0]]
        for letter in word[1:]:
            matrix = np.kron(matrix, letter_states[letter])
        states.append(matrix)
    return np.stack(states)


def _hermitian_spectrum(matrix: np.ndarray) -> Spectrum:
    values, vectors = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    return Spectrum(eigenvalues=values[::-1].copy(), eigenvectors=vectors[:, ::-1].copy())


def gram(ch: CQChannel, codebook: Codebook) -> GramData:
    """Gamma_ij = prod_t <psi_{w^i_t}|psi_{w^j_t}>, from letter overlaps only."""
    require_pure(ch)
    _check_codebook(ch, codebook)
    letters = codebook.letters
    matrix = ch.overlaps[letters[:, None, :], letters[None, :, :]].prod(axis=2)
    return GramData(gram=matrix, gram_operator_spectrum=_hermitian_spectrum(matrix))


def srm(ch: CQChannel, codebook: Codebook) -> DecisionRule:
    """Square-root measurement: psi-hat_k = G^{-1/2} psi_k, built as Psi Gamma^{-1/2}."""
    vectors = _word_vectors(ch, codebook)
    return DecisionRule.from_vectors(vectors @ _support_pinv_sqrt(vectors.conj().T @ vectors))


def srm_error(data: GramData) -> float:
    """Exact SRM error of a pure-state code: 1 - (1/M) sum_k |(Gamma^{1/2})_kk|^2."""
    diagonal = np.abs(np.diag(data.gram_sqrt)) ** 2
    return float(np.clip(1.0 - diagonal.mean(), 0.0, 1.0))


def average_error(ch: CQChannel, codebook: Codebook, rule: DecisionRule) -> float:
    """(1/M) sum_k [1 - Tr S_{w^k} X_k]"""
    if rule.size != codebook.M:
        msg = f"Rule has {rule.size} elements for a codebook of {codebook.M} words"
        raise ShapeMismatchError(msg)
    if rule.dim != ch.dim**codebook.n:
        msg = f"Rule acts on dimension {rule.dim}, codewords on {ch.dim**codebook.n}"
        raise ShapeMismatchError(msg)
    if ch.is_pure:
        vectors = _word_vectors(ch, codebook)
        hits = np.real(np.einsum("ak,kab,bk->k", vectors.conj(), rule.elements, vectors))
    else:
        hits = np.real(np.einsum("kab,kba->k", _word_states(ch, codebook), rule.elements))
    return float(np.clip(1.0 - hits.mean(), 0.0, 1.0))


def tight_bound(data: GramData) -> float:
    """(2/M) Sp(E - Gamma^{1/2})"""
    return float(2.0 / data.M * np.real(np.trace(np.eye(data.M) - data.gram_sqrt)))


def tight_bound_squared(data: GramData) -> float:
    """(1/M) Sp(E - Gamma^{1/2})^2; equal to tight_bound when the diagonal of Gamma is 1."""
    difference = np.eye(data.M) - data.gram_sqrt
    return float(np.linalg.norm(difference, "fro") ** 2 / data.M)


def coarse_bound(data: GramData) -> float:
    """(1/M) Sp(E - Gamma)^2"""
    return float(np.linalg.norm(np.eye(data.M) - data.gram, "fro") ** 2 / data.M)


def coarse_bound_trace(ch: CQChannel, codebook: Codebook) -> float:
    """(1/M) sum_{r != s} Tr S_{w^r} S_{w^s}, valid for mixed letters too."""
    _check_codebook(ch, codebook)
    letters = codebook.letters
    products = ch.trace_products[letters[:, None, :], letters[None, :, :]].prod(axis=2)
    return float((products.sum() - np.trace(products)) / codebook.M)


def _log_eigenvalue_products(log_values: list[np.ndarray]) -> np.ndarray:
    result = log_values[0]
    for values in log_values[1:]:
        result = np.add.outer(result, values).ravel()
    return result


def _kron_columns(bases: list[np.ndarray], columns: np.ndarray) -> np.ndarray:
    """Selected columns of V_1 (x) ... (x) V_n without building the full product."""
    dims = [basis.shape[1] for basis in bases]
    multi = np.unravel_index(columns, dims)
    result = bases[0][:, multi[0]]
    for basis, index in zip(bases[1:], multi[1:], strict=True):
        picked = basis[:, index]
        rows = result.shape[0] * picked.shape[0]
        result = np.einsum("ak,bk->abk", result, picked).reshape(rows, columns.size)
    return result


def _projector_from_columns(columns: np.ndarray, dim: int) -> HermitianOperator:
    if columns.shape[1] == 0:
        return HermitianOperator(np.zeros((dim, dim), dtype=complex))
    return HermitianOperator(columns @ columns.conj().T)


def _check_enumeration(count: int) -> None:
    cap = enumeration_cap()
    if count > cap:
        msg = f"{count} multi-indices exceed the enumeration cap {cap} (HOLEVO_ENUMERATION_CAP)"
        raise ResourceCapError(msg)


def typical_projector(average: DensityOperator, n: int, delta: float, materialize: bool = True) -> TypicalProjector:
    """Projector onto e_J with 2^{-n(H+delta)} < lambda_J < 2^{-n(H-delta)}, strict on both sides.

    Degenerate eigenvalues are merged first so the projector does not depend on the
    choice of eigenbasis inside a level.
    """
    if n < 1:
        msg = f"typical_projector needs n >= 1, got {n}"
        raise InvalidStateError(msg)
    dim = average.dim**n
    _check_enumeration(dim)
    if materialize:
        check_dimension(dim)
    spectrum = average.spectrum
    values = group_degenerate(spectrum.eigenvalues)
    entropy = entropy_of_eigenvalues(values)
    with np.errstate(divide="ignore"):
        log_values = np.log2(np.where(values > 0, values, 0.0))
    log_products = _log_eigenvalue_products([log_values] * n)
    low, high = -n * (entropy + delta), -n * (entropy - delta)
    selected = np.flatnonzero((log_products > low) & (log_products < high))
    chosen = np.exp2(log_products[selected])
    if selected.size == 0:
        logger.warning("Typical set is empty for n=%s, delta=%s", n, delta)
    projector = None
    if materialize:
        projector = _projector_from_columns(_kron_columns([spectrum.eigenvectors] * n, selected), dim)
    return TypicalProjector(
        projector=projector,
        delta=float(delta),
        selected_indices=selected,
        window=(float(np.exp2(low)), float(np.exp2(high))),
        captured_weight=float(chosen.sum()),
        largest_selected=float(chosen.max()) if chosen.size else 0.0,
    )


def _conditional_from_spectrum(
    values: np.ndarray, bases: list[np.ndarray], dim: int, cutoff: float, delta: float
) -> TypicalProjector:
    grouped = group_degenerate(values)
    selected = np.flatnonzero(grouped >= cutoff - DEGENERACY_TOL)
    chosen = grouped[selected]
    return TypicalProjector(
        projector=_projector_from_columns(_kron_columns(bases, selected), dim),
        delta=float(delta),
        selected_indices=selected,
        window=(float(cutoff), float("inf")),
        captured_weight=float(chosen.sum()),
        largest_selected=float(chosen.max()) if chosen.size else 0.0,
    )


def conditional_typical_projector(
    word_density: DensityOperator, average_entropy: float, n: int, delta: float
) -> TypicalProjector:
    """Spectral projector of S_w onto eigenvalues >= 2^{-n(H-bar + delta)}.

    That choice gives P_w <= S_w 2^{n(H-bar + delta)} by construction.
    """
    spectrum = word_density.spectrum
    cutoff = float(np.exp2(-n * (average_entropy + delta)))
    return _conditional_from_spectrum(
        spectrum.eigenvalues, [spectrum.eigenvectors], word_density.dim, cutoff, delta
    )


def word_conditional_projector(ch: CQChannel, word: Word, average_entropy: float, delta: float) -> TypicalProjector:
    """conditional_typical_projector of word_state(ch, word), built from the letter spectra."""
    word = word if isinstance(word, Word) else Word(word)
    n = len(word)
    if min(word.letters) < 0 or max(word.letters) >= ch.alphabet_size:
        msg = f"Word {word.letters} uses letters outside 0..{ch.alphabet_size - 1}"
        raise ShapeMismatchError(msg)
    dim = ch.dim**n
    check_dimension(dim)
    spectra = [ch.states[letter].spectrum for letter in word.letters]
    with np.errstate(divide="ignore"):
        logs = [np.log2(np.where(s.eigenvalues > 0, s.eigenvalues, 0.0)) for s in spectra]
    values = np.exp2(_log_eigenvalue_products(logs))
    cutoff = float(np.exp2(-n * (average_entropy + delta)))
    return _conditional_from_spectrum(values, [s.eigenvectors for s in spectra], dim, cutoff, delta)


def _projector_matrix(projector: HermitianOperator | TypicalProjector | np.ndarray) -> np.ndarray:
    if isinstance(projector, TypicalProjector):
        return projector.matrix()
    if isinstance(projector, HermitianOperator):
        return projector.matrix
    return np.asarray(projector, dtype=complex)


def projected_srm(
    ch: CQChannel,
    codebook: Codebook,
    projector: HermitianOperator | TypicalProjector,
    allow_degenerate: bool = False,
) -> ProjectedDecoder:
    """SRM on the projected vectors P psi_k with the modified bound.

    modified_bound = (1/M) {Sp(E - Gamma~) + Sp(E - Gamma~)^2} with Gamma~ the Gram
    matrix of the projected vectors; modified_bound_trace is the operator form
    (1/M) sum_r {Tr S_r (I - P) + sum_{s != r} Tr S_r P S_s P}.
    """
    vectors = _word_vectors(ch, codebook)
    p = _projector_matrix(projector)
    if p.shape != (vectors.shape[0],) * 2:
        msg = f"Projector acts on dimension {p.shape[0]}, codewords on {vectors.shape[0]}"
        raise ShapeMismatchError(msg)
    projected = p @ vectors
    projected_gram = projected.conj().T @ projected
    projected_gram = (projected_gram + projected_gram.conj().T) / 2
    M = codebook.M
    identity = np.eye(M)
    if np.all(np.linalg.norm(projected, axis=0) <= PROJECTED_ZERO_TOL):
        if not allow_degenerate:
            msg = "Every projected codeword vector is zero; the typical window is too narrow"
            raise DegenerateInputError(msg)
        rule = DecisionRule(np.zeros((M, p.shape[0], p.shape[0]), dtype=complex))
    else:
        rule = DecisionRule.from_vectors(projected @ _support_pinv_sqrt(projected_gram))
    difference = identity - projected_gram
    modified = float(np.real(np.trace(difference)) + np.linalg.norm(difference, "fro") ** 2) / M
    off_diagonal = np.abs(projected_gram) ** 2
    trace_form = float(
        np.sum(1.0 - np.real(np.diag(projected_gram))) + off_diagonal.sum() - np.trace(off_diagonal)
    ) / M
    return ProjectedDecoder(
        rule=rule,
        exact_error=average_error(ch, codebook, rule),
        modified_bound=modified,
        modified_bound_trace=trace_form,
        projected_gram=projected_gram,
    )


def mixed_decision_rule(
    ch: CQChannel,
    codebook: Codebook,
    projector: HermitianOperator | TypicalProjector,
    word_projectors,
) -> DecisionRule:
    """X_k = A^{-1/2} P P_k P A^{-1/2} with A = sum_l P P_l P."""
    _check_codebook(ch, codebook)
    p = _projector_matrix(projector)
    conditional = [_projector_matrix(q) for q in word_projectors]
    if len(conditional) != codebook.M:
        msg = f"Got {len(conditional)} word projectors for {codebook.M} codewords"
        raise ShapeMismatchError(msg)
    if any(q.shape != p.shape for q in conditional) or p.shape[0] != ch.dim**codebook.n:
        msg = "Projectors must all act on the dim**n codeword space"
        raise ShapeMismatchError(msg)
    sandwiched = np.stack([p @ q @ p for q in conditional])
    total = sandwiched.sum(axis=0)
    if np.max(np.abs(total), initial=0.0) <= PROJECTED_ZERO_TOL:
        msg = "sum_l P P_l P is numerically zero; no decision rule can be formed"
        raise DegenerateInputError(msg)
    root = _support_pinv_sqrt(total)
    return DecisionRule(np.einsum("ab,kbc,cd->kad", root, sandwiched, root))


def bound19(
    ch: CQChannel,
    codebook: Codebook,
    projector: HermitianOperator | TypicalProjector,
    word_projectors,
) -> float:
    """(1/M) sum_k {3 Tr S_k (I - P) + sum_{l != k} Tr P S_k P P_l + Tr S_k (I - P_k)}"""
    states = _word_states(ch, codebook)
    p = _projector_matrix(projector)
    conditional = np.stack([_projector_matrix(q) for q in word_projectors])
    if conditional.shape[0] != codebook.M:
        msg = f"Got {conditional.shape[0]} word projectors for {codebook.M} codewords"
        raise ShapeMismatchError(msg)
    outside = 1.0 - np.real(np.einsum("kab,ba->k", states, p))
    compressed = np.einsum("ab,kbc,cd->kad", p, states, p)
    cross = np.real(np.einsum("kab,lba->kl", compressed, conditional))
    missed = 1.0 - np.real(np.einsum("kab,kba->k", states, conditional))
    total = 3.0 * outside.sum() + cross.sum() - np.trace(cross) + missed.sum()
    return float(total / codebook.M)


def decode_mixed(ch: CQChannel, prior: Prior, codebook: Codebook, delta: float) -> MixedDecoder:
    """Typical projector of S-bar^{(x)n}, one conditional projector per codeword, rule and estimate."""
    _check_codebook(ch, codebook)
    average = ensemble_average(ch, prior)
    average_entropy = float(prior.probabilities @ ch.entropies)
    typical = typical_projector(average, codebook.n, delta)
    conditional = tuple(word_conditional_projector(ch, w, average_entropy, delta) for w in codebook.words)
    rule = mixed_decision_rule(ch, codebook, typical, conditional)
    return MixedDecoder(
        rule=rule,
        exact_error=average_error(ch, codebook, rule),
        bound=bound19(ch, codebook, typical, conditional),
        typical=typical,
        conditional=conditional,
        average_entropy=average_entropy,
    )


def expected_conditional_leakage(ch: CQChannel, prior: Prior, n: int, delta: float) -> float:
    """E Tr S_w (I - P_w) over words drawn from the product prior, by enumeration."""
    _check_enumeration(ch.alphabet_size**n * ch.dim**n)
    average_entropy = float(prior.probabilities @ ch.entropies)
    cutoff = float(np.exp2(-n * (average_entropy + delta)))
    with np.errstate(divide="ignore"):
        logs = [np.log2(np.where(s.spectrum.eigenvalues > 0, s.spectrum.eigenvalues, 0.0)) for s in ch.states]
    total = 0.0
    for word in itertools.product(range(ch.alphabet_size), repeat=n):
        weight = float(np.prod(prior.probabilities[list(word)]))
        if weight == 0:
            continue
        values = group_degenerate(np.exp2(_log_eigenvalue_products([logs[i] for i in word])))
        total += weight * float(values[values < cutoff - DEGENERACY_TOL].sum())
    return total
