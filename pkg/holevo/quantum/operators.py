"""
Dense complex Hermitian linear algebra.

Eigendecomposition, matrix functions, tensor products, entropies and the
support-restricted inverse square root that every other module is built on.
All values are immutable once constructed.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np
from scipy.special import entr

from .constants import (
    DEGENERACY_TOL,
    DENSITY_EIGENVALUE_TOL,
    ENTROPY_ZERO_CUTOFF,
    HERMITICITY_REJECT_TOL,
    NORM_TOL,
    PSD_REJECT_TOL,
    TRACE_TOL,
    dimension_cap,
)
from .errors import (
    InvalidStateError,
    NotHermitianError,
    NumericalError,
    ResourceCapError,
    ShapeMismatchError,
)

logger = logging.getLogger(__name__)

LN2 = float(np.log(2.0))


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _square_matrix(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        msg = f"Expected a non-empty square matrix, got shape {m.shape}"
        raise ShapeMismatchError(msg)
    if not np.all(np.isfinite(m)):
        msg = "Matrix has non-finite entries"
        raise InvalidStateError(msg)
    return m


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Descending eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _square_matrix(self.matrix)
        asymmetry = float(np.max(np.abs(m - m.conj().T)))
        if asymmetry > HERMITICITY_REJECT_TOL:
            msg = f"Matrix is not Hermitian (asymmetry {asymmetry:.3e})"
            raise NotHermitianError(msg)
        object.__setattr__(self, "matrix", _readonly((m + m.conj().T) / 2))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @cached_property
    def spectrum(self) -> Spectrum:
        return eig_hermitian(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True, eq=False, repr=False)
class DensityOperator(HermitianOperator):
    """Positive unit-trace operator; eigenvalues in [-1e-10, 0] are clamped to 0."""

    def __post_init__(self):
        super().__post_init__()
        trace_value = float(np.real(np.trace(self.matrix)))
        if abs(trace_value - 1.0) > TRACE_TOL:
            msg = f"Density operator must have unit trace, got {trace_value:.12g}"
            raise InvalidStateError(msg)
        raw = eig_hermitian(self)
        smallest = float(raw.eigenvalues[-1])
        if smallest < -DENSITY_EIGENVALUE_TOL:
            msg = f"Density operator has negative eigenvalue {smallest:.3e}"
            raise InvalidStateError(msg)
        self.__dict__["spectrum"] = _clamped(raw)

    @cached_property
    def spectrum(self) -> Spectrum:
        return _clamped(eig_hermitian(self))

    @property
    def largest_eigenvalue(self) -> float:
        return float(self.spectrum.eigenvalues[0])


def _clamped(spectrum: Spectrum) -> Spectrum:
    values = np.clip(spectrum.eigenvalues, 0.0, None)
    return Spectrum(eigenvalues=_readonly(values), eigenvectors=spectrum.eigenvectors)


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray

    def __post_init__(self):
        v = np.array(self.vector, dtype=complex).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            msg = "Pure state needs a finite, non-empty amplitude vector"
            raise InvalidStateError(msg)
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > NORM_TOL:
            msg = f"Pure state must have unit norm, got {norm:.12g}"
            raise InvalidStateError(msg)
        object.__setattr__(self, "vector", _readonly(v))

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])

    def overlap(self, other: PureState) -> complex:
        """<self|other>"""
        return complex(np.vdot(self.vector, other.vector))

    def projector(self) -> DensityOperator:
        return trusted_density(np.outer(self.vector, self.vector.conj()))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


def trusted_density(matrix: np.ndarray) -> DensityOperator:
    """Wrap a matrix known to be a valid state (products/mixtures of valid states).

    Skips the eigenvalue validation, which dominates the cost for large tensor powers.
    """
    m = np.array(matrix, dtype=complex)
    state = DensityOperator.__new__(DensityOperator)
    object.__setattr__(state, "matrix", _readonly((m + m.conj().T) / 2))
    return state


def eig_hermitian(h: HermitianOperator) -> Spectrum:
    """Eigendecomposition with eigenvalues in descending order."""
    try:
        values, vectors = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        msg = f"Hermitian eigensolver did not converge for a {h.dim}x{h.dim} operator"
        raise NumericalError(msg) from exc
    return Spectrum(
        eigenvalues=_readonly(np.ascontiguousarray(values[::-1])),
        eigenvectors=_readonly(np.ascontiguousarray(vectors[:, ::-1])),
    )


def matrix_function(h: HermitianOperator, f: Callable[[float], float]) -> HermitianOperator:
    """V f(Lambda) V^dagger for a real scalar function f."""
    spectrum = h.spectrum
    try:
        with np.errstate(all="raise"):
            values = np.vectorize(f, otypes=[float])(spectrum.eigenvalues)
    except (TypeError, ValueError, ZeroDivisionError, OverflowError, FloatingPointError) as exc:
        msg = f"Function is undefined on the spectrum: {exc}"
        raise NumericalError(msg) from exc
    if not np.all(np.isfinite(values)):
        msg = "Function is undefined on the spectrum (non-finite value)"
        raise NumericalError(msg)
    vectors = spectrum.eigenvectors
    return HermitianOperator((vectors * values) @ vectors.conj().T)


def entropy_of_eigenvalues(eigenvalues: np.ndarray) -> float:
    """-sum(l log2 l) over a spectrum, with 0 log 0 = 0."""
    values = np.asarray(eigenvalues, dtype=float)
    values = np.where(values < ENTROPY_ZERO_CUTOFF, 0.0, values)
    return float(entr(values).sum() / LN2)


def von_neumann_entropy(s: DensityOperator) -> float:
    """Entropy in bits."""
    return entropy_of_eigenvalues(s.spectrum.eigenvalues)


def check_dimension(dim: int) -> None:
    cap = dimension_cap()
    if dim > cap:
        msg = f"Dimension {dim} exceeds the configured cap {cap} (HOLEVO_DIMENSION_CAP)"
        raise ResourceCapError(msg)


def tensor(a, b):
    """Kronecker product of two pure states or two operators, keeping the kind."""
    if isinstance(a, PureState) != isinstance(b, PureState):
        msg = "tensor() needs two pure states or two operators"
        raise TypeError(msg)
    check_dimension(a.dim * b.dim)
    if isinstance(a, PureState):
        return PureState(np.kron(a.vector, b.vector))
    product = np.kron(a.matrix, b.matrix)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return trusted_density(product)
    return HermitianOperator(product)


def tensor_power(x, n: int):
    if n < 1:
        msg = f"tensor_power needs n >= 1, got {n}"
        raise InvalidStateError(msg)
    check_dimension(x.dim**n)
    return reduce(tensor, [x] * n)


def pinv_sqrt_matrix(matrix: np.ndarray, cutoff: float | None = None) -> np.ndarray:
    """Array form of pinv_sqrt for internal callers that already hold a Hermitian array."""
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        msg = "Hermitian eigensolver did not converge in pinv_sqrt"
        raise NumericalError(msg) from exc
    if values.size and values[0] < -PSD_REJECT_TOL:
        msg = f"pinv_sqrt needs a positive semidefinite operator (eigenvalue {values[0]:.3e})"
        raise NumericalError(msg)
    if cutoff is None:
        cutoff = matrix.shape[0] * np.finfo(float).eps * max(float(values[-1]), 0.0)
    inverse_roots = np.zeros_like(values)
    support = values > cutoff
    inverse_roots[support] = values[support] ** -0.5
    return (vectors * inverse_roots) @ vectors.conj().T


def pinv_sqrt(h: HermitianOperator, cutoff: float | None = None) -> HermitianOperator:
    """Inverse square root restricted to the support of h.

    Eigenvalues above the cutoff map to l**-0.5, the rest to 0. The default cutoff is
    dim * machine-epsilon * largest eigenvalue.
    """
    return HermitianOperator(pinv_sqrt_matrix(h.matrix, cutoff))


def support_projector(h: HermitianOperator, cutoff: float | None = None) -> HermitianOperator:
    spectrum = h.spectrum
    if cutoff is None:
        cutoff = h.dim * np.finfo(float).eps * max(float(spectrum.eigenvalues[0]), 0.0)
    columns = spectrum.eigenvectors[:, spectrum.eigenvalues > cutoff]
    return HermitianOperator(columns @ columns.conj().T)


def trace(a: HermitianOperator) -> float:
    return float(np.real(np.trace(a.matrix)))


def trace_product(a: HermitianOperator, b: HermitianOperator) -> float:
    """Tr AB without forming the product."""
    if a.dim != b.dim:
        msg = f"Dimension mismatch: {a.dim} vs {b.dim}"
        raise ShapeMismatchError(msg)
    return float(np.real(np.einsum("ij,ji->", a.matrix, b.matrix)))


def operator_norm(a: HermitianOperator) -> float:
    """Largest absolute eigenvalue."""
    return float(np.max(np.abs(a.spectrum.eigenvalues)))


def frobenius_distance(a: HermitianOperator, b: HermitianOperator) -> float:
    if a.dim != b.dim:
        msg = f"Dimension mismatch: {a.dim} vs {b.dim}"
        raise ShapeMismatchError(msg)
    return float(np.linalg.norm(a.matrix - b.matrix, "fro"))


def relative_entropy(s: DensityOperator, t: DensityOperator) -> float:
    """D(S||T) = Tr S (log2 S - log2 T) in bits; +inf when supp S is not inside supp T."""
    if s.dim != t.dim:
        msg = f"Dimension mismatch: {s.dim} vs {t.dim}"
        raise ShapeMismatchError(msg)
    t_spectrum = t.spectrum
    weights = np.real(
        np.einsum("ji,jk,ki->i", t_spectrum.eigenvectors.conj(), s.matrix, t_spectrum.eigenvectors)
    )
    outside = t_spectrum.eigenvalues <= ENTROPY_ZERO_CUTOFF
    if np.any(weights[outside] > ENTROPY_ZERO_CUTOFF):
        return float("inf")
    cross = float(np.sum(weights[~outside] * np.log2(t_spectrum.eigenvalues[~outside])))
    return max(-von_neumann_entropy(s) - cross, 0.0)


def group_degenerate(values: np.ndarray, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Replace runs of eigenvalues closer than tol by their mean.

    Keeps spectral projectors well defined when a degenerate level is split by
    rounding noise.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values.copy()
    order = np.argsort(values)
    ordered = values[order]
    breaks = np.flatnonzero(np.diff(ordered) > tol) + 1
    grouped = np.empty_like(ordered)
    for block in np.split(np.arange(ordered.size), breaks):
        grouped[block] = ordered[block].mean()
    result = np.empty_like(values)
    result[order] = grouped
    return result


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator(np.eye(dim, dtype=complex))


def maximally_mixed(dim: int) -> DensityOperator:
    return trusted_density(np.eye(dim, dtype=complex) / dim)


def bits_to_nats(value: float) -> float:
    return value * LN2


def nats_to_bits(value: float) -> float:
    return value / LN2
