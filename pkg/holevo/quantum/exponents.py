"""
Reliability exponents and random-coding bounds.

mu(pi, s) = -log2 Tr S-bar^{1+s}, its expurgated counterpart mu-tilde, the exponents
E_r(R) and E_ex(R), the block-error bound for pure-state channels, the closed form
Tr f(S-bar^{(x)n}) and the quasiclassical Gallager expression. Everything is base 2.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from .capacity import OptimizerOptions, mirror_ascent
from .channel import CQChannel, Prior, ensemble_average, holevo_quantity, require_pure
from .coding import expected_conditional_leakage, typical_projector
from .constants import ENTROPY_ZERO_CUTOFF, S_CAP, S_GRID_STEP, S_REFINE_TOL, THEOREM1_S_GRID, enumeration_cap
from .errors import InvalidStateError, ResourceCapError
from .operators import LN2, von_neumann_entropy

logger = logging.getLogger(__name__)

RANDOM = "random"
EXPURGATED = "expurgated"


@dataclass(frozen=True)
class ExponentOptions:
    s_max: float = S_CAP
    grid_step: float = S_GRID_STEP
    refine_tol: float = S_REFINE_TOL
    tol: float = 1e-7
    max_iter: int = 500

    def ascent_options(self) -> OptimizerOptions:
        return OptimizerOptions(tol=self.tol, max_iter=self.max_iter)


@dataclass(frozen=True, eq=False)
class ExponentPoint:
    rate: float
    value: float
    s_opt: float
    prior: Prior
    saturated: bool = False
    converged: bool = True


@dataclass(frozen=True, eq=False)
class ExponentCurve:
    kind: str
    points: tuple[ExponentPoint, ...] = field(default_factory=tuple)

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for point in self.points:
            row = {
                "rate": point.rate,
                "exponent": point.value,
                "s_opt": point.s_opt,
                "saturated": point.saturated,
            }
            row.update({f"prior_{i}": float(q) for i, q in enumerate(point.prior.probabilities)})
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass(frozen=True)
class GallagerBound:
    value: float
    quasiclassical: bool


@dataclass(frozen=True)
class TypicalCodingEstimate:
    value: float
    leakage: float
    conditional_leakage: float | None = None


def _check_s(s: float, low: float = 0.0, high: float = math.inf) -> float:
    s = float(s)
    if not (low <= s <= high) or not np.isfinite(s):
        msg = f"s = {s} is outside [{low}, {high}]"
        raise InvalidStateError(msg)
    return s


def _average_eigenvalues(ch: CQChannel, prior: Prior) -> np.ndarray:
    values = ensemble_average(ch, prior).spectrum.eigenvalues
    return values[values > 0]


def _mu_values(eigenvalues: np.ndarray, s_values: np.ndarray) -> np.ndarray:
    s_values = np.asarray(s_values, dtype=float)
    sums = np.power.outer(eigenvalues, 1.0 + s_values).sum(axis=0)
    return np.where(s_values == 0, 0.0, -np.log2(sums))


def mu(ch: CQChannel, prior: Prior, s: float) -> float:
    """-log2 sum_j lambda_j^{1+s} over the spectrum of S-bar; exactly 0 at s = 0."""
    s = _check_s(s)
    if s == 0:
        return 0.0
    return float(_mu_values(_average_eigenvalues(ch, prior), np.array([s]))[0])


def _squared_overlaps(ch: CQChannel) -> np.ndarray:
    require_pure(ch)
    squared = np.clip(np.abs(ch.overlaps) ** 2, 0.0, 1.0)
    return np.where(squared < ENTROPY_ZERO_CUTOFF**2, 0.0, squared)


def _mu_tilde_values(squared: np.ndarray, weights: np.ndarray, s_values: np.ndarray) -> np.ndarray:
    s_values = np.asarray(s_values, dtype=float)
    powered = np.power.outer(squared.ravel(), 1.0 / s_values)
    totals = weights.ravel() @ powered
    return -s_values * np.log2(totals)


def mu_tilde(ch: CQChannel, prior: Prior, s: float) -> float:
    """-s log2 sum_{i,k} pi_i pi_k |<psi_i|psi_k>|^{2/s}; equals mu at s = 1."""
    s = float(s)
    if s <= 0 or not np.isfinite(s):
        msg = f"mu_tilde needs s > 0, got {s}"
        raise InvalidStateError(msg)
    p = prior.probabilities
    return float(_mu_tilde_values(_squared_overlaps(ch), np.outer(p, p), np.array([s]))[0])


def _best_s(values, low: float, high: float, options: ExponentOptions) -> tuple[float, float]:
    """Grid search on [low, high] with bounded scalar refinement around the best node."""
    grid = np.arange(low, high + options.grid_step / 2, options.grid_step)
    grid[-1] = min(grid[-1], high)
    evaluated = values(grid)
    k = int(np.argmax(evaluated))
    best_value, best_s = float(evaluated[k]), float(grid[k])
    left, right = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    if right > left:
        refined = minimize_scalar(
            lambda s: -float(values(np.array([s]))[0]),
            bounds=(left, right),
            method="bounded",
            options={"xatol": options.refine_tol},
        )
        if refined.success and -refined.fun > best_value:
            best_value, best_s = float(-refined.fun), float(refined.x)
    return best_value, best_s


class _RandomCodingObjective:
    """max_{0<=s<=1} mu(pi, s) - s R and its envelope gradient in pi."""

    def __init__(self, ch: CQChannel, rate: float, options: ExponentOptions):
        self.states = np.stack([s.matrix for s in ch.states])
        self.rate = rate
        self.options = options

    def inner(self, p: np.ndarray) -> tuple[float, float, np.ndarray, np.ndarray]:
        average = np.tensordot(p, self.states, axes=1)
        values, vectors = np.linalg.eigh((average + average.conj().T) / 2)
        values = np.clip(values, 0.0, None)
        positive = values[values > 0]
        value, s = _best_s(lambda grid: _mu_values(positive, grid) - grid * self.rate, 0.0, 1.0, self.options)
        return value, s, values, vectors

    def __call__(self, p: np.ndarray) -> tuple[float, np.ndarray]:
        value, s, values, vectors = self.inner(p)
        powered = np.where(values > 0, values, 0.0) ** s * (values > 0)
        weights = np.real(np.einsum("aj,iab,bj->ij", vectors.conj(), self.states, vectors))
        trace_power = float(np.sum(values[values > 0] ** (1.0 + s)))
        gradient = -(1.0 + s) * (weights @ powered) / (trace_power * LN2)
        return value, gradient


class _ExpurgatedObjective:
    """max_{1<=s<=s_max} mu-tilde(pi, s) - s R and its envelope gradient in pi."""

    def __init__(self, ch: CQChannel, rate: float, options: ExponentOptions):
        self.squared = _squared_overlaps(ch)
        self.rate = rate
        self.options = options

    def inner(self, p: np.ndarray) -> tuple[float, float]:
        weights = np.outer(p, p)
        return _best_s(
            lambda grid: _mu_tilde_values(self.squared, weights, grid) - grid * self.rate,
            1.0,
            self.options.s_max,
            self.options,
        )

    def __call__(self, p: np.ndarray) -> tuple[float, np.ndarray]:
        value, s = self.inner(p)
        kernel = self.squared ** (1.0 / s)
        weighted = kernel @ p
        total = float(p @ weighted)
        return value, -s * 2.0 * weighted / (total * LN2)


def _objective(ch: CQChannel, rate: float, kind: str, options: ExponentOptions):
    if kind == RANDOM:
        return _RandomCodingObjective(ch, rate, options)
    if kind == EXPURGATED:
        return _ExpurgatedObjective(ch, rate, options)
    msg = f"Unknown exponent kind {kind!r}"
    raise InvalidStateError(msg)


def _point(objective, rate: float, p: np.ndarray, options: ExponentOptions, converged: bool) -> ExponentPoint:
    inner = objective.inner(p)
    value, s = inner[0], inner[1]
    saturated = isinstance(objective, _ExpurgatedObjective) and s >= options.s_max - options.grid_step
    return ExponentPoint(
        rate=float(rate),
        value=max(float(value), 0.0),
        s_opt=float(s),
        prior=Prior.from_weights(p),
        saturated=bool(saturated),
        converged=converged,
    )


def _exponent(
    ch: CQChannel,
    rate: float,
    kind: str,
    options: ExponentOptions,
    start: np.ndarray | None = None,
    candidates: list[np.ndarray] | None = None,
) -> ExponentPoint:
    if rate < 0:
        msg = f"Rate must be nonnegative, got {rate}"
        raise InvalidStateError(msg)
    objective = _objective(ch, rate, kind, options)
    size = ch.alphabet_size
    initial = np.full(size, 1.0 / size) if start is None else start
    result = mirror_ascent(objective, initial, options.ascent_options())
    best = _point(objective, rate, result.probabilities, options, result.converged)
    for candidate in candidates or []:
        contender = _point(objective, rate, candidate, options, True)
        if contender.value > best.value:
            best = contender
    if best.saturated:
        logger.warning("Expurgated exponent at R=%.6g hit the s cap %.6g", rate, options.s_max)
    return best


def random_coding_exponent(ch: CQChannel, rate: float, options: ExponentOptions | None = None) -> ExponentPoint:
    """E_r(R) = max_pi max_{0<=s<=1} (mu(pi, s) - s R)."""
    return _exponent(ch, rate, RANDOM, options or ExponentOptions())


def expurgated_exponent(ch: CQChannel, rate: float, options: ExponentOptions | None = None) -> ExponentPoint:
    """E_ex(R) = max_pi max_{1<=s<=s_max} (mu-tilde(pi, s) - s R), pure-state channels only."""
    require_pure(ch)
    return _exponent(ch, rate, EXPURGATED, options or ExponentOptions())


def exponent_curve(
    ch: CQChannel, rates, kind: str = RANDOM, options: ExponentOptions | None = None
) -> ExponentCurve:
    """Exponent over a rate grid.

    Rates are processed from the largest down; each point warm-starts from the previous
    optimizer and also re-evaluates every prior found so far, which makes the curve
    nonincreasing in R.
    """
    options = options or ExponentOptions()
    if kind == EXPURGATED:
        require_pure(ch)
    ordered = sorted({float(r) for r in rates}, reverse=True)
    points = []
    candidates: list[np.ndarray] = []
    start = None
    for rate in ordered:
        point = _exponent(ch, rate, kind, options, start=start, candidates=candidates)
        start = point.prior.probabilities
        candidates.append(start)
        points.append(point)
    return ExponentCurve(kind=kind, points=tuple(reversed(points)))


def theorem1_bound_values(ch: CQChannel, prior: Prior, M: int, n: int, s_values) -> np.ndarray:
    """2 (M-1)^s [Tr S-bar^{1+s}]^n for each s in [0, 1]."""
    require_pure(ch)
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    if np.any((s_values < 0) | (s_values > 1)):
        msg = "The block-error bound needs 0 <= s <= 1"
        raise InvalidStateError(msg)
    eigenvalues = _average_eigenvalues(ch, prior)
    traces = np.power.outer(eigenvalues, 1.0 + s_values).sum(axis=0)
    traces = np.where(s_values == 0, 1.0, traces)
    factors = np.where(s_values == 0, 1.0, float(M - 1) ** s_values)
    return 2.0 * factors * traces**n


def theorem1_bound(ch: CQChannel, prior: Prior, M: int, n: int, s: float | None = None) -> float:
    """Random-coding SRM error bound; minimized over an s grid on [0, 1] when s is None."""
    if s is not None:
        return float(theorem1_bound_values(ch, prior, M, n, [_check_s(s, 0.0, 1.0)])[0])
    return float(theorem1_bound_values(ch, prior, M, n, np.linspace(0.0, 1.0, THEOREM1_S_GRID)).min())


def f_of_z(z, M: int):
    """(2/M) [1 - sqrt(1 + (M-1) z) + (M-1)(1 - sqrt(1 - z))], elementwise."""
    z = np.asarray(z, dtype=float)
    if np.any(z < -1e-12) or np.any(z > 1 + 1e-12):
        msg = "f_of_z is defined for 0 <= z <= 1"
        raise InvalidStateError(msg)
    z = np.clip(z, 0.0, 1.0)
    value = 2.0 / M * (1.0 - np.sqrt(1.0 + (M - 1) * z) + (M - 1) * (1.0 - np.sqrt(1.0 - z)))
    return float(value) if value.ndim == 0 else value


def _compositions(dim: int, n: int):
    """Occupation counts of every multiset of n eigenvalue indices, with multinomial weights."""
    count = math.comb(n + dim - 1, dim - 1)
    if count > enumeration_cap():
        msg = f"{count} eigenvalue compositions exceed the enumeration cap"
        raise ResourceCapError(msg)
    for combination in itertools.combinations_with_replacement(range(dim), n):
        occupation = np.bincount(combination, minlength=dim)
        multiplicity = math.factorial(n)
        for k in occupation:
            multiplicity //= math.factorial(int(k))
        yield occupation, multiplicity


def expected_tight_bound(ch: CQChannel, prior: Prior, n: int, M: int) -> float:
    """Tr f(S-bar^{(x)n}), from products of the spectrum of S-bar.

    Not the random-coding mean of the tight bound: codeword collisions push that mean
    higher (n=1, M=2, overlap 0.5 gives 0.3270 against 0.1931 here). It stays below the
    block-error bound for every s.
    """
    require_pure(ch)
    eigenvalues = np.clip(ensemble_average(ch, prior).spectrum.eigenvalues, 0.0, 1.0)
    total = 0.0
    for occupation, multiplicity in _compositions(eigenvalues.size, n):
        product = float(np.prod(eigenvalues**occupation))
        total += multiplicity * f_of_z(product, M)
    return total


def coarse_bound_expectation(ch: CQChannel, prior: Prior, n: int, M: int) -> float:
    """(M-1) (Tr S-bar^2)^n, the random-coding mean of the coarse bound for pure states."""
    average = ensemble_average(ch, prior)
    purity = float(np.sum(average.spectrum.eigenvalues**2))
    return (M - 1) * purity**n


def gallager_quasiclassical_bound(ch: CQChannel, prior: Prior, M: int, n: int, s: float) -> GallagerBound:
    """(M-1)^s (Tr [sum_i pi_i S_i^{1/(1+s)}]^{1+s})^n.

    A proven bound only for commuting states; for other channels the number is
    reported with quasiclassical=False.
    """
    s = _check_s(s, 0.0, 1.0)
    p = prior.probabilities
    mixture = np.zeros((ch.dim, ch.dim), dtype=complex)
    for weight, state in zip(p, ch.states, strict=True):
        spectrum = state.spectrum
        powered = np.where(spectrum.eigenvalues > ENTROPY_ZERO_CUTOFF, spectrum.eigenvalues, 0.0) ** (1.0 / (1.0 + s))
        mixture += weight * (spectrum.eigenvectors * powered) @ spectrum.eigenvectors.conj().T
    values = np.clip(np.linalg.eigvalsh((mixture + mixture.conj().T) / 2), 0.0, None)
    trace_power = float(np.sum(values ** (1.0 + s)))
    factor = 1.0 if s == 0 else float(M - 1) ** s
    return GallagerBound(value=factor * trace_power**n, quasiclassical=ch.is_quasiclassical)


def typical_coding_estimate(ch: CQChannel, prior: Prior, n: int, M: int, delta: float) -> TypicalCodingEstimate:
    """Random-coding estimate after projecting onto the typical subspace.

    Pure letters: eps + (M-1) 2^{-n(H(S-bar) - delta)}. Mixed letters:
    4 eps + (M-1) 2^{-n(Delta-H - 2 delta)}, with eps the larger of the typical leakage
    and the expected conditional leakage.
    """
    average = ensemble_average(ch, prior)
    typical = typical_projector(average, n, delta, materialize=False)
    if ch.is_pure:
        entropy = von_neumann_entropy(average)
        value = typical.leakage + (M - 1) * 2.0 ** (-n * (entropy - delta))
        return TypicalCodingEstimate(value=float(value), leakage=typical.leakage)
    conditional = expected_conditional_leakage(ch, prior, n, delta)
    eps = max(typical.leakage, conditional)
    value = 4 * eps + (M - 1) * 2.0 ** (-n * (holevo_quantity(ch, prior) - 2 * delta))
    return TypicalCodingEstimate(value=float(value), leakage=typical.leakage, conditional_leakage=conditional)
