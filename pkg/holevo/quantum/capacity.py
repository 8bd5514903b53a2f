"""
Capacity quantities of a classical-quantum channel.

C-bar (max of the Holevo quantity), the quadratic quantity C-tilde, a lower estimate of
the accessible information C1, the cost-constrained capacity and the photon-channel
closed form. Prior optimization is exponentiated-gradient (mirror) ascent on the
simplex with backtracking, started from the uniform prior.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize
from scipy.special import rel_entr, softmax

from .channel import (
    POVM,
    CQChannel,
    Prior,
    ensemble_average,
    holevo_quantity,
    mutual_information,
    transition_probabilities,
)
from .constants import (
    ACCESSIBLE_RESTARTS,
    ACCESSIBLE_ROUNDS,
    BISECTION_STEPS,
    GRADIENT_TOL,
    INITIAL_STEP,
    MAX_ITERATIONS,
    OPTIMIZER_TOL,
)
from .errors import InfeasibleInputError, InvalidStateError, ShapeMismatchError
from .operators import LN2, entropy_of_eigenvalues, pinv_sqrt_matrix

logger = logging.getLogger(__name__)

LOG_FLOOR = 1e-300
MIN_STEP = 1e-14

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass(frozen=True)
class OptimizerOptions:
    tol: float = OPTIMIZER_TOL
    gradient_tol: float = GRADIENT_TOL
    max_iter: int = MAX_ITERATIONS
    initial_step: float = INITIAL_STEP
    seed: int = 0
    restarts: int = ACCESSIBLE_RESTARTS
    rounds: int = ACCESSIBLE_ROUNDS
    threads: int = 1


@dataclass(frozen=True, eq=False)
class CapacityResult:
    value: float
    optimizer_prior: Prior
    iterations: int
    gradient_norm: float
    converged: bool = True
    details: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class CostConstraint:
    costs: np.ndarray
    budget: float

    def __post_init__(self):
        costs = np.array(self.costs, dtype=float).reshape(-1)
        if costs.size == 0 or not np.all(np.isfinite(costs)) or not np.isfinite(self.budget):
            msg = "Cost constraint needs finite costs and a finite budget"
            raise InvalidStateError(msg)
        costs.setflags(write=False)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "budget", float(self.budget))

    def mean_cost(self, prior: Prior) -> float:
        return float(prior.probabilities @ self.costs)

    def is_feasible(self) -> bool:
        return float(self.costs.min()) <= self.budget


@dataclass
class AscentResult:
    probabilities: np.ndarray
    value: float
    iterations: int
    gradient_norm: float
    gap: float
    converged: bool


def mirror_ascent(objective: Objective, initial: np.ndarray, options: OptimizerOptions) -> AscentResult:
    """Exponentiated-gradient ascent on the probability simplex.

    Stops when the Frank-Wolfe gap max_i g_i - <p, g> drops to options.tol; for a
    concave objective that gap bounds the distance to the maximum.
    """
    p = np.asarray(initial, dtype=float)
    value, grad = objective(p)
    step = options.initial_step
    gap = float(grad.max() - p @ grad)
    iterations = 0
    while gap > options.tol and iterations < options.max_iter and step >= MIN_STEP:
        iterations += 1
        with np.errstate(divide="ignore"):
            logits = np.log(p)
        candidate = softmax(logits + step * (grad - grad.max()))
        candidate_value, candidate_grad = objective(candidate)
        if candidate_value >= value:
            p, value, grad = candidate, candidate_value, candidate_grad
            gap = float(grad.max() - p @ grad)
            step *= 2.0
        else:
            step *= 0.5
    gradient_norm = float(np.linalg.norm(p * (grad - p @ grad)))
    converged = gap <= options.tol or (gradient_norm <= options.gradient_tol and gap <= 10 * options.tol)
    return AscentResult(p, float(value), iterations, gradient_norm, gap, converged)


def _letter_matrices(ch: CQChannel) -> np.ndarray:
    return np.stack([s.matrix for s in ch.states])


def holevo_objective(ch: CQChannel) -> Objective:
    """Delta-H and its gradient; the gradient entry for letter i is D(S_i||S-bar) up to a constant."""
    states = _letter_matrices(ch)
    entropies = ch.entropies

    def evaluate(p: np.ndarray) -> tuple[float, np.ndarray]:
        average = np.tensordot(p, states, axes=1)
        values, vectors = np.linalg.eigh((average + average.conj().T) / 2)
        values = np.clip(values, 0.0, None)
        weights = np.real(np.einsum("aj,iab,bj->ij", vectors.conj(), states, vectors))
        log_values = np.log2(np.maximum(values, LOG_FLOOR))
        gradient = -weights @ log_values - entropies
        return entropy_of_eigenvalues(values) - float(p @ entropies), gradient

    return evaluate


def _ascend_from_uniform(objective: Objective, size: int, options: OptimizerOptions) -> AscentResult:
    return mirror_ascent(objective, np.full(size, 1.0 / size), options)


def maximize_holevo(ch: CQChannel, options: OptimizerOptions | None = None) -> CapacityResult:
    """C-bar = max over priors of the Holevo quantity."""
    options = options or OptimizerOptions()
    if ch.alphabet_size == 1:
        return CapacityResult(0.0, Prior.point_mass(1, 0), 0, 0.0)
    result = _ascend_from_uniform(holevo_objective(ch), ch.alphabet_size, options)
    if not result.converged:
        logger.warning(
            "maximize_holevo stopped after %s iterations with optimality gap %.3e", result.iterations, result.gap
        )
    logger.info("C-bar = %.9f bits after %s iterations", result.value, result.iterations)
    return CapacityResult(
        value=max(result.value, 0.0),
        optimizer_prior=Prior.from_weights(result.probabilities),
        iterations=result.iterations,
        gradient_norm=result.gradient_norm,
        converged=result.converged,
        details={"optimality_gap": result.gap},
    )


def c_tilde(ch: CQChannel, options: OptimizerOptions | None = None) -> CapacityResult:
    """C-tilde = -log2 min over priors of Tr S-bar^2 (= sum pi_i pi_j Tr S_i S_j)."""
    options = options or OptimizerOptions()
    products = ch.trace_products

    def evaluate(p: np.ndarray) -> tuple[float, np.ndarray]:
        weighted = products @ p
        return -float(p @ weighted), -2.0 * weighted

    result = _ascend_from_uniform(evaluate, ch.alphabet_size, options)
    purity = -result.value
    return CapacityResult(
        value=max(-float(np.log2(purity)), 0.0),
        optimizer_prior=Prior.from_weights(result.probabilities),
        iterations=result.iterations,
        gradient_norm=result.gradient_norm,
        converged=result.converged,
        details={"min_purity": purity},
    )


def blahut_arimoto(
    transition: np.ndarray,
    initial: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = MAX_ITERATIONS,
) -> tuple[float, Prior]:
    """Capacity of the classical channel P(j|i) (rows = inputs) and its optimal prior."""
    transition = np.asarray(transition, dtype=float)
    size = transition.shape[0]
    p = np.full(size, 1.0 / size) if initial is None else np.asarray(initial, dtype=float)
    value = 0.0
    for _ in range(max_iter):
        output = p @ transition
        divergence = np.where(output > 0, rel_entr(transition, output), 0.0).sum(axis=1) / LN2
        divergence = np.nan_to_num(divergence, nan=0.0, posinf=1e6)
        value = float(p @ divergence)
        if divergence.max() - value <= tol:
            break
        p = p * np.exp2(divergence - divergence.max())
        p /= p.sum()
    return value, Prior.from_weights(p)


def _povm_vectors(params: np.ndarray, dim: int, outcomes: int) -> np.ndarray:
    """Columns phi_j of a rank-1 POVM, normalized so sum_j |phi_j><phi_j| = I."""
    half = dim * outcomes
    kets = (params[:half] + 1j * params[half:]).reshape(dim, outcomes)
    frame = kets @ kets.conj().T
    return pinv_sqrt_matrix((frame + frame.conj().T) / 2) @ kets


def _encode(kets: np.ndarray) -> np.ndarray:
    return np.concatenate([kets.real.reshape(-1), kets.imag.reshape(-1)])


def _transition_for(states: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    probabilities = np.real(np.einsum("aj,iab,bj->ij", vectors.conj(), states, vectors))
    return np.clip(probabilities, 0.0, 1.0)


def _seed_measurements(ch: CQChannel, outcomes: int, rng: np.random.Generator, restarts: int) -> list[np.ndarray]:
    dim = ch.dim
    seeds = []

    def padded(columns: np.ndarray) -> np.ndarray:
        kets = np.zeros((dim, outcomes), dtype=complex)
        kets[:, : columns.shape[1]] = columns
        return kets

    seeds.append(padded(np.eye(dim, dtype=complex)))
    average = ensemble_average(ch, Prior.uniform(ch.alphabet_size))
    seeds.append(padded(average.spectrum.eigenvectors))
    if ch.is_pure and ch.alphabet_size <= outcomes:
        letters = np.stack([v.vector for v in ch.vectors], axis=1)
        gram_operator = letters @ letters.conj().T
        values, vectors = np.linalg.eigh(gram_operator)
        complement = vectors[:, values <= dim * 1e-12 * max(values[-1], 1.0)]
        columns = np.concatenate([letters, complement], axis=1)[:, :outcomes]
        seeds.append(padded(columns))
    seeds.extend(
        rng.standard_normal((dim, outcomes)) + 1j * rng.standard_normal((dim, outcomes)) for _ in range(restarts)
    )
    return seeds


@dataclass
class AlternationRun:
    value: float
    prior: Prior
    vectors: np.ndarray
    rounds: int
    gradient_norm: float
    converged: bool


def _alternate(states: np.ndarray, kets: np.ndarray, options: OptimizerOptions) -> AlternationRun:
    """Alternate measurement fits and Arimoto steps until a round stops improving.

    Converged means the last round brought no gain and its L-BFGS fit reported
    success; gradient_norm is the norm of that fit's gradient.
    """
    dim, outcomes = kets.shape
    params = _encode(kets)
    vectors = _povm_vectors(params, dim, outcomes)
    best_value, prior = blahut_arimoto(_transition_for(states, vectors))
    best_vectors = vectors
    rounds = 0
    gradient_norm = float("inf")
    converged = False
    for rounds in range(1, options.rounds + 1):
        fixed = prior

        def negative_information(x: np.ndarray, fixed: Prior = fixed) -> float:
            return -mutual_information(fixed, _transition_for(states, _povm_vectors(x, dim, outcomes)))

        fitted = minimize(negative_information, params, method="L-BFGS-B", options={"maxiter": 200})
        gradient_norm = float(np.linalg.norm(fitted.jac))
        params = fitted.x
        vectors = _povm_vectors(params, dim, outcomes)
        value, candidate = blahut_arimoto(_transition_for(states, vectors), initial=prior.probabilities)
        if value <= best_value + 1e-12:
            converged = bool(fitted.success)
            break
        best_value, prior, best_vectors = value, candidate, vectors
    else:
        logger.warning("Measurement search still improving after %s rounds", options.rounds)
    return AlternationRun(best_value, prior, best_vectors, rounds, gradient_norm, converged)


def accessible_information(ch: CQChannel, options: OptimizerOptions | None = None) -> CapacityResult:
    """Certified lower estimate of C1 = sup over priors and POVMs of I1(pi, X).

    Alternates rank-1 POVM optimization with dim**2 outcomes (L-BFGS on the outcome
    vectors, square-root normalized) and Arimoto updates of the prior. The value is the
    information of an explicit valid POVM, so it never exceeds C1; no global
    optimality is claimed.
    """
    options = options or OptimizerOptions()
    outcomes = ch.dim**2
    rng = np.random.default_rng(options.seed)
    seeds = _seed_measurements(ch, outcomes, rng, options.restarts)
    states = _letter_matrices(ch)

    runs = Parallel(n_jobs=max(options.threads, 1), prefer="threads")(
        delayed(_alternate)(states, kets, options) for kets in seeds
    )
    index = max(range(len(runs)), key=lambda k: (runs[k].value, -k))
    best = runs[index]
    povm = POVM.from_vectors(best.vectors.T)
    value = mutual_information(best.prior, transition_probabilities(ch, povm))
    logger.info(
        "C1 lower estimate = %.9f bits (restart %s of %s, converged=%s)", value, index, len(runs), best.converged
    )
    return CapacityResult(
        value=max(value, 0.0),
        optimizer_prior=best.prior,
        iterations=sum(run.rounds for run in runs),
        gradient_norm=best.gradient_norm,
        converged=best.converged,
        details={"povm": povm, "restart": index, "outcomes": outcomes},
    )


def _sub_channel(ch: CQChannel, letters: np.ndarray) -> CQChannel:
    return CQChannel(
        states=tuple(ch.states[i] for i in letters),
        vectors=tuple(ch.vectors[i] for i in letters),
    )


def constrained_capacity(
    ch: CQChannel, constraint: CostConstraint, options: OptimizerOptions | None = None
) -> CapacityResult:
    """Sup of the Holevo quantity over priors with sum_i pi_i f_i <= E.

    Solved through the Lagrangian Delta-H(pi) - r (sum_i pi_i f_i - E), bisecting on
    the multiplier r >= 0.
    """
    options = options or OptimizerOptions()
    costs, budget = constraint.costs, constraint.budget
    if costs.size != ch.alphabet_size:
        msg = f"Cost vector has {costs.size} entries but the channel has {ch.alphabet_size} letters"
        raise ShapeMismatchError(msg)
    if not constraint.is_feasible():
        msg = f"Budget {budget} is below the cheapest letter cost {costs.min()}"
        raise InfeasibleInputError(msg)

    unconstrained = maximize_holevo(ch, options)
    if constraint.mean_cost(unconstrained.optimizer_prior) <= budget:
        return CapacityResult(
            value=unconstrained.value,
            optimizer_prior=unconstrained.optimizer_prior,
            iterations=unconstrained.iterations,
            gradient_norm=unconstrained.gradient_norm,
            converged=unconstrained.converged,
            details={"multiplier": 0.0, "active": False},
        )

    cheapest = np.flatnonzero(costs <= costs.min() + 1e-12)
    if budget <= costs.min() + 1e-12:
        restricted = maximize_holevo(_sub_channel(ch, cheapest), options)
        weights = np.zeros(ch.alphabet_size)
        weights[cheapest] = restricted.optimizer_prior.probabilities
        prior = Prior.from_weights(weights)
        return CapacityResult(
            value=holevo_quantity(ch, prior),
            optimizer_prior=prior,
            iterations=restricted.iterations,
            gradient_norm=restricted.gradient_norm,
            converged=restricted.converged,
            details={"multiplier": float("inf"), "active": True},
        )

    base = holevo_objective(ch)

    def solve(multiplier: float) -> AscentResult:
        def penalized(p: np.ndarray) -> tuple[float, np.ndarray]:
            value, grad = base(p)
            return value - multiplier * (float(p @ costs) - budget), grad - multiplier * costs

        return _ascend_from_uniform(penalized, ch.alphabet_size, options)

    low, high = 0.0, 1.0
    feasible = solve(high)
    iterations = feasible.iterations
    while float(feasible.probabilities @ costs) > budget:
        low, high = high, 2.0 * high
        feasible = solve(high)
        iterations += feasible.iterations
    for _ in range(BISECTION_STEPS):
        if high - low <= 1e-12 * (1.0 + high):
            break
        middle = 0.5 * (low + high)
        candidate = solve(middle)
        iterations += candidate.iterations
        if float(candidate.probabilities @ costs) <= budget:
            high, feasible = middle, candidate
        else:
            low = middle
        if budget - float(feasible.probabilities @ costs) <= 1e-12:
            break

    prior = Prior.from_weights(feasible.probabilities)
    value = holevo_quantity(ch, prior)
    logger.info("Constrained C-bar = %.9f bits at multiplier %.6g", value, high)
    return CapacityResult(
        value=max(value, 0.0),
        optimizer_prior=prior,
        iterations=iterations,
        gradient_norm=feasible.gradient_norm,
        converged=feasible.converged,
        details={"multiplier": high, "active": True},
    )


def tilted_prior(prior: Prior, constraint: CostConstraint, multiplier: float | None = None) -> Prior:
    """pi_i * exp(-r f_i), normalized.

    Without an explicit multiplier, r >= 0 is the smallest value bringing the mean
    cost down to the budget.
    """
    costs = constraint.costs
    if costs.size != prior.size:
        msg = f"Cost vector has {costs.size} entries but the prior has {prior.size}"
        raise ShapeMismatchError(msg)

    def tilt(r: float) -> Prior:
        logits = np.log(np.maximum(prior.probabilities, LOG_FLOOR)) - r * (costs - costs.min())
        weights = np.where(prior.probabilities > 0, np.exp(logits - logits.max()), 0.0)
        return Prior.from_weights(weights)

    if multiplier is not None:
        return tilt(multiplier)
    if constraint.mean_cost(prior) <= constraint.budget:
        return prior
    low, high = 0.0, 1.0
    while constraint.mean_cost(tilt(high)) > constraint.budget:
        low, high = high, 2.0 * high
        if high > 1e12:
            msg = "No tilt of the prior meets the budget"
            raise InfeasibleInputError(msg)
    for _ in range(BISECTION_STEPS):
        middle = 0.5 * (low + high)
        if constraint.mean_cost(tilt(middle)) > constraint.budget:
            low = middle
        else:
            high = middle
    return tilt(high)


def photon_capacity(noise: float, energy: float, hbar: float = 1.0) -> float:
    """Infinite-band photon channel capacity pi*sqrt(2/3)*(sqrt((N+E)/hbar) - sqrt(N/hbar)), nats per unit time."""
    if noise < 0 or energy < 0 or hbar <= 0:
        msg = "photon_capacity needs noise >= 0, energy >= 0 and hbar > 0"
        raise InvalidStateError(msg)
    return float(np.pi * np.sqrt(2.0 / 3.0) * (np.sqrt((noise + energy) / hbar) - np.sqrt(noise / hbar)))


def beta_from_noise(noise: float, hbar: float = 1.0) -> float:
    """Inverse temperature beta with N = hbar * pi**2 / (6 * beta**2)."""
    if noise < 0 or hbar <= 0:
        msg = "beta_from_noise needs noise >= 0 and hbar > 0"
        raise InvalidStateError(msg)
    if noise == 0:
        return float("inf")
    return float(np.pi * np.sqrt(hbar / (6.0 * noise)))
