"""
Random-coding experiments.

Codebooks are drawn letter by letter from the prior (optionally conditioned on an
additive cost budget), decoded with the square-root measurement (pure letters) or the
projected mixed-state rule, and the exact average errors are compared with the
analytic bounds. Each trial owns a generator seeded from (seed, trial index), and
per-trial rows are aggregated in trial order, so reports do not depend on the number
of worker threads.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .capacity import CostConstraint, tilted_prior
from .channel import CQChannel, Prior, all_words, average_state_power, ensemble_average, product_prior, word_state
from .coding import (
    Codebook,
    average_error,
    coarse_bound,
    decode_mixed,
    gram,
    srm,
    srm_error,
    tight_bound,
    tight_bound_squared,
    typical_projector,
)
from .constants import (
    CONSTRAINED_MIN_ACCEPTANCE,
    INVARIANT_SAMPLE_EVERY,
    THEOREM1_S_GRID,
    TRIAL_BLOCK_SIZE,
    enumeration_cap,
    max_threads,
)
from .errors import (
    InfeasibleInputError,
    InvalidStateError,
    InvariantViolationError,
    ResourceCapError,
    ShapeMismatchError,
)
from .exponents import (
    coarse_bound_expectation,
    expected_tight_bound,
    gallager_quasiclassical_bound,
    theorem1_bound_values,
    typical_coding_estimate,
)
from .operators import check_dimension

logger = logging.getLogger(__name__)

INVARIANT_SLACK = 1e-8
COARSE_SLACK = 1e-9
COST_SLACK = 1e-12
REPORTED_S = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    channel: CQChannel
    prior: Prior
    n: int
    M: int
    trials: int
    seed: int = 0
    delta: float | None = None
    constraint: CostConstraint | None = None
    tilted: bool = False
    threads: int = 1
    keep_per_trial: bool = False

    def __post_init__(self):
        if self.n < 1 or self.M < 1 or self.trials < 1:
            msg = f"n, M and trials must be positive (got n={self.n}, M={self.M}, trials={self.trials})"
            raise InvalidStateError(msg)
        if not 0 <= int(self.seed) < 2**64:
            msg = f"Seed must be an unsigned 64-bit integer, got {self.seed}"
            raise InvalidStateError(msg)
        if self.prior.size != self.channel.alphabet_size:
            msg = f"Prior has {self.prior.size} entries but the channel has {self.channel.alphabet_size} letters"
            raise ShapeMismatchError(msg)
        if not self.channel.is_pure and self.delta is None:
            msg = "Simulating a channel with mixed letters needs a typicality delta"
            raise InvalidStateError(msg)
        check_dimension(self.channel.dim**self.n)


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    empirical_mean_error: float
    standard_error: float
    bound_values: dict[str, float]
    statistics: dict[str, float] = field(default_factory=dict)
    per_trial: pd.DataFrame | None = None


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(trial),)))


def sample_codebook(prior: Prior, n: int, M: int, rng: np.random.Generator) -> Codebook:
    """M words of n letters, each letter drawn independently from the prior."""
    letters = rng.choice(prior.size, size=(M, n), p=prior.probabilities)
    return Codebook.from_letters(letters)


def acceptance_probability(prior: Prior, constraint: CostConstraint, n: int) -> float:
    """P(f(x_1) + ... + f(x_n) <= nE) under the product prior, by dynamic programming over cost sums."""
    budget = n * constraint.budget + COST_SLACK
    distribution = {0.0: 1.0}
    for _ in range(n):
        following: dict[float, float] = defaultdict(float)
        for total, weight in distribution.items():
            for cost, p in zip(constraint.costs, prior.probabilities, strict=True):
                if p > 0:
                    following[round(total + float(cost), 12)] += weight * float(p)
        distribution = following
        if len(distribution) > enumeration_cap():
            msg = "Too many distinct cost sums to compute the acceptance probability"
            raise ResourceCapError(msg)
    return float(sum(w for total, w in distribution.items() if total <= budget))


def constrained_sample_codebook(
    prior: Prior,
    n: int,
    M: int,
    constraint: CostConstraint,
    rng: np.random.Generator,
    tilted: bool = False,
) -> tuple[Codebook, int]:
    """Rejection sampling of words with sum_t f(x_t) <= nE; returns the codebook and the rejection count.

    With tilted=True words are proposed from the exponentially tilted prior, so the
    accepted words follow the tilted product measure restricted to the budget.
    """
    if constraint.costs.size != prior.size:
        msg = f"Cost vector has {constraint.costs.size} entries but the prior has {prior.size}"
        raise ShapeMismatchError(msg)
    if not constraint.is_feasible():
        msg = f"Budget {constraint.budget} is below the cheapest letter cost {constraint.costs.min()}"
        raise InfeasibleInputError(msg)
    proposal = tilted_prior(prior, constraint) if tilted else prior
    acceptance = acceptance_probability(proposal, constraint, n)
    if acceptance < CONSTRAINED_MIN_ACCEPTANCE:
        msg = f"Acceptance probability {acceptance:.3e} is below {CONSTRAINED_MIN_ACCEPTANCE:g}"
        raise InfeasibleInputError(msg)
    if acceptance < 1e-2:
        logger.warning("Constrained sampler acceptance is low (%.3e)", acceptance)

    limit = n * constraint.budget + COST_SLACK
    accepted: list[np.ndarray] = []
    rejections = 0
    block = int(min(max(2 * M / acceptance, 64), 1_000_000))
    while len(accepted) < M:
        letters = rng.choice(proposal.size, size=(block, n), p=proposal.probabilities)
        feasible = constraint.costs[letters].sum(axis=1) <= limit
        for row, ok in zip(letters, feasible, strict=True):
            if len(accepted) == M:
                break
            if ok:
                accepted.append(row)
            else:
                rejections += 1
    return Codebook.from_letters(np.stack(accepted)), rejections


def verify_expectation(ch: CQChannel, prior: Prior, n: int) -> float:
    """Max-norm deviation between sum_w P(w) S_w and S-bar^{(x)n}."""
    words = all_words(ch.alphabet_size, n)
    weights = product_prior(prior, n).probabilities
    check_dimension(ch.dim**n)
    total = np.zeros((ch.dim**n,) * 2, dtype=complex)
    for weight, word in zip(weights, words, strict=True):
        if weight > 0:
            total += weight * word_state(ch, word).matrix
    expected = average_state_power(ch, prior, n).matrix
    return float(np.max(np.abs(total - expected)))


def _violation(message: str, trial: int) -> None:
    msg = f"Trial {trial}: {message}"
    logger.error(msg)
    raise InvariantViolationError(msg)


def _draw(cfg: ExperimentConfig, rng: np.random.Generator) -> tuple[Codebook, int]:
    if cfg.constraint is None:
        return sample_codebook(cfg.prior, cfg.n, cfg.M, rng), 0
    return constrained_sample_codebook(cfg.prior, cfg.n, cfg.M, cfg.constraint, rng, tilted=cfg.tilted)


def _pure_trial(cfg: ExperimentConfig, trial: int) -> dict:
    codebook, rejections = _draw(cfg, trial_rng(cfg.seed, trial))
    data = gram(cfg.channel, codebook)
    error = srm_error(data)
    tight = tight_bound(data)
    coarse = coarse_bound(data)
    if trial % INVARIANT_SAMPLE_EVERY == 0:
        exact = average_error(cfg.channel, codebook, srm(cfg.channel, codebook))
        if abs(exact - error) > INVARIANT_SLACK:
            _violation(f"SRM error {exact:.12g} differs from the Gram formula {error:.12g}", trial)
        if exact > tight + INVARIANT_SLACK:
            _violation(f"SRM error {exact:.12g} exceeds the tight bound {tight:.12g}", trial)
        if tight_bound_squared(data) > coarse + COARSE_SLACK:
            _violation(f"tight bound exceeds the coarse bound {coarse:.12g}", trial)
    return {"trial": trial, "error": error, "tight_bound": tight, "coarse_bound": coarse, "rejections": rejections}


def _mixed_trial(cfg: ExperimentConfig, trial: int) -> dict:
    codebook, rejections = _draw(cfg, trial_rng(cfg.seed, trial))
    decoder = decode_mixed(cfg.channel, cfg.prior, codebook, cfg.delta)
    if decoder.exact_error > decoder.bound + INVARIANT_SLACK:
        _violation(f"rule error {decoder.exact_error:.12g} exceeds the estimate {decoder.bound:.12g}", trial)
    return {"trial": trial, "error": decoder.exact_error, "bound19": decoder.bound, "rejections": rejections}


def _run_block(cfg: ExperimentConfig, trials: range) -> list[dict]:
    run = _pure_trial if cfg.channel.is_pure else _mixed_trial
    return [run(cfg, trial) for trial in trials]


def _analytic_bounds(cfg: ExperimentConfig) -> dict[str, float]:
    ch, prior, n, M = cfg.channel, cfg.prior, cfg.n, cfg.M
    bounds: dict[str, float] = {}
    grid = np.linspace(0.0, 1.0, THEOREM1_S_GRID)
    gallager = np.array([gallager_quasiclassical_bound(ch, prior, M, n, s).value for s in grid])
    bounds["gallager_min"] = float(gallager.min())
    bounds["gallager_s_opt"] = float(grid[int(np.argmin(gallager))])
    if ch.is_pure:
        values = theorem1_bound_values(ch, prior, M, n, grid)
        bounds["theorem1_min"] = float(values.min())
        bounds["theorem1_s_opt"] = float(grid[int(np.argmin(values))])
        for s, value in zip(REPORTED_S, theorem1_bound_values(ch, prior, M, n, REPORTED_S), strict=True):
            bounds[f"theorem1_s={s:g}"] = float(value)
        bounds["expected_tight_bound"] = expected_tight_bound(ch, prior, n, M)
        bounds["coarse_expectation"] = coarse_bound_expectation(ch, prior, n, M)
    if cfg.delta is not None:
        bounds["typical_estimate"] = typical_coding_estimate(ch, prior, n, M, cfg.delta).value
    return bounds


def _mean_and_sem(column: pd.Series) -> tuple[float, float]:
    mean = float(column.mean())
    sem = float(column.sem()) if len(column) > 1 else 0.0
    return mean, sem


def estimate_expected_error(cfg: ExperimentConfig) -> ExperimentReport:
    threads = max(1, min(cfg.threads, max_threads()))
    logger.info(
        "Simulating %s trials (n=%s, M=%s, seed=%s) on %s thread(s)", cfg.trials, cfg.n, cfg.M, cfg.seed, threads
    )
    blocks = [range(start, min(start + TRIAL_BLOCK_SIZE, cfg.trials)) for start in range(0, cfg.trials, TRIAL_BLOCK_SIZE)]
    results = Parallel(n_jobs=threads, prefer="threads")(delayed(_run_block)(cfg, block) for block in blocks)
    frame = pd.DataFrame([row for block in results for row in block])

    mean_error, sem_error = _mean_and_sem(frame["error"])
    statistics = {"trials": float(cfg.trials), "rejections": float(frame["rejections"].sum())}
    if cfg.channel.is_pure:
        mean_tight, sem_tight = _mean_and_sem(frame["tight_bound"])
        mean_coarse, sem_coarse = _mean_and_sem(frame["coarse_bound"])
        statistics.update(
            {
                "mean_tight_bound": mean_tight,
                "tight_bound_standard_error": sem_tight,
                "mean_coarse_bound": mean_coarse,
                "coarse_bound_standard_error": sem_coarse,
            }
        )
        if mean_tight > 0:
            statistics["coarse_tight_ratio"] = mean_coarse / mean_tight
    else:
        mean_bound, sem_bound = _mean_and_sem(frame["bound19"])
        statistics.update({"mean_bound19": mean_bound, "bound19_standard_error": sem_bound})

    logger.info("Mean error %.6g +/- %.3g over %s trials", mean_error, sem_error, cfg.trials)
    return ExperimentReport(
        empirical_mean_error=float(np.clip(mean_error, 0.0, 1.0)),
        standard_error=sem_error,
        bound_values=_analytic_bounds(cfg),
        statistics=statistics,
        per_trial=frame if cfg.keep_per_trial else None,
    )


def typicality_sweep(ch: CQChannel, prior: Prior, delta: float, n_values) -> pd.DataFrame:
    """Per n: leakage Tr S^{(x)n}(I - P), norm of S^{(x)n} P and the bound 2^{-n(H - delta)}."""
    average = ensemble_average(ch, prior)
    rows = []
    for n in n_values:
        typical = typical_projector(average, int(n), delta, materialize=False)
        bound = typical.window[1]
        if not typical.empty and not typical.largest_selected < bound:
            msg = f"n={n}: largest typical eigenvalue {typical.largest_selected:.12g} is not below {bound:.12g}"
            raise InvariantViolationError(msg)
        logger.info("n=%s leakage=%.6g typical dimension=%s", n, typical.leakage, typical.selected_indices.size)
        rows.append(
            {
                "n": int(n),
                "leakage": typical.leakage,
                "norm": typical.largest_selected,
                "bound": bound,
                "typical_dimension": int(typical.selected_indices.size),
            }
        )
    return pd.DataFrame(rows, columns=["n", "leakage", "norm", "bound", "typical_dimension"])
