"""Channels and random objects shared by the test modules."""

from pathlib import Path

import numpy as np
from scipy.stats import unitary_group

from holevo.quantum.channel import CQChannel, quasiclassical_channel
from holevo.quantum.operators import DensityOperator

FIXTURES = Path(__file__).resolve().parent / "fixtures"

OVERLAP = 0.5


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def overlap_pair() -> CQChannel:
    """Two qubit pure states with <psi_1|psi_2> = 0.5."""
    return CQChannel.from_pure_states([[1.0, 0.0], [OVERLAP, np.sqrt(1 - OVERLAP**2)]])


def orthogonal_pair() -> CQChannel:
    return CQChannel.from_pure_states([[1.0, 0.0], [0.0, 1.0]])


def binary_symmetric(p: float) -> CQChannel:
    return quasiclassical_channel(np.array([[1 - p, p], [p, 1 - p]]))


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityOperator:
    rank = dim if rank is None else rank
    values = np.zeros(dim)
    values[:rank] = rng.dirichlet(np.ones(rank))
    basis = unitary_group.rvs(dim, random_state=rng)
    return DensityOperator((basis * values) @ basis.conj().T)


def random_pure_channel(rng: np.random.Generator, dim: int, letters: int) -> CQChannel:
    vectors = rng.standard_normal((letters, dim)) + 1j * rng.standard_normal((letters, dim))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    return CQChannel.from_pure_states(list(vectors))


def random_mixed_channel(rng: np.random.Generator, dim: int, letters: int) -> CQChannel:
    return CQChannel(states=tuple(random_density(rng, dim) for _ in range(letters)))


def random_quasiclassical(rng: np.random.Generator, dim: int, letters: int) -> CQChannel:
    columns = rng.dirichlet(np.ones(dim), size=letters).T
    return quasiclassical_channel(columns)
