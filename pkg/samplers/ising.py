"""
Ising model Metropolis-Hastings chain driven by temporal acceptance.

Spins are stored as booleans (True = +1). Energy is
E(s) = -1/2 sum_ij J_ij s_i s_j - sum_i h_i s_i, so flipping spin i costs
dE_i = 2 s_i (sum_j J_ij s_j + h_i). Proposals are uniform single-spin flips.
"""

import itertools
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from samplers.metropolis import mh_accept
from utils.errors import DomainError


class IsingProblem(BaseModel):
    """Couplings, fields and temperature of an Ising model."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    couplings: List[List[float]] = Field(..., description="Symmetric J with zero diagonal")
    fields: List[float] = Field(..., description="Local fields h")
    beta: float = Field(..., gt=0, description="Inverse temperature")
    w: float = Field(1.0, gt=0, description="Power scale of the temporal embedding")

    @model_validator(mode="after")
    def _check_shapes(self) -> "IsingProblem":
        n = len(self.fields)
        if n == 0:
            raise ValueError("at least one spin is required")
        j = np.asarray(self.couplings, dtype=float)
        if j.shape != (n, n):
            raise ValueError(f"couplings must be {n}x{n}, got {j.shape}")
        if not np.array_equal(j, j.T):
            raise ValueError("couplings must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("couplings must have a zero diagonal")
        return self

    @property
    def n_spins(self) -> int:
        return len(self.fields)

    @property
    def j_matrix(self) -> np.ndarray:
        return np.asarray(self.couplings, dtype=float)

    @property
    def h_vector(self) -> np.ndarray:
        return np.asarray(self.fields, dtype=float)


def to_spins(state: Sequence[bool]) -> np.ndarray:
    """Booleans to +/-1."""
    return np.where(np.asarray(state, dtype=bool), 1.0, -1.0)


def state_index(state: Sequence[bool]) -> int:
    """Enumeration index: bit k is set when spin k is up."""
    return sum(1 << k for k, up in enumerate(state) if up)


def index_to_state(index: int, n_spins: int) -> np.ndarray:
    return np.array([(index >> k) & 1 == 1 for k in range(n_spins)], dtype=bool)


def energy(problem: IsingProblem, state: Sequence[bool]) -> float:
    s = to_spins(state)
    return float(-0.5 * s @ problem.j_matrix @ s - problem.h_vector @ s)


def flip_energy(problem: IsingProblem, state: Sequence[bool], i: int) -> float:
    """Energy change of flipping spin ``i``."""
    s = to_spins(state)
    return float(2.0 * s[i] * (problem.j_matrix[i] @ s + problem.h_vector[i]))


def enumerate_boltzmann(problem: IsingProblem) -> np.ndarray:
    """
    Exact Boltzmann probabilities of all 2**n states, indexed by state_index.

    Raises:
        DomainError: Above 20 spins.
    """
    n = problem.n_spins
    if n > 20:
        raise DomainError(f"enumeration of {n} spins is too large")
    energies = np.array([energy(problem, index_to_state(k, n)) for k in range(1 << n)])
    weights = np.exp(-problem.beta * (energies - energies.min()))
    return weights / weights.sum()


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))))


def ising_mh_chain(
    problem: IsingProblem,
    initial: Sequence[bool],
    n_steps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Run a serial single-flip Metropolis-Hastings chain.

    Args:
        problem: Ising model.
        initial: Starting spins (True = up).
        n_steps: Number of proposals.
        rng: Stream for proposals and acceptance delays.

    Returns:
        Boolean array of shape (n_steps, n_spins); row k is the state after step k.
    """
    if n_steps < 1:
        raise DomainError(f"n_steps must be >= 1, got {n_steps}")
    n = problem.n_spins
    if len(initial) != n:
        raise DomainError(f"initial state has {len(initial)} spins, problem has {n}")

    couplings = [list(row) for row in problem.j_matrix]
    fields = list(problem.h_vector)
    spins = [1.0 if up else -1.0 for up in initial]
    beta, w = problem.beta, problem.w

    proposals = rng.integers(0, n, size=n_steps)
    visited = np.empty(n_steps, dtype=np.int64)
    index = state_index(initial)

    for step in range(n_steps):
        i = int(proposals[step])
        row = couplings[i]
        local = fields[i]
        for j in range(n):
            local += row[j] * spins[j]
        delta_e = 2.0 * spins[i] * local
        if mh_accept(delta_e, beta, w, rng):
            spins[i] = -spins[i]
            index ^= 1 << i
        visited[step] = index

    bits = np.arange(n)
    return ((visited[:, None] >> bits) & 1).astype(bool)


def chain_distribution(chain: np.ndarray, burn_in: int = 0) -> np.ndarray:
    """Empirical state frequencies of a chain after discarding ``burn_in`` rows."""
    n = chain.shape[1]
    kept = chain[burn_in:]
    if kept.shape[0] == 0:
        raise DomainError("burn-in discards the whole chain")
    indices = kept.astype(np.int64) @ (1 << np.arange(n))
    counts = np.bincount(indices, minlength=1 << n)
    return counts / counts.sum()


def ferromagnetic_grid(rows: int, cols: int, coupling: float = 1.0, field: float = 0.0, beta: float = 1.0,
                       w: float = 1.0) -> IsingProblem:
    """Open-boundary nearest-neighbour grid, spins numbered row-major."""
    n = rows * cols
    j = np.zeros((n, n))
    for r, c in itertools.product(range(rows), range(cols)):
        k = r * cols + c
        if c + 1 < cols:
            j[k, k + 1] = j[k + 1, k] = coupling
        if r + 1 < rows:
            j[k, k + cols] = j[k + cols, k] = coupling
    return IsingProblem(couplings=j.tolist(), fields=[field] * n, beta=beta, w=w)


def random_couplings(n: int, seed: int, beta: float = 1.0, scale: float = 1.0,
                     field_scale: float = 0.0, w: float = 1.0) -> IsingProblem:
    """Gaussian couplings (and optionally fields) drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.normal(0.0, scale, size=(n, n)), k=1)
    j = upper + upper.T
    h = rng.normal(0.0, field_scale, size=n) if field_scale > 0 else np.zeros(n)
    return IsingProblem(couplings=j.tolist(), fields=h.tolist(), beta=beta, w=w)


def boltzmann_sample(problem: IsingProblem, rng: np.random.Generator, size: Optional[int] = None):
    """Exact Boltzmann draw(s) of state indices by enumeration."""
    probabilities = enumerate_boltzmann(problem)
    return rng.choice(probabilities.size, size=size, p=probabilities)
