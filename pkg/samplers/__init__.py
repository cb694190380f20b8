# Temporal samplers built on race-logic primitives

from .bernoulli import bernoulli_delay, biased_coin, temporal_bernoulli
from .exponential_clocks import (
    WeightedDie,
    characteristic_current,
    currents_for_weights,
    currents_to_rates,
    weighted_sample,
    weighted_samples,
)
from .ising import (
    IsingProblem,
    chain_distribution,
    enumerate_boltzmann,
    ferromagnetic_grid,
    ising_mh_chain,
    random_couplings,
    state_index,
    total_variation,
)
from .metropolis import acceptance_probability, mh_accept

__all__ = [
    "bernoulli_delay",
    "biased_coin",
    "temporal_bernoulli",
    "WeightedDie",
    "characteristic_current",
    "currents_for_weights",
    "currents_to_rates",
    "weighted_sample",
    "weighted_samples",
    "IsingProblem",
    "chain_distribution",
    "enumerate_boltzmann",
    "ferromagnetic_grid",
    "ising_mh_chain",
    "random_couplings",
    "state_index",
    "total_variation",
    "acceptance_probability",
    "mh_accept",
]
