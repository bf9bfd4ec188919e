"""
Probe states and Monte Carlo value estimates used as ground truth.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sparse_representation_control import settings
from sparse_representation_control.environments import (
    DomainType,
    make_data_policy,
    make_environment,
)
from sparse_representation_control.utils import make_rng

logger = logging.getLogger(__name__)

# Diagonal plus corners of the unit square
PROBES_2D = ((0.1, 0.1), (0.9, 0.1), (0.5, 0.5), (0.1, 0.9), (0.9, 0.9))
PROBE_DIAGONAL = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass
class ProbeSet:
    """(observation, action) pairs; an action of None probes the state value."""

    domain: DomainType
    observations: np.ndarray
    actions: list = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        self.domain = DomainType.from_name(self.domain)
        self.observations = np.atleast_2d(np.asarray(self.observations, dtype=float))
        if not self.actions:
            self.actions = [None] * len(self.observations)
        if len(self.actions) != len(self.observations):
            raise ValueError("Need one action (or None) per probe observation.")

    def __len__(self):
        return len(self.observations)

    def __iter__(self):
        return iter(zip(self.observations, self.actions))

    def __getitem__(self, key):
        return self.observations[key], self.actions[key]

    @property
    def names(self) -> list:
        return [f"probe_{ii}" for ii in range(len(self))]


def default_probes(domain, n_actions: Optional[int] = None) -> ProbeSet:
    """5 probes spread over the normalized state space, actions cycling
    through the action set."""
    environment = make_environment(domain)
    if environment.dimension == 2:
        observations = np.array(PROBES_2D)
    else:
        observations = np.repeat(
            np.array(PROBE_DIAGONAL)[:, np.newaxis], environment.dimension, axis=1
        )
    n_actions = environment.n_actions if n_actions is None else n_actions
    return ProbeSet(
        domain=environment.domain,
        observations=observations,
        actions=[ii % n_actions for ii in range(len(observations))],
        label="default",
    )


def monte_carlo_returns(
    domain,
    policy,
    probes: ProbeSet,
    n_rollouts: int,
    rng: np.random.Generator,
    env_params: Optional[dict] = None,
) -> np.ndarray:
    """(probes x rollouts) undiscounted returns of rollouts that start at the
    probe state with the forced probe action, then follow the policy."""
    if n_rollouts < 1:
        raise ValueError("Need at least one rollout.")
    environment = make_environment(domain, **(env_params or {}))

    returns = np.zeros((len(probes), n_rollouts))
    for ii, (obs, action) in enumerate(probes):
        state = environment.state_from_observation(obs)
        for rr in range(n_rollouts):
            returns[ii, rr], _ = environment.rollout(
                policy, rng, state=state, first_action=action
            )
        logger.debug("Probe %d: mean return %.3f", ii, returns[ii].mean())
    return returns


def monte_carlo_values(
    domain,
    policy,
    probes: ProbeSet,
    n_rollouts: int = settings.N_ROLLOUTS_DESK,
    rng: Optional[np.random.Generator] = None,
    env_params: Optional[dict] = None,
) -> np.ndarray:
    """Average rollout return of every probe."""
    rng = make_rng(0, "oracle") if rng is None else rng
    return monte_carlo_returns(domain, policy, probes, n_rollouts, rng, env_params).mean(axis=1)


def sample_test_states(
    domain,
    n_states: int,
    seed: int,
    env_params: Optional[dict] = None,
) -> np.ndarray:
    """Observations of non-terminal states visited by the data policy, drawn
    uniformly from a long trajectory."""
    if n_states < 1:
        raise ValueError("Need at least one test state.")
    environment = make_environment(domain, **(env_params or {}))
    policy = make_data_policy(environment)
    rng = make_rng(seed, "oracle")

    visited = []
    state, obs = environment.reset(rng)
    while len(visited) < 10 * n_states:
        visited.append(obs)
        _, state = environment.step(state, policy(state, rng), rng)
        if state.is_done:
            state, _ = environment.reset(rng)
        obs = environment.normalize(state.raw)

    chosen = rng.choice(len(visited), size=n_states, replace=False)
    return np.array(visited)[np.sort(chosen)]


def oracle_size(domain, full_scale: bool = False, n_states: int = 0, n_rollouts: int = 0):
    """(test states, rollouts per state) of the value oracle."""
    if not full_scale:
        return n_states, n_rollouts
    if DomainType.from_name(domain) is DomainType.CATCHER:
        return settings.N_TEST_STATES_CATCHER, settings.N_ROLLOUTS_FULL
    return settings.N_TEST_STATES, settings.N_ROLLOUTS_FULL


def value_oracle(
    domain,
    n_states: int,
    n_rollouts: int,
    seed: int,
    env_params: Optional[dict] = None,
) -> tuple:
    """(test observations, Monte Carlo state values under the data policy)."""
    test_states = sample_test_states(domain, n_states, seed, env_params)
    environment = make_environment(domain, **(env_params or {}))
    probes = ProbeSet(domain=environment.domain, observations=test_states, label="test")
    values = monte_carlo_values(
        domain,
        make_data_policy(environment),
        probes,
        n_rollouts=n_rollouts,
        rng=make_rng(seed, "oracle", 1),
        env_params=env_params,
    )
    logger.info("Value oracle with %d states x %d rollouts", n_states, n_rollouts)
    return test_states, values
