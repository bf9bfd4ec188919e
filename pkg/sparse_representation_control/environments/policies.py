"""
Fixed data-generating policies used to collect the pretraining corpus.
"""
# The policies explore most of the state space; they are not meant to be optimal.

from abc import ABC, abstractmethod

import numpy as np

from ._base import Environment
from .state import DomainType, EnvState


class DataPolicy(ABC):
    """Base class of the data policies. Calling the policy returns an action index."""

    name = "data_policy"

    def __init__(self, environment: Environment, random_fraction: float):
        if not 0 <= random_fraction <= 1:
            raise ValueError("Random fraction needs to be in [0, 1].")
        self.environment = environment
        self.random_fraction = random_fraction

    @property
    def n_actions(self) -> int:
        return self.environment.n_actions

    def __call__(self, state: EnvState, rng: np.random.Generator) -> int:
        return self.get_action(state, rng)

    def random_action(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.n_actions))

    @abstractmethod
    def get_action(self, state: EnvState, rng: np.random.Generator) -> int:
        pass


class EnergyPumpingPolicy(DataPolicy):
    """Mountain Car: throttle in the direction of the velocity, 10% random."""

    name = "energy_pumping"

    def __init__(self, environment, random_fraction: float = 0.1):
        super().__init__(environment, random_fraction)

    def get_action(self, state, rng):
        if rng.random() < self.random_fraction:
            return self.random_action(rng)
        # action index = throttle + 1
        return int(np.sign(state.raw[1])) + 1


class NorthEastPolicy(DataPolicy):
    """Puddle World: north or east with equal probability."""

    name = "north_east"

    def __init__(self, environment, random_fraction: float = 0.5):
        super().__init__(environment, random_fraction)

    def get_action(self, state, rng):
        if rng.random() < self.random_fraction:
            return 0  # north
        return 1  # east


class SwingUpPolicy(DataPolicy):
    """Acrobot: energy based swing-up, the torque follows the angular velocity
    of the first link, 10% random."""

    name = "swing_up"

    def __init__(self, environment, random_fraction: float = 0.1):
        super().__init__(environment, random_fraction)

    def get_action(self, state, rng):
        if rng.random() < self.random_fraction:
            return self.random_action(rng)
        return int(np.sign(state.raw[2])) + 1


class AppleFollowingPolicy(DataPolicy):
    """Catcher: move toward the apple with probability 0.5, else random."""

    name = "apple_following"

    def __init__(self, environment, random_fraction: float = 0.5):
        super().__init__(environment, random_fraction)

    def get_action(self, state, rng):
        if rng.random() < self.random_fraction:
            return self.random_action(rng)

        paddle_x, _, apple_x, _ = state.raw
        # action index = direction + 1
        return int(np.sign(apple_x - paddle_x)) + 1


_DATA_POLICIES = {
    DomainType.MOUNTAIN_CAR: EnergyPumpingPolicy,
    DomainType.PUDDLE_WORLD: NorthEastPolicy,
    DomainType.ACROBOT: SwingUpPolicy,
    DomainType.CATCHER: AppleFollowingPolicy,
}


def make_data_policy(environment: Environment) -> DataPolicy:
    return _DATA_POLICIES[environment.domain](environment)


def data_policy_action(
    environment: Environment, state: EnvState, rng: np.random.Generator
) -> int:
    if state.is_done:
        raise RuntimeError("No action for a finished episode.")
    return make_data_policy(environment).get_action(state, rng)
