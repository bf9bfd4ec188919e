"""
The :mod:`environments` module implements the episodic benchmark domains
and their data-generating policies.
"""
from .state import DomainType, EnvState, Transition
from ._base import Environment
from .mountain_car import MountainCar
from .puddle_world import PuddleWorld
from .acrobot import Acrobot
from .catcher import Catcher
from .policies import (
    DataPolicy,
    EnergyPumpingPolicy,
    NorthEastPolicy,
    SwingUpPolicy,
    AppleFollowingPolicy,
    make_data_policy,
    data_policy_action,
)

_ENVIRONMENTS = {
    DomainType.MOUNTAIN_CAR: MountainCar,
    DomainType.PUDDLE_WORLD: PuddleWorld,
    DomainType.ACROBOT: Acrobot,
    DomainType.CATCHER: Catcher,
}


def make_environment(domain, **params) -> Environment:
    """Creates the domain given by name (or DomainType); params override constants."""
    return _ENVIRONMENTS[DomainType.from_name(domain)](**params)


def reset(domain, rng, **params):
    return make_environment(domain, **params).reset(rng)


__all__ = [
    "DomainType",
    "EnvState",
    "Transition",
    "Environment",
    "MountainCar",
    "PuddleWorld",
    "Acrobot",
    "Catcher",
    "DataPolicy",
    "EnergyPumpingPolicy",
    "NorthEastPolicy",
    "SwingUpPolicy",
    "AppleFollowingPolicy",
    "make_environment",
    "make_data_policy",
    "data_policy_action",
    "reset",
]
