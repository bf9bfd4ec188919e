"""
Basic state records the environments are based on.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class DomainType(Enum):
    """Benchmark domains, selected by their name-string."""

    MOUNTAIN_CAR = "mountain_car"
    PUDDLE_WORLD = "puddle_world"
    ACROBOT = "acrobot"
    CATCHER = "catcher"

    @classmethod
    def from_name(cls, name) -> "DomainType":
        if isinstance(name, DomainType):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            names = ", ".join(dd.value for dd in cls)
            raise ValueError(f"Unknown domain <<{name}>>, expected one of: {names}.")


@dataclass(frozen=True)
class EnvState:
    """Raw (unnormalized) state of one episode.

    Attributes
    ----------
    domain: the domain the state belongs to
    raw: physical state variables, within the domain bounds
    step_count: number of steps taken in the current episode
    is_terminal: goal (or failure) reached, no bootstrapping from here
    is_truncated: episode ended by the step cut-off
    """

    domain: DomainType
    raw: np.ndarray
    step_count: int = 0
    is_terminal: bool = False
    is_truncated: bool = False

    def __post_init__(self):
        raw = np.array(self.raw, dtype=float)
        raw.flags.writeable = False
        object.__setattr__(self, "raw", raw)

    @property
    def is_done(self) -> bool:
        return self.is_terminal or self.is_truncated


@dataclass(frozen=True)
class Transition:
    """One environment step (S, A, R, S', gamma).

    The discount is 0 exactly when `next_obs` is terminal. A cut-off
    transition keeps discount 1 and is flagged as truncated."""

    obs: np.ndarray
    action: int
    reward: float
    next_obs: np.ndarray
    discount: float
    truncated: bool = False
    step_index: int = field(default=0, compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Transition):
            return NotImplemented
        return (
            np.array_equal(self.obs, other.obs)
            and self.action == other.action
            and self.reward == other.reward
            and np.array_equal(self.next_obs, other.next_obs)
            and self.discount == other.discount
            and self.truncated == other.truncated
        )
