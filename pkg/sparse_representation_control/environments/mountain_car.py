"""
Mountain Car: underpowered car in a valley, standard textbook dynamics.
"""
import numpy as np

from ._base import Environment
from .state import DomainType


class MountainCar(Environment):
    """Raw state (position, velocity); actions (reverse, coast, forward)."""

    domain = DomainType.MOUNTAIN_CAR
    n_actions = 3
    action_names = ("reverse", "coast", "forward")

    def __init__(
        self,
        position_bounds=(-1.2, 0.6),
        velocity_bounds=(-0.07, 0.07),
        goal_position: float = 0.5,
        start_position_range=(-0.6, -0.4),
        force: float = 0.001,
        gravity: float = 0.0025,
        *args,
        **kwargs,
    ):
        super().__init__(*args, **kwargs)
        self.position_bounds = tuple(float(vv) for vv in position_bounds)
        self.velocity_bounds = tuple(float(vv) for vv in velocity_bounds)
        self.goal_position = float(goal_position)
        self.start_position_range = tuple(float(vv) for vv in start_position_range)
        self.force = float(force)
        self.gravity = float(gravity)

    @property
    def state_low(self) -> np.ndarray:
        return np.array([self.position_bounds[0], self.velocity_bounds[0]])

    @property
    def state_high(self) -> np.ndarray:
        return np.array([self.position_bounds[1], self.velocity_bounds[1]])

    @property
    def params(self) -> dict:
        return {
            **super().params,
            "position_bounds": list(self.position_bounds),
            "velocity_bounds": list(self.velocity_bounds),
            "goal_position": self.goal_position,
            "start_position_range": list(self.start_position_range),
            "force": self.force,
            "gravity": self.gravity,
        }

    @staticmethod
    def throttle(action: int) -> int:
        return int(action) - 1

    def sample_start(self, rng: np.random.Generator) -> np.ndarray:
        position = rng.uniform(*self.start_position_range)
        return np.array([position, 0.0])

    def is_terminal_state(self, raw: np.ndarray) -> bool:
        return raw[0] >= self.goal_position

    def dynamics(self, raw, action, rng):
        position, velocity = raw
        velocity = (
            velocity
            + self.force * self.throttle(action)
            - self.gravity * np.cos(3 * position)
        )
        velocity = np.clip(velocity, *self.velocity_bounds)

        position = position + velocity
        if position < self.position_bounds[0]:
            # Inelastic wall on the left
            position = self.position_bounds[0]
            velocity = 0.0
        position = min(position, self.position_bounds[1])

        next_raw = np.array([position, velocity])
        return next_raw, -1.0, self.is_terminal_state(next_raw)
