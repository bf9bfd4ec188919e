"""
Catcher: move a paddle along the bottom of the unit screen to catch a
falling apple. The agent has a single life.
"""
import numpy as np

from ._base import Environment
from .state import DomainType


class Catcher(Environment):
    """Raw state (paddle_x, paddle_velocity, apple_x, apple_y); actions
    (left, stay, right) move the paddle by (-delta, 0, +delta).

    Reward +1 for a catch (a new apple is dropped), -1 for a miss which
    ends the episode, 0 otherwise."""

    domain = DomainType.CATCHER
    n_actions = 3
    action_names = ("left", "stay", "right")

    def __init__(
        self,
        paddle_speed: float = 0.05,
        apple_speed: float = 0.04,
        catch_width: float = 0.1,
        paddle_height: float = 0.0,
        *args,
        **kwargs,
    ):
        super().__init__(*args, **kwargs)
        if paddle_speed <= 0 or apple_speed <= 0:
            raise ValueError("Paddle and apple speed need to be positive.")
        self.paddle_speed = float(paddle_speed)
        self.apple_speed = float(apple_speed)
        self.catch_width = float(catch_width)
        self.paddle_height = float(paddle_height)

    @property
    def state_low(self) -> np.ndarray:
        return np.array([0.0, -self.paddle_speed, 0.0, self.paddle_height])

    @property
    def state_high(self) -> np.ndarray:
        return np.array([1.0, self.paddle_speed, 1.0, 1.0])

    @property
    def params(self) -> dict:
        return {
            **super().params,
            "paddle_speed": self.paddle_speed,
            "apple_speed": self.apple_speed,
            "catch_width": self.catch_width,
            "paddle_height": self.paddle_height,
        }

    def direction(self, action: int) -> int:
        return int(action) - 1

    def sample_start(self, rng: np.random.Generator) -> np.ndarray:
        paddle_x = rng.uniform(0.0, 1.0)
        return np.array([paddle_x, 0.0, rng.uniform(0.0, 1.0), 1.0])

    def dynamics(self, raw, action, rng):
        paddle_x, _, apple_x, apple_y = raw
        velocity = self.direction(action) * self.paddle_speed
        paddle_x = float(np.clip(paddle_x + velocity, 0.0, 1.0))

        apple_y = apple_y - self.apple_speed
        if apple_y > self.paddle_height:
            return np.array([paddle_x, velocity, apple_x, apple_y]), 0.0, False

        if abs(paddle_x - apple_x) <= self.catch_width:
            # Caught: drop the next apple from the top
            return (
                np.array([paddle_x, velocity, rng.uniform(0.0, 1.0), 1.0]),
                1.0,
                False,
            )

        return np.array([paddle_x, velocity, apple_x, self.paddle_height]), -1.0, True
