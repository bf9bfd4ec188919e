"""
Puddle World: noisy navigation on the unit square with two capsule puddles.
"""
from typing import Optional

import numpy as np
from numpy import linalg as LA

from ._base import Environment
from .state import DomainType


def distance_to_segment(position: np.ndarray, start: np.ndarray, end: np.ndarray) -> float:
    segment = end - start
    seg_norm_sq = np.dot(segment, segment)
    if not seg_norm_sq:
        return LA.norm(position - start)

    fraction = np.clip(np.dot(position - start, segment) / seg_norm_sq, 0.0, 1.0)
    return LA.norm(position - (start + fraction * segment))


class PuddleWorld(Environment):
    """Raw state (x, y) in [0, 1]^2; actions (north, east, south, west).

    Every step costs -1, plus -penalty_scale times the depth into each
    puddle (radius minus distance to the puddle's center segment)."""

    domain = DomainType.PUDDLE_WORLD
    n_actions = 4
    action_names = ("north", "east", "south", "west")

    def __init__(
        self,
        step_size: float = 0.05,
        noise_std: float = 0.01,
        puddles: Optional[list] = None,
        puddle_radius: float = 0.1,
        penalty_scale: float = 400.0,
        goal_position=(1.0, 1.0),
        goal_distance: float = 0.1,
        *args,
        **kwargs,
    ):
        super().__init__(*args, **kwargs)
        self.step_size = float(step_size)
        self.noise_std = float(noise_std)

        if puddles is None:
            puddles = [[[0.1, 0.75], [0.45, 0.75]], [[0.45, 0.4], [0.45, 0.8]]]
        self.puddles = [np.array(pp, dtype=float) for pp in puddles]
        self.puddle_radius = float(puddle_radius)
        self.penalty_scale = float(penalty_scale)

        self.goal_position = np.array(goal_position, dtype=float)
        self.goal_distance = float(goal_distance)

        self._moves = self.step_size * np.array(
            [[0.0, 1.0], [1.0, 0.0], [0.0, -1.0], [-1.0, 0.0]]
        )

    @property
    def state_low(self) -> np.ndarray:
        return np.zeros(2)

    @property
    def state_high(self) -> np.ndarray:
        return np.ones(2)

    @property
    def params(self) -> dict:
        return {
            **super().params,
            "step_size": self.step_size,
            "noise_std": self.noise_std,
            "puddles": [pp.tolist() for pp in self.puddles],
            "puddle_radius": self.puddle_radius,
            "penalty_scale": self.penalty_scale,
            "goal_position": self.goal_position.tolist(),
            "goal_distance": self.goal_distance,
        }

    def is_terminal_state(self, raw: np.ndarray) -> bool:
        return LA.norm(np.asarray(raw, dtype=float) - self.goal_position) <= self.goal_distance

    def puddle_penalty(self, position: np.ndarray) -> float:
        penalty = 0.0
        for puddle in self.puddles:
            depth = self.puddle_radius - distance_to_segment(position, puddle[0], puddle[1])
            if depth > 0:
                penalty -= self.penalty_scale * depth
        return penalty

    def sample_start(self, rng: np.random.Generator) -> np.ndarray:
        while True:
            position = rng.uniform(0.0, 1.0, size=2)
            if not self.is_terminal_state(position):
                return position

    def dynamics(self, raw, action, rng):
        noise = rng.normal(0.0, self.noise_std, size=2)
        position = np.clip(raw + self._moves[action] + noise, 0.0, 1.0)
        reward = -1.0 + self.puddle_penalty(position)
        return position, reward, self.is_terminal_state(position)
