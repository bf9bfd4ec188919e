"""
Basic class to represent episodic benchmark domains.
"""
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from sparse_representation_control.settings import EPISODE_CUT_OFF
from .state import DomainType, EnvState, Transition


class Environment(ABC):
    """(Virtual) base class of the episodic domains.

    Stepping is a pure function of (state, action, rng): the environment
    object only holds the constant geometry/physics parameters, all episode
    information lives in the returned `EnvState`.

    Attributes
    ----------
    domain: DomainType of the environment
    n_actions: number of discrete actions
    state_low, state_high: physical bounds of the raw state, used for the
        normalization of observations to [0, 1]
    max_steps: cut-off after which an episode is truncated
    """

    domain: DomainType
    n_actions: int
    action_names: tuple = ()

    def __init__(self, max_steps: int = EPISODE_CUT_OFF):
        if max_steps <= 0:
            raise ValueError("Cut-off needs to be positive.")
        self.max_steps = int(max_steps)

    @property
    @abstractmethod
    def state_low(self) -> np.ndarray:
        pass

    @property
    @abstractmethod
    def state_high(self) -> np.ndarray:
        pass

    @property
    def dimension(self) -> int:
        return self.state_low.shape[0]

    @property
    def params(self) -> dict:
        """Constructor parameters (geometry / physics constants)."""
        return {"max_steps": self.max_steps}

    def __repr__(self):
        return f"{type(self).__name__}({self.params})"

    @abstractmethod
    def sample_start(self, rng: np.random.Generator) -> np.ndarray:
        """Raw start state drawn from the start distribution."""
        pass

    @abstractmethod
    def dynamics(
        self, raw: np.ndarray, action: int, rng: np.random.Generator
    ) -> tuple[np.ndarray, float, bool]:
        """Returns (next raw state, reward, terminal) for one step."""
        pass

    def is_terminal_state(self, raw: np.ndarray) -> bool:
        return False

    def normalize(self, raw: np.ndarray) -> np.ndarray:
        obs = (np.asarray(raw, dtype=float) - self.state_low) / (
            self.state_high - self.state_low
        )
        return np.clip(obs, 0.0, 1.0)

    def denormalize(self, obs: np.ndarray) -> np.ndarray:
        return self.state_low + np.asarray(obs, dtype=float) * (
            self.state_high - self.state_low
        )

    def is_within_bounds(self, raw: np.ndarray, tolerance: float = 1e-12) -> bool:
        raw = np.asarray(raw, dtype=float)
        return bool(
            np.all(raw >= self.state_low - tolerance)
            and np.all(raw <= self.state_high + tolerance)
        )

    def reset(self, rng: np.random.Generator) -> tuple[EnvState, np.ndarray]:
        raw = self.sample_start(rng)
        state = EnvState(domain=self.domain, raw=raw, step_count=0)
        return state, self.normalize(state.raw)

    def state_from_observation(self, obs: np.ndarray) -> EnvState:
        """Non-terminal state at the (normalized) observation, e.g., for probes."""
        obs = np.asarray(obs, dtype=float)
        if obs.shape != (self.dimension,):
            raise ValueError(
                f"Observation of shape {obs.shape} for domain of dimension {self.dimension}."
            )
        return EnvState(domain=self.domain, raw=self.denormalize(obs), step_count=0)

    def step(
        self,
        state: EnvState,
        action: int,
        rng: np.random.Generator,
    ) -> tuple[Transition, EnvState]:
        if state.is_done:
            raise RuntimeError(
                f"Stepping a finished episode (terminal={state.is_terminal}, "
                + f"truncated={state.is_truncated})."
            )
        if state.domain is not self.domain:
            raise ValueError(f"State of {state.domain} given to {self.domain}.")
        action = int(action)
        if not 0 <= action < self.n_actions:
            raise ValueError(
                f"Action index {action} outside [0, {self.n_actions}) for {self.domain.value}."
            )

        next_raw, reward, terminal = self.dynamics(state.raw, action, rng)
        step_count = state.step_count + 1
        truncated = (not terminal) and step_count >= self.max_steps

        next_state = EnvState(
            domain=self.domain,
            raw=next_raw,
            step_count=step_count,
            is_terminal=terminal,
            is_truncated=truncated,
        )
        transition = Transition(
            obs=self.normalize(state.raw),
            action=action,
            reward=float(reward),
            next_obs=self.normalize(next_raw),
            discount=0.0 if terminal else 1.0,
            truncated=truncated,
            step_index=state.step_count,
        )
        return transition, next_state

    def rollout(
        self,
        policy,
        rng: np.random.Generator,
        state: Optional[EnvState] = None,
        first_action: Optional[int] = None,
    ) -> tuple[float, int]:
        """Runs one episode; returns (undiscounted return, number of steps).

        The policy is called as `policy(state, rng) -> action`."""
        if state is None:
            state, _ = self.reset(rng)

        total_return = 0.0
        n_steps = 0
        action = policy(state, rng) if first_action is None else int(first_action)
        while True:
            transition, state = self.step(state, action, rng)
            total_return += transition.reward
            n_steps += 1
            if state.is_done:
                return total_return, n_steps
            action = policy(state, rng)
