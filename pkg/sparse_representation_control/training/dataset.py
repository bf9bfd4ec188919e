"""
Container of the pretraining transitions and its generation from the fixed
data policies.
"""
import logging
from math import ceil
from typing import Optional

import numpy as np

from sparse_representation_control.environments import (
    DomainType,
    Transition,
    make_data_policy,
    make_environment,
)
from sparse_representation_control.utils import (
    make_rng,
    read_record_stream,
    write_record_stream,
)

logger = logging.getLogger(__name__)

DATASET_MAGIC = "SRCDATA"
DATASET_VERSION = 1

_ARRAY_NAMES = ("obs", "actions", "rewards", "next_obs", "discounts", "truncated", "step_index")


class TransitionBatch:
    """List-like container of the transitions of one domain.

    Transitions are stored in the order they were generated (concatenated
    episodes); the array view is rebuilt lazily after modifications."""

    def __init__(
        self,
        domain,
        transitions: Optional[list] = None,
        policy: str = "",
        seed: Optional[int] = None,
        env_params: Optional[dict] = None,
    ):
        self.domain = DomainType.from_name(domain)
        self.policy = policy
        self.seed = seed
        self.env_params = dict(env_params or {})

        self._transition_list = []
        self._arrays = None
        if transitions is not None:
            for transition in transitions:
                self.append(transition)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return TransitionBatch(
                self.domain,
                self._transition_list[key],
                policy=self.policy,
                seed=self.seed,
                env_params=self.env_params,
            )
        return self._transition_list[key]

    def __setitem__(self, key, value: Transition):
        self._transition_list[key] = value
        self._arrays = None

    def append(self, value: Transition):
        if not isinstance(value, Transition):
            raise TypeError(f"Expected a Transition, got {type(value).__name__}.")
        self._transition_list.append(value)
        self._arrays = None

    def __delitem__(self, key):
        del self._transition_list[key]
        self._arrays = None

    def __iter__(self):
        return iter(self._transition_list)

    def __len__(self):
        return len(self._transition_list)

    def __repr__(self):
        return "TransitionBatch({}) of length #{}".format(self.domain.value, len(self))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionBatch):
            return NotImplemented
        return (
            self.domain is other.domain
            and len(self) == len(other)
            and all(np.array_equal(aa, bb) for aa, bb in zip(self.arrays(), other.arrays()))
        )

    @property
    def dimension(self) -> int:
        return self._transition_list[0].obs.shape[0]

    def arrays(self) -> tuple:
        """(obs, actions, rewards, next_obs, discounts, truncated, step_index)"""
        if not len(self):
            raise ValueError("Empty transition batch.")
        if self._arrays is None:
            transitions = self._transition_list
            self._arrays = (
                np.array([tt.obs for tt in transitions], dtype=float),
                np.array([tt.action for tt in transitions], dtype=np.int64),
                np.array([tt.reward for tt in transitions], dtype=float),
                np.array([tt.next_obs for tt in transitions], dtype=float),
                np.array([tt.discount for tt in transitions], dtype=float),
                np.array([tt.truncated for tt in transitions], dtype=bool),
                np.array([tt.step_index for tt in transitions], dtype=np.int64),
            )
            for arr in self._arrays:
                arr.flags.writeable = False
        return self._arrays

    def sample_indices(self, rng: np.random.Generator, batch_size: int) -> np.ndarray:
        """i.i.d. uniform indices (with replacement)."""
        return rng.integers(len(self), size=batch_size)

    def n_minibatches(self, batch_size: int) -> int:
        return int(ceil(len(self) / batch_size))

    def summary(self) -> dict:
        obs, _, rewards, _, discounts, truncated, step_index = self.arrays()
        return {
            "domain": self.domain.value,
            "policy": self.policy,
            "seed": self.seed,
            "n_transitions": len(self),
            "n_episodes": int(np.sum(discounts == 0) + np.sum(truncated)),
            "n_terminal": int(np.sum(discounts == 0)),
            "n_truncated": int(np.sum(truncated)),
            "n_resets": int(np.sum(step_index == 0)),
            "mean_reward": float(np.mean(rewards)),
            "obs_min": obs.min(axis=0).tolist(),
            "obs_max": obs.max(axis=0).tolist(),
        }

    @classmethod
    def from_arrays(
        cls, domain, arrays, policy: str = "", seed=None, env_params=None
    ) -> "TransitionBatch":
        obs, actions, rewards, next_obs, discounts, truncated, step_index = arrays
        transitions = [
            Transition(
                obs=np.array(obs[ii]),
                action=int(actions[ii]),
                reward=float(rewards[ii]),
                next_obs=np.array(next_obs[ii]),
                discount=float(discounts[ii]),
                truncated=bool(truncated[ii]),
                step_index=int(step_index[ii]),
            )
            for ii in range(len(actions))
        ]
        return cls(domain, transitions, policy=policy, seed=seed, env_params=env_params)


def generate_dataset(
    domain,
    n_transitions: int,
    seed: int,
    env_params: Optional[dict] = None,
) -> TransitionBatch:
    """Concatenated episodes of the domain's data policy, restarted after every
    terminal or cut-off transition, until `n_transitions` are collected."""
    if n_transitions <= 0:
        raise ValueError("Number of transitions needs to be positive.")

    environment = make_environment(domain, **(env_params or {}))
    policy = make_data_policy(environment)
    rng = make_rng(seed, "data")

    batch = TransitionBatch(
        environment.domain, policy=policy.name, seed=seed, env_params=env_params
    )
    n_episodes = 0
    state, _ = environment.reset(rng)
    while len(batch) < n_transitions:
        action = policy(state, rng)
        transition, state = environment.step(state, action, rng)
        batch.append(transition)
        if state.is_done:
            n_episodes += 1
            state, _ = environment.reset(rng)

    logger.info(
        "Generated %d transitions (%d finished episodes) on %s.",
        len(batch),
        n_episodes,
        environment.domain.value,
    )
    return batch


def save_dataset(file_name: str, batch: TransitionBatch) -> str:
    header = {
        "domain": batch.domain.value,
        "policy": batch.policy,
        "seed": batch.seed,
        "env_params": batch.env_params,
        "n_transitions": len(batch),
        "dimension": batch.dimension,
        "arrays": list(_ARRAY_NAMES),
    }
    write_record_stream(file_name, DATASET_MAGIC, DATASET_VERSION, header, batch.arrays())
    logger.info("Dataset with %d transitions written to %s", len(batch), file_name)
    return file_name


def load_dataset(file_name: str) -> TransitionBatch:
    header, arrays = read_record_stream(file_name, DATASET_MAGIC, DATASET_VERSION)
    if len(arrays) != len(_ARRAY_NAMES) or len(arrays[1]) != header["n_transitions"]:
        raise ValueError(f"Dataset <<{file_name}>> is incomplete.")
    return TransitionBatch.from_arrays(
        header["domain"],
        arrays,
        policy=header["policy"],
        seed=header["seed"],
        env_params=header["env_params"],
    )
