"""
Tracking of the action values at fixed probes during a control run.
"""
import json
from typing import Optional

import numpy as np

from sparse_representation_control.utils import write_csv
from .monte_carlo import ProbeSet


class BootstrapTracker:
    """Records the action values at every probe after each episode.

    The probes are fixed when the tracker is created; `update_list` is the
    per-episode hook of the control loop."""

    def __init__(self, probes: ProbeSet, file_name: Optional[str] = None):
        self.probes = probes
        self.file_name = file_name
        self.episode_list = []
        self.value_list = []

    def __len__(self):
        return len(self.episode_list)

    def update_list(self, episode: int, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.probes),):
            raise ValueError(f"Expected {len(self.probes)} probe values, got {values.shape}.")
        self.episode_list.append(int(episode))
        self.value_list.append(values)

    def values(self) -> np.ndarray:
        """(episodes x probes) tracked values."""
        if not self.value_list:
            return np.zeros((0, len(self.probes)))
        return np.array(self.value_list)

    def convert_all_to_dict(self) -> dict:
        return {
            "domain": self.probes.domain.value,
            "label": self.probes.label,
            "observations": self.probes.observations.tolist(),
            "actions": list(self.probes.actions),
            "episode": list(self.episode_list),
            "values": self.values().tolist(),
        }

    def store_to_file(self, file_name: Optional[str] = None) -> str:
        file_name = file_name or self.file_name
        if file_name is None:
            raise ValueError("No file name given for the probe track.")
        with open(file_name, "w") as ff:
            json.dump(self.convert_all_to_dict(), ff, sort_keys=True)
        return file_name

    def write_csv(self, file_name: str, run_id, hash_value: Optional[str] = None) -> str:
        header = ["run_id", "episode"] + self.probes.names
        rows = [
            [run_id, episode] + list(values)
            for episode, values in zip(self.episode_list, self.value_list)
        ]
        return write_csv(file_name, header, rows, hash_value)


def tracking_errors(tracked: np.ndarray, true_values: np.ndarray) -> np.ndarray:
    """(episodes x probes) tracked action values minus their Monte Carlo
    reference values."""
    tracked = np.atleast_2d(np.asarray(tracked, dtype=float))
    true_values = np.asarray(true_values, dtype=float).reshape(-1)
    if tracked.shape[1] != true_values.shape[0]:
        raise ValueError(
            f"{tracked.shape[1]} tracked probes for {true_values.shape[0]} reference values."
        )
    return tracked - true_values
