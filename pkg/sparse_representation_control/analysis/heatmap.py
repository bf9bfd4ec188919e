"""
Activation maps of single representation units over a 2-d state space.
"""
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from sparse_representation_control.environments import make_environment
from sparse_representation_control.network import MLPParams, representation
from sparse_representation_control.utils import write_csv


@dataclass
class HeatmapGrid:
    """values[i, j] is the activation at (grid[i], grid[j]) of the normalized
    state space, first state variable along i."""

    unit: int
    resolution: int
    values: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.resolution)


def grid_points(resolution: int) -> np.ndarray:
    """(r^2 x 2) grid covering [0, 1]^2 including its boundary."""
    if resolution < 2:
        raise ValueError("Heatmap resolution needs to be at least 2.")
    axis = np.linspace(0.0, 1.0, resolution)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack((xx.reshape(-1), yy.reshape(-1)))


def heatmap(
    params: MLPParams,
    domain,
    unit_indices: Sequence[int],
    resolution: int = 50,
    sparsifier=None,
) -> list:
    """Activation of the selected units at every grid point of a 2-d domain."""
    dimension = make_environment(domain).dimension
    if dimension != 2:
        raise ValueError(f"Heatmaps need a 2-d domain, <<{domain}>> has dimension {dimension}.")
    if params.input_dim != dimension:
        raise ValueError("Network input dimension does not match the domain.")
    width = params.representation_width
    for unit in unit_indices:
        if not 0 <= unit < width:
            raise ValueError(f"Unit {unit} outside [0, {width}).")

    reps = representation(params, grid_points(resolution), sparsifier=sparsifier)
    return [
        HeatmapGrid(
            unit=int(unit),
            resolution=resolution,
            values=reps[:, unit].reshape(resolution, resolution),
        )
        for unit in unit_indices
    ]


def select_units(width: int, n_units: int, rng: np.random.Generator) -> list:
    return sorted(rng.choice(width, size=min(n_units, width), replace=False).tolist())


def write_heatmaps(directory: str, grids: list, hash_value: Optional[str] = None) -> str:
    """One CSV per unit (rows along the first state variable) and a manifest."""
    manifest_rows = []
    for hmap in grids:
        file_name = os.path.join(directory, f"heatmap_unit_{hmap.unit:03d}.csv")
        header = ["x"] + [repr(float(yy)) for yy in hmap.grid]
        rows = [[xx] + list(row) for xx, row in zip(hmap.grid, hmap.values)]
        write_csv(file_name, header, rows, hash_value)
        manifest_rows.append((hmap.unit, hmap.resolution, os.path.basename(file_name)))

    manifest = os.path.join(directory, "heatmaps.csv")
    return write_csv(manifest, ("unit", "resolution", "file"), manifest_rows, hash_value)
