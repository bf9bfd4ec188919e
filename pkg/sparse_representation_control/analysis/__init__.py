"""
The :mod:`analysis` module implements the sparsity, locality and accuracy
metrics of learned representations.
"""
from .metric_evaluation import (
    active_threshold,
    instance_sparsity,
    dead_units,
    activation_overlap,
    pairwise_overlaps,
    mean_pairwise_overlap,
    sparsity_histogram,
    ema_smooth,
    mean_and_stderr,
    RepresentationEvaluator,
)
from .heatmap import HeatmapGrid, grid_points, heatmap, select_units, write_heatmaps
from .monte_carlo import (
    ProbeSet,
    default_probes,
    monte_carlo_returns,
    monte_carlo_values,
    oracle_size,
    sample_test_states,
    value_oracle,
)
from .bootstrap import BootstrapTracker, tracking_errors

__all__ = [
    "active_threshold",
    "instance_sparsity",
    "dead_units",
    "activation_overlap",
    "pairwise_overlaps",
    "mean_pairwise_overlap",
    "sparsity_histogram",
    "ema_smooth",
    "mean_and_stderr",
    "RepresentationEvaluator",
    "HeatmapGrid",
    "grid_points",
    "heatmap",
    "select_units",
    "write_heatmaps",
    "ProbeSet",
    "default_probes",
    "monte_carlo_returns",
    "monte_carlo_values",
    "oracle_size",
    "sample_test_states",
    "value_oracle",
    "BootstrapTracker",
    "tracking_errors",
]
