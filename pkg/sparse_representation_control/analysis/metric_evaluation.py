"""
Sparsity and locality metrics of representations and smoothing of learning curves.
"""
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from sparse_representation_control import settings
from sparse_representation_control.network import Activation


def active_threshold(activation) -> float:
    """Units count as active strictly above this value."""
    if Activation.from_name(activation) is Activation.SIGMOID:
        return settings.ACTIVE_THRESHOLD_SIGMOID
    return settings.ACTIVE_THRESHOLD_RELU


def instance_sparsity(representations: np.ndarray, threshold: float = 0.0) -> np.ndarray:
    """Percentage of live units active for every instance.

    Live units are those active for at least one instance of the batch."""
    active = np.atleast_2d(np.asarray(representations, dtype=float)) > threshold
    live = np.any(active, axis=0)
    n_live = np.sum(live)
    if not n_live:
        return np.zeros(active.shape[0])
    return 100.0 * np.sum(active[:, live], axis=1) / n_live


def dead_units(representations: np.ndarray, threshold: float = 0.0) -> int:
    active = np.atleast_2d(np.asarray(representations, dtype=float)) > threshold
    return int(np.sum(~np.any(active, axis=0)))


def activation_overlap(rep1: np.ndarray, rep2: np.ndarray, threshold: float = 0.0) -> int:
    """Number of units active for both inputs."""
    rep1 = np.asarray(rep1, dtype=float)
    rep2 = np.asarray(rep2, dtype=float)
    if rep1.shape != rep2.shape:
        raise ValueError(f"Representations of shape {rep1.shape} and {rep2.shape}.")
    return int(np.sum((rep1 > threshold) & (rep2 > threshold)))


def pairwise_overlaps(representations: Sequence, threshold: float = 0.0) -> list:
    """[(i, j, overlap)] over all unordered pairs i < j."""
    return [
        (ii, jj, activation_overlap(representations[ii], representations[jj], threshold))
        for ii, jj in combinations(range(len(representations)), 2)
    ]


def mean_pairwise_overlap(representations: Sequence, threshold: float = 0.0) -> float:
    if len(representations) < 2:
        raise ValueError("Need at least two representations.")
    return float(np.mean([oo for _, _, oo in pairwise_overlaps(representations, threshold)]))


def sparsity_histogram(sparsities: np.ndarray, n_buckets: int = 10) -> np.ndarray:
    """Instance counts per sparsity bucket of width 100 / n_buckets percent;
    100% falls into the last bucket."""
    edges = np.linspace(0.0, 100.0, n_buckets + 1)
    counts, _ = np.histogram(np.asarray(sparsities, dtype=float), bins=edges)
    return counts


def ema_smooth(series: Sequence, smoothing: float = settings.EMA_SMOOTHING) -> np.ndarray:
    """y_0 = x_0, y_t = (1 - smoothing) y_{t-1} + smoothing x_t"""
    series = np.asarray(series, dtype=float)
    if not series.shape[0]:
        raise ValueError("Empty series.")
    if not 0 < smoothing <= 1:
        raise ValueError("Smoothing needs to be in (0, 1].")

    smoothed = np.empty(series.shape)
    smoothed[0] = series[0]
    for tt in range(1, series.shape[0]):
        smoothed[tt] = (1 - smoothing) * smoothed[tt - 1] + smoothing * series[tt]
    return smoothed


def mean_and_stderr(runs: np.ndarray, axis: int = 0) -> tuple:
    """Mean and standard error across runs (zero error for a single run)."""
    runs = np.asarray(runs, dtype=float)
    n_runs = runs.shape[axis]
    mean = np.mean(runs, axis=axis)
    if n_runs < 2:
        return mean, np.zeros(mean.shape)
    return mean, np.std(runs, axis=axis, ddof=1) / np.sqrt(n_runs)


class RepresentationEvaluator:
    """Collects the sparsity metrics of a frozen representation on a batch of
    observations."""

    def __init__(self, representations: np.ndarray, activation="relu", labels=None):
        self.representations = np.atleast_2d(np.asarray(representations, dtype=float))
        self.threshold = active_threshold(activation)
        self.labels: Optional[list] = labels

    def evaluate_metrics(self) -> dict:
        sparsity = instance_sparsity(self.representations, self.threshold)
        return {
            "mean_instance_sparsity": float(np.mean(sparsity)),
            "n_dead_units": dead_units(self.representations, self.threshold),
            "threshold": self.threshold,
            "histogram": sparsity_histogram(sparsity).tolist(),
        }

    def overlap_table(self) -> list:
        labels = self.labels or list(range(len(self.representations)))
        return [
            (labels[ii], labels[jj], oo)
            for ii, jj, oo in pairwise_overlaps(self.representations, self.threshold)
        ]
