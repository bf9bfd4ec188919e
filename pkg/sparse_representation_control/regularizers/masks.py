"""
Truncation and dropout masks on the representation layer.
"""
from math import ceil
from typing import Optional

import numpy as np


def ksparse_indicator(activations: np.ndarray, k: int) -> np.ndarray:
    """0/1 indicator of the k largest entries per instance (last axis).
    Ties are broken by the lowest index."""
    activations = np.asarray(activations, dtype=float)
    width = activations.shape[-1]
    k = int(k)
    if not 0 < k <= width:
        raise ValueError(f"k={k} needs to be in (0, {width}].")

    # Stable sort keeps the lower index first among equal values
    winners = np.argsort(-activations, axis=-1, kind="stable")[..., :k]
    indicator = np.zeros(activations.shape)
    np.put_along_axis(indicator, winners, 1.0, axis=-1)
    return indicator


def ksparse_mask(activations: np.ndarray, k: int) -> np.ndarray:
    """Keeps the top-k activations (values preserved), zeros the rest."""
    activations = np.asarray(activations, dtype=float)
    return activations * ksparse_indicator(activations, k)


def wta_n_winners(batch_size: int, k_percent: float) -> int:
    # Rounded before the ceiling so that e.g. 12.5% of 64 stays 8
    return int(ceil(round(k_percent * batch_size / 100.0, 9)))


def wta_indicator(batch_activations: np.ndarray, k_percent: float) -> np.ndarray:
    """0/1 indicator of the ceil(k% * m) largest activations of every node
    (column) across the m instances of the batch."""
    batch_activations = np.asarray(batch_activations, dtype=float)
    if batch_activations.ndim != 2:
        raise ValueError("Winner-take-all needs a (batch x units) matrix.")
    if not 0 < k_percent <= 100:
        raise ValueError(f"k_percent={k_percent} needs to be in (0, 100].")

    n_winners = wta_n_winners(batch_activations.shape[0], k_percent)
    winners = np.argsort(-batch_activations, axis=0, kind="stable")[:n_winners, :]
    indicator = np.zeros(batch_activations.shape)
    np.put_along_axis(indicator, winners, 1.0, axis=0)
    return indicator


def wta_mask(batch_activations: np.ndarray, k_percent: float) -> np.ndarray:
    batch_activations = np.asarray(batch_activations, dtype=float)
    return batch_activations * wta_indicator(batch_activations, k_percent)


def dropout_mask(
    width: int,
    p: float,
    rng: np.random.Generator,
    batch_size: Optional[int] = None,
) -> np.ndarray:
    """Inverted dropout: each entry is 0 with probability p, else 1 / (1 - p)."""
    if not 0 <= p < 1:
        raise ValueError(f"Dropout probability {p} needs to be in [0, 1).")
    shape = width if batch_size is None else (batch_size, width)
    return (rng.random(shape) >= p) / (1.0 - p)


def ksparse_schedule(
    epoch: int, n_epochs: int, width: int, k: int, ramp_fraction: float = 0.25
) -> int:
    """Sparsity level k of an epoch: linear ramp from the full width down to
    the target k over the first `ramp_fraction` of the epochs."""
    n_ramp = int(ceil(ramp_fraction * n_epochs))
    if n_ramp <= 0 or epoch >= n_ramp:
        return int(k)
    return int(round(width - (width - k) * epoch / n_ramp))
