"""
Hashed tile coding of normalized observations into sparse binary features.
"""
import logging
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np

from sparse_representation_control import settings
from sparse_representation_control.utils import make_rng

logger = logging.getLogger(__name__)

# 2^64 / golden ratio
GOLDEN_MULTIPLIER = np.uint64(0x9E3779B97F4A7C15)

OFFSET_MODES = ("uniform", "asymmetric", "random")


@dataclass
class TileCoderConfig:
    """Grid size N per dimension, number of tilings D and hash table size."""

    n_tiles: int = 8
    n_tilings: int = 8
    hash_size: int = settings.TILE_HASH_SIZE
    offset_mode: str = "uniform"
    seed: int = 0

    def validate(self, warn: bool = True) -> None:
        if self.n_tiles <= 0 or self.n_tilings <= 0:
            raise ValueError("Grid size and number of tilings need to be positive.")
        if self.hash_size < self.n_tilings:
            raise ValueError("Hash size needs to be at least the number of tilings.")
        if self.offset_mode not in OFFSET_MODES:
            raise ValueError(
                f"Unknown offset mode <<{self.offset_mode}>>, expected one of {OFFSET_MODES}."
            )
        if warn:
            if self.n_tiles not in settings.GRID_TILE_SIZES:
                warnings.warn(f"Grid size {self.n_tiles} is off the sweep grid.")
            if self.n_tilings not in settings.GRID_TILINGS:
                warnings.warn(f"Number of tilings {self.n_tilings} is off the sweep grid.")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, value: dict) -> "TileCoderConfig":
        known = {ff.name for ff in fields(cls)}
        unknown = set(value) - known
        if unknown:
            raise ValueError(f"Unknown tile-coder fields {sorted(unknown)}.")
        return cls(**value)


def tiling_offsets(config: TileCoderConfig, dimension: int) -> np.ndarray:
    """(D x d) displacement of every tiling, in units of the unit cube.

    uniform: tiling t shifted by t / (D N) along every dimension
    asymmetric: shifted by t (2j + 1) / (D N) along dimension j (wrapped)
    random: uniform in [0, 1 / N), drawn from the config seed
    """
    n_tilings, tile_width = config.n_tilings, 1.0 / config.n_tiles
    tilings = np.arange(n_tilings)[:, np.newaxis]

    if config.offset_mode == "uniform":
        return np.repeat(tilings / (n_tilings * config.n_tiles), dimension, axis=1)
    if config.offset_mode == "asymmetric":
        displacement = 2 * np.arange(dimension)[np.newaxis, :] + 1
        return np.mod(tilings * displacement / (n_tilings * config.n_tiles), tile_width)
    if config.offset_mode == "random":
        rng = make_rng(config.seed, "tiles")
        return rng.uniform(0.0, tile_width, size=(n_tilings, dimension))
    raise ValueError(f"Unknown offset mode <<{config.offset_mode}>>.")


class TileCoder:
    """Maps an observation in [0, 1]^d to one active index per tiling.

    The cell coordinates (each in [0, N], offsets push the upper edge into an
    extra cell) and the tiling index form a mixed-radix integer key, which is
    spread over the table with a Fibonacci multiplicative hash."""

    def __init__(self, config: TileCoderConfig, dimension: int):
        config.validate(warn=False)
        if dimension <= 0:
            raise ValueError("Dimension needs to be positive.")
        self.config = config
        self.dimension = int(dimension)
        self.offsets = tiling_offsets(config, self.dimension)
        self.offsets.flags.writeable = False

        radix = config.n_tiles + 1
        self._radix_weights = radix ** np.arange(self.dimension, dtype=np.uint64)
        self._tiling_keys = np.arange(config.n_tilings, dtype=np.uint64) * np.uint64(
            radix**self.dimension
        )
        size = config.hash_size
        self._shift = None
        if size & (size - 1) == 0:
            self._shift = np.uint64(64 - (size.bit_length() - 1))

    @property
    def n_features(self) -> int:
        return self.config.hash_size

    @property
    def n_active(self) -> int:
        return self.config.n_tilings

    def __repr__(self):
        return f"TileCoder({self.config}, dimension={self.dimension})"

    def cells(self, observations: np.ndarray) -> np.ndarray:
        """(m x D x d) integer cell coordinates of a batch."""
        observations = self._check_observations(observations)
        shifted = observations[:, np.newaxis, :] + self.offsets[np.newaxis, :, :]
        return np.floor(shifted * self.config.n_tiles).astype(np.int64)

    def keys(self, observations: np.ndarray) -> np.ndarray:
        """(m x D) collision-free integer key of (tiling, cell)."""
        cells = self.cells(observations).astype(np.uint64)
        return (cells * self._radix_weights).sum(axis=-1, dtype=np.uint64) + self._tiling_keys

    def hash(self, keys: np.ndarray) -> np.ndarray:
        if self.config.hash_size == 1:
            return np.zeros(np.shape(keys), dtype=np.int64)
        with np.errstate(over="ignore"):
            # uint64 products wrap modulo 2^64
            hashed = np.asarray(keys, dtype=np.uint64) * GOLDEN_MULTIPLIER
        if self._shift is not None:
            return (hashed >> self._shift).astype(np.int64)
        mixed = hashed ^ (hashed >> np.uint64(32))
        return (mixed % np.uint64(self.config.hash_size)).astype(np.int64)

    def encode_batch(self, observations: np.ndarray) -> np.ndarray:
        """(m x D) active indices in [0, hash_size)."""
        return self.hash(self.keys(observations))

    def encode(self, observation: np.ndarray) -> np.ndarray:
        """D active indices of a single observation."""
        observation = np.asarray(observation, dtype=float)
        if observation.shape != (self.dimension,):
            raise ValueError(
                f"Observation of shape {observation.shape} for dimension {self.dimension}."
            )
        return self.encode_batch(observation[np.newaxis, :])[0]

    def collision_rate(self, observations: np.ndarray, warn_above: float = 0.05) -> float:
        """Share of distinct (tiling, cell) keys that lose their own index."""
        keys = np.unique(self.keys(observations))
        indices = np.unique(self.hash(keys))
        rate = 1.0 - len(indices) / len(keys)
        if rate > warn_above:
            warnings.warn(f"High tile-coding collision rate of {rate:.3f}.")
        return float(rate)

    def _check_observations(self, observations) -> np.ndarray:
        observations = np.asarray(observations, dtype=float)
        if observations.ndim == 1:
            observations = observations.reshape(1, -1)
        if observations.shape[1] != self.dimension:
            raise ValueError(
                f"Observations with {observations.shape[1]} columns for dimension "
                + f"{self.dimension}."
            )
        if not np.all(np.isfinite(observations)) or np.any(
            (observations < 0) | (observations > 1)
        ):
            raise ValueError("Tile coding needs observations normalized to [0, 1].")
        return observations
