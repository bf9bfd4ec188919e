"""
Frozen feature providers for the control agent: a pretrained network or a
tile coder.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from sparse_representation_control.network import Activation, MLPParams, representation
from sparse_representation_control.regularizers import RegularizerKind, RegularizerSpec
from sparse_representation_control.regularizers import inference_sparsifier
from sparse_representation_control.tilecoding import TileCoder
from sparse_representation_control.utils import array_fingerprint

# Regularizers whose representations count as sparse for the choice of the
# Sarsa step-size method
SPARSE_KINDS = (
    RegularizerKind.SKL_EXP,
    RegularizerKind.KL_EXP,
    RegularizerKind.SKL_BERN,
    RegularizerKind.KL_BERN,
    RegularizerKind.KSPARSE,
    RegularizerKind.WTA,
    RegularizerKind.L1_ACTS,
)


@dataclass(frozen=True)
class IndexFeatures:
    """Binary features given by their active indices (duplicates count twice)."""

    indices: np.ndarray
    width: int

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.width)
        np.add.at(dense, self.indices, 1.0)
        return dense


Features = Union[np.ndarray, IndexFeatures]


class RepresentationProvider(ABC):
    """(Virtual) base class of frozen representations phi(obs)."""

    tag: str = ""
    is_sparse: bool = True

    @property
    @abstractmethod
    def width(self) -> int:
        pass

    @abstractmethod
    def features(self, obs: np.ndarray) -> Features:
        pass

    @abstractmethod
    def fingerprint(self) -> str:
        """Hash of everything the features depend on."""
        pass

    def dense_features(self, observations: np.ndarray) -> np.ndarray:
        """(m x width) dense representation of a batch."""
        observations = np.atleast_2d(np.asarray(observations, dtype=float))
        rows = []
        for obs in observations:
            feature = self.features(obs)
            rows.append(feature.to_dense() if isinstance(feature, IndexFeatures) else feature)
        return np.array(rows)


class FrozenNetworkRepresentation(RepresentationProvider):
    tag = "network"

    def __init__(
        self,
        params: MLPParams,
        regularizer: Optional[RegularizerSpec] = None,
    ):
        params = params.without_value_head()
        for arr in params.arrays():
            arr.flags.writeable = False
        self._params = params
        self.regularizer = regularizer or RegularizerSpec()
        self._sparsifier = inference_sparsifier(self.regularizer)
        self.is_sparse = self.regularizer.kind in SPARSE_KINDS

    @property
    def params(self) -> MLPParams:
        return self._params

    @property
    def width(self) -> int:
        return self._params.representation_width

    @property
    def input_dim(self) -> int:
        return self._params.input_dim

    @property
    def activation(self) -> Activation:
        return self._params.representation_activation

    @property
    def sparsifier(self):
        return self._sparsifier

    def features(self, obs: np.ndarray) -> np.ndarray:
        return representation(self._params, obs, sparsifier=self._sparsifier)[0]

    def dense_features(self, observations: np.ndarray) -> np.ndarray:
        return representation(self._params, observations, sparsifier=self._sparsifier)

    def fingerprint(self) -> str:
        return array_fingerprint(self._params.arrays())

    def probe_fingerprint(self, observations: np.ndarray) -> str:
        """Hash of the representation at fixed probe observations."""
        return array_fingerprint([self.dense_features(observations)])


class TileCodingRepresentation(RepresentationProvider):
    tag = "tile_coding"
    is_sparse = True

    def __init__(self, tile_coder: TileCoder):
        self.tile_coder = tile_coder

    @property
    def width(self) -> int:
        return self.tile_coder.n_features

    def features(self, obs: np.ndarray) -> IndexFeatures:
        return IndexFeatures(indices=self.tile_coder.encode(obs), width=self.width)

    def fingerprint(self) -> str:
        config = self.tile_coder.config
        return array_fingerprint(
            [
                self.tile_coder.offsets,
                np.array([config.n_tiles, config.n_tilings, config.hash_size]),
            ]
        )
