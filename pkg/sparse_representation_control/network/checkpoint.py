"""
Checkpoint files of the network parameters (and optional optimizer state).
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sparse_representation_control.utils import read_record_stream, write_record_stream
from .mlp import MLPParams
from .optimizers import OptState, OptimizerType

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = "SRCCKPT"
CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    params: MLPParams
    opt_state: Optional[OptState] = None
    metadata: dict = field(default_factory=dict)


def save_checkpoint(
    file_name: str,
    params: MLPParams,
    opt_state: Optional[OptState] = None,
    metadata: Optional[dict] = None,
) -> str:
    arrays = params.arrays()
    header = {
        "layer_sizes": params.layer_sizes,
        "activations": [aa.value for aa in params.activations],
        "has_value_head": params.value_head is not None,
        "metadata": metadata or {},
        "optimizer": None,
    }
    if opt_state is not None:
        header["optimizer"] = dict(
            opt_state.scalars(),
            n_first=len(opt_state.first_moments),
            n_second=len(opt_state.second_moments),
        )
        arrays = arrays + list(opt_state.first_moments) + list(opt_state.second_moments)

    write_record_stream(file_name, CHECKPOINT_MAGIC, CHECKPOINT_VERSION, header, arrays)
    logger.info("Checkpoint written to %s", file_name)
    return file_name


def load_checkpoint(file_name: str) -> Checkpoint:
    header, arrays = read_record_stream(file_name, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)

    n_layers = len(header["layer_sizes"]) - 1
    n_param_arrays = 2 * n_layers + int(header["has_value_head"])
    param_arrays = arrays[:n_param_arrays]
    params = MLPParams(
        weights=list(param_arrays[0 : 2 * n_layers : 2]),
        biases=list(param_arrays[1 : 2 * n_layers : 2]),
        activations=header["activations"],
        value_head=param_arrays[2 * n_layers] if header["has_value_head"] else None,
    )

    opt_state = None
    if header["optimizer"] is not None:
        scalars = dict(header["optimizer"])
        n_first = scalars.pop("n_first")
        n_second = scalars.pop("n_second")
        moments = arrays[n_param_arrays:]
        opt_state = OptState(
            kind=OptimizerType.from_name(scalars.pop("kind")),
            first_moments=list(moments[:n_first]),
            second_moments=list(moments[n_first : n_first + n_second]),
            **scalars,
        )

    return Checkpoint(params=params, opt_state=opt_state, metadata=header["metadata"])


def params_equal(params1: MLPParams, params2: MLPParams) -> bool:
    arrays1, arrays2 = params1.arrays(), params2.arrays()
    return (
        params1.activations == params2.activations
        and len(arrays1) == len(arrays2)
        and all(np.array_equal(aa, bb) for aa, bb in zip(arrays1, arrays2))
    )
