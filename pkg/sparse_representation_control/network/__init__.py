"""
The :mod:`network` module implements the two-hidden-layer representation
network, its optimizers and checkpoint files.
"""
from .mlp import (
    Activation,
    MLPParams,
    ForwardCache,
    he_init,
    forward,
    backward,
    representation,
)
from .optimizers import (
    OptimizerType,
    OptState,
    make_optimizer,
    optimizer_step,
    advance_schedule,
)
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint, params_equal

__all__ = [
    "Activation",
    "MLPParams",
    "ForwardCache",
    "he_init",
    "forward",
    "backward",
    "representation",
    "OptimizerType",
    "OptState",
    "make_optimizer",
    "optimizer_step",
    "advance_schedule",
    "Checkpoint",
    "save_checkpoint",
    "load_checkpoint",
    "params_equal",
]
