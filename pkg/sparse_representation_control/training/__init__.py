"""
The :mod:`training` module implements the batch pretraining of
representations: dataset generation, the MSTDE objective and the training loop.
"""
from .dataset import TransitionBatch, generate_dataset, save_dataset, load_dataset
from .mstde import MSTDEResult, mstde_loss
from .trainer import (
    TrainConfig,
    EpochRecord,
    TrainResult,
    RepresentationTrainer,
    default_epochs,
    rmse_eval,
    train_representation,
    write_history_csv,
)

__all__ = [
    "TransitionBatch",
    "generate_dataset",
    "save_dataset",
    "load_dataset",
    "MSTDEResult",
    "mstde_loss",
    "TrainConfig",
    "EpochRecord",
    "TrainResult",
    "RepresentationTrainer",
    "default_epochs",
    "rmse_eval",
    "train_representation",
    "write_history_csv",
]
