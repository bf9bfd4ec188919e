"""
Batch pretraining of the representation network on the MSTDE objective.
"""
import logging
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from sparse_representation_control import settings
from sparse_representation_control.analysis.metric_evaluation import (
    active_threshold,
    instance_sparsity,
)
from sparse_representation_control.environments import DomainType
from sparse_representation_control.network import (
    Activation,
    MLPParams,
    Checkpoint,
    he_init,
    load_checkpoint,
    make_optimizer,
    optimizer_step,
    representation,
    save_checkpoint,
)
from sparse_representation_control.regularizers import (
    RegularizerKind,
    RegularizerSpec,
    RepresentationRegularizer,
    inference_sparsifier,
)
from sparse_representation_control.utils import config_hash, make_rng, write_csv
from .dataset import TransitionBatch
from .mstde import mstde_loss

logger = logging.getLogger(__name__)


def default_epochs(domain) -> int:
    if DomainType.from_name(domain) is DomainType.ACROBOT:
        return settings.DEFAULT_EPOCHS_ACROBOT
    return settings.DEFAULT_EPOCHS


@dataclass
class TrainConfig:
    """Pretraining setup of one representation.

    `hidden_sizes` are the hidden layer widths (the last one is the
    representation), `activations` one tag per hidden layer."""

    regularizer: RegularizerSpec = field(default_factory=RegularizerSpec)
    epochs: int = settings.DEFAULT_EPOCHS
    batch_size: int = settings.MINI_BATCH_SIZE
    step_size: float = 1e-3
    seed: int = 0
    hidden_sizes: tuple = settings.HIDDEN_SIZES
    activations: tuple = ("relu", "relu")
    optimizer: str = "adam"

    def __post_init__(self):
        if isinstance(self.regularizer, dict):
            self.regularizer = RegularizerSpec.from_dict(self.regularizer)
        self.hidden_sizes = tuple(int(hh) for hh in self.hidden_sizes)
        self.activations = tuple(Activation.from_name(aa).value for aa in self.activations)

    @property
    def width(self) -> int:
        return self.hidden_sizes[-1]

    @property
    def representation_activation(self) -> Activation:
        return Activation.from_name(self.activations[-1])

    def validate(self) -> None:
        if self.epochs <= 0 or self.batch_size <= 0:
            raise ValueError("Epochs and batch size need to be positive.")
        if self.step_size <= 0:
            raise ValueError("Step size needs to be positive.")
        if len(self.activations) != len(self.hidden_sizes):
            raise ValueError("Need one activation per hidden layer.")
        if self.optimizer not in ("adam", "rmsprop", "step_decay_sgd"):
            raise ValueError(f"Unknown optimizer <<{self.optimizer}>>.")
        self.regularizer.validate(self.width)
        if (
            self.regularizer.kind.is_bernoulli
            and self.representation_activation is not Activation.SIGMOID
        ):
            raise ValueError("Bernoulli targets need a sigmoid representation layer.")

    def to_dict(self) -> dict:
        value = {ff.name: getattr(self, ff.name) for ff in fields(self)}
        value["regularizer"] = self.regularizer.to_dict()
        value["hidden_sizes"] = list(self.hidden_sizes)
        value["activations"] = list(self.activations)
        return value

    @classmethod
    def from_dict(cls, value: dict) -> "TrainConfig":
        known = {ff.name for ff in fields(cls)}
        unknown = set(value) - known
        if unknown:
            raise ValueError(f"Unknown train fields {sorted(unknown)}.")
        return cls(**value)


@dataclass
class EpochRecord:
    epoch: int
    mstde: float
    penalty: float
    rmse: Optional[float] = None
    sparsity: Optional[float] = None


@dataclass
class TrainResult:
    """Frozen representation (value head detached), the pretraining value
    head and the loss history."""

    params: MLPParams
    value_head: np.ndarray
    history: list
    config: TrainConfig

    @property
    def sparsifier(self):
        return inference_sparsifier(self.config.regularizer)


def rmse_eval(
    params: MLPParams,
    value_head: np.ndarray,
    test_states: np.ndarray,
    true_values: np.ndarray,
    sparsifier=None,
) -> float:
    """Root mean squared error of phi(x)^T w_v against the true values."""
    test_states = np.asarray(test_states, dtype=float)
    true_values = np.asarray(true_values, dtype=float).reshape(-1)
    if not len(true_values):
        raise ValueError("Empty test set.")
    if len(test_states) != len(true_values):
        raise ValueError("Test states and true values differ in length.")

    predicted = representation(params, test_states, sparsifier=sparsifier) @ value_head
    return float(np.sqrt(np.mean((predicted - true_values) ** 2)))


class RepresentationTrainer:
    """Mini-batch optimization of MSTDE + regularizer penalty.

    An epoch are ceil(N / batch_size) mini-batches drawn i.i.d. with
    replacement. The trainer can be checkpointed after any epoch and resumed
    with bit-identical continuation."""

    def __init__(
        self,
        config: TrainConfig,
        data: TransitionBatch,
        oracle: Optional[tuple] = None,
        probe_observations: Optional[np.ndarray] = None,
    ):
        config.validate()
        self.config = config
        self.data = data
        self.oracle = oracle
        self.probe_observations = probe_observations

        layer_sizes = [data.dimension] + list(config.hidden_sizes)
        self.params = he_init(
            layer_sizes,
            make_rng(config.seed, "init"),
            activations=config.activations,
            value_head=True,
        )
        self.rng = make_rng(config.seed, "train")
        self.opt_state = make_optimizer(config.optimizer, config.step_size, self.params.arrays())
        self.regularizer = RepresentationRegularizer(
            config.regularizer, config.width, n_epochs=config.epochs
        )
        self.epoch = 0
        self.history = []

    @property
    def is_finished(self) -> bool:
        return self.epoch >= self.config.epochs

    def train_epoch(self) -> EpochRecord:
        config = self.config
        obs, _, rewards, next_obs, discounts, _, _ = self.data.arrays()
        n_minibatches = self.data.n_minibatches(config.batch_size)

        mstde_sum = 0.0
        penalty_sum = 0.0
        for ii in range(n_minibatches):
            idx = self.data.sample_indices(self.rng, config.batch_size)
            masks = self.regularizer.dropout_masks(config.batch_size, self.rng)
            result = mstde_loss(
                self.params,
                obs[idx],
                rewards[idx],
                next_obs[idx],
                discounts[idx],
                regularizer=self.regularizer,
                epoch=self.epoch,
                dropout_masks=masks,
            )
            if not np.isfinite(result.loss) or not result.grads.is_finite():
                raise FloatingPointError(
                    f"Non-finite loss at epoch {self.epoch}, mini-batch {ii}: "
                    + f"mstde={result.mstde}, penalty={result.penalty}."
                )
            new_arrays, self.opt_state = optimizer_step(
                self.opt_state, self.params.arrays(), result.grads.arrays()
            )
            self.params = self.params.with_arrays(new_arrays)
            mstde_sum += result.mstde
            penalty_sum += result.penalty

        record = EpochRecord(
            epoch=self.epoch,
            mstde=mstde_sum / n_minibatches,
            penalty=penalty_sum / n_minibatches,
        )
        if self.oracle is not None:
            test_states, true_values = self.oracle
            record.rmse = rmse_eval(
                self.params,
                self.params.value_head,
                test_states,
                true_values,
                sparsifier=self.regularizer.inference_sparsifier(),
            )
        if self.probe_observations is not None:
            reps = representation(
                self.params,
                self.probe_observations,
                sparsifier=self.regularizer.inference_sparsifier(),
            )
            threshold = active_threshold(self.config.representation_activation)
            record.sparsity = float(np.mean(instance_sparsity(reps, threshold)))

        self.history.append(record)
        self.epoch += 1
        logger.info(
            "Epoch %d/%d: mstde=%.6f penalty=%.6f rmse=%s",
            self.epoch,
            config.epochs,
            record.mstde,
            record.penalty,
            "-" if record.rmse is None else f"{record.rmse:.4f}",
        )
        return record

    def run(self, checkpoint_file: Optional[str] = None) -> TrainResult:
        while not self.is_finished:
            self.train_epoch()
            if checkpoint_file is not None:
                self.save(checkpoint_file)
        return self.result()

    def result(self) -> TrainResult:
        return TrainResult(
            params=self.params.without_value_head(),
            value_head=np.array(self.params.value_head),
            history=list(self.history),
            config=self.config,
        )

    def save(self, file_name: str) -> str:
        metadata = {
            "epoch": self.epoch,
            "train_config": self.config.to_dict(),
            "config_hash": config_hash(self.config.to_dict()),
            "rng_state": self.rng.bit_generator.state,
            "regularizer_state": self.regularizer.state(),
            "history": [vars(rr) for rr in self.history],
        }
        return save_checkpoint(file_name, self.params, self.opt_state, metadata)

    @classmethod
    def resume(
        cls,
        file_name: str,
        data: TransitionBatch,
        oracle: Optional[tuple] = None,
        probe_observations: Optional[np.ndarray] = None,
        epochs: Optional[int] = None,
    ) -> "RepresentationTrainer":
        """Trainer in the state of the checkpoint; `epochs` extends the run."""
        checkpoint: Checkpoint = load_checkpoint(file_name)
        metadata = checkpoint.metadata
        if "rng_state" not in metadata:
            raise ValueError(f"Checkpoint <<{file_name}>> holds no training state.")

        config = TrainConfig.from_dict(metadata["train_config"])
        if epochs is not None:
            config.epochs = int(epochs)
        trainer = cls(config, data, oracle=oracle, probe_observations=probe_observations)
        if trainer.params.layer_sizes != checkpoint.params.layer_sizes:
            raise ValueError("Checkpoint does not match the dataset dimension.")
        trainer.params = checkpoint.params
        trainer.opt_state = checkpoint.opt_state
        trainer.rng.bit_generator.state = metadata["rng_state"]
        trainer.regularizer.load_state(metadata["regularizer_state"])
        trainer.epoch = int(metadata["epoch"])
        trainer.history = [EpochRecord(**rr) for rr in metadata["history"]]
        logger.info("Resumed training at epoch %d from %s", trainer.epoch, file_name)
        return trainer


def train_representation(
    config: TrainConfig,
    data: TransitionBatch,
    oracle: Optional[tuple] = None,
    checkpoint_file: Optional[str] = None,
    probe_observations: Optional[np.ndarray] = None,
) -> TrainResult:
    """He-initialized network trained for `config.epochs` epochs.

    `oracle` = (test observations, true values) adds the RMSE to the history."""
    if not len(data):
        raise ValueError("Empty training data.")
    if config.regularizer.kind is RegularizerKind.NONE:
        logger.debug("Training without sparsity regularizer.")
    trainer = RepresentationTrainer(
        config, data, oracle=oracle, probe_observations=probe_observations
    )
    return trainer.run(checkpoint_file)


def write_history_csv(file_name: str, history: list, hash_value: Optional[str] = None) -> str:
    rows = [
        (
            rr.epoch,
            rr.mstde,
            rr.penalty,
            "" if rr.rmse is None else rr.rmse,
            "" if rr.sparsity is None else rr.sparsity,
        )
        for rr in history
    ]
    header = ("epoch", "mstde", "penalty", "rmse", "mean_instance_sparsity")
    return write_csv(file_name, header, rows, hash_value)
