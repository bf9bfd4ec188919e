"""
Regularizer settings and the penalties it adds to the MSTDE objective.
"""
import logging
import warnings
from dataclasses import dataclass, fields
from enum import Enum
from functools import partial
from typing import Optional

import numpy as np

from sparse_representation_control import settings
from sparse_representation_control.network import MLPParams
from . import divergences
from .masks import dropout_mask, ksparse_indicator, ksparse_schedule, wta_indicator

logger = logging.getLogger(__name__)

# Keeps Bernoulli divergences finite for saturated sigmoid units
BERNOULLI_CLIP = 1e-12


class RegularizerKind(Enum):
    SKL_EXP = "skl_exp"
    KL_EXP = "kl_exp"
    SKL_BERN = "skl_bern"
    KL_BERN = "kl_bern"
    L1_WEIGHTS = "l1_weights"
    L2_WEIGHTS = "l2_weights"
    L1_ACTS = "l1_acts"
    L2_ACTS = "l2_acts"
    DROPOUT = "dropout"
    KSPARSE = "ksparse"
    WTA = "wta"
    NONE = "none"

    @classmethod
    def from_name(cls, name) -> "RegularizerKind":
        if isinstance(name, RegularizerKind):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"Unknown regularizer <<{name}>>.")

    @property
    def is_distributional(self) -> bool:
        return self in DISTRIBUTIONAL_KINDS

    @property
    def is_bernoulli(self) -> bool:
        return self in (RegularizerKind.SKL_BERN, RegularizerKind.KL_BERN)


DISTRIBUTIONAL_KINDS = (
    RegularizerKind.SKL_EXP,
    RegularizerKind.KL_EXP,
    RegularizerKind.SKL_BERN,
    RegularizerKind.KL_BERN,
)

# (value, gradient) of the per-unit divergence to the target
DIVERGENCES = {
    RegularizerKind.SKL_EXP: (divergences.skl_exponential, divergences.skl_exponential_grad),
    RegularizerKind.KL_EXP: (divergences.kl_exponential, divergences.kl_exponential_grad),
    RegularizerKind.SKL_BERN: (divergences.skl_bernoulli, divergences.skl_bernoulli_grad),
    RegularizerKind.KL_BERN: (divergences.kl_bernoulli, divergences.kl_bernoulli_grad),
}


def _warn_off_grid(name: str, value, grid) -> None:
    if not any(np.isclose(value, gg) for gg in grid):
        warnings.warn(f"{name}={value} is off the sweep grid {tuple(grid)}.")


@dataclass
class RegularizerSpec:
    """Which sparsity mechanism is used and its parameters.

    Only the fields relevant to the kind are set. The ksparse kind may in
    addition carry (beta, strength), in which case a Set-KL penalty is applied
    on the truncated activations."""

    kind: RegularizerKind = RegularizerKind.NONE
    beta: Optional[float] = None
    strength: Optional[float] = None
    dropout: Optional[float] = None
    k: Optional[int] = None
    k_percent: Optional[float] = None
    running_average: bool = False
    running_rate: float = 0.1
    ksparse_ramp: float = 0.25

    def __post_init__(self):
        self.kind = RegularizerKind.from_name(self.kind)

    @property
    def has_divergence(self) -> bool:
        return self.kind.is_distributional or (
            self.kind is RegularizerKind.KSPARSE and self.beta is not None
        )

    def validate(self, width: int = settings.REPRESENTATION_WIDTH, warn: bool = True) -> None:
        kind = self.kind
        allowed = {"kind", "running_average", "running_rate", "ksparse_ramp"}

        if kind.is_distributional:
            allowed |= {"beta", "strength"}
            self._check_divergence_parameters(kind.is_bernoulli, warn)
        elif kind in (
            RegularizerKind.L1_WEIGHTS,
            RegularizerKind.L2_WEIGHTS,
            RegularizerKind.L1_ACTS,
            RegularizerKind.L2_ACTS,
        ):
            allowed |= {"strength"}
            if self.strength is None or self.strength < 0:
                raise ValueError(f"Regularizer {kind.value} needs a strength >= 0.")
            if warn:
                _warn_off_grid("strength", self.strength, settings.GRID_NN_STRENGTH)
        elif kind is RegularizerKind.DROPOUT:
            allowed |= {"dropout"}
            if self.dropout is None or not 0 <= self.dropout < 1:
                raise ValueError("Dropout probability needs to be in [0, 1).")
            if warn:
                _warn_off_grid("dropout", self.dropout, settings.GRID_DROPOUT)
        elif kind is RegularizerKind.KSPARSE:
            allowed |= {"k", "beta", "strength"}
            if self.k is None or not 0 < int(self.k) <= width:
                raise ValueError(f"k needs to be in (0, {width}].")
            if (self.beta is None) != (self.strength is None):
                raise ValueError("k-sparse with Set-KL needs both beta and strength.")
            if self.beta is not None:
                self._check_divergence_parameters(False, warn)
            if warn:
                _warn_off_grid("k", self.k, settings.GRID_KSPARSE_K)
        elif kind is RegularizerKind.WTA:
            allowed |= {"k_percent"}
            if self.k_percent is None or not 0 < self.k_percent <= 100:
                raise ValueError("k_percent needs to be in (0, 100].")
            if warn:
                _warn_off_grid("k_percent", self.k_percent, settings.GRID_WTA_PERCENT)

        for ff in fields(self):
            if ff.name not in allowed and getattr(self, ff.name) is not None:
                raise ValueError(f"Field <<{ff.name}>> is not used by regularizer {kind.value}.")

        if not 0 < self.running_rate <= 1:
            raise ValueError("running_rate needs to be in (0, 1].")
        if not 0 <= self.ksparse_ramp <= 1:
            raise ValueError("ksparse_ramp needs to be in [0, 1].")

    def _check_divergence_parameters(self, bernoulli: bool, warn: bool) -> None:
        if self.beta is None or self.beta <= 0:
            raise ValueError("Target sparsity beta needs to be positive.")
        if bernoulli and self.beta >= 1:
            raise ValueError("Bernoulli target beta needs to be in (0, 1).")
        if self.strength is None or self.strength < 0:
            raise ValueError("Regularization strength needs to be >= 0.")
        if warn:
            _warn_off_grid("beta", self.beta, settings.GRID_BETA)
            _warn_off_grid("strength", self.strength, settings.GRID_KL_STRENGTH)

    def to_dict(self) -> dict:
        value = {"kind": self.kind.value}
        for ff in fields(self):
            if ff.name == "kind":
                continue
            entry = getattr(self, ff.name)
            if entry is not None and entry != ff.default:
                value[ff.name] = entry
        return value

    @classmethod
    def from_dict(cls, value: dict) -> "RegularizerSpec":
        value = dict(value)
        known = {ff.name for ff in fields(cls)}
        unknown = set(value) - known
        if unknown:
            raise ValueError(f"Unknown regularizer fields {sorted(unknown)}.")
        if value.get("k") is not None:
            value["k"] = int(value["k"])
        return cls(**value)


@dataclass
class NodeStatistics:
    """Mean activation beta_hat_j of every representation unit."""

    mean_activation: np.ndarray

    @classmethod
    def from_batch(cls, representation_batch: np.ndarray) -> "NodeStatistics":
        return cls(mean_activation=np.asarray(representation_batch, dtype=float).mean(axis=0))

    def updated(self, representation_batch: np.ndarray, rate: float) -> "NodeStatistics":
        """Exponential running average with the statistics of a new batch."""
        batch_mean = np.asarray(representation_batch, dtype=float).mean(axis=0)
        return NodeStatistics((1 - rate) * self.mean_activation + rate * batch_mean)

    @property
    def n_dead(self) -> int:
        return int(np.sum(self.mean_activation <= 0))


def activation_penalty(representation_batch: np.ndarray, kind: str = "l1") -> tuple:
    """Batch mean of sum_j |phi_j| (l1) or sum_j phi_j^2 (l2) with its gradient."""
    reps = np.asarray(representation_batch, dtype=float)
    if reps.ndim == 1:
        reps = reps.reshape(1, -1)
    n_batch = reps.shape[0]

    if kind == "l1":
        return np.sum(np.abs(reps)) / n_batch, np.sign(reps) / n_batch
    if kind == "l2":
        return np.sum(reps**2) / n_batch, 2 * reps / n_batch
    raise ValueError(f"Unknown activation penalty <<{kind}>>.")


def weight_penalty(params: MLPParams, kind: str = "l2") -> tuple[float, MLPParams]:
    """Penalty on all weight matrices and the value head (biases excluded)."""
    if kind not in ("l1", "l2"):
        raise ValueError(f"Unknown weight penalty <<{kind}>>.")

    grads = params.zeros_like()
    value = 0.0
    penalized = list(zip(params.weights, grads.weights))
    if params.value_head is not None:
        penalized.append((params.value_head, grads.value_head))

    for weight, grad in penalized:
        if kind == "l1":
            value += np.sum(np.abs(weight))
            grad[...] = np.sign(weight)
        else:
            value += np.sum(weight**2)
            grad[...] = 2 * weight
    return float(value), grads


def distributional_penalty(
    representation_batch: np.ndarray,
    kind: RegularizerKind,
    beta: float,
    running: Optional[NodeStatistics] = None,
    running_rate: float = 1.0,
) -> tuple[float, np.ndarray, NodeStatistics]:
    """Sum_j D(beta_hat_j) with the gradient wrt the batch activations.

    With `running` statistics the divergence is evaluated at the running
    average, which depends on this batch with weight `running_rate`."""
    reps = np.asarray(representation_batch, dtype=float)
    if reps.ndim == 1:
        reps = reps.reshape(1, -1)
    n_batch = reps.shape[0]
    kind = RegularizerKind.from_name(kind)
    value_function, grad_function = DIVERGENCES[kind]

    if running is None:
        stats = NodeStatistics.from_batch(reps)
        chain = 1.0 / n_batch
    else:
        stats = running.updated(reps, running_rate)
        chain = running_rate / n_batch

    beta_hat = stats.mean_activation
    if kind.is_bernoulli:
        beta_hat = np.clip(beta_hat, BERNOULLI_CLIP, 1 - BERNOULLI_CLIP)

    if kind is RegularizerKind.KL_EXP:
        # Dead units have no defined KL; they carry no gradient either
        alive = beta_hat > 0
        if not np.all(alive):
            logger.debug("%d dead units excluded from the KL penalty.", np.sum(~alive))
        per_unit = np.zeros(beta_hat.shape)
        per_unit_grad = np.zeros(beta_hat.shape)
        per_unit[alive] = value_function(beta_hat[alive], beta)
        per_unit_grad[alive] = grad_function(beta_hat[alive], beta)
    else:
        per_unit = value_function(beta_hat, beta)
        per_unit_grad = grad_function(beta_hat, beta)

    grad = np.broadcast_to(per_unit_grad * chain, reps.shape).copy()
    return float(np.sum(per_unit)), grad, stats


class RepresentationRegularizer:
    """Applies a RegularizerSpec during pretraining.

    Provides the masks of the forward passes (dropout, truncation) and the
    penalty terms; keeps the running node statistics when enabled."""

    def __init__(self, spec: RegularizerSpec, width: int, n_epochs: int = 1):
        spec.validate(width, warn=False)
        self.spec = spec
        self.width = width
        self.n_epochs = n_epochs
        self.running: Optional[NodeStatistics] = None

    @property
    def kind(self) -> RegularizerKind:
        return self.spec.kind

    def dropout_masks(self, batch_size: int, rng: np.random.Generator) -> Optional[np.ndarray]:
        """One mask per sample, shared by the forward passes of S and S'."""
        if self.kind is not RegularizerKind.DROPOUT or not self.spec.dropout:
            return None
        return dropout_mask(self.width, self.spec.dropout, rng, batch_size=batch_size)

    def current_k(self, epoch: int) -> Optional[int]:
        if self.kind is not RegularizerKind.KSPARSE:
            return None
        return ksparse_schedule(
            epoch, self.n_epochs, self.width, self.spec.k, ramp_fraction=self.spec.ksparse_ramp
        )

    def sparsifier(self, epoch: int):
        """Truncation of the training forward passes (None if unused)."""
        if self.kind is RegularizerKind.KSPARSE:
            return partial(ksparse_indicator, k=self.current_k(epoch))
        if self.kind is RegularizerKind.WTA:
            return partial(wta_indicator, k_percent=self.spec.k_percent)
        return None

    def inference_sparsifier(self):
        """Truncation kept when the frozen representation is used for control."""
        return inference_sparsifier(self.spec)

    def penalty(
        self, representation_batch: np.ndarray, params: MLPParams
    ) -> tuple[float, Optional[np.ndarray], Optional[MLPParams]]:
        """Returns (value, gradient wrt representation, gradient wrt params)."""
        spec = self.spec
        kind = spec.kind

        if spec.has_divergence:
            divergence_kind = kind if kind.is_distributional else RegularizerKind.SKL_EXP
            # The first batch seeds the running statistics with its own mean
            running = self.running if spec.running_average else None
            value, grad, stats = distributional_penalty(
                representation_batch,
                divergence_kind,
                spec.beta,
                running=running,
                running_rate=spec.running_rate,
            )
            if spec.running_average:
                self.running = stats
            return spec.strength * value, spec.strength * grad, None

        if kind in (RegularizerKind.L1_ACTS, RegularizerKind.L2_ACTS):
            value, grad = activation_penalty(representation_batch, kind.value[:2])
            return spec.strength * value, spec.strength * grad, None

        if kind in (RegularizerKind.L1_WEIGHTS, RegularizerKind.L2_WEIGHTS):
            value, grads = weight_penalty(params, kind.value[:2])
            return spec.strength * value, None, grads * spec.strength

        return 0.0, None, None

    def state(self) -> dict:
        """Serializable state for resumable training."""
        if self.running is None:
            return {}
        return {"running_mean": self.running.mean_activation.tolist()}

    def load_state(self, state: dict) -> None:
        if state.get("running_mean") is not None:
            self.running = NodeStatistics(np.asarray(state["running_mean"], dtype=float))


def inference_sparsifier(spec: RegularizerSpec):
    if spec.kind is RegularizerKind.KSPARSE:
        return partial(ksparse_indicator, k=int(spec.k))
    return None
