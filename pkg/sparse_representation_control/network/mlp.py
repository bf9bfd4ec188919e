"""
Dense feedforward network with explicit forward and reverse-mode passes.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import expit

# Returns a 0/1 indicator of the kept units for a batch of activations
Sparsifier = Callable[[np.ndarray], np.ndarray]


class Activation(Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"

    @classmethod
    def from_name(cls, name) -> "Activation":
        if isinstance(name, Activation):
            return name
        return cls(str(name).lower())

    def evaluate(self, pre_activation: np.ndarray) -> np.ndarray:
        if self is Activation.RELU:
            return np.maximum(pre_activation, 0.0)
        return expit(pre_activation)

    def derivative(self, pre_activation: np.ndarray, activation: np.ndarray) -> np.ndarray:
        if self is Activation.RELU:
            return (pre_activation > 0).astype(float)
        return activation * (1.0 - activation)


@dataclass
class MLPParams:
    """Weights W(l) (out x in) and biases b(l) of each layer, plus the linear
    value head w_v on the representation layer (pretraining only, no bias)."""

    weights: list
    biases: list
    activations: list
    value_head: Optional[np.ndarray] = None

    def __post_init__(self):
        self.activations = [Activation.from_name(aa) for aa in self.activations]
        if not (len(self.weights) == len(self.biases) == len(self.activations)):
            raise ValueError("Need one weight, bias and activation per layer.")

        for ii, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            if bias.shape != (weight.shape[0],):
                raise ValueError(f"Bias of layer {ii} does not match its weight.")
            if ii and weight.shape[1] != self.weights[ii - 1].shape[0]:
                raise ValueError(f"Layer {ii} does not chain with layer {ii - 1}.")

        if self.value_head is not None and self.value_head.shape != (
            self.representation_width,
        ):
            raise ValueError("Value head does not match the representation width.")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def representation_width(self) -> int:
        return self.weights[-1].shape[0]

    @property
    def layer_sizes(self) -> list:
        return [self.input_dim] + [ww.shape[0] for ww in self.weights]

    @property
    def representation_activation(self) -> Activation:
        return self.activations[-1]

    def arrays(self) -> list:
        """All parameter arrays in a fixed order [W0, b0, W1, b1, ..., w_v]."""
        arrays = []
        for weight, bias in zip(self.weights, self.biases):
            arrays += [weight, bias]
        if self.value_head is not None:
            arrays.append(self.value_head)
        return arrays

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> "MLPParams":
        """New parameters of the same structure from the `arrays` ordering."""
        n_layers = self.n_layers
        return MLPParams(
            weights=list(arrays[0 : 2 * n_layers : 2]),
            biases=list(arrays[1 : 2 * n_layers : 2]),
            activations=list(self.activations),
            value_head=arrays[2 * n_layers] if self.value_head is not None else None,
        )

    def copy(self) -> "MLPParams":
        return self.with_arrays([np.array(arr, copy=True) for arr in self.arrays()])

    def zeros_like(self) -> "MLPParams":
        return self.with_arrays([np.zeros_like(arr) for arr in self.arrays()])

    def without_value_head(self) -> "MLPParams":
        return MLPParams(
            weights=[np.array(ww) for ww in self.weights],
            biases=[np.array(bb) for bb in self.biases],
            activations=list(self.activations),
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(arr)) for arr in self.arrays())

    def __add__(self, other: "MLPParams") -> "MLPParams":
        return self.with_arrays([aa + bb for aa, bb in zip(self.arrays(), other.arrays())])

    def __mul__(self, factor: float) -> "MLPParams":
        return self.with_arrays([aa * factor for aa in self.arrays()])

    __rmul__ = __mul__


@dataclass
class ForwardCache:
    """Layer inputs (the batch first), pre-activations and the representation
    mask (dropout scaling times sparsification indicator) of one forward pass."""

    layer_inputs: list
    pre_activations: list
    activations: list
    mask: Optional[np.ndarray] = None
    masked_representation: np.ndarray = field(default=None, repr=False)

    @property
    def batch_size(self) -> int:
        return self.layer_inputs[0].shape[0]


def he_init(
    layer_sizes: Sequence[int],
    rng: np.random.Generator,
    activations: Optional[Sequence] = None,
    value_head: bool = True,
) -> MLPParams:
    """Zero-mean Gaussian weights with variance 2 / fan-in, zero biases."""
    layer_sizes = [int(ss) for ss in layer_sizes]
    if len(layer_sizes) < 2 or any(ss <= 0 for ss in layer_sizes):
        raise ValueError(f"Invalid layer sizes {layer_sizes}.")

    n_layers = len(layer_sizes) - 1
    if activations is None:
        activations = [Activation.RELU] * n_layers
    elif len(activations) != n_layers:
        raise ValueError("Need one activation per layer.")

    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))

    head = None
    if value_head:
        head = rng.normal(0.0, np.sqrt(2.0 / layer_sizes[-1]), size=layer_sizes[-1])

    return MLPParams(weights=weights, biases=biases, activations=activations, value_head=head)


def forward(
    params: MLPParams,
    batch: np.ndarray,
    dropout_mask: Optional[np.ndarray] = None,
    sparsifier: Optional[Sparsifier] = None,
) -> tuple[ForwardCache, np.ndarray]:
    """Forward pass of a (m x input_dim) batch.

    The representation is the final hidden layer after the nonlinearity and
    after the (optional) dropout mask and sparsification indicator."""
    batch = np.asarray(batch, dtype=float)
    if batch.ndim == 1:
        batch = batch.reshape(1, -1)
    if batch.shape[1] != params.input_dim:
        raise ValueError(
            f"Batch with {batch.shape[1]} columns for input dimension {params.input_dim}."
        )
    if not np.all(np.isfinite(batch)):
        raise ValueError("Non-finite network input.")

    layer_inputs, pre_activations, activations = [], [], []
    values = batch
    for weight, bias, activation in zip(params.weights, params.biases, params.activations):
        layer_inputs.append(values)
        pre_activation = values @ weight.T + bias
        values = activation.evaluate(pre_activation)
        pre_activations.append(pre_activation)
        activations.append(values)

    mask = None
    if dropout_mask is not None:
        dropout_mask = np.asarray(dropout_mask, dtype=float)
        if dropout_mask.shape[-1] != params.representation_width:
            raise ValueError("Dropout mask does not match the representation width.")
        mask = np.broadcast_to(dropout_mask, values.shape).astype(float)

    representation = values if mask is None else values * mask
    if sparsifier is not None:
        kept = sparsifier(representation)
        mask = kept if mask is None else mask * kept
        representation = representation * kept

    cache = ForwardCache(
        layer_inputs=layer_inputs,
        pre_activations=pre_activations,
        activations=activations,
        mask=mask,
        masked_representation=representation,
    )
    return cache, representation


def backward(
    params: MLPParams, cache: ForwardCache, grad_representation: np.ndarray
) -> MLPParams:
    """Reverse-mode gradients given dLoss/dRepresentation (m x width).

    The value-head gradient (if the params carry one) is returned as zeros;
    it is filled in by the objective that uses the head."""
    grad = np.asarray(grad_representation, dtype=float)
    if grad.ndim == 1:
        grad = grad.reshape(1, -1)
    if grad.shape != cache.activations[-1].shape:
        raise ValueError(
            f"Gradient of shape {grad.shape} for representation of shape "
            + f"{cache.activations[-1].shape}."
        )
    if len(cache.pre_activations) != params.n_layers:
        raise ValueError("Cache was not produced by these parameters.")

    if cache.mask is not None:
        grad = grad * cache.mask

    grad_weights = [None] * params.n_layers
    grad_biases = [None] * params.n_layers
    for ll in reversed(range(params.n_layers)):
        grad_pre = grad * params.activations[ll].derivative(
            cache.pre_activations[ll], cache.activations[ll]
        )
        grad_weights[ll] = grad_pre.T @ cache.layer_inputs[ll]
        grad_biases[ll] = grad_pre.sum(axis=0)
        if ll:
            grad = grad_pre @ params.weights[ll]

    head = None if params.value_head is None else np.zeros_like(params.value_head)
    return MLPParams(
        weights=grad_weights,
        biases=grad_biases,
        activations=list(params.activations),
        value_head=head,
    )


def representation(params: MLPParams, batch: np.ndarray, sparsifier=None) -> np.ndarray:
    """Unmasked representation phi(s) of a batch of observations."""
    _, rep = forward(params, batch, sparsifier=sparsifier)
    return rep
