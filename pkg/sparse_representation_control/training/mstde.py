"""
Mean squared temporal-difference error of a linear value head on the
representation, with its full gradient.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from sparse_representation_control.network import MLPParams, backward, forward
from sparse_representation_control.regularizers import RepresentationRegularizer


@dataclass
class MSTDEResult:
    loss: float
    mstde: float
    penalty: float
    grads: MLPParams
    td_errors: np.ndarray
    representation: np.ndarray


def mstde_loss(
    params: MLPParams,
    obs: np.ndarray,
    rewards: np.ndarray,
    next_obs: np.ndarray,
    discounts: np.ndarray,
    regularizer: Optional[RepresentationRegularizer] = None,
    epoch: int = 0,
    dropout_masks: Optional[np.ndarray] = None,
) -> MSTDEResult:
    """Loss mean(delta^2) + penalty, delta = R + gamma v(S') - v(S), v = phi^T w_v.

    The gradient flows through both phi(S) and phi(S'). The same dropout
    masks are applied to both forward passes; the penalty uses the
    activations phi(S) of this batch."""
    if params.value_head is None:
        raise ValueError("MSTDE needs parameters with a value head.")
    rewards = np.asarray(rewards, dtype=float).reshape(-1)
    discounts = np.asarray(discounts, dtype=float).reshape(-1)
    n_batch = rewards.shape[0]
    if not n_batch:
        raise ValueError("Empty batch.")

    sparsifier = None if regularizer is None else regularizer.sparsifier(epoch)
    cache, phi = forward(params, obs, dropout_mask=dropout_masks, sparsifier=sparsifier)
    next_cache, next_phi = forward(
        params, next_obs, dropout_mask=dropout_masks, sparsifier=sparsifier
    )
    if phi.shape[0] != n_batch or next_phi.shape[0] != n_batch:
        raise ValueError("Observations, rewards and discounts differ in length.")

    value_head = params.value_head
    td_errors = rewards + discounts * (next_phi @ value_head) - phi @ value_head
    mstde = float(np.mean(td_errors**2))

    grad_delta = 2.0 * td_errors / n_batch
    grad_phi = -np.outer(grad_delta, value_head)
    grad_next_phi = np.outer(grad_delta * discounts, value_head)
    grad_value_head = (discounts[:, np.newaxis] * next_phi - phi).T @ grad_delta

    penalty = 0.0
    grad_params_penalty = None
    if regularizer is not None:
        penalty, grad_reps, grad_params_penalty = regularizer.penalty(phi, params)
        if grad_reps is not None:
            grad_phi = grad_phi + grad_reps

    grads = backward(params, cache, grad_phi) + backward(params, next_cache, grad_next_phi)
    arrays = grads.arrays()
    arrays[-1] = grad_value_head
    grads = grads.with_arrays(arrays)
    if grad_params_penalty is not None:
        grads = grads + grad_params_penalty

    return MSTDEResult(
        loss=mstde + penalty,
        mstde=mstde,
        penalty=float(penalty),
        grads=grads,
        td_errors=td_errors,
        representation=phi,
    )
