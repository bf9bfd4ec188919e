"""
First-order optimizers on lists of parameter arrays: Adam, RMSprop and
SGD with a step-decay schedule.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np


class OptimizerType(Enum):
    ADAM = "adam"
    RMSPROP = "rmsprop"
    STEP_DECAY_SGD = "step_decay_sgd"

    @classmethod
    def from_name(cls, name) -> "OptimizerType":
        if isinstance(name, OptimizerType):
            return name
        return cls(str(name).lower())


@dataclass
class OptState:
    """Accumulators mirror the parameter arrays.

    Attributes
    ----------
    first_moments: Adam running mean of the gradient
    second_moments: Adam / RMSprop running mean of the squared gradient
    step_count: number of applied updates (Adam bias correction)
    schedule_count: number of schedule ticks (episodes) for the step decay
    """

    kind: OptimizerType
    step_size: float
    first_moments: list = field(default_factory=list)
    second_moments: list = field(default_factory=list)
    step_count: int = 0
    schedule_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    rms_decay: float = 0.9
    eps: float = 1e-8
    decay_factor: float = 0.5
    decay_every: int = 25

    @property
    def current_step_size(self) -> float:
        if self.kind is OptimizerType.STEP_DECAY_SGD:
            return self.step_size * self.decay_factor ** (
                self.schedule_count // self.decay_every
            )
        return self.step_size

    def scalars(self) -> dict:
        """Everything but the accumulators (for checkpoints)."""
        return {
            "kind": self.kind.value,
            "step_size": self.step_size,
            "step_count": self.step_count,
            "schedule_count": self.schedule_count,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "rms_decay": self.rms_decay,
            "eps": self.eps,
            "decay_factor": self.decay_factor,
            "decay_every": self.decay_every,
        }


def make_optimizer(
    kind, step_size: float, template: Sequence[np.ndarray], **kwargs
) -> OptState:
    kind = OptimizerType.from_name(kind)
    if step_size < 0:
        raise ValueError("Step size needs to be nonnegative.")

    state = OptState(kind=kind, step_size=float(step_size), **kwargs)
    if kind is OptimizerType.ADAM:
        state.first_moments = [np.zeros_like(arr, dtype=float) for arr in template]
    if kind in (OptimizerType.ADAM, OptimizerType.RMSPROP):
        state.second_moments = [np.zeros_like(arr, dtype=float) for arr in template]
    return state


def optimizer_step(
    opt: OptState, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]
) -> tuple[list, OptState]:
    """One descent step. Returns new parameter arrays and the new state;
    inputs are not modified."""
    if len(params) != len(grads):
        raise ValueError("Number of parameter and gradient arrays differs.")
    for pp, gg in zip(params, grads):
        if np.shape(pp) != np.shape(gg):
            raise ValueError(f"Gradient of shape {np.shape(gg)} for parameter {np.shape(pp)}.")

    step_count = opt.step_count + 1
    new_params = []

    if opt.kind is OptimizerType.ADAM:
        first_moments, second_moments = [], []
        correction1 = 1 - opt.beta1**step_count
        correction2 = 1 - opt.beta2**step_count
        for pp, gg, mm, vv in zip(params, grads, opt.first_moments, opt.second_moments):
            mm = opt.beta1 * mm + (1 - opt.beta1) * gg
            vv = opt.beta2 * vv + (1 - opt.beta2) * gg**2
            m_hat = mm / correction1
            v_hat = vv / correction2
            new_params.append(pp - opt.step_size * m_hat / (np.sqrt(v_hat) + opt.eps))
            first_moments.append(mm)
            second_moments.append(vv)
        return new_params, replace(
            opt,
            first_moments=first_moments,
            second_moments=second_moments,
            step_count=step_count,
        )

    if opt.kind is OptimizerType.RMSPROP:
        second_moments = []
        for pp, gg, vv in zip(params, grads, opt.second_moments):
            vv = opt.rms_decay * vv + (1 - opt.rms_decay) * gg**2
            new_params.append(pp - opt.step_size * gg / (np.sqrt(vv) + opt.eps))
            second_moments.append(vv)
        return new_params, replace(opt, second_moments=second_moments, step_count=step_count)

    step_size = opt.current_step_size
    new_params = [pp - step_size * gg for pp, gg in zip(params, grads)]
    return new_params, replace(opt, step_count=step_count)


def advance_schedule(opt: OptState) -> OptState:
    """Tick of the step-decay schedule (called once per episode)."""
    return replace(opt, schedule_count=opt.schedule_count + 1)
