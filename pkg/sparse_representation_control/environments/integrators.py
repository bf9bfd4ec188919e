""" Explicit integration schemes for the continuous-time domains."""
from typing import Callable

import numpy as np

Derivative = Callable[[np.ndarray], np.ndarray]


def euler_step(dt: float, x: np.ndarray, derivative: Derivative) -> np.ndarray:
    return x + dt * derivative(x)


def rk4_step(dt: float, x: np.ndarray, derivative: Derivative) -> np.ndarray:
    """Fourth order integration of an autonomous differential equation
    Paramters
    ---------
    dt: time step [s]
    x: state
    derivative: function returning dx/dt at a state

    Returns
    -------
    Runge-Kutta step of the state
    """
    k1 = dt * derivative(x)
    k2 = dt * derivative(x + 0.5 * k1)
    k3 = dt * derivative(x + 0.5 * k2)
    k4 = dt * derivative(x + k3)

    return x + 1.0 / 6 * (k1 + 2 * k2 + 2 * k3 + k4)  # + O(dt^5)


def integrate(
    dt: float, x: np.ndarray, derivative: Derivative, n_substeps: int = 1, order: int = 1
) -> np.ndarray:
    """Integrates over n_substeps steps of size dt with euler (order=1) or rk4 (order=4)."""
    if order == 1:
        step = euler_step
    elif order == 4:
        step = rk4_step
    else:
        raise ValueError(f"Integration of order {order} is not implemented (use 1 or 4).")

    for _ in range(n_substeps):
        x = step(dt, x, derivative)
    return x
