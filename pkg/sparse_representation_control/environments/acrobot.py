"""
Acrobot: two-link underactuated pendulum, swing the tip above the bar.
"""
from math import pi

import numpy as np

from ._base import Environment
from .integrators import integrate
from .state import DomainType


def wrap_angle(angle):
    """Wraps to [-pi, pi)."""
    return (angle + pi) % (2 * pi) - pi


class Acrobot(Environment):
    """Raw state (theta1, theta2, theta1_dot, theta2_dot); torque on the second
    joint in {-1, 0, +1}.

    The textbook parameterization: unit masses / lengths / moments of inertia,
    centers of mass at half the link length, actions held for four
    Euler steps of 0.05 s (optionally integrated with rk4)."""

    domain = DomainType.ACROBOT
    n_actions = 3
    action_names = ("negative_torque", "no_torque", "positive_torque")

    def __init__(
        self,
        link_mass=(1.0, 1.0),
        link_length=(1.0, 1.0),
        link_com=(0.5, 0.5),
        link_inertia=(1.0, 1.0),
        gravity: float = 9.8,
        max_velocity=(4 * pi, 9 * pi),
        time_step: float = 0.05,
        n_substeps: int = 4,
        integrator: str = "euler",
        start_noise: float = 0.1,
        goal_height: float = 1.0,
        *args,
        **kwargs,
    ):
        super().__init__(*args, **kwargs)
        self.link_mass = tuple(float(vv) for vv in link_mass)
        self.link_length = tuple(float(vv) for vv in link_length)
        self.link_com = tuple(float(vv) for vv in link_com)
        self.link_inertia = tuple(float(vv) for vv in link_inertia)
        self.gravity = float(gravity)
        self.max_velocity = tuple(float(vv) for vv in max_velocity)
        self.time_step = float(time_step)
        self.n_substeps = int(n_substeps)
        self.start_noise = float(start_noise)
        self.goal_height = float(goal_height)

        if integrator not in ("euler", "rk4"):
            raise ValueError(f"Unknown integrator <<{integrator}>>, use 'euler' or 'rk4'.")
        self.integrator = integrator

    @property
    def state_low(self) -> np.ndarray:
        return np.array([-pi, -pi, -self.max_velocity[0], -self.max_velocity[1]])

    @property
    def state_high(self) -> np.ndarray:
        return np.array([pi, pi, self.max_velocity[0], self.max_velocity[1]])

    @property
    def params(self) -> dict:
        return {
            **super().params,
            "link_mass": list(self.link_mass),
            "link_length": list(self.link_length),
            "link_com": list(self.link_com),
            "link_inertia": list(self.link_inertia),
            "gravity": self.gravity,
            "max_velocity": list(self.max_velocity),
            "time_step": self.time_step,
            "n_substeps": self.n_substeps,
            "integrator": self.integrator,
            "start_noise": self.start_noise,
            "goal_height": self.goal_height,
        }

    @staticmethod
    def torque(action: int) -> float:
        return float(action) - 1.0

    def tip_height(self, raw: np.ndarray) -> float:
        theta1, theta2 = raw[0], raw[1]
        return -self.link_length[0] * np.cos(theta1) - self.link_length[1] * np.cos(
            theta1 + theta2
        )

    def is_terminal_state(self, raw: np.ndarray) -> bool:
        return self.tip_height(raw) > self.goal_height

    def sample_start(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-self.start_noise, self.start_noise, size=4)

    def get_derivative(self, x: np.ndarray, torque: float) -> np.ndarray:
        m1, m2 = self.link_mass
        l1, _ = self.link_length
        lc1, lc2 = self.link_com
        i1, i2 = self.link_inertia
        g = self.gravity
        theta1, theta2, dtheta1, dtheta2 = x

        d1 = (
            m1 * lc1**2
            + m2 * (l1**2 + lc2**2 + 2 * l1 * lc2 * np.cos(theta2))
            + i1
            + i2
        )
        d2 = m2 * (lc2**2 + l1 * lc2 * np.cos(theta2)) + i2
        phi2 = m2 * lc2 * g * np.cos(theta1 + theta2 - pi / 2.0)
        phi1 = (
            -m2 * l1 * lc2 * dtheta2**2 * np.sin(theta2)
            - 2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * np.sin(theta2)
            + (m1 * lc1 + m2 * l1) * g * np.cos(theta1 - pi / 2)
            + phi2
        )
        ddtheta2 = (torque + d2 / d1 * phi1 - phi2) / (m2 * lc2**2 + i2 - d2**2 / d1)
        ddtheta1 = -(d2 * ddtheta2 + phi1) / d1
        return np.array([dtheta1, dtheta2, ddtheta1, ddtheta2])

    def _clip_velocity(self, x: np.ndarray) -> np.ndarray:
        x = np.array(x)
        x[2] = np.clip(x[2], -self.max_velocity[0], self.max_velocity[0])
        x[3] = np.clip(x[3], -self.max_velocity[1], self.max_velocity[1])
        return x

    def dynamics(self, raw, action, rng):
        torque = self.torque(action)
        x = np.array(raw, dtype=float)
        order = 1 if self.integrator == "euler" else 4
        for _ in range(self.n_substeps):
            # Velocities are limited after every substep
            x = integrate(
                self.time_step, x, lambda xx: self.get_derivative(xx, torque), order=order
            )
            x = self._clip_velocity(x)

        x[0] = wrap_angle(x[0])
        x[1] = wrap_angle(x[1])
        return x, -1.0, self.is_terminal_state(x)
