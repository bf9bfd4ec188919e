"""
Incremental Sarsa(0) with epsilon-greedy action selection on a linear
action-value function over a frozen representation.
"""
import logging
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from sparse_representation_control import settings
from sparse_representation_control.environments import EnvState, make_environment
from sparse_representation_control.network import (
    OptimizerType,
    advance_schedule,
    make_optimizer,
    optimizer_step,
)
from sparse_representation_control.utils import make_rng, write_csv
from .representations import Features, IndexFeatures, RepresentationProvider

logger = logging.getLogger(__name__)

OPTIMIZER_CHOICES = ("auto", "sgd", "step_decay_sgd", "rmsprop")


@dataclass
class LinearQ:
    """One weight vector w_a per action (rows), q_a = phi(s)^T w_a."""

    weights: np.ndarray
    provider: str = ""

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 2:
            raise ValueError("Weights need to be an (actions x width) matrix.")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("Non-finite action-value weights.")

    @property
    def n_actions(self) -> int:
        return self.weights.shape[0]

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    def copy(self) -> "LinearQ":
        return LinearQ(np.array(self.weights), provider=self.provider)


def _dense(features: Features, width: int) -> np.ndarray:
    if isinstance(features, IndexFeatures):
        if features.width != width:
            raise ValueError(f"Features of width {features.width} for weights of width {width}.")
        return features.to_dense()
    features = np.asarray(features, dtype=float).reshape(-1)
    if features.shape[0] != width:
        raise ValueError(f"Features of width {features.shape[0]} for weights of width {width}.")
    return features


def q_values(features: Features, q: LinearQ) -> np.ndarray:
    """Action values phi(s)^T w_a; sum of w_a at the active indices for
    index features."""
    if isinstance(features, IndexFeatures):
        if features.width != q.width:
            raise ValueError(f"Features of width {features.width} for weights of width {q.width}.")
        return q.weights[:, features.indices].sum(axis=1)
    return q.weights @ _dense(features, q.width)


def epsilon_greedy(q_vector: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Uniform random action with probability epsilon, else the greedy one
    (lowest index among ties)."""
    if not 0 <= epsilon <= 1:
        raise ValueError("Epsilon needs to be in [0, 1].")
    q_vector = np.asarray(q_vector, dtype=float)
    if rng.random() < epsilon:
        return int(rng.integers(q_vector.shape[0]))
    return int(np.argmax(q_vector))


def td_error(
    q: LinearQ,
    features: Features,
    action: int,
    reward: float,
    discount: float,
    next_features: Optional[Features],
    next_action: Optional[int],
) -> float:
    delta = reward - q_values(features, q)[action]
    if discount:
        delta += discount * q_values(next_features, q)[next_action]
    return float(delta)


def sarsa_update(
    q: LinearQ,
    features: Features,
    action: int,
    reward: float,
    discount: float,
    next_features: Optional[Features],
    next_action: Optional[int],
    step_size: float,
) -> LinearQ:
    """w_a += step * delta * phi(s); only the row of the taken action changes.

    A zero discount (terminal next state) drops the bootstrap term, the next
    features are then not used."""
    delta = td_error(q, features, action, reward, discount, next_features, next_action)
    new_q = q.copy()
    new_q.weights[action] += step_size * delta * _dense(features, q.width)
    return new_q


@dataclass
class ControlConfig:
    """Sarsa(0) setup. optimizer 'auto' uses step-decay SGD for sparse
    representations and RMSprop for dense ones."""

    epsilon: float = 0.1
    step_size: float = 0.01
    optimizer: str = "auto"
    episodes: int = 100
    cut_off: int = settings.EPISODE_CUT_OFF
    seed: int = 0
    q_init_std: float = 0.01
    decay_every: int = 25
    decay_factor: float = 0.5
    rms_decay: float = 0.9
    rms_eps: float = 1e-8
    log_every: int = 10

    def validate(self, warn: bool = True) -> None:
        if not 0 <= self.epsilon <= 1:
            raise ValueError("Epsilon needs to be in [0, 1].")
        if self.step_size < 0:
            raise ValueError("Step size needs to be nonnegative.")
        if self.optimizer not in OPTIMIZER_CHOICES:
            raise ValueError(
                f"Unknown optimizer <<{self.optimizer}>>, expected one of {OPTIMIZER_CHOICES}."
            )
        if self.episodes <= 0 or self.cut_off <= 0:
            raise ValueError("Episodes and cut-off need to be positive.")
        if self.q_init_std < 0:
            raise ValueError("Initial weight deviation needs to be nonnegative.")
        if warn and not any(np.isclose(self.step_size, ss) for ss in settings.GRID_STEP_SIZE):
            warnings.warn(f"Step size {self.step_size} is off the sweep grid.")

    def optimizer_kind(self, provider: RepresentationProvider) -> OptimizerType:
        if self.optimizer == "auto":
            if provider.is_sparse:
                return OptimizerType.STEP_DECAY_SGD
            return OptimizerType.RMSPROP
        if self.optimizer == "sgd":
            return OptimizerType.STEP_DECAY_SGD
        return OptimizerType.from_name(self.optimizer)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, value: dict) -> "ControlConfig":
        known = {ff.name for ff in fields(cls)}
        unknown = set(value) - known
        if unknown:
            raise ValueError(f"Unknown control fields {sorted(unknown)}.")
        return cls(**value)


@dataclass
class LearningCurve:
    """Per-episode steps-to-termination, undiscounted return and flags."""

    seed: int = 0
    steps: list = field(default_factory=list)
    returns: list = field(default_factory=list)
    truncated: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def append(self, steps: int, total_return: float, truncated: bool) -> None:
        self.steps.append(int(steps))
        self.returns.append(float(total_return))
        self.truncated.append(bool(truncated))

    @property
    def n_goals(self) -> int:
        """Episodes ending in the terminal state before the cut-off."""
        return int(len(self) - np.sum(self.truncated))

    def final_mean(self, metric: str = "returns", n_last: int = 25) -> float:
        values = getattr(self, metric)
        return float(np.mean(values[-n_last:]))

    def rows(self, run_id) -> list:
        return [
            (run_id, ii, ss, rr, tt)
            for ii, (ss, rr, tt) in enumerate(zip(self.steps, self.returns, self.truncated))
        ]


def write_curve_csv(
    file_name: str, curve: LearningCurve, run_id, hash_value: Optional[str] = None
) -> str:
    header = ("run_id", "episode", "steps", "return", "truncated")
    return write_csv(file_name, header, curve.rows(run_id), hash_value)


@dataclass
class ControlResult:
    curve: LearningCurve
    q: LinearQ
    # (episodes x probes) action values after every episode
    probe_values: Optional[np.ndarray] = None


class SarsaAgent:
    """Sarsa(0) learner; weight updates go through the network optimizers
    (step-decay SGD ticks once per episode)."""

    def __init__(
        self,
        provider: RepresentationProvider,
        n_actions: int,
        config: ControlConfig,
        rng: np.random.Generator,
    ):
        self.provider = provider
        self.config = config
        weights = rng.normal(0.0, config.q_init_std, size=(n_actions, provider.width))
        self.q = LinearQ(weights, provider=provider.tag)

        kind = config.optimizer_kind(provider)
        self.opt_state = make_optimizer(
            kind,
            config.step_size,
            [self.q.weights],
            rms_decay=config.rms_decay,
            eps=config.rms_eps,
            decay_factor=config.decay_factor,
            decay_every=config.decay_every,
        )

    def act(self, features: Features, rng: np.random.Generator) -> int:
        return epsilon_greedy(q_values(features, self.q), self.config.epsilon, rng)

    def update(
        self,
        features: Features,
        action: int,
        reward: float,
        discount: float,
        next_features: Optional[Features],
        next_action: Optional[int],
    ) -> float:
        delta = td_error(
            self.q, features, action, reward, discount, next_features, next_action
        )
        grad = np.zeros_like(self.q.weights)
        grad[action] = -delta * _dense(features, self.q.width)
        (weights,), self.opt_state = optimizer_step(self.opt_state, [self.q.weights], [grad])
        self.q = LinearQ(weights, provider=self.q.provider)
        return delta

    def end_episode(self) -> None:
        self.opt_state = advance_schedule(self.opt_state)

    def probe_values(self, probes) -> np.ndarray:
        """Action value at every (observation, action) probe; the greedy value
        for probes without action."""
        values = []
        for obs, action in probes:
            qq = q_values(self.provider.features(obs), self.q)
            values.append(np.max(qq) if action is None else qq[action])
        return np.array(values)


def run_control(
    domain,
    provider: RepresentationProvider,
    config: ControlConfig,
    env_params: Optional[dict] = None,
    tracker=None,
) -> ControlResult:
    """Runs `config.episodes` episodes of Sarsa(0) from a fresh weight
    initialization. A tracker (see BootstrapTracker) receives the action
    values at its probes after every episode. The representation must stay
    frozen during the run."""
    config.validate(warn=False)
    environment = make_environment(domain, **dict(env_params or {}, max_steps=config.cut_off))
    if environment.dimension != getattr(provider, "input_dim", environment.dimension):
        raise ValueError(
            f"Representation for inputs of dimension {provider.input_dim} on "
            + f"{environment.domain.value} (dimension {environment.dimension})."
        )

    rng = make_rng(config.seed, "control")
    agent = SarsaAgent(provider, environment.n_actions, config, rng)
    curve = LearningCurve(seed=config.seed)
    fingerprint = provider.fingerprint()

    for episode in range(config.episodes):
        state, obs = environment.reset(rng)
        features = provider.features(obs)
        action = agent.act(features, rng)
        total_return = 0.0

        while True:
            transition, state = environment.step(state, action, rng)
            total_return += transition.reward
            if state.is_terminal:
                agent.update(features, action, transition.reward, 0.0, None, None)
                break

            next_features = provider.features(transition.next_obs)
            next_action = agent.act(next_features, rng)
            # Cut-off transitions bootstrap with discount 1
            agent.update(
                features,
                action,
                transition.reward,
                transition.discount,
                next_features,
                next_action,
            )
            if state.is_truncated:
                break
            features, action = next_features, next_action

        agent.end_episode()
        curve.append(state.step_count, total_return, state.is_truncated)
        if tracker is not None:
            tracker.update_list(episode, agent.probe_values(tracker.probes))

        if config.log_every and (episode + 1) % config.log_every == 0:
            logger.info(
                "Episode %d/%d: steps=%d return=%.1f",
                episode + 1,
                config.episodes,
                state.step_count,
                total_return,
            )

    if provider.fingerprint() != fingerprint:
        raise RuntimeError("Representation changed during the control run.")

    return ControlResult(
        curve=curve,
        q=agent.q,
        probe_values=None if tracker is None else tracker.values(),
    )


class EpsilonGreedyPolicy:
    """Fixed epsilon-greedy policy of learned action values, callable as
    `policy(state, rng)` for environment rollouts."""

    def __init__(self, environment, provider: RepresentationProvider, q: LinearQ, epsilon=0.1):
        self.environment = environment
        self.provider = provider
        self.q = q.copy()
        self.epsilon = epsilon

    def __call__(self, state: EnvState, rng: np.random.Generator) -> int:
        features = self.provider.features(self.environment.normalize(state.raw))
        return epsilon_greedy(q_values(features, self.q), self.epsilon, rng)
