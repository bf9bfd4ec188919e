"""
The :mod:`control` module implements incremental Sarsa(0) control on top of
frozen (network or tile-coded) representations.
"""
from .representations import (
    IndexFeatures,
    RepresentationProvider,
    FrozenNetworkRepresentation,
    TileCodingRepresentation,
)
from .sarsa import (
    LinearQ,
    ControlConfig,
    LearningCurve,
    ControlResult,
    SarsaAgent,
    EpsilonGreedyPolicy,
    q_values,
    epsilon_greedy,
    td_error,
    sarsa_update,
    run_control,
    write_curve_csv,
)

__all__ = [
    "IndexFeatures",
    "RepresentationProvider",
    "FrozenNetworkRepresentation",
    "TileCodingRepresentation",
    "LinearQ",
    "ControlConfig",
    "LearningCurve",
    "ControlResult",
    "SarsaAgent",
    "EpsilonGreedyPolicy",
    "q_values",
    "epsilon_greedy",
    "td_error",
    "sarsa_update",
    "run_control",
    "write_curve_csv",
]
