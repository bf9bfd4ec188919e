#!/usr/bin/python3
"""
Sarsa(0) learning curves with tile coding, a plain and a Set-KL regularized
network representation on Mountain Car and Puddle World (desk scale).
"""
import argparse
import logging
import os

import numpy as np

from sparse_representation_control.config import ExperimentConfig
from sparse_representation_control.experiment import cmd_control, cmd_train_rep

logger = logging.getLogger(__name__)

REPRESENTATIONS = {
    "tile_coding": {"representation.kind": "tile_coding"},
    "nn": {"representation.regularizer.kind": "none"},
    "sr_nn": {
        "representation.regularizer.kind": "skl_exp",
        "representation.regularizer.beta": 0.1,
        "representation.regularizer.strength": 0.01,
    },
}

# Initial Sarsa step sizes; the tile-coded ones are per active tiling
STEP_SIZES = {"tile_coding": 0.1 / 8, "nn": 0.001, "sr_nn": 0.01}


def run_representation(out, domain, name, runs=5, episodes=100, parallel=1):
    overrides = dict(REPRESENTATIONS[name])
    overrides.update(
        {
            "experiment.domain": domain,
            "experiment.out": os.path.join(out, domain, name),
            "experiment.runs": runs,
            "experiment.parallel": parallel,
            "dataset.file": os.path.join(out, "data", f"{domain}_seed0.srcdata"),
            "dataset.n_transitions": 20_000,
            "train.epochs": 10,
            "control.episodes": episodes,
            "control.step_size": STEP_SIZES[name],
            "control.log_every": 25,
        }
    )
    config = ExperimentConfig().with_overrides(overrides)
    if config.representation == "network":
        cmd_train_rep(config)
    return cmd_control(config)


def compare_control(out="results/control_comparison", runs=5, episodes=100, parallel=1):
    table = {}
    for domain in ("mountain_car", "puddle_world"):
        for name in REPRESENTATIONS:
            report = run_representation(out, domain, name, runs, episodes, parallel)
            goals = np.mean([curve.n_goals for curve in report.curves])
            table[domain, name] = (report.final_mean("returns", 25), goals)
            logger.info("%s / %s: final return %.1f", domain, name, table[domain, name][0])
    return table


if (__name__) == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/control_comparison")
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--episodes", type=int, default=100)
    parser.add_argument("--parallel", type=int, default=1)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")

    table = compare_control(args.out, args.runs, args.episodes, args.parallel)

    print("Mean return of the last 25 episodes (mean goals reached)")
    for (domain, name), (final_return, goals) in table.items():
        print(f"  {domain:13s} {name:12s} {final_return:9.1f} ({goals:.0f})")
    for domain in ("mountain_car", "puddle_world"):
        plain = table[domain, "nn"][0]
        print(
            f"{domain}: tile coding > NN: {table[domain, 'tile_coding'][0] > plain}, "
            + f"SR-NN > NN: {table[domain, 'sr_nn'][0] > plain}"
        )
    print(f"SR-NN Puddle World goals > 70: {table['puddle_world', 'sr_nn'][1] > 70}")
