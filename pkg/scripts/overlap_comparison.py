#!/usr/bin/python3
"""
Activation overlap between the five Puddle World probe states for a plain
and a Set-KL regularized representation.
"""
import argparse
import logging
import os

from sparse_representation_control.analysis import default_probes, mean_pairwise_overlap
from sparse_representation_control.config import ExperimentConfig
from sparse_representation_control.experiment import cmd_train_rep, load_provider

logger = logging.getLogger(__name__)


def probe_overlap(out, regularizer, seed=0):
    overrides = {
        f"representation.regularizer.{key}": value for key, value in regularizer.items()
    }
    overrides.update(
        {
            "experiment.domain": "puddle_world",
            "experiment.seed": seed,
            "experiment.out": os.path.join(out, regularizer["kind"]),
            "dataset.file": os.path.join(out, "data", f"puddle_world_seed{seed}.srcdata"),
            "dataset.n_transitions": 20_000,
            "train.epochs": 10,
        }
    )
    config = ExperimentConfig().with_overrides(overrides)
    cmd_train_rep(config)

    provider = load_provider(config)
    probes = default_probes(config.domain)
    reps = provider.dense_features(probes.observations)
    for obs, rep in zip(probes.observations, reps):
        logger.info("Probe %s: %d active units", obs, (rep > 0).sum())
    return mean_pairwise_overlap(reps)


if (__name__) == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/overlap_comparison")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")

    plain = probe_overlap(args.out, {"kind": "none"}, args.seed)
    sparse = probe_overlap(args.out, {"kind": "skl_exp", "beta": 0.1, "strength": 0.01}, args.seed)

    print("Mean pairwise overlap of the probe states")
    print(f"  NN    {plain:6.2f}")
    print(f"  SR-NN {sparse:6.2f}")
    print(f"SR-NN < NN: {sparse < plain}")
