#!/usr/bin/python3
"""
Desk-scale comparison of the instance sparsity reached by ReLU networks
pretrained without regularizer, with the KL and with the Set-KL penalty on
Mountain Car.
"""
import argparse
import logging
import os

import numpy as np

from sparse_representation_control.analysis import RepresentationEvaluator
from sparse_representation_control.config import ExperimentConfig
from sparse_representation_control.experiment import cmd_train_rep, load_provider, probe_batch

logger = logging.getLogger(__name__)

REGULARIZERS = {
    "nn": {"kind": "none"},
    "kl": {"kind": "kl_exp", "beta": 0.1, "strength": 0.01},
    "skl": {"kind": "skl_exp", "beta": 0.1, "strength": 0.01},
}


def representation_config(out, name, seed, n_transitions=20_000, epochs=10):
    regularizer = {
        f"representation.regularizer.{key}": value for key, value in REGULARIZERS[name].items()
    }
    return ExperimentConfig().with_overrides(
        dict(
            regularizer,
            **{
                "experiment.domain": "mountain_car",
                "experiment.seed": seed,
                "experiment.out": os.path.join(out, f"{name}_seed{seed}"),
                # Same dataset for all regularizers of a seed
                "dataset.file": os.path.join(out, "data", f"mountain_car_seed{seed}.srcdata"),
                "dataset.n_transitions": n_transitions,
                "train.epochs": epochs,
            },
        )
    )


def mean_instance_sparsity(config):
    cmd_train_rep(config)
    provider = load_provider(config)
    evaluator = RepresentationEvaluator(
        provider.dense_features(probe_batch(config)), activation=provider.activation
    )
    return evaluator.evaluate_metrics()["mean_instance_sparsity"]


def compare_sparsity(out="results/sparsity_comparison", seeds=(0, 1, 2)):
    sparsities = {name: [] for name in REGULARIZERS}
    for seed in seeds:
        for name in REGULARIZERS:
            value = mean_instance_sparsity(representation_config(out, name, seed))
            logger.info("%s seed %d: mean instance sparsity %.2f%%", name, seed, value)
            sparsities[name].append(value)
    return {name: float(np.mean(values)) for name, values in sparsities.items()}


if (__name__) == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/sparsity_comparison")
    parser.add_argument("--seeds", type=int, default=3)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")

    results = compare_sparsity(args.out, seeds=tuple(range(args.seeds)))

    print("Mean instance sparsity [% of live units active]")
    for name, value in results.items():
        print(f"  {name:4s} {value:6.2f}")
    print(f"NN - SKL >= 10 points: {results['nn'] - results['skl'] >= 10}")
    print(f"SKL <= KL: {results['skl'] <= results['kl']}")
