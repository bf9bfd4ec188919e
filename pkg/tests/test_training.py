#!/usr/bin/python3
"""
Test script for the pretraining corpus, the MSTDE objective and the
representation trainer.
"""
import os

import numpy as np
import pytest

from sparse_representation_control.analysis import RepresentationEvaluator, ema_smooth
from sparse_representation_control.config import ExperimentConfig
from sparse_representation_control.environments import Transition
from sparse_representation_control.experiment import cmd_train_rep, load_provider, probe_batch
from sparse_representation_control.network import (
    MLPParams,
    he_init,
    params_equal,
    representation,
)
from sparse_representation_control.regularizers import (
    RegularizerSpec,
    RepresentationRegularizer,
)
from sparse_representation_control.training import (
    RepresentationTrainer,
    TrainConfig,
    TransitionBatch,
    generate_dataset,
    load_dataset,
    mstde_loss,
    rmse_eval,
    save_dataset,
    train_representation,
    write_history_csv,
)
from sparse_representation_control.utils import read_csv


def small_config(**kwargs):
    values = dict(epochs=2, batch_size=32, hidden_sizes=(8, 16), seed=3)
    values.update(kwargs)
    return TrainConfig(**values)


def test_generate_dataset_is_deterministic():
    batch1 = generate_dataset("puddle_world", 300, seed=1)
    batch2 = generate_dataset("puddle_world", 300, seed=1)
    batch3 = generate_dataset("puddle_world", 300, seed=2)

    assert len(batch1) == 300
    assert batch1 == batch2
    assert batch1 != batch3


def test_dataset_episode_bookkeeping():
    batch = generate_dataset("mountain_car", 3000, seed=0, env_params={"max_steps": 200})
    _, _, rewards, _, discounts, truncated, step_index = batch.arrays()
    summary = batch.summary()

    assert summary["n_episodes"] == np.sum(discounts == 0) + np.sum(truncated)
    assert np.all(rewards == -1)
    assert np.all(step_index < 200)
    # Every episode after the first one starts right after a finished one
    done = (discounts == 0) | truncated
    assert np.all(step_index[1:][done[:-1]] == 0)
    assert np.all(discounts[truncated] == 1)


def test_mountain_car_coverage():
    batch = generate_dataset("mountain_car", 50_000, seed=0)
    obs = batch.arrays()[0]
    positions = -1.2 + 1.8 * obs[:, 0]
    counts, _ = np.histogram(positions, bins=np.linspace(-1.2, 0.6, 19))
    assert np.mean(counts > 0) >= 0.8


def test_dataset_file_round_trip(tmp_path):
    batch = generate_dataset("mountain_car", 20_000, seed=5)
    file_name = save_dataset(str(tmp_path / "mc.srcdata"), batch)
    loaded = load_dataset(file_name)

    assert loaded == batch
    assert loaded.policy == batch.policy
    assert loaded.seed == 5

    save_dataset(str(tmp_path / "copy.srcdata"), generate_dataset("mountain_car", 20_000, seed=5))
    assert (tmp_path / "mc.srcdata").read_bytes() == (tmp_path / "copy.srcdata").read_bytes()


def test_transition_batch_container():
    batch = generate_dataset("catcher", 50, seed=0)
    assert len(batch[10:20]) == 10
    assert isinstance(batch[3], Transition)

    del batch[0]
    assert len(batch) == 49

    with pytest.raises(TypeError):
        batch.append((0, 1, 2))
    with pytest.raises(ValueError):
        TransitionBatch("catcher").arrays()


def test_mstde_terminal_transitions():
    params = he_init([2, 8, 4], np.random.default_rng(0))
    arrays = params.arrays()
    arrays[-1] = np.zeros(4)
    params = params.with_arrays(arrays)

    rng = np.random.default_rng(1)
    rewards = rng.normal(size=5)
    result = mstde_loss(params, rng.random((5, 2)), rewards, rng.random((5, 2)), np.zeros(5))

    assert np.allclose(result.td_errors, rewards)
    assert np.isclose(result.loss, np.mean(rewards**2))


def test_mstde_zero_network():
    params = he_init([2, 8, 4], np.random.default_rng(0)).zeros_like()
    rng = np.random.default_rng(1)
    rewards = -np.ones(6)
    result = mstde_loss(params, rng.random((6, 2)), rewards, rng.random((6, 2)), np.ones(6))

    assert np.all(result.representation == 0)
    assert np.allclose(result.td_errors, rewards)


RELU = ("relu", "relu")
SIGMOID = ("sigmoid", "sigmoid")


@pytest.mark.parametrize(
    "spec, activations",
    [
        (RegularizerSpec(kind="skl_exp", beta=0.05, strength=0.1), RELU),
        (RegularizerSpec(kind="kl_exp", beta=0.05, strength=0.1), RELU),
        (RegularizerSpec(kind="skl_bern", beta=0.1, strength=0.1), SIGMOID),
        (RegularizerSpec(kind="kl_bern", beta=0.1, strength=0.1), ("relu", "sigmoid")),
        (RegularizerSpec(kind="ksparse", k=2), RELU),
        (RegularizerSpec(kind="ksparse", k=2, beta=0.05, strength=0.1), RELU),
        (RegularizerSpec(kind="wta", k_percent=25.0), RELU),
        (RegularizerSpec(kind="dropout", dropout=0.3), RELU),
        (RegularizerSpec(kind="l1_weights", strength=0.01), RELU),
        (RegularizerSpec(kind="l2_weights", strength=0.01), SIGMOID),
        (RegularizerSpec(kind="l1_acts", strength=0.01), SIGMOID),
        (RegularizerSpec(kind="l2_acts", strength=0.01), RELU),
        (RegularizerSpec(), ("sigmoid", "relu")),
    ],
)
def test_mstde_gradient_by_finite_difference(spec, activations):
    rng = np.random.default_rng(4)
    params = he_init([2, 6, 5], rng, activations=activations)
    # Positive biases keep most ReLU units away from their kink
    for bias in params.biases:
        bias += 0.3
    regularizer = RepresentationRegularizer(spec, 5)
    obs, next_obs = rng.random((8, 2)), rng.random((8, 2))
    rewards = rng.normal(size=8)
    discounts = (rng.random(8) > 0.2).astype(float)
    # Masks are drawn once and held fixed; epoch 1 is past the k-sparse ramp
    masks = regularizer.dropout_masks(8, rng)
    kwargs = dict(regularizer=regularizer, epoch=1, dropout_masks=masks)

    def loss(pp):
        return mstde_loss(pp, obs, rewards, next_obs, discounts, **kwargs).loss

    grads = mstde_loss(params, obs, rewards, next_obs, discounts, **kwargs).grads
    hh = 1e-6
    for index, (array, grad) in enumerate(zip(params.arrays(), grads.arrays())):
        for flat in rng.choice(array.size, size=min(4, array.size), replace=False):
            position = np.unravel_index(flat, array.shape)
            shifted = [np.array(aa) for aa in params.arrays()]
            shifted[index][position] += hh
            upper = loss(params.with_arrays(shifted))
            shifted[index][position] -= 2 * hh
            lower = loss(params.with_arrays(shifted))
            assert np.isclose(grad[position], (upper - lower) / (2 * hh), rtol=1e-4, atol=1e-7)


def test_dropout_masks_are_shared_by_both_passes():
    params = he_init([2, 6, 5], np.random.default_rng(0))
    obs = np.random.default_rng(1).random((3, 2))
    masks = np.zeros((3, 5))
    # Zero masks remove both phi(S) and phi(S')
    result = mstde_loss(params, obs, np.ones(3), obs, np.ones(3), dropout_masks=masks)
    assert np.allclose(result.td_errors, 1.0)


def test_rmse_eval():
    params = MLPParams(
        weights=[np.zeros((3, 2))], biases=[np.zeros(3)], activations=["relu"]
    )
    value = rmse_eval(params, np.zeros(3), np.zeros((2, 2)), np.array([3.0, 4.0]))
    assert np.isclose(value, np.sqrt(12.5))
    assert np.isclose(value, 3.5355, atol=1e-4)

    with pytest.raises(ValueError):
        rmse_eval(params, np.zeros(3), np.zeros((0, 2)), np.zeros(0))


def test_training_is_deterministic():
    data = generate_dataset("puddle_world", 400, seed=0)
    spec = RegularizerSpec(kind="skl_exp", beta=0.1, strength=0.01)

    result1 = train_representation(small_config(regularizer=spec), data)
    result2 = train_representation(small_config(regularizer=spec), data)
    result3 = train_representation(small_config(), data)

    assert params_equal(result1.params, result2.params)
    assert np.array_equal(result1.value_head, result2.value_head)
    assert not params_equal(result1.params, result3.params)
    assert result1.params.value_head is None
    assert len(result1.history) == 2


def test_resumed_training_matches_uninterrupted(tmp_path):
    data = generate_dataset("mountain_car", 400, seed=0)
    spec = RegularizerSpec(
        kind="skl_exp", beta=0.1, strength=0.01, running_average=True, running_rate=0.5
    )
    full = train_representation(small_config(regularizer=spec, epochs=4), data)

    file_name = str(tmp_path / "checkpoint.srcckpt")
    train_representation(small_config(regularizer=spec, epochs=2), data, checkpoint_file=file_name)
    resumed = RepresentationTrainer.resume(file_name, data, epochs=4).run(file_name)

    assert params_equal(full.params, resumed.params)
    assert np.array_equal(full.value_head, resumed.value_head)
    assert [rr.mstde for rr in full.history] == [rr.mstde for rr in resumed.history]


def test_ksparse_training_and_probe_sparsity():
    data = generate_dataset("puddle_world", 300, seed=0)
    probes = np.random.default_rng(0).random((20, 2))
    config = small_config(regularizer=RegularizerSpec(kind="ksparse", k=4))
    result = train_representation(config, data, probe_observations=probes)

    assert all(rr.sparsity is not None for rr in result.history)
    reps = representation(result.params, probes, sparsifier=result.sparsifier)
    assert np.all(np.sum(reps > 0, axis=1) <= 4)


def test_non_finite_loss_raises():
    data = generate_dataset("puddle_world", 100, seed=0)
    arrays = list(data.arrays())
    arrays[2] = np.full(len(data), np.inf)
    broken = TransitionBatch.from_arrays("puddle_world", arrays)

    with pytest.raises(FloatingPointError):
        train_representation(small_config(), broken)


def test_bernoulli_needs_sigmoid():
    config = small_config(regularizer=RegularizerSpec(kind="kl_bern", beta=0.1, strength=0.1))
    with pytest.raises(ValueError):
        config.validate()
    small_config(
        regularizer=RegularizerSpec(kind="kl_bern", beta=0.1, strength=0.1),
        activations=("relu", "sigmoid"),
    ).validate()


def test_training_reduces_mstde_and_history_csv(tmp_path):
    data = generate_dataset("mountain_car", 2000, seed=0)
    config = small_config(epochs=8, hidden_sizes=(16, 32))
    result = train_representation(config, data)

    losses = [rr.mstde for rr in result.history]
    assert ema_smooth(losses)[-1] <= losses[0]

    file_name = write_history_csv(str(tmp_path / "history.csv"), result.history, "abc")
    rows = read_csv(file_name)
    assert len(rows) == config.epochs
    assert set(rows[0]) == {"epoch", "mstde", "penalty", "rmse", "mean_instance_sparsity"}
    assert (tmp_path / "history.csv").read_text().startswith("# config_hash=abc")


def pretrained_provider(out, domain, regularizer, seed=0):
    """Desk-scale pretraining shared by the direction-of-effect tests."""
    overrides = {
        f"representation.regularizer.{key}": value for key, value in regularizer.items()
    }
    overrides.update(
        {
            "experiment.domain": domain,
            "experiment.seed": seed,
            "experiment.out": os.path.join(out, f"{regularizer['kind']}_seed{seed}"),
            "dataset.file": os.path.join(out, "data", f"{domain}_seed{seed}.srcdata"),
            "dataset.n_transitions": 20_000,
            "train.epochs": 10,
        }
    )
    config = ExperimentConfig().with_overrides(overrides)
    cmd_train_rep(config)
    return config, load_provider(config)


@pytest.mark.slow
def test_set_kl_gives_the_sparsest_representation(tmp_path):
    regularizers = {
        "nn": {"kind": "none"},
        "kl": {"kind": "kl_exp", "beta": 0.1, "strength": 0.01},
        "skl": {"kind": "skl_exp", "beta": 0.1, "strength": 0.01},
    }
    sparsities = {name: [] for name in regularizers}
    for seed in (0, 1, 2):
        for name, regularizer in regularizers.items():
            config, provider = pretrained_provider(
                str(tmp_path), "mountain_car", regularizer, seed
            )
            evaluator = RepresentationEvaluator(
                provider.dense_features(probe_batch(config)), activation=provider.activation
            )
            sparsities[name].append(evaluator.evaluate_metrics()["mean_instance_sparsity"])

    means = {name: np.mean(values) for name, values in sparsities.items()}
    assert means["skl"] < means["nn"]
    assert means["skl"] < means["kl"]


if (__name__) == "__main__":
    test_generate_dataset_is_deterministic()
    test_training_is_deterministic()
    print("Tests done.")
