#!/usr/bin/python3
"""
Test script for the representation metrics, heatmaps, Monte Carlo values and
probe tracking.
"""
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sparse_representation_control.analysis import (
    BootstrapTracker,
    ProbeSet,
    RepresentationEvaluator,
    activation_overlap,
    active_threshold,
    dead_units,
    default_probes,
    ema_smooth,
    grid_points,
    heatmap,
    instance_sparsity,
    mean_and_stderr,
    mean_pairwise_overlap,
    monte_carlo_returns,
    monte_carlo_values,
    oracle_size,
    pairwise_overlaps,
    sample_test_states,
    select_units,
    sparsity_histogram,
    tracking_errors,
    value_oracle,
    write_heatmaps,
)
from sparse_representation_control.config import ExperimentConfig
from sparse_representation_control.experiment import cmd_train_rep, load_provider
from sparse_representation_control.network import he_init, representation
from sparse_representation_control.utils import read_csv

binary_rows = arrays(np.int8, (6, 12), elements=st.integers(0, 1))


def test_instance_sparsity():
    reps = np.array([[1.0, 0.0, 0.0, 2.0], [0.0, 0.0, 0.0, 3.0], [0.5, 0.0, 0.0, 0.0]])
    # Units 1 and 2 are dead, two live units remain
    assert np.allclose(instance_sparsity(reps), [100.0, 50.0, 50.0])
    assert dead_units(reps) == 2
    assert np.all(instance_sparsity(np.zeros((3, 4))) == 0)


def test_active_threshold():
    assert active_threshold("relu") == 0
    assert active_threshold("sigmoid") == 0.01

    reps = np.array([[0.005, 0.5], [0.02, 0.5]])
    assert np.allclose(instance_sparsity(reps, active_threshold("sigmoid")), [50.0, 100.0])


def test_activation_overlap():
    assert activation_overlap([1, 0, 2, 0], [3, 1, 0, 0]) == 1
    assert activation_overlap([0, 0], [0, 0]) == 0
    with pytest.raises(ValueError):
        activation_overlap([1, 0], [1, 0, 0])


@settings(max_examples=50, deadline=None)
@given(reps=binary_rows)
def test_overlap_properties(reps):
    for ii in range(len(reps)):
        assert activation_overlap(reps[ii], reps[ii]) == np.sum(reps[ii] > 0)
        for jj in range(len(reps)):
            overlap = activation_overlap(reps[ii], reps[jj])
            assert overlap == activation_overlap(reps[jj], reps[ii])
            assert overlap <= min(np.sum(reps[ii] > 0), np.sum(reps[jj] > 0))


def test_pairwise_overlaps():
    reps = np.array([[1, 1, 0, 0], [1, 1, 1, 1], [1, 1, 1, 0]])
    assert pairwise_overlaps(reps) == [(0, 1, 2), (0, 2, 2), (1, 2, 3)]
    assert len(pairwise_overlaps(np.eye(5))) == 10

    custom = [np.r_[np.ones(2), np.zeros(6)], np.r_[np.ones(6), np.zeros(2)], np.ones(8)]
    assert sorted(oo for _, _, oo in pairwise_overlaps(custom)) == [2, 2, 6]


def test_mean_pairwise_overlap():
    ones = [np.r_[np.ones(nn), np.zeros(10 - nn)] for nn in (2, 4, 6)]
    # Overlaps min(n_i, n_j): 2, 2, 4
    assert np.isclose(mean_pairwise_overlap(ones), 8 / 3)

    reps = np.zeros((3, 12))
    reps[0, 0:2] = reps[1, 0:2] = 1
    reps[0, 2:6] = reps[2, 2:6] = 1
    reps[1, 6:12] = reps[2, 6:12] = 1
    # Pairs share 2, 4 and 6 units
    assert np.isclose(mean_pairwise_overlap(reps), 4.0)

    with pytest.raises(ValueError):
        mean_pairwise_overlap(reps[:1])


def test_sparsity_histogram():
    sparsities = np.array([0.0, 5.0, 10.0, 55.0, 99.0, 100.0])
    counts = sparsity_histogram(sparsities)

    assert counts.sum() == len(sparsities)
    assert counts[0] == 2
    assert counts[1] == 1
    assert counts[-1] == 2


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(0.0, 100.0), min_size=1, max_size=50))
def test_sparsity_histogram_counts_everything(values):
    assert sparsity_histogram(np.array(values)).sum() == len(values)


def test_ema_smooth():
    assert np.allclose(ema_smooth([0.0, 10.0]), [0.0, 1.0])
    assert np.allclose(ema_smooth(np.full(20, 3.0)), 3.0)

    # Step from 0 to 1: within 1% of the new level after 44 steps
    series = np.r_[0.0, np.ones(50)]
    smoothed = ema_smooth(series)
    assert smoothed[44] > 0.99
    assert smoothed[43] < 0.99

    with pytest.raises(ValueError):
        ema_smooth([])
    with pytest.raises(ValueError):
        ema_smooth([1.0], smoothing=0.0)


def test_mean_and_stderr():
    mean, stderr = mean_and_stderr(np.array([[1.0, 2.0], [3.0, 2.0]]))
    assert np.allclose(mean, [2.0, 2.0])
    assert np.allclose(stderr, [1.0, 0.0])

    mean, stderr = mean_and_stderr(np.array([[1.0, 5.0]]))
    assert np.allclose(mean, [1.0, 5.0])
    assert np.all(stderr == 0)


def test_representation_evaluator():
    reps = np.array([[0.5, 0.0, 0.0], [0.5, 0.2, 0.0]])
    evaluator = RepresentationEvaluator(reps, activation="relu", labels=["a", "b"])
    metrics = evaluator.evaluate_metrics()

    assert np.isclose(metrics["mean_instance_sparsity"], 75.0)
    assert metrics["n_dead_units"] == 1
    assert sum(metrics["histogram"]) == 2
    assert evaluator.overlap_table() == [("a", "b", 1)]


def test_grid_points():
    points = grid_points(5)
    assert points.shape == (25, 2)
    assert points.min() == 0 and points.max() == 1

    with pytest.raises(ValueError):
        grid_points(1)


def test_heatmap_matches_pointwise_evaluation():
    params = he_init([2, 8, 16], np.random.default_rng(0), value_head=False)
    grids = heatmap(params, "puddle_world", [0, 5], resolution=7)

    assert len(grids) == 2
    assert grids[1].values.shape == (7, 7)
    for ii, xx in enumerate(grids[1].grid):
        for jj, yy in enumerate(grids[1].grid):
            value = representation(params, np.array([[xx, yy]]))[0, 5]
            assert np.isclose(grids[1].values[ii, jj], value)


def test_heatmap_zero_network():
    params = he_init([2, 8, 16], np.random.default_rng(0)).zeros_like()
    (grid,) = heatmap(params, "mountain_car", [3], resolution=4)
    assert np.all(grid.values == 0)


def test_heatmap_checks():
    params = he_init([2, 8, 16], np.random.default_rng(0))
    with pytest.raises(ValueError):
        heatmap(params, "acrobot", [0])
    with pytest.raises(ValueError):
        heatmap(params, "mountain_car", [16])


def test_select_units():
    units = select_units(32, 8, np.random.default_rng(0))
    assert len(set(units)) == 8
    assert units == sorted(units)
    assert select_units(4, 8, np.random.default_rng(0)) == [0, 1, 2, 3]


def test_write_heatmaps(tmp_path):
    params = he_init([2, 8, 16], np.random.default_rng(0))
    grids = heatmap(params, "mountain_car", [2, 9], resolution=3)
    manifest = read_csv(write_heatmaps(str(tmp_path), grids, "abc"))

    assert [row["unit"] for row in manifest] == ["2", "9"]
    rows = read_csv(str(tmp_path / manifest[0]["file"]))
    assert len(rows) == 3


def test_default_probes():
    probes = default_probes("catcher")
    assert len(probes) == 5
    assert probes.observations.shape == (5, 4)
    assert probes.actions == [0, 1, 2, 0, 1]
    assert probes.names[0] == "probe_0"

    with pytest.raises(ValueError):
        ProbeSet(domain="puddle_world", observations=np.zeros((2, 2)), actions=[0])


def test_monte_carlo_without_variance():
    probes = ProbeSet(domain="mountain_car", observations=[[0.5, 0.5], [0.2, 0.5]], actions=[2, 0])
    returns = monte_carlo_returns(
        "mountain_car",
        lambda state, rng: 1,
        probes,
        n_rollouts=4,
        rng=np.random.default_rng(0),
        env_params={"max_steps": 3},
    )

    # The goal is out of reach within three steps
    assert np.all(returns == -3)
    assert np.all(np.var(returns, axis=1) == 0)

    values = monte_carlo_values(
        "mountain_car", lambda state, rng: 0, probes, n_rollouts=2, env_params={"max_steps": 3}
    )
    assert np.allclose(values, -3)

    with pytest.raises(ValueError):
        monte_carlo_returns("mountain_car", None, probes, 0, np.random.default_rng(0))


def test_sample_test_states():
    states1 = sample_test_states("puddle_world", 20, seed=1)
    states2 = sample_test_states("puddle_world", 20, seed=1)

    assert states1.shape == (20, 2)
    assert np.array_equal(states1, states2)
    assert np.all((states1 >= 0) & (states1 <= 1))


def test_oracle_size():
    assert oracle_size("puddle_world", n_states=10, n_rollouts=5) == (10, 5)
    assert oracle_size("puddle_world", full_scale=True) == (5000, 100_000)
    assert oracle_size("catcher", full_scale=True) == (1000, 100_000)


def test_value_oracle_is_deterministic():
    params = {"max_steps": 30}
    states1, values1 = value_oracle("mountain_car", 3, 2, seed=0, env_params=params)
    states2, values2 = value_oracle("mountain_car", 3, 2, seed=0, env_params=params)

    assert np.array_equal(states1, states2)
    assert np.array_equal(values1, values2)
    assert np.all(values1 >= -30)


def test_bootstrap_tracker(tmp_path):
    probes = default_probes("puddle_world")
    tracker = BootstrapTracker(probes, file_name=str(tmp_path / "track.json"))
    assert tracker.values().shape == (0, 5)

    tracker.update_list(0, np.zeros(5))
    tracker.update_list(1, np.ones(5))
    assert len(tracker) == 2
    assert np.array_equal(tracker.values()[1], np.ones(5))

    with pytest.raises(ValueError):
        tracker.update_list(2, np.ones(4))

    with open(tracker.store_to_file()) as ff:
        stored = json.load(ff)
    assert stored["episode"] == [0, 1]
    assert stored["domain"] == "puddle_world"

    rows = read_csv(tracker.write_csv(str(tmp_path / "track.csv"), run_id=3))
    assert len(rows) == 2
    assert set(rows[0]) == {"run_id", "episode"} | set(probes.names)


def test_tracking_errors():
    tracked = np.array([[-10.0, -20.0, -30.0], [-12.0, -18.0, -31.0]])
    errors = tracking_errors(tracked, [-11.0, -20.0, -25.0])
    assert np.array_equal(errors, [[1.0, 0.0, -5.0], [-1.0, 2.0, -6.0]])

    # A single episode row
    assert tracking_errors([-1.0, -2.0, -3.0], [-1.0, -1.0, -1.0]).shape == (1, 3)
    with pytest.raises(ValueError):
        tracking_errors(tracked, [-11.0, -20.0])


@pytest.mark.slow
def test_set_kl_reduces_probe_overlap(tmp_path):
    probes = default_probes("puddle_world")
    overlaps = {}
    for name, regularizer in (
        ("nn", {"kind": "none"}),
        ("sr_nn", {"kind": "skl_exp", "beta": 0.1, "strength": 0.01}),
    ):
        overrides = {
            f"representation.regularizer.{key}": value for key, value in regularizer.items()
        }
        overrides.update(
            {
                "experiment.domain": "puddle_world",
                "experiment.out": str(tmp_path / name),
                "dataset.file": str(tmp_path / "data" / "puddle_world_seed0.srcdata"),
                "dataset.n_transitions": 20_000,
                "train.epochs": 10,
            }
        )
        config = ExperimentConfig().with_overrides(overrides)
        cmd_train_rep(config)
        reps = load_provider(config).dense_features(probes.observations)
        overlaps[name] = mean_pairwise_overlap(reps)

    assert overlaps["sr_nn"] < overlaps["nn"]


if (__name__) == "__main__":
    test_instance_sparsity()
    test_ema_smooth()
    print("Tests done.")
