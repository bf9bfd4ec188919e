#!/usr/bin/python3
"""
Test script for the YAML experiment configuration.
"""
import pytest
import yaml

from sparse_representation_control import settings
from sparse_representation_control.config import (
    ExperimentConfig,
    default_sweep_grids,
    load_config,
    save_config,
)
from sparse_representation_control.control import ControlConfig
from sparse_representation_control.environments import DomainType
from sparse_representation_control.regularizers import RegularizerKind

EXAMPLE = """
experiment:
  domain: puddle_world
  seed: 3
  runs: 2
representation:
  kind: network
  regularizer:
    kind: skl_exp
    beta: 0.1
    strength: 0.01
train:
  batch_size: 32
control:
  step_size: 0.01
  episodes: 20
"""


def write_config(tmp_path, text=EXAMPLE):
    file_name = tmp_path / "config.yaml"
    file_name.write_text(text)
    return str(file_name)


def test_load_config(tmp_path):
    config = load_config(write_config(tmp_path))

    assert config.domain is DomainType.PUDDLE_WORLD
    assert config.seed == 3
    assert config.regularizer.kind is RegularizerKind.SKL_EXP
    assert config.train.regularizer is config.regularizer
    assert config.train.seed == 3
    assert config.train.batch_size == 32
    assert config.train.epochs == settings.DEFAULT_EPOCHS
    assert config.control.episodes == 20
    config.validate()


def test_acrobot_takes_longer_training(tmp_path):
    config = load_config(write_config(tmp_path, "experiment:\n  domain: acrobot\n"))
    assert config.train.epochs == settings.DEFAULT_EPOCHS_ACROBOT


def test_domain_override_takes_domain_epochs():
    config = ExperimentConfig()
    acrobot = config.with_overrides({"experiment.domain": "acrobot"})
    assert acrobot.domain is DomainType.ACROBOT
    assert acrobot.train.epochs == settings.DEFAULT_EPOCHS_ACROBOT
    assert acrobot.with_overrides({"experiment.domain": "catcher"}).train.epochs == (
        settings.DEFAULT_EPOCHS
    )

    explicit = config.with_overrides({"experiment.domain": "acrobot", "train.epochs": 7})
    assert explicit.train.epochs == 7
    custom = config.with_overrides({"train.epochs": 12})
    assert custom.with_overrides({"experiment.domain": "acrobot"}).train.epochs == 12


def test_save_and_reload(tmp_path):
    config = load_config(write_config(tmp_path))
    file_name = save_config(str(tmp_path / "saved.yaml"), config)
    reloaded = load_config(file_name)

    assert reloaded.to_dict() == config.to_dict()
    assert reloaded.hash == config.hash


def test_empty_file_gives_defaults(tmp_path):
    config = load_config(write_config(tmp_path, ""))
    assert config.domain is DomainType.MOUNTAIN_CAR
    assert load_config().hash == ExperimentConfig().hash


def test_unknown_keys_are_rejected(tmp_path):
    with pytest.raises(ValueError):
        load_config(write_config(tmp_path, "learner:\n  lr: 0.1\n"))
    with pytest.raises(ValueError):
        load_config(write_config(tmp_path, "analysis:\n  n_heatmaps: 3\n"))
    with pytest.raises(ValueError):
        load_config(write_config(tmp_path, "representation:\n  width: 128\n"))
    with pytest.raises(ValueError):
        load_config(write_config(tmp_path, "train:\n  seed: 3\n"))
    with pytest.raises(ValueError):
        load_config(write_config(tmp_path, "- 1\n- 2\n"))


def test_invalid_values():
    with pytest.raises(ValueError):
        ExperimentConfig(representation="fourier").validate()
    with pytest.raises(ValueError):
        ExperimentConfig(runs=0).validate()
    with pytest.raises(TypeError):
        ExperimentConfig(environment={"wind_speed": 0.01}).validate()


def test_hash_ignores_output_location():
    config = ExperimentConfig()
    moved = config.with_overrides({"experiment.out": "elsewhere", "experiment.parallel": 4})

    assert moved.out == "elsewhere"
    assert moved.parallel == 4
    assert moved.hash == config.hash
    assert config.with_overrides({"experiment.seed": 1}).hash != config.hash


def test_with_overrides():
    config = ExperimentConfig()
    changed = config.with_overrides(
        {
            "control.step_size": 0.04,
            "representation.regularizer.kind": "ksparse",
            "representation.regularizer.k": 16,
        }
    )

    assert changed.control.step_size == 0.04
    assert changed.regularizer.kind is RegularizerKind.KSPARSE
    assert changed.regularizer.k == 16
    assert changed.train.regularizer.k == 16
    # The original is unchanged
    assert config.control.step_size == ControlConfig().step_size
    assert config.regularizer.kind is RegularizerKind.NONE


def test_config_round_trip_through_yaml():
    config = ExperimentConfig().with_overrides({"sweep.seeds": [0, 1, 2]})
    value = yaml.safe_load(yaml.safe_dump(config.to_dict()))
    assert ExperimentConfig.from_dict(value).sweep.seeds == [0, 1, 2]


def test_default_sweep_grids():
    grids = default_sweep_grids(ExperimentConfig())
    assert grids == {"control.step_size": list(settings.GRID_STEP_SIZE)}
    assert len(grids["control.step_size"]) == 7

    config = ExperimentConfig().with_overrides(
        {
            "representation.regularizer.kind": "skl_exp",
            "representation.regularizer.beta": 0.1,
            "representation.regularizer.strength": 0.01,
        }
    )
    grids = default_sweep_grids(config)
    assert grids["representation.regularizer.beta"] == [0.05, 0.1, 0.2]
    assert grids["representation.regularizer.strength"] == [0.1, 0.01, 0.001]

    tile_coding = ExperimentConfig().with_overrides({"representation.kind": "tile_coding"})
    grids = default_sweep_grids(tile_coding)
    assert grids["representation.tile_coder.n_tiles"] == [4, 8, 16]
    assert grids["representation.tile_coder.n_tilings"] == [8, 16, 32]


def test_sweep_validation():
    with pytest.raises(ValueError):
        ExperimentConfig().with_overrides({"sweep.grids": {"step_size": [0.1]}}).validate()
    with pytest.raises(ValueError):
        ExperimentConfig().with_overrides({"sweep.seeds": []}).validate()


if (__name__) == "__main__":
    test_hash_ignores_output_location()
    test_default_sweep_grids()
    print("Tests done.")
