#!/usr/bin/python3
"""
Test script for the hashed tile coder.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparse_representation_control.tilecoding import (
    TileCoder,
    TileCoderConfig,
    tiling_offsets,
)

unit_point = st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=2)


@settings(max_examples=100, deadline=None)
@given(obs=unit_point, hash_size=st.sampled_from([8192, 5000, 64]))
def test_one_index_per_tiling(obs, hash_size):
    coder = TileCoder(TileCoderConfig(n_tiles=8, n_tilings=8, hash_size=hash_size), 2)
    indices = coder.encode(np.array(obs))

    assert indices.shape == (coder.n_active,)
    assert np.all((indices >= 0) & (indices < hash_size))


def test_same_cell_gives_same_indices():
    coder = TileCoder(TileCoderConfig(n_tiles=8, n_tilings=8), 2)
    # Every tiling shifts by at most 7 / 64, both points stay in their cells
    assert np.array_equal(coder.encode(np.array([0.0, 0.0])), coder.encode(np.array([0.001, 0.0])))


def test_different_cells_give_different_indices():
    coder = TileCoder(TileCoderConfig(n_tiles=2, n_tilings=1), 1)
    assert coder.encode(np.array([0.3]))[0] != coder.encode(np.array([0.7]))[0]
    assert coder.encode(np.array([0.1]))[0] == coder.encode(np.array([0.3]))[0]


def test_encode_batch_matches_single():
    coder = TileCoder(TileCoderConfig(n_tiles=4, n_tilings=16), 3)
    batch = np.random.default_rng(0).random((20, 3))
    indices = coder.encode_batch(batch)

    assert indices.shape == (20, 16)
    for obs, row in zip(batch, indices):
        assert np.array_equal(coder.encode(obs), row)


def test_upper_boundary_is_valid():
    coder = TileCoder(TileCoderConfig(n_tiles=4, n_tilings=8, offset_mode="asymmetric"), 2)
    cells = coder.cells(np.ones((1, 2)))
    assert np.all(cells <= 4)
    assert coder.encode(np.ones(2)).shape == (8,)


def test_collision_rate_is_low():
    coder = TileCoder(TileCoderConfig(n_tiles=8, n_tilings=8, hash_size=8192), 2)
    observations = np.random.default_rng(1).random((5000, 2))
    assert coder.collision_rate(observations) < 0.05


def test_small_table_warns_about_collisions():
    coder = TileCoder(TileCoderConfig(n_tiles=8, n_tilings=8, hash_size=16), 2)
    observations = np.random.default_rng(1).random((500, 2))
    with pytest.warns(UserWarning):
        rate = coder.collision_rate(observations)
    assert rate > 0.5


def test_single_entry_table():
    coder = TileCoder(TileCoderConfig(n_tiles=4, n_tilings=1, hash_size=1), 2)
    assert np.all(coder.encode_batch(np.random.default_rng(0).random((5, 2))) == 0)


def test_invalid_observations():
    coder = TileCoder(TileCoderConfig(), 2)
    with pytest.raises(ValueError):
        coder.encode(np.array([1.2, 0.5]))
    with pytest.raises(ValueError):
        coder.encode(np.array([-0.1, 0.5]))
    with pytest.raises(ValueError):
        coder.encode(np.array([np.nan, 0.5]))
    with pytest.raises(ValueError):
        coder.encode(np.array([0.5, 0.5, 0.5]))


def test_config_validation():
    with pytest.raises(ValueError):
        TileCoder(TileCoderConfig(n_tiles=0), 2)
    with pytest.raises(ValueError):
        TileCoder(TileCoderConfig(n_tilings=16, hash_size=8), 2)
    with pytest.raises(ValueError):
        TileCoder(TileCoderConfig(offset_mode="diagonal"), 2)
    with pytest.raises(ValueError):
        TileCoder(TileCoderConfig(), 0)
    with pytest.raises(ValueError):
        TileCoderConfig.from_dict({"n_tiles": 4, "tile_width": 0.25})

    with pytest.warns(UserWarning):
        TileCoderConfig(n_tiles=5).validate()


def test_uniform_offsets():
    offsets = tiling_offsets(TileCoderConfig(n_tiles=4, n_tilings=8), 3)
    assert offsets.shape == (8, 3)
    assert np.allclose(offsets[:, 0], np.arange(8) / 32)
    assert np.allclose(offsets[:, 0], offsets[:, 2])


def test_asymmetric_offsets():
    offsets = tiling_offsets(TileCoderConfig(n_tiles=4, n_tilings=8, offset_mode="asymmetric"), 2)
    assert np.allclose(offsets[0], 0)
    assert np.allclose(offsets[1], [1 / 32, 3 / 32])
    assert np.all((offsets >= 0) & (offsets < 0.25))


def test_random_offsets_are_seeded():
    config = TileCoderConfig(n_tiles=4, n_tilings=8, offset_mode="random", seed=3)
    offsets = tiling_offsets(config, 2)

    assert np.all((offsets >= 0) & (offsets < 0.25))
    assert np.array_equal(offsets, tiling_offsets(config, 2))
    other = TileCoderConfig(n_tiles=4, n_tilings=8, offset_mode="random", seed=4)
    assert not np.array_equal(offsets, tiling_offsets(other, 2))


def test_offsets_are_read_only():
    coder = TileCoder(TileCoderConfig(), 2)
    with pytest.raises(ValueError):
        coder.offsets[0, 0] = 0.5


if (__name__) == "__main__":
    test_different_cells_give_different_indices()
    test_collision_rate_is_low()
    print("Tests done.")
