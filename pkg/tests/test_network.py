#!/usr/bin/python3
"""
Test script for the representation network, its optimizers and checkpoints.
"""
import numpy as np
import pytest

from sparse_representation_control.network import (
    MLPParams,
    OptimizerType,
    advance_schedule,
    backward,
    forward,
    he_init,
    load_checkpoint,
    make_optimizer,
    optimizer_step,
    params_equal,
    representation,
    save_checkpoint,
)


def naive_forward(params, batch):
    """Reference forward pass with explicit loops."""
    values = [list(row) for row in batch]
    for weight, bias, activation in zip(params.weights, params.biases, params.activations):
        new_values = []
        for row in values:
            new_row = []
            for ii in range(weight.shape[0]):
                pre = bias[ii]
                for jj in range(weight.shape[1]):
                    pre += weight[ii, jj] * row[jj]
                new_row.append(pre)
            new_values.append(list(activation.evaluate(np.array(new_row))))
        values = new_values
    return np.array(values)


def test_he_init_statistics():
    params = he_init([32, 313], np.random.default_rng(0), value_head=False)
    assert np.isclose(np.std(params.weights[0]), np.sqrt(2 / 32), rtol=0.05)
    assert np.all(params.biases[0] == 0)
    assert params.value_head is None


def test_he_init_is_deterministic():
    params1 = he_init([2, 32, 16], np.random.default_rng(4))
    params2 = he_init([2, 32, 16], np.random.default_rng(4))
    assert params_equal(params1, params2)
    assert params1.layer_sizes == [2, 32, 16]

    with pytest.raises(ValueError):
        he_init([2], np.random.default_rng(0))


def test_zero_network():
    params = he_init([2, 5, 4], np.random.default_rng(0)).zeros_like()
    reps = representation(params, np.random.default_rng(1).random((3, 2)))
    assert np.all(reps == 0)


def test_sigmoid_identity():
    params = MLPParams(weights=[np.eye(1)], biases=[np.zeros(1)], activations=["sigmoid"])
    assert np.isclose(representation(params, np.zeros((1, 1)))[0, 0], 0.5)


def test_forward_matches_loop_oracle():
    rng = np.random.default_rng(2)
    params = he_init([3, 4, 5], rng, activations=["relu", "sigmoid"])
    params.biases[0][...] = rng.normal(size=4)
    batch = rng.normal(size=(6, 3))

    assert np.allclose(representation(params, batch), naive_forward(params, batch), atol=1e-12)


def test_forward_input_checks():
    params = he_init([3, 4], np.random.default_rng(0))
    with pytest.raises(ValueError):
        representation(params, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        representation(params, np.array([[0.0, np.nan, 1.0]]))


def test_backward_zero_upstream():
    params = he_init([2, 5, 4], np.random.default_rng(0))
    cache, reps = forward(params, np.random.default_rng(1).random((3, 2)))
    grads = backward(params, cache, np.zeros_like(reps))
    assert all(np.all(gg == 0) for gg in grads.arrays())


def test_backward_scalar_squared_loss():
    params = MLPParams(
        weights=[np.array([[0.5]])], biases=[np.zeros(1)], activations=["relu"]
    )
    xx, yy = 2.0, 3.0
    cache, prediction = forward(params, np.array([[xx]]))
    grads = backward(params, cache, 2 * (prediction - yy))

    assert np.isclose(grads.weights[0][0, 0], 2 * (prediction[0, 0] - yy) * xx)


@pytest.mark.parametrize("activations", [("sigmoid", "sigmoid"), ("relu", "sigmoid")])
def test_backward_by_finite_difference(activations):
    rng = np.random.default_rng(3)
    params = he_init([3, 6, 5], rng, activations=activations, value_head=False)
    batch = rng.normal(size=(4, 3))
    upstream = rng.normal(size=(4, 5))
    mask = (rng.random((4, 5)) > 0.3) / 0.7

    def loss(pp):
        _, reps = forward(pp, batch, dropout_mask=mask)
        return np.sum(reps * upstream)

    cache, _ = forward(params, batch, dropout_mask=mask)
    grads = backward(params, cache, upstream)

    hh = 1e-5
    for index, (array, grad) in enumerate(zip(params.arrays(), grads.arrays())):
        for flat in rng.choice(array.size, size=min(5, array.size), replace=False):
            position = np.unravel_index(flat, array.shape)
            shifted = [np.array(aa) for aa in params.arrays()]
            shifted[index][position] += hh
            upper = loss(params.with_arrays(shifted))
            shifted[index][position] -= 2 * hh
            lower = loss(params.with_arrays(shifted))
            assert np.isclose(grad[position], (upper - lower) / (2 * hh), rtol=1e-4, atol=1e-8)


def test_adam_first_step():
    opt = make_optimizer("adam", 0.1, [np.zeros(1)])
    (new_value,), opt = optimizer_step(opt, [np.zeros(1)], [np.ones(1)])
    assert np.isclose(new_value[0], -0.1, rtol=1e-6)
    assert opt.step_count == 1

    opt = make_optimizer("adam", 0.1, [np.ones(2)])
    (unchanged,), _ = optimizer_step(opt, [np.ones(2)], [np.zeros(2)])
    assert np.array_equal(unchanged, np.ones(2))


def test_rmsprop_and_step_decay():
    opt = make_optimizer("rmsprop", 0.01, [np.zeros(1)], rms_decay=0.9, eps=0.0)
    (value,), opt = optimizer_step(opt, [np.zeros(1)], [np.array([2.0])])
    # v = 0.1 * 4, step = lr * g / sqrt(v)
    assert np.isclose(value[0], -0.01 * 2 / np.sqrt(0.4))

    opt = make_optimizer("step_decay_sgd", 0.1, [np.zeros(1)], decay_every=2)
    for _ in range(2):
        opt = advance_schedule(opt)
    assert np.isclose(opt.current_step_size, 0.05)
    (value,), _ = optimizer_step(opt, [np.zeros(1)], [np.ones(1)])
    assert np.isclose(value[0], -0.05)

    with pytest.raises(ValueError):
        make_optimizer("sgd_momentum", 0.1, [np.zeros(1)])
    with pytest.raises(ValueError):
        make_optimizer(OptimizerType.ADAM, -0.1, [np.zeros(1)])


def test_optimizer_step_does_not_modify_inputs():
    params = [np.ones(3)]
    opt = make_optimizer("adam", 0.1, params)
    optimizer_step(opt, params, [np.ones(3)])
    assert np.array_equal(params[0], np.ones(3))
    assert np.all(opt.first_moments[0] == 0)

    with pytest.raises(ValueError):
        optimizer_step(opt, params, [np.ones(2)])


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    params = he_init([2, 8, 6], rng)
    opt = make_optimizer("adam", 1e-3, params.arrays())
    grads = [rng.normal(size=aa.shape) for aa in params.arrays()]
    _, opt = optimizer_step(opt, params.arrays(), grads)

    file_name = str(tmp_path / "net.srcckpt")
    save_checkpoint(file_name, params, opt, metadata={"epoch": 3})
    checkpoint = load_checkpoint(file_name)

    assert params_equal(checkpoint.params, params)
    assert checkpoint.metadata["epoch"] == 3
    assert checkpoint.opt_state.kind is OptimizerType.ADAM
    assert checkpoint.opt_state.step_count == 1
    for mm1, mm2 in zip(checkpoint.opt_state.first_moments, opt.first_moments):
        assert np.array_equal(mm1, mm2)

    # Identical content gives identical bytes
    save_checkpoint(str(tmp_path / "copy.srcckpt"), params, opt, metadata={"epoch": 3})
    assert (tmp_path / "net.srcckpt").read_bytes() == (tmp_path / "copy.srcckpt").read_bytes()


def test_checkpoint_rejects_other_files(tmp_path):
    file_name = tmp_path / "other.srcckpt"
    file_name.write_bytes(b"SRCDATA 1\n{}\n")
    with pytest.raises(ValueError):
        load_checkpoint(str(file_name))


if (__name__) == "__main__":
    test_forward_matches_loop_oracle()
    test_adam_first_step()
    print("Tests done.")
