import numpy as np
import pytest

from contraclust.errors import FormatError, ParameterError, ShapeError
from contraclust.model import forward, init_model, load_model, predict, save_model
from contraclust.tensor import Tensor, softmax_rows
from contraclust.losses import total_loss
from contraclust.train import TrainConfig

from helpers import finite_diff, rel_err


def test_init_same_seed_bitwise_identical():
    a = init_model([16, 64, 4], seed=3)
    b = init_model([16, 64, 4], seed=3)
    for wa, wb in zip(a.parameters(), b.parameters()):
        assert np.array_equal(wa.data, wb.data)


def test_init_different_seeds_differ():
    a = init_model([16, 64, 4], seed=3)
    b = init_model([16, 64, 4], seed=4)
    assert any(not np.array_equal(wa.data, wb.data) for wa, wb in zip(a.parameters(), b.parameters()))


def test_parameter_count():
    model = init_model([16, 64, 4], seed=0)
    assert model.parameter_count() == (16 + 1) * 64 + (64 + 1) * 4 == 1348
    assert sum(p.data.size for p in model.parameters()) == 1348


def test_init_rejects_bad_sizes():
    with pytest.raises(ParameterError):
        init_model([16], seed=0)
    with pytest.raises(ParameterError):
        init_model([16, 0, 4], seed=0)


def test_zero_final_layer_gives_uniform_p():
    model = init_model([5, 8, 3], seed=0)
    model.weights[-1].data[:] = 0.0
    model.biases[-1].data[:] = 0.0
    x = Tensor(np.random.default_rng(0).standard_normal((6, 5)))
    z, p = forward(model, x)
    assert np.abs(z.data).max() == 0.0
    assert np.allclose(p.data, 1.0 / 3.0)


def test_forward_row_independence():
    model = init_model([4, 7, 3], seed=1)
    rng = np.random.default_rng(2)
    x = rng.standard_normal((5, 4))
    z_full, p_full = forward(model, Tensor(x))
    z_one, p_one = forward(model, Tensor(x[2:3]))
    assert np.abs(z_full.data[2] - z_one.data[0]).max() <= 1e-12
    assert np.abs(p_full.data[2] - p_one.data[0]).max() <= 1e-12


def test_forward_permuted_batch_equals_permuted_forward():
    model = init_model([4, 6, 3], seed=5)
    rng = np.random.default_rng(5)
    x = rng.standard_normal((7, 4))
    perm = rng.permutation(7)
    z, _ = forward(model, Tensor(x))
    z_perm, _ = forward(model, Tensor(x[perm]))
    assert np.abs(z.data[perm] - z_perm.data).max() <= 1e-12


def test_forward_dimension_mismatch():
    model = init_model([4, 3], seed=0)
    with pytest.raises(ShapeError):
        forward(model, Tensor(np.ones((2, 5))))


def test_first_layer_gradient_matches_finite_differences():
    cfg = TrainConfig(k=3)
    model = init_model([4, 5, 3], seed=7)
    rng = np.random.default_rng(7)
    x = rng.standard_normal((6, 4))
    x_aug = x + 0.1 * rng.standard_normal((6, 4))

    def run(w0):
        model.weights[0].data = w0
        z, p = forward(model, Tensor(x))
        z_a, p_a = forward(model, Tensor(x_aug))
        return total_loss(z, z_a, p, p_a, cfg).total

    w0 = model.weights[0].data.copy()
    loss = run(w0.copy())
    loss.backward()
    grad = model.weights[0].grad.copy()

    def f(w_arr):
        return run(w_arr.copy()).item()

    fd = finite_diff(f, [w0.copy()])[0]
    assert rel_err(grad, fd) <= 1e-4


def test_predict_rows_and_tiebreak():
    model = init_model([2, 3], seed=0)
    # argmax conventions checked directly on softmax outputs
    p = np.array([[0.1, 0.7, 0.2]])
    assert int(np.argmax(p)) == 1
    uniform = np.full((1, 4), 0.25)
    assert int(np.argmax(uniform)) == 0  # tie -> lowest index


def test_predict_matches_argmax_of_z():
    model = init_model([6, 10, 4], seed=9)
    x = np.random.default_rng(9).standard_normal((30, 6))
    z, p = forward(model, Tensor(x))
    assert np.array_equal(np.argmax(z.data, axis=1), np.argmax(p.data, axis=1))
    assert np.array_equal(predict(model, x), np.argmax(z.data, axis=1))


def test_predict_invariant_to_row_constant_shift():
    rng = np.random.default_rng(3)
    z = rng.standard_normal((10, 4))
    shifted = z + rng.standard_normal((10, 1))
    a = softmax_rows(Tensor(z)).data.argmax(axis=1)
    b = softmax_rows(Tensor(shifted)).data.argmax(axis=1)
    assert np.array_equal(a, b)


def test_all_parameters_get_gradient_on_random_batch():
    cfg = TrainConfig(k=4)
    model = init_model([5, 8, 4], seed=11)
    rng = np.random.default_rng(11)
    x = rng.standard_normal((12, 5))
    x_aug = x + 0.1 * rng.standard_normal((12, 5))
    z, p = forward(model, Tensor(x))
    z_a, p_a = forward(model, Tensor(x_aug))
    total_loss(z, z_a, p, p_a, cfg).total.backward()
    for param in model.parameters():
        assert param.grad is not None
        assert np.abs(param.grad).max() > 0.0


def test_checkpoint_roundtrip_bitwise(tmp_path):
    model = init_model([7, 5, 3], seed=13)
    path = tmp_path / "model.drcm"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.layer_sizes == model.layer_sizes
    for a, b in zip(model.parameters(), loaded.parameters()):
        assert np.array_equal(a.data, b.data)


def test_checkpoint_bad_magic_and_truncation(tmp_path):
    model = init_model([3, 2], seed=0)
    path = tmp_path / "model.drcm"
    save_model(model, path)
    blob = path.read_bytes()

    bad = tmp_path / "bad.drcm"
    bad.write_bytes(b"NOPE" + blob[4:])
    with pytest.raises(FormatError, match="magic"):
        load_model(bad)

    trunc = tmp_path / "trunc.drcm"
    trunc.write_bytes(blob[:-8])
    with pytest.raises(FormatError, match="truncated"):
        load_model(trunc)
