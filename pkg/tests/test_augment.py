import numpy as np
import pytest

from contraclust.augment import AugmentSpec, augment_batch, default_noise_sigma
from contraclust.errors import ParameterError, ShapeError
from contraclust.tensor import Tensor


def test_all_zero_params_is_identity():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((5, 6))
    for kind in ("gaussian_noise", "feature_dropout"):
        spec = AugmentSpec(kind=kind, noise_sigma=0.0, dropout_prob=0.0, seed=1)
        assert np.array_equal(augment_batch(x, spec, step=0), x)
    img = rng.standard_normal((3, 12))  # 2x2x3 images
    spec = AugmentSpec(kind="image_basic", flip_prob=0.0, crop_padding=0, jitter_strength=0.0,
                       image_shape=(2, 2, 3), seed=1)
    assert np.array_equal(augment_batch(img, spec, step=0), img)


def test_same_seed_and_step_is_deterministic():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((8, 4))
    spec = AugmentSpec(kind="gaussian_noise", noise_sigma=0.7, seed=42)
    a = augment_batch(x, spec, step=5)
    b = augment_batch(x, spec, step=5)
    assert np.array_equal(a, b)


def test_distinct_steps_give_distinct_noise():
    x = np.zeros((4, 4))
    spec = AugmentSpec(kind="gaussian_noise", noise_sigma=1.0, seed=0)
    a = augment_batch(x, spec, step=0)
    b = augment_batch(x, spec, step=1)
    assert not np.array_equal(a, b)


def test_noise_stream_is_keyed_by_dataset_index():
    # a sub-batch must receive exactly the rows of the full batch's stream
    rng = np.random.default_rng(2)
    x = rng.standard_normal((10, 3))
    spec = AugmentSpec(kind="gaussian_noise", noise_sigma=0.5, seed=7)
    full = augment_batch(x, spec, step=3, indices=np.arange(10))
    sub_idx = np.array([7, 2, 5])
    sub = augment_batch(x[sub_idx], spec, step=3, indices=sub_idx)
    assert np.array_equal(full[sub_idx], sub)


def test_gaussian_noise_zero_mean():
    n = 100_000
    x = np.zeros((n, 1))
    sigma = 0.5
    spec = AugmentSpec(kind="gaussian_noise", noise_sigma=sigma, seed=3)
    diff = augment_batch(x, spec, step=0) - x
    assert abs(diff.mean()) <= 3.0 * sigma / np.sqrt(n)


def test_feature_dropout_preserves_expectation():
    x = np.full((200_000, 1), 2.0)
    spec = AugmentSpec(kind="feature_dropout", dropout_prob=0.3, seed=4)
    out = augment_batch(x, spec, step=0)
    kept = out[out != 0.0]
    assert kept.size
    # inverted scaling: E[out] == x
    assert out.mean() == pytest.approx(2.0, rel=0.01)
    assert kept[0] == pytest.approx(2.0 / 0.7)


def test_image_basic_flip_and_crop_change_pixels():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((6, 27))  # 3x3x3
    spec = AugmentSpec(kind="image_basic", flip_prob=1.0, crop_padding=1, jitter_strength=0.0,
                       image_shape=(3, 3, 3), seed=6)
    out = augment_batch(x, spec, step=0)
    assert out.shape == x.shape
    assert not np.array_equal(out, x)


def test_image_basic_infers_square_rgb_and_rejects_nonfactorable():
    x = np.zeros((2, 12))  # 2x2x3 inferred
    spec = AugmentSpec(kind="image_basic", flip_prob=0.0, crop_padding=0, jitter_strength=0.0, seed=0)
    assert augment_batch(x, spec, step=0).shape == x.shape
    bad = np.zeros((2, 7))
    with pytest.raises(ShapeError):
        augment_batch(bad, spec, step=0)


def test_tensor_in_tensor_out():
    x = Tensor(np.zeros((3, 3)))
    spec = AugmentSpec(kind="gaussian_noise", noise_sigma=1.0, seed=0)
    out = augment_batch(x, spec, step=0)
    assert isinstance(out, Tensor)


def test_spec_validation():
    with pytest.raises(ParameterError):
        AugmentSpec(kind="nope").validate()
    with pytest.raises(ParameterError):
        AugmentSpec(noise_sigma=-1.0).validate()
    with pytest.raises(ParameterError):
        AugmentSpec(dropout_prob=1.0).validate()
    with pytest.raises(ParameterError):
        AugmentSpec(flip_prob=1.5).validate()


def test_default_noise_sigma_is_half_mean_feature_std():
    rng = np.random.default_rng(8)
    x = rng.standard_normal((1000, 3)) * np.array([1.0, 2.0, 3.0])
    assert default_noise_sigma(x) == pytest.approx(0.5 * x.std(axis=0).mean())
