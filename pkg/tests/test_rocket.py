import numpy as np
import pytest

from tserbench import (
    RocketRegressor,
    TimeSeriesDataset,
    TimeSeriesInstance,
    apply_kernel,
    generate_kernels,
    rocket_transform,
)
from tserbench.errors import SeriesTooShortError, ShapeMismatchError
from tserbench.rocket import KERNEL_LENGTHS, RocketKernel

from conftest import make_sine_dataset


def make_kernel(weights, bias=0.0, dilation=1, padding=0, dim=0):
    weights = np.asarray(weights, dtype=np.float64)
    return RocketKernel(weights.size, weights, bias, dilation, padding, dim)


def naive_apply(series, kernel):
    """Index-by-index reference convolution, written independently of the
    packed implementation."""
    x = np.asarray(series, dtype=np.float64)
    padded = np.concatenate([np.zeros(kernel.padding), x, np.zeros(kernel.padding)])
    out_len = padded.size - (kernel.length - 1) * kernel.dilation
    taps = [padded[t : t + out_len] for t in range(0, kernel.length * kernel.dilation, kernel.dilation)]
    fmap = kernel.bias + sum(w * tap for w, tap in zip(kernel.weights, taps))
    return float(fmap.max()), float((fmap > 0).mean())


def test_apply_kernel_hand_examples():
    assert apply_kernel(np.array([1.0, 1.0, 1.0]), make_kernel([1.0, -1.0])) == (0.0, 0.0)
    assert apply_kernel(np.array([2.0, 1.0, 1.0]), make_kernel([1.0, -1.0])) == (1.0, 0.5)
    constant = make_kernel([0.0, 0.0, 0.0], bias=0.5)
    assert apply_kernel(np.array([9.0, -9.0, 0.0, 3.0]), constant) == (0.5, 1.0)


def test_apply_kernel_matches_naive_reference():
    rng = np.random.default_rng(1)
    for _ in range(300):
        length = int(rng.integers(2, 9))
        wlen = int(rng.integers(2, min(4, length) + 1))
        dilation = int(rng.integers(1, 3))
        if (wlen - 1) * dilation + 1 > length:
            dilation = 1
        padding = int(rng.integers(0, 3))
        kernel = make_kernel(rng.normal(size=wlen), rng.normal(), dilation, padding)
        series = rng.normal(size=length)
        got = apply_kernel(series, kernel)
        want = naive_apply(series, kernel)
        assert got[0] == pytest.approx(want[0], rel=1e-12, abs=1e-12)
        assert got[1] == pytest.approx(want[1], abs=1e-12)


def test_apply_kernel_too_short():
    kernel = make_kernel(np.ones(7), dilation=3)  # span 19
    with pytest.raises(SeriesTooShortError):
        apply_kernel(np.zeros(10), kernel)


def test_generate_kernels_invariants():
    kernels = generate_kernels(10_000, [20], seed=3)
    assert len(kernels) == 10_000
    for k in kernels:
        assert k.length in KERNEL_LENGTHS
        assert abs(k.weights.sum()) < 1e-9
        assert -1.0 <= k.bias <= 1.0
        assert k.dilation >= 1
        assert k.span <= 20 + 2 * k.padding
        assert k.dimension_index == 0


def test_generate_kernels_deterministic():
    a = generate_kernels(200, [30, 40], seed=11)
    b = generate_kernels(200, [30, 40], seed=11)
    for ka, kb in zip(a, b):
        assert ka.length == kb.length
        assert np.array_equal(ka.weights, kb.weights)
        assert (ka.bias, ka.dilation, ka.padding, ka.dimension_index) == (
            kb.bias,
            kb.dilation,
            kb.padding,
            kb.dimension_index,
        )
    c = generate_kernels(200, [30, 40], seed=12)
    assert any(not np.array_equal(ka.weights, kc.weights) for ka, kc in zip(a, c))


def test_generate_kernels_balanced_dimension_assignment():
    kernels = generate_kernels(9_000, [50, 50, 50], seed=0)
    counts = np.bincount([k.dimension_index for k in kernels], minlength=3)
    assert counts.tolist() == [3000, 3000, 3000]


def test_generate_kernels_short_series():
    with pytest.raises(SeriesTooShortError):
        generate_kernels(10, [6], seed=0)
    # lengths 7..10 restrict the candidate kernel lengths instead of failing
    kernels = generate_kernels(500, [9], seed=0)
    assert {k.length for k in kernels} <= {7, 9}


def test_transform_shape_and_ppv_bounds():
    ds = make_sine_dataset(8, length=40, n_dims=2, seed=4)
    kernels = generate_kernels(250, ds.dimension_lengths, seed=5)
    features = rocket_transform(ds, kernels)
    assert features.shape == (8, 500)
    ppv = features[:, 1::2]
    assert (ppv >= 0).all() and (ppv <= 1).all()
    # identical instances produce identical rows
    twin = TimeSeriesDataset("twin", [ds.instances[0], ds.instances[0]], "train")
    rows = rocket_transform(twin, kernels)
    assert np.array_equal(rows[0], rows[1])


def test_transform_matches_apply_kernel():
    ds = make_sine_dataset(3, length=30, n_dims=2, seed=6)
    kernels = generate_kernels(50, ds.dimension_lengths, seed=7)
    features = rocket_transform(ds, kernels)
    for i, inst in enumerate(ds.instances):
        for q, kernel in enumerate(kernels):
            mx, ppv = apply_kernel(inst.dimensions[kernel.dimension_index], kernel)
            assert features[i, 2 * q] == pytest.approx(mx, rel=1e-12, abs=1e-12)
            assert features[i, 2 * q + 1] == pytest.approx(ppv, abs=1e-12)


def test_bias_monotonicity():
    rng = np.random.default_rng(8)
    series = rng.normal(size=25)
    weights = rng.normal(size=7)
    weights -= weights.mean()
    base = make_kernel(weights, bias=-0.3)
    bumped = make_kernel(weights, bias=0.2)
    max0, ppv0 = apply_kernel(series, base)
    max1, ppv1 = apply_kernel(series, bumped)
    assert max1 >= max0
    assert ppv1 >= ppv0


def test_regressor_constant_targets():
    rng = np.random.default_rng(9)
    instances = [TimeSeriesInstance([rng.normal(size=30)], 5.0) for _ in range(12)]
    ds = TimeSeriesDataset("const", instances, "train")
    model = RocketRegressor(num_kernels=100, seed=1).fit(ds)
    assert model.predict(ds) == pytest.approx(np.full(12, 5.0), abs=1e-6)


def test_regressor_deterministic_and_learns(sine_train, sine_test):
    model = RocketRegressor(num_kernels=300, seed=2).fit(sine_train)
    pred = model.predict(sine_test)
    again = RocketRegressor(num_kernels=300, seed=2).fit(sine_train)
    assert np.array_equal(pred, again.predict(sine_test))
    rms = float(np.sqrt(np.mean((pred - sine_test.targets) ** 2)))
    assert rms < 0.15
    with pytest.raises(ShapeMismatchError):
        model.predict(make_sine_dataset(2, length=49))


def test_regressor_save_load_roundtrip(tmp_path, sine_train, sine_test):
    model = RocketRegressor(num_kernels=150, seed=13).fit(sine_train)
    path = tmp_path / "model.npz"
    model.save(path)
    loaded = RocketRegressor.load(path)
    assert np.array_equal(model.predict(sine_test), loaded.predict(sine_test))


def test_zero_variance_features_are_masked():
    # identical instances make every feature zero-variance; the masked
    # standardization keeps the model finite and the intercept carries it
    inst = TimeSeriesInstance([np.linspace(0, 1, 25)], 2.0)
    twin = TimeSeriesInstance([np.linspace(0, 1, 25)], 4.0)
    ds = TimeSeriesDataset("flat", [inst, twin], "train")
    model = RocketRegressor(num_kernels=80, seed=3).fit(ds)
    assert (model.feature_stds_ == 0).all()
    predictions = model.predict(ds)
    assert np.isfinite(predictions).all()
    assert predictions == pytest.approx([3.0, 3.0])


def test_fit_time_at_archive_scale():
    # 96 instances x 24 dimensions x 144 points with the default kernel
    # count must train in well under a minute
    import time

    rng = np.random.default_rng(0)
    instances = [
        TimeSeriesInstance(rng.normal(size=(24, 144)), rng.normal()) for _ in range(96)
    ]
    ds = TimeSeriesDataset("desk", instances, "train")
    started = time.time()
    RocketRegressor(num_kernels=10_000, seed=0).fit(ds)
    assert time.time() - started < 60.0
