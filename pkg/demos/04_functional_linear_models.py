"""Scalar-on-function regression: treat each series as a sampled function
and regress the target on it through a small basis, either functional
principal components or B-splines."""

import numpy as np

import tserbench as tb

rng = np.random.default_rng(5)
length = 120
grid = np.linspace(0.0, 1.0, length)

# Curves are random mixtures of two smooth shapes; the target integrates
# each curve against a hidden weight function.
shape_a = np.sin(2 * np.pi * grid)
shape_b = np.exp(-((grid - 0.3) ** 2) / 0.02)
hidden_weight = 2.0 * grid - 0.5


def curves(n, seed, split):
    r = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        a, b = r.normal(), r.normal()
        curve = a * shape_a + b * shape_b + 0.01 * r.normal(size=length)
        target = curve @ hidden_weight / length
        out.append(tb.TimeSeriesInstance([curve], target))
    return tb.TimeSeriesDataset("curves", out, split)


train, test = curves(80, 1, "train"), curves(30, 2, "test")

# Principal components of the curves themselves
decomposition = tb.fpca_decompose(train, n_components=4)
print("functional PCA explained variance ratios:",
      np.round(decomposition.explained_variance_ratio, 4).tolist())

fpcr = tb.FpcrRegressor().fit(train)  # component count picked automatically
print(f"FPCR ({fpcr.fpca_.loadings.shape[0]} components): "
      f"rmse = {tb.rmse(fpcr.predict(test), test.targets):.5f}")

# B-spline coefficient function: the Cox-de Boor basis partitions unity
basis = tb.bspline_basis(length, n_basis=7, degree=3)
print(f"\nB-spline basis {basis.shape}: row sums deviate from 1 by "
      f"{np.abs(basis.sum(axis=1) - 1).max():.2e}")

flm = tb.BsplineFlmRegressor(n_basis=7, degree=3).fit(train)
print(f"B-spline FLM: rmse = {tb.rmse(flm.predict(test), test.targets):.5f}")

# The fitted coefficient function approximates the hidden weight
recovered = flm.coefficient_function_
correlation = np.corrcoef(recovered, hidden_weight)[0, 1]
print(f"correlation(coefficient function, hidden weight) = {correlation:.3f}")
