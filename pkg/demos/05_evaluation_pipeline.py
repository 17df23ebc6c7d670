"""The statistical comparison pipeline on the embedded reference results:
fractional ranks, the Friedman test, the Nemenyi critical difference, and
the critical-difference diagram."""

from pathlib import Path

import numpy as np

import tserbench as tb

matrix = tb.reference_results()
print(f"reference table: {matrix.n_datasets} datasets x {matrix.n_algorithms} algorithms")

table = tb.rank_table(matrix)
order = np.argsort(table.average_ranks)
print("\naverage ranks (rank 1 = lowest RMSE):")
for j in order:
    print(f"  {table.average_ranks[j]:6.3f}  {table.algorithm_names[j]}")

outcome = tb.friedman_test(table)
print(f"\nFriedman chi-square = {outcome.statistic:.2f}, p = {outcome.p_value:.2e}")
print("the null (all algorithms equivalent) is rejected, so a post-hoc",
      "pairwise comparison is warranted")

cd = tb.nemenyi_cd(k=matrix.n_algorithms, n_datasets=matrix.n_datasets, alpha=0.05)
print(f"Nemenyi critical difference = {cd:.3f}")

diagram = tb.render_cd_diagram(table, cd)
print("\ngroups not significantly different (within one bar):")
for clique in diagram.cliques:
    print("  " + ", ".join(clique))

out = Path("cd_diagram.svg")
out.write_text(diagram.svg)
print(f"\nwrote {out.resolve()}")

# per-dataset relative performance: 0.5 marks the average algorithm
row = matrix.values[0]
print(f"\nscaled RMSE on {matrix.dataset_names[0]}:")
for name, value in zip(matrix.algorithm_names, row):
    print(f"  {tb.scaled_rmse(value, row):.3f}  {name}")
