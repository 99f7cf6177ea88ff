"""
Slicing a hypergraph down to a graph
====================================

Fixing d-2 vertices of a d-uniform hypergraph leaves an ordinary graph.  If
the fixed vertices sit inside the planted clique, the slice carries a planted
clique too, which the graph spectral statistic can see.
"""

# %%
from hyperclique import plant_clique, sample_null, stream_for, take_slice
from hyperclique.detectors import calibrate_slice_null, pc_spectral_statistic, slice_vote_test

n, d, kappa = 50, 3, 25
instance = plant_clique(sample_null(n, d, stream_for(0, "null-gen")), kappa, stream_for(0, "plant"))

inside = take_slice(instance.graph, [instance.clique[0]])
outside = take_slice(instance.graph, [next(v for v in range(n) if v not in instance.clique)])
print("slice through the clique:", round(pc_spectral_statistic(inside.graph), 2))
print("slice off the clique:    ", round(pc_spectral_statistic(outside.graph), 2))

# %%
# Vote over every slice with a Bonferroni-corrected null quantile.
table = calibrate_slice_null(n - d + 2, trials=2000, master_seed=0)
result = slice_vote_test(instance.graph, table, stream_for(0, "detector"), num_slices=n, level=0.05)
print(result)
