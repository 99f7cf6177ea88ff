"""
Spectral detection through the tensor unfolding
===============================================

The centered adjacency tensor is flattened to an N x N^(d-1) matrix and its
top singular value is computed by power iteration.  A planted clique of size
about sqrt(N) or more pushes it well above its null range.
"""

# %%
import numpy as np

from hyperclique import AdjacencyTensorView, UnfoldingView, plant_clique, sample_null, stream_for, top_singular_value

n, d = 50, 3


def sigma(graph, trial):
    unfolding = UnfoldingView(AdjacencyTensorView(graph, centered=True))
    return top_singular_value(unfolding, stream=stream_for(0, "power", trial)).sigma


null = [sigma(sample_null(n, d, stream_for(0, "null-gen", t)), t) for t in range(20)]
print(f"null sigma: mean {np.mean(null):.1f}, max {np.max(null):.1f}")

# %%
for kappa in (5, 10, 15, 25):
    planted = [
        sigma(plant_clique(sample_null(n, d, stream_for(1, "null-gen", t)), kappa,
                           stream_for(1, "plant", t)).graph, t)
        for t in range(10)
    ]
    print(f"kappa={kappa:2d}: planted sigma mean {np.mean(planted):.1f}")
