"""
Exhaustive and Metropolis clique search
=======================================

Compare the exact maximum clique of a random hypergraph with the limiting
law (d! log2 N)^(1/(d-1)), then watch a Metropolis walk look for a planted
clique.
"""

# %%
from hyperclique import max_clique_exhaustive, metropolis_search, plant_clique, sample_null, stream_for
from hyperclique.harness import clique_law_experiment

for row in clique_law_experiment(3, [16, 32, 64], trials=5):
    print(f"N={row.n:3d}: mean max clique {row.mean_size:.2f}, law {row.law:.2f}, ratio {row.ratio:.2f}")

# %%
g = sample_null(40, 3, stream_for(0, "null-gen"))
instance = plant_clique(g, 14, stream_for(0, "plant"))
exact = max_clique_exhaustive(instance.graph)
print("exact maximum clique:", exact.size, "after", exact.work, "search nodes")

# %%
# Stationary weight lam^|C| favours large cliques; the walk starts empty.
walk = metropolis_search(instance.graph, lam=2.0, steps=20_000, stream=stream_for(0, "walk"))
print("Metropolis best:", walk.size, walk.counters)
