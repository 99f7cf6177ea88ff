"""
Sampling hypergraphs and planting a clique
==========================================

Draw an Erdos-Renyi 3-uniform hypergraph, plant a clique in it, and write
both to disk in the text and binary formats.
"""

# %%
import tempfile
from pathlib import Path

from hyperclique import plant_clique, sample_null, stream_for
from hyperclique.formats import encode_text, read_instance, write_instance

# Every random draw comes from a stream named by (seed, role, trial).
g = sample_null(12, 3, stream_for(0, "null-gen"))
print(g)

# %%
# Planting forces every hyperedge inside a random 5-set.
instance = plant_clique(g, 5, stream_for(0, "plant"))
print("hidden clique:", instance.clique)
print("edges before/after:", g.num_edges, instance.graph.num_edges)

# %%
# Text format: header "d N M", then one 1-based edge per line in colex order.
print(encode_text(instance.graph).decode()[:60], "...")

# %%
# The ground truth lives in a separate .truth file next to the graph.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.hgb"
    write_instance(path, instance)
    print(sorted(p.name for p in Path(tmp).iterdir()))
    assert read_instance(path) == instance
