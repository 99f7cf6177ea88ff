"""Planted cliques in random uniform hypergraphs: sampling, detection, experiments."""

from .combinatorics import SeedSpec, binom, comb_rank, comb_unrank, derive_stream, stream_for
from .detectors import (
    CliqueSearchResult,
    TestResult,
    edge_count_statistic,
    exhaustive_test,
    max_clique_exhaustive,
    metropolis_search,
    metropolis_test,
    slice_vote_test,
    spectral_test,
)
from .harness import (
    DetectorConfig,
    PhaseGridSpec,
    calibrate_threshold,
    clique_law_experiment,
    estimate_risk,
    phase_grid,
)
from .model import DUniformHypergraph, ModelParams, PlantedInstance, is_clique, plant_clique, sample_null
from .tensor import AdjacencyTensorView, UnfoldingView, take_slice, top_singular_value, unfold_matvec

__version__ = "0.1.0"
