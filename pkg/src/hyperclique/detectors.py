"""Tests for a planted clique.

Every test sees only a :class:`DUniformHypergraph` and returns a
:class:`TestResult` whose decision is ``statistic > threshold``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .combinatorics import colex_subsets, comb_unrank, rank_array
from .model import DUniformHypergraph
from .tensor import AdjacencyTensorView, UnfoldingView, take_slice, top_singular_value


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    detector: str
    statistic: float
    threshold: float
    decision: int
    wall_time: float = 0.0

    @classmethod
    def decide(cls, detector: str, statistic: float, threshold: float, started: float) -> "TestResult":
        return cls(
            detector,
            float(statistic),
            float(threshold),
            int(statistic > threshold),
            time.perf_counter() - started,
        )


@dataclass(frozen=True)
class CliqueSearchResult:
    best_clique: tuple[int, ...]
    work: int
    counters: dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.best_clique)


class SearchBudgetExceeded(RuntimeError):
    """Exhaustive search ran past its node budget."""


# -- edge count ---------------------------------------------------------------

def edge_count_statistic(g: DUniformHypergraph) -> float:
    """Standardised edge count ``(|E| - S/2) / (sqrt(S)/2)`` with ``S = C(n, d)``."""
    slots = g.num_slots
    if slots == 0:
        raise ValueError(f"edge count undefined: C({g.n},{g.d}) = 0 slots")
    return (g.num_edges - slots / 2) / (math.sqrt(slots) / 2)


def edge_count_test(g: DUniformHypergraph, threshold: float) -> TestResult:
    t0 = time.perf_counter()
    return TestResult.decide("edgecount", edge_count_statistic(g), threshold, t0)


# -- spectral -----------------------------------------------------------------

def spectral_statistic(
    g: DUniformHypergraph,
    stream: np.random.Generator,
    tol: float = 1e-4,
    max_iter: int = 300,
    balanced: bool = False,
) -> float:
    """Top singular value of the centered unfolding."""
    unfolding = UnfoldingView(AdjacencyTensorView(g, centered=True), balanced=balanced)
    return top_singular_value(unfolding, tol=tol, max_iter=max_iter, stream=stream).sigma


def spectral_test(
    g: DUniformHypergraph,
    threshold: float,
    stream: np.random.Generator,
    tol: float = 1e-4,
    max_iter: int = 300,
    balanced: bool = False,
) -> TestResult:
    t0 = time.perf_counter()
    stat = spectral_statistic(g, stream, tol=tol, max_iter=max_iter, balanced=balanced)
    return TestResult.decide("spectral", stat, threshold, t0)


def pc_spectral_statistic(g: DUniformHypergraph) -> float:
    """Largest singular value of the centered (+-1, zero diagonal) adjacency matrix."""
    if g.d != 2:
        raise ValueError("pc_spectral_statistic needs a graph (d = 2)")
    a = -np.ones((g.n, g.n))
    edges = g.edge_array()
    a[edges[:, 0], edges[:, 1]] = 1.0
    a[edges[:, 1], edges[:, 0]] = 1.0
    np.fill_diagonal(a, 0.0)
    return float(np.abs(np.linalg.eigvalsh(a)).max())


# -- exhaustive search --------------------------------------------------------

def _colex(subset: Sequence[int]) -> int:
    return sum(math.comb(c, j) for j, c in enumerate(subset, start=1))


def _subset_ranks(members: Sequence[int], size: int, n: int, extra: int | None = None) -> list[int]:
    """Colex ranks of every ``size``-subset of ``members``, each joined with ``extra`` if given."""
    k = len(members)
    if k < size:
        return []
    if math.comb(k, size) <= 8:
        out = []
        for sub in combinations(sorted(members), size):
            if extra is not None:
                sub = tuple(sorted(sub + (extra,)))
            out.append(_colex(sub))
        return out
    rows = np.asarray(sorted(members), dtype=np.int64)[colex_subsets(k, size)]
    if extra is not None:
        rows = np.sort(np.column_stack([rows, np.full(len(rows), extra)]), axis=1)
    return rank_array(rows, n).tolist()


def max_clique_exhaustive(
    g: DUniformHypergraph,
    size_cap: int | None = None,
    max_nodes: int | None = None,
) -> CliqueSearchResult:
    """Exact maximum clique by depth-first extension in increasing vertex order.

    A partial clique ``C`` keeps the bitmask of larger vertices ``w`` for which
    ``C + {w}`` is still a clique; adding ``v`` intersects it with the link of
    every ``(d-1)``-set made of ``v`` and ``d-2`` members of ``C``.  Branches
    that cannot beat the incumbent are cut.  With ``size_cap`` the search stops
    at the first clique of that size.
    """
    n, d = g.n, g.d
    links = g.link_masks()
    cap = n if size_cap is None else min(size_cap, n)
    everything = (1 << n) - 1
    best: list[int] = []
    nodes = 0

    def extend(clique: list[int], cand: int) -> bool:
        nonlocal best, nodes
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise SearchBudgetExceeded(f"more than {max_nodes} search nodes")
        if len(clique) > len(best):
            best = list(clique)
            if len(best) >= cap:
                return True
        while cand:
            if len(clique) + cand.bit_count() <= len(best):
                return False
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            nxt = cand
            if len(clique) >= d - 2:
                for rest in combinations(clique, d - 2):
                    nxt &= links[_colex(sorted(rest + (v,)))]
                    if not nxt:
                        break
            clique.append(v)
            done = extend(clique, nxt)
            clique.pop()
            if done:
                return True
        return False

    extend([], everything)
    return CliqueSearchResult(tuple(best), nodes)


def exhaustive_k_star(n: int, d: int, epsilon: float) -> int:
    """Smallest clique size ``ceil(((d! + eps) log2 n) ** (1/(d-1)))`` flagged as planted."""
    value = ((math.factorial(d) + epsilon) * math.log2(n)) ** (1.0 / (d - 1))
    return math.ceil(value - 1e-9)


def exhaustive_statistic(g: DUniformHypergraph, epsilon: float = 1.0) -> float:
    if g.n < 2:
        raise ValueError("exhaustive test needs n >= 2")
    k = exhaustive_k_star(g.n, g.d, epsilon)
    return float(max_clique_exhaustive(g, size_cap=k).size)


def exhaustive_test(g: DUniformHypergraph, epsilon: float = 1.0) -> TestResult:
    """Flag a clique of size at least ``k*``; threshold is ``k* - 1``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    t0 = time.perf_counter()
    stat = exhaustive_statistic(g, epsilon)
    return TestResult.decide("exhaustive", stat, exhaustive_k_star(g.n, g.d, epsilon) - 1, t0)


# -- Metropolis ---------------------------------------------------------------

def default_steps(n: int) -> int:
    return math.ceil(10 * n * math.log(n)) if n > 1 else 1


def metropolis_search(
    g: DUniformHypergraph,
    lam: float = 2.0,
    steps: int | None = None,
    stream: np.random.Generator | None = None,
    check: bool = False,
) -> CliqueSearchResult:
    """Metropolis walk on cliques with stationary weight ``lam ** |C|``.

    From ``C`` (initially empty) pick ``v`` uniformly.  If ``v`` is in ``C``
    propose removing it, otherwise propose adding it when ``C + {v}`` is a
    clique.  Accept with probability ``min(1, lam ** (|C'| - |C|))``.  The
    largest clique visited is returned.  ``check=True`` verifies every state
    against :func:`is_clique`.
    """
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    n, d = g.n, g.d
    if steps is None:
        steps = default_steps(n)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if stream is None:
        raise ValueError("metropolis_search needs a random stream")
    if check:
        from .model import is_clique
    links = g.link_masks()
    everything = (1 << n) - 1
    picks = stream.integers(0, n, size=steps).tolist()
    uniforms = stream.random(steps).tolist()
    p_del = 1.0 / lam

    clique: list[int] = []
    members = 0
    ext = everything  # vertices w with clique + {w} a clique (valid while not stale)
    stale = False
    best: tuple[int, ...] = ()
    del_prop = del_acc = add_prop = add_acc = 0

    for v, u in zip(picks, uniforms):
        bit = 1 << v
        if members & bit:
            del_prop += 1
            if u < p_del:
                del_acc += 1
                clique.remove(v)
                members ^= bit
                stale = True
        else:
            if stale:
                ext = everything
                for r in _subset_ranks(clique, d - 1, n):
                    ext &= links[r]
                stale = False
            if ext & bit:
                add_prop += 1
                add_acc += 1
                for r in _subset_ranks(clique, d - 2, n, extra=v):
                    ext &= links[r]
                clique.append(v)
                members |= bit
                if len(clique) > len(best):
                    best = tuple(sorted(clique))
        if check and not is_clique(g, clique):
            raise AssertionError(f"Metropolis visited a non-clique {sorted(clique)}")

    counters = {
        "delete_proposed": del_prop,
        "delete_accepted": del_acc,
        "add_proposed": add_prop,
        "add_accepted": add_acc,
    }
    return CliqueSearchResult(best, steps, counters)


def metropolis_test(
    g: DUniformHypergraph,
    threshold: float,
    stream: np.random.Generator,
    lam: float = 2.0,
    steps: int | None = None,
) -> TestResult:
    t0 = time.perf_counter()
    found = metropolis_search(g, lam, steps, stream)
    return TestResult.decide("metropolis", found.size, threshold, t0)


# -- slice reduction to planted clique on graphs -------------------------------

@dataclass(frozen=True)
class SliceNullTable:
    """Sorted null sample of the per-slice statistic on ``n`` vertices."""

    n: int
    stats: np.ndarray

    def quantile(self, prob: float) -> float:
        """The ``ceil(prob * T)``-th order statistic."""
        t = len(self.stats)
        k = max(1, math.ceil(prob * t - 1e-9))
        return float(self.stats[min(k, t) - 1])


def calibrate_slice_null(n: int, trials: int, master_seed: int) -> SliceNullTable:
    """Null sample of :func:`pc_spectral_statistic` over Erdos-Renyi graphs on ``n`` vertices."""
    from .combinatorics import stream_for
    from .model import sample_null

    stats = np.array(
        [
            pc_spectral_statistic(sample_null(n, 2, stream_for(master_seed, "slice-null", t)))
            for t in range(trials)
        ]
    )
    stats.sort()
    return SliceNullTable(n, stats)


def default_num_slices(n: int, d: int) -> int:
    return min(n, math.comb(n, d - 2))


def draw_slice_tuples(n: int, d: int, num_slices: int, stream: np.random.Generator) -> list[tuple[int, ...]]:
    total = math.comb(n, d - 2)
    if not 1 <= num_slices <= total:
        raise ValueError(f"num_slices must be in [1, C({n},{d - 2})={total}], got {num_slices}")
    ranks = stream.choice(total, size=num_slices, replace=False)
    if d - 2 <= 3 and total <= 1 << 22:
        table = colex_subsets(n, d - 2)
        return [tuple(int(v) for v in table[r]) for r in ranks]
    return [comb_unrank(int(r), d - 2) for r in ranks]


def slice_vote_statistic(
    g: DUniformHypergraph,
    stream: np.random.Generator,
    num_slices: int | None = None,
) -> float:
    """Max of the per-slice graph spectral statistic over random slices."""
    if g.d < 3:
        raise ValueError("slice vote needs d >= 3")
    if num_slices is None:
        num_slices = default_num_slices(g.n, g.d)
    tuples = draw_slice_tuples(g.n, g.d, num_slices, stream)
    return max(pc_spectral_statistic(take_slice(g, fixed).graph) for fixed in tuples)


def slice_vote_test(
    g: DUniformHypergraph,
    calibration: SliceNullTable,
    stream: np.random.Generator,
    num_slices: int | None = None,
    level: float = 0.05,
) -> TestResult:
    """Reject when any of ``num_slices`` random slices beats the Bonferroni null quantile."""
    if num_slices is None:
        num_slices = default_num_slices(g.n, g.d)
    if calibration.n != g.n - g.d + 2:
        raise ValueError(
            f"calibration is for {calibration.n}-vertex slices, need {g.n - g.d + 2}"
        )
    t0 = time.perf_counter()
    stat = slice_vote_statistic(g, stream, num_slices)
    threshold = calibration.quantile(1 - level / num_slices)
    return TestResult.decide("slicevote", stat, threshold, t0)
