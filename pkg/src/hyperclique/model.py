"""Uniform hypergraphs, the Erdos-Renyi null model and clique planting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .combinatorics import (
    MAX_SUBSET_SIZE,
    check_subset,
    colex_subsets,
    comb_rank,
    random_words,
    rank_array,
)

H0 = "H0"
H1 = "H1"


@dataclass(frozen=True)
class ModelParams:
    """Vertex count ``n``, hyperedge arity ``d`` and optional clique size."""

    n: int
    d: int
    kappa: int | None = None

    def __post_init__(self) -> None:
        if not 2 <= self.d <= MAX_SUBSET_SIZE:
            raise ValueError(f"d must be in [2, {MAX_SUBSET_SIZE}], got {self.d}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kappa is not None and not 0 <= self.kappa <= self.n:
            raise ValueError(f"kappa must be in [0, n={self.n}], got {self.kappa}")

    @property
    def num_slots(self) -> int:
        return math.comb(self.n, self.d)


class DUniformHypergraph:
    """A ``d``-uniform hypergraph on vertices ``0..n-1``.

    Edge presence is stored as a packed bit string of length ``C(n, d)``;
    bit ``r`` (LSB-first within each byte) is set iff the ``d``-subset with
    colex rank ``r`` is a hyperedge.  Instances are immutable.
    """

    __slots__ = ("n", "d", "_packed", "_mask", "_links")

    def __init__(self, n: int, d: int, packed: np.ndarray) -> None:
        ModelParams(n, d)
        slots = math.comb(n, d)
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        if packed.shape != ((slots + 7) // 8,):
            raise ValueError(
                f"expected {(slots + 7) // 8} packed bytes for C({n},{d})={slots} slots, "
                f"got shape {packed.shape}"
            )
        tail = slots % 8
        if tail and packed[-1] >> tail:
            raise ValueError("padding bits beyond the last edge slot must be zero")
        packed = packed.copy()
        packed.setflags(write=False)
        self.n = n
        self.d = d
        self._packed = packed
        self._mask: np.ndarray | None = None
        self._links: list[int] | None = None

    @classmethod
    def from_mask(cls, n: int, d: int, mask: np.ndarray) -> "DUniformHypergraph":
        """Build from a boolean indicator indexed by colex rank."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (math.comb(n, d),):
            raise ValueError(f"mask must have length C({n},{d})")
        g = cls(n, d, np.packbits(mask, bitorder="little"))
        g._mask = mask.copy()
        g._mask.setflags(write=False)
        return g

    @classmethod
    def from_edges(
        cls, n: int, d: int, edges: Iterable[Sequence[int]]
    ) -> "DUniformHypergraph":
        mask = np.zeros(math.comb(n, d), dtype=bool)
        for e in edges:
            s = check_subset(sorted(e), n)
            if len(s) != d:
                raise ValueError(f"edge {tuple(e)} does not have {d} distinct vertices")
            mask[comb_rank(s)] = True
        return cls.from_mask(n, d, mask)

    @classmethod
    def empty(cls, n: int, d: int) -> "DUniformHypergraph":
        return cls.from_mask(n, d, np.zeros(math.comb(n, d), dtype=bool))

    @classmethod
    def complete(cls, n: int, d: int) -> "DUniformHypergraph":
        return cls.from_mask(n, d, np.ones(math.comb(n, d), dtype=bool))

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.n, self.d)

    @property
    def num_slots(self) -> int:
        return math.comb(self.n, self.d)

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    @property
    def mask(self) -> np.ndarray:
        """Read-only boolean edge indicator indexed by colex rank."""
        if self._mask is None:
            mask = np.unpackbits(self._packed, bitorder="little", count=self.num_slots)
            mask = mask.astype(bool)
            mask.setflags(write=False)
            self._mask = mask
        return self._mask

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.mask))

    def has_edge(self, edge: Sequence[int]) -> bool:
        s = check_subset(sorted(edge), self.n)
        if len(s) != self.d:
            raise ValueError(f"{tuple(edge)} is not a set of {self.d} distinct vertices")
        return bool(self.mask[comb_rank(s)])

    def edge_array(self) -> np.ndarray:
        """Present hyperedges as an ``(m, d)`` array in colex order."""
        return colex_subsets(self.n, self.d)[self.mask]

    def edges(self) -> Iterator[tuple[int, ...]]:
        for row in self.edge_array():
            yield tuple(int(v) for v in row)

    def link_masks(self) -> list[int]:
        """Neighbourhood bitmasks of every ``(d-1)``-subset.

        Entry ``r`` is an int whose bit ``w`` is set iff ``T + {w}`` is a
        hyperedge, where ``T`` is the ``(d-1)``-subset with colex rank ``r``.
        """
        if self._links is None:
            n, d = self.n, self.d
            rows = math.comb(n, d - 1)
            table = np.zeros((rows, n), dtype=bool)
            edges = self.edge_array()
            for p in range(d):
                rest = np.delete(edges, p, axis=1)
                table[rank_array(rest, n), edges[:, p]] = True
            packed = np.packbits(table, axis=1, bitorder="little")
            self._links = [int.from_bytes(row.tobytes(), "little") for row in packed]
        return self._links

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DUniformHypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self._packed, other._packed)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.d, self._packed.tobytes()))

    def __repr__(self) -> str:
        return f"DUniformHypergraph(n={self.n}, d={self.d}, edges={self.num_edges}/{self.num_slots})"

    def __getstate__(self):
        return (self.n, self.d, self._packed)

    def __setstate__(self, state) -> None:
        n, d, packed = state
        self.n, self.d, self._packed = n, d, packed
        self._mask = None
        self._links = None


@dataclass(frozen=True)
class PlantedInstance:
    """A hypergraph together with its ground truth.

    Only the experiment harness reads ``clique`` and ``label``; detectors are
    handed ``graph`` alone.
    """

    graph: DUniformHypergraph
    label: str = H0
    clique: tuple[int, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        if self.label not in (H0, H1):
            raise ValueError(f"label must be H0 or H1, got {self.label!r}")
        if (self.label == H1) != (self.clique is not None):
            raise ValueError("a clique is present iff the label is H1")


def sample_null(n: int, d: int, stream: np.random.Generator) -> DUniformHypergraph:
    """Sample from the Erdos-Renyi ``d``-hypergraph with edge probability 1/2.

    One fair bit is consumed per edge slot, in colex rank order: bit ``r`` is
    bit ``r % 64`` of the ``r // 64``-th 64-bit word drawn from ``stream``.
    """
    ModelParams(n, d)
    slots = math.comb(n, d)
    words = random_words(stream, (slots + 63) // 64)
    raw = words.astype("<u8").view(np.uint8)
    bits = np.unpackbits(raw, bitorder="little", count=slots).astype(bool)
    return DUniformHypergraph.from_mask(n, d, bits)


def clique_ranks(clique: Sequence[int], n: int, d: int) -> np.ndarray:
    """Colex ranks of all ``d``-subsets of ``clique``."""
    k = len(clique)
    if k < d:
        return np.zeros(0, dtype=np.int64)
    members = np.asarray(sorted(clique), dtype=np.int64)
    local = colex_subsets(k, d)
    return rank_array(members[local], n)


def plant_clique(
    g: DUniformHypergraph, kappa: int, stream: np.random.Generator
) -> PlantedInstance:
    """Force every hyperedge inside a uniformly random ``kappa``-set."""
    if not 0 <= kappa <= g.n:
        raise ValueError(f"kappa must be in [0, {g.n}], got {kappa}")
    clique = tuple(sorted(int(v) for v in stream.choice(g.n, size=kappa, replace=False)))
    mask = g.mask.copy()
    mask[clique_ranks(clique, g.n, g.d)] = True
    return PlantedInstance(DUniformHypergraph.from_mask(g.n, g.d, mask), H1, clique)


def is_clique(g: DUniformHypergraph, vertices: Iterable[int]) -> bool:
    """True iff every ``d``-subset of ``vertices`` is a hyperedge."""
    s = sorted(vertices)
    check_subset(s, g.n)
    if len(s) < g.d:
        return True
    return bool(g.mask[clique_ranks(s, g.n, g.d)].all())
