"""Implicit adjacency tensor, its unfoldings, and the slice map to graphs.

The tensor is never stored densely.  An unfolding is represented by its
nonzero pattern, enumerated from the packed edge bits: every hyperedge slot
contributes ``d!`` ordered index tuples, each with value ``+1`` or ``-1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .combinatorics import colex_subsets, comb_rank, rank_array
from .model import DUniformHypergraph


class AdjacencyTensorView:
    """Read-only order-``d`` view of a hypergraph's adjacency tensor.

    In raw mode entries are 0/1.  In centered mode an entry with distinct
    indices is ``2 * raw - 1`` and any entry with a repeated index is 0.
    """

    def __init__(self, graph: DUniformHypergraph, centered: bool = True) -> None:
        self.graph = graph
        self.centered = centered

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def order(self) -> int:
        return self.graph.d

    def entry(self, idx: Sequence[int]) -> int:
        if len(idx) != self.order:
            raise ValueError(f"expected {self.order} indices, got {len(idx)}")
        if any(not 0 <= i < self.n for i in idx):
            raise IndexError(f"index {tuple(idx)} out of range for n={self.n}")
        if len(set(idx)) < len(idx):
            return 0
        raw = int(self.graph.mask[comb_rank(sorted(idx))])
        return 2 * raw - 1 if self.centered else raw


class UnfoldingView:
    """Matricization of an adjacency tensor.

    ``row_modes`` (default the first mode) index the rows; the remaining modes
    index the columns.  A group of modes ``(m_1, ..., m_r)`` maps a tuple to
    ``sum(i_{m_j} * n**(j-1))``.  ``balanced=True`` uses the first
    ``ceil(d/2)`` modes as rows.
    """

    def __init__(
        self,
        tensor: AdjacencyTensorView,
        row_modes: Sequence[int] | None = None,
        balanced: bool = False,
    ) -> None:
        d = tensor.order
        if row_modes is None:
            row_modes = tuple(range(math.ceil(d / 2))) if balanced else (0,)
        row_modes = tuple(row_modes)
        if not row_modes or len(set(row_modes)) != len(row_modes) or not set(row_modes) <= set(range(d)):
            raise ValueError(f"invalid row modes {row_modes} for order {d}")
        if len(row_modes) == d:
            raise ValueError("at least one mode must index the columns")
        self.tensor = tensor
        self.row_modes = row_modes
        self.col_modes = tuple(m for m in range(d) if m not in row_modes)
        self._matrix: sp.csr_matrix | None = None
        self._matrix_t: sp.csr_matrix | None = None

    @property
    def shape(self) -> tuple[int, int]:
        n = self.tensor.n
        return n ** len(self.row_modes), n ** len(self.col_modes)

    def _encode(self, tuples: np.ndarray, modes: tuple[int, ...]) -> np.ndarray:
        n = self.tensor.n
        out = np.zeros(len(tuples), dtype=np.int64)
        for j, m in enumerate(modes):
            out += tuples[:, m] * n**j
        return out

    def nonzeros(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(rows, cols, values)`` of every nonzero entry of the unfolding."""
        g = self.tensor.graph
        slots = colex_subsets(g.n, g.d)
        if self.tensor.centered:
            values = np.where(g.mask, 1.0, -1.0)
        else:
            slots = slots[g.mask]
            values = np.ones(len(slots))
        rows, cols = [], []
        for perm in itertools.permutations(range(g.d)):
            ordered = slots[:, perm]
            rows.append(self._encode(ordered, self.row_modes))
            cols.append(self._encode(ordered, self.col_modes))
        k = math.factorial(g.d)
        return (
            np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64),
            np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64),
            np.tile(values, k),
        )

    @property
    def matrix(self) -> sp.csr_matrix:
        """Sparse form of the unfolding, built once from the edge bits."""
        if self._matrix is None:
            rows, cols, vals = self.nonzeros()
            self._matrix = sp.csr_matrix((vals, (rows, cols)), shape=self.shape)
        return self._matrix

    @property
    def matrix_t(self) -> sp.csr_matrix:
        if self._matrix_t is None:
            self._matrix_t = self.matrix.T.tocsr()
        return self._matrix_t


def unfold_matvec(u: UnfoldingView, v: np.ndarray, side: str = "right") -> np.ndarray:
    """``M @ v`` (``side="right"``) or ``M.T @ v`` (``side="left"``)."""
    v = np.asarray(v, dtype=float)
    n_rows, n_cols = u.shape
    if side == "right":
        if v.shape != (n_cols,):
            raise ValueError(f"right product needs a vector of length {n_cols}, got {v.shape}")
        return u.matrix @ v
    if side == "left":
        if v.shape != (n_rows,):
            raise ValueError(f"left product needs a vector of length {n_rows}, got {v.shape}")
        return u.matrix_t @ v
    raise ValueError(f"side must be 'right' or 'left', got {side!r}")


class PowerIterationResult(NamedTuple):
    sigma: float
    iterations: int
    converged: bool


def top_singular_value(
    u: UnfoldingView,
    tol: float = 1e-4,
    max_iter: int = 300,
    stream: np.random.Generator | None = None,
    start: np.ndarray | None = None,
) -> PowerIterationResult:
    """Largest singular value of ``u`` by power iteration on ``M M^T``.

    The start vector has iid Uniform(-1, 1) entries drawn from ``stream``
    unless given; a continuous law keeps it off every eigenvector's
    orthogonal complement almost surely.
    Each step reports ``sigma = sqrt(x' G x)`` for the current unit vector
    ``x``; the run converges once two successive estimates differ by less
    than ``tol`` relative.  Running out of iterations is not an error.
    """
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be > 0 and max_iter >= 1")
    n_rows, _ = u.shape
    if u.tensor.n == 0 or n_rows == 0:
        raise ValueError("empty vertex set")
    if start is None:
        if stream is None:
            raise ValueError("need a stream or an explicit start vector")
        start = stream.uniform(-1.0, 1.0, size=n_rows)
    x = np.asarray(start, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValueError("start vector must be nonzero")
    x = x / norm
    m, mt = u.matrix, u.matrix_t
    sigma = math.nan
    for it in range(1, max_iter + 1):
        y = m @ (mt @ x)
        rayleigh = max(float(x @ y), 0.0)
        new_sigma = math.sqrt(rayleigh)
        ynorm = np.linalg.norm(y)
        if ynorm == 0:
            return PowerIterationResult(0.0, it, True)
        if not math.isnan(sigma) and abs(new_sigma - sigma) < tol * new_sigma:
            return PowerIterationResult(new_sigma, it, True)
        sigma = new_sigma
        x = y / ynorm
    return PowerIterationResult(sigma, max_iter, False)


@dataclass(frozen=True)
class Slice:
    """A 2-uniform graph cut from a hypergraph by fixing ``d-2`` vertices.

    ``vertices[i]`` is the original id of slice vertex ``i``.
    """

    graph: DUniformHypergraph
    fixed: tuple[int, ...]
    vertices: tuple[int, ...]


def take_slice(source: AdjacencyTensorView | DUniformHypergraph, fixed: Sequence[int]) -> Slice:
    """Pairs ``{i, j}`` whose union with ``fixed`` is a hyperedge.

    The remaining ``n - d + 2`` vertices are relabelled ``0..`` in increasing
    order of their original ids.
    """
    g = source.graph if isinstance(source, AdjacencyTensorView) else source
    if g.d < 3:
        raise ValueError("slicing needs d >= 3")
    fixed = tuple(int(v) for v in fixed)
    if len(fixed) != g.d - 2:
        raise ValueError(f"need {g.d - 2} fixed vertices, got {len(fixed)}")
    if len(set(fixed)) != len(fixed):
        raise ValueError(f"fixed vertices must be distinct: {fixed}")
    if any(not 0 <= v < g.n for v in fixed):
        raise ValueError(f"fixed vertex out of range for n={g.n}: {fixed}")
    keep = np.setdiff1d(np.arange(g.n), np.asarray(fixed, dtype=np.int64))
    n2 = len(keep)
    pairs = keep[colex_subsets(n2, 2)]
    full = np.sort(
        np.hstack([pairs, np.broadcast_to(np.asarray(fixed, dtype=np.int64), (len(pairs), len(fixed)))]),
        axis=1,
    )
    mask = g.mask[rank_array(full, g.n)] if len(full) else np.zeros(0, dtype=bool)
    graph = DUniformHypergraph.from_mask(n2, 2, mask)
    return Slice(graph, tuple(sorted(fixed)), tuple(int(v) for v in keep))
