"""Exact combinatorial primitives and reproducible random streams.

Subsets of ``range(n)`` are addressed by their colexicographic rank
``sum(C(c_j, j) for j, c_j in enumerate(sorted(s), start=1))``, which does not
depend on ``n``.  Every experiment draws its randomness from a stream derived
from ``(master_seed, role_tag, trial_index)``.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_SUBSET_SIZE = 8
_INT64_MAX = np.iinfo(np.int64).max
_STREAM_KEY = b"hyperclique.stream.v1"


def binom(n: int, k: int) -> int:
    """Return the binomial coefficient C(n, k), or 0 when ``k > n``."""
    if n < 0 or k < 0:
        raise ValueError(f"binom requires n, k >= 0, got n={n}, k={k}")
    return math.comb(n, k)


@lru_cache(maxsize=64)
def binom_table(n_max: int, k_max: int) -> np.ndarray:
    """Table ``T[n, k] = C(n, k)`` as int64 for ``n <= n_max``, ``k <= k_max``.

    Raises
    ------
    OverflowError
        If any entry does not fit in a signed 64-bit integer.
    """
    if math.comb(n_max, min(k_max, n_max // 2)) > _INT64_MAX:
        raise OverflowError(
            f"C({n_max}, k<={k_max}) exceeds the 64-bit addressing range"
        )
    table = np.zeros((n_max + 1, k_max + 1), dtype=np.int64)
    for n in range(n_max + 1):
        for k in range(min(n, k_max) + 1):
            table[n, k] = math.comb(n, k)
    table.setflags(write=False)
    return table


def check_subset(members: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    """Validate a strictly increasing vertex subset and return it as a tuple."""
    s = tuple(int(c) for c in members)
    if any(a >= b for a, b in zip(s, s[1:])):
        raise ValueError(f"subset must be strictly increasing: {s}")
    if s and s[0] < 0:
        raise ValueError(f"negative vertex id in {s}")
    if n is not None and s and s[-1] >= n:
        raise ValueError(f"vertex {s[-1]} out of range for n={n}")
    return s


def comb_rank(members: Sequence[int]) -> int:
    """Colexicographic rank of a strictly increasing subset.

    >>> comb_rank((2, 3, 4))
    9
    """
    s = check_subset(members)
    return sum(math.comb(c, j) for j, c in enumerate(s, start=1))


def comb_unrank(r: int, k: int, n: int | None = None) -> tuple[int, ...]:
    """Inverse of :func:`comb_rank` for subsets of size ``k``.

    When ``n`` is given, ``r`` must lie in ``[0, C(n, k))``.
    """
    if r < 0 or (n is not None and r >= math.comb(n, k)):
        raise IndexError(f"rank {r} out of range for k={k}, n={n}")
    out = []
    for j in range(k, 0, -1):
        # largest c with C(c, j) <= r
        lo, hi = j - 1, j
        while math.comb(hi, j) <= r:
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if math.comb(mid, j) <= r:
                lo = mid
            else:
                hi = mid
        out.append(lo)
        r -= math.comb(lo, j)
    return tuple(reversed(out))


def rank_array(subsets: np.ndarray, n: int) -> np.ndarray:
    """Vectorised colex rank of each row of a sorted ``(m, k)`` integer array."""
    subsets = np.asarray(subsets, dtype=np.int64)
    m, k = subsets.shape
    table = binom_table(max(n, 1), max(k, 1))
    ranks = np.zeros(m, dtype=np.int64)
    for j in range(k):
        ranks += table[subsets[:, j], j + 1]
    return ranks


@lru_cache(maxsize=32)
def colex_subsets(n: int, k: int) -> np.ndarray:
    """All ``k``-subsets of ``range(n)`` as rows, row ``r`` having colex rank ``r``."""
    count = math.comb(n, k)
    if k == 0:
        out = np.zeros((count, 0), dtype=np.int64)
    elif count == 0:
        out = np.zeros((0, k), dtype=np.int64)
    else:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(n), k)),
            dtype=np.int64,
            count=count * k,
        )
        lex = flat.reshape(count, k)
        out = np.empty_like(lex)
        out[rank_array(lex, n)] = lex
    out.setflags(write=False)
    return out


def subsets_of(members: Iterable[int], k: int) -> Iterable[tuple[int, ...]]:
    """``k``-subsets of ``members`` (sorted), in lexicographic order."""
    return itertools.combinations(sorted(members), k)


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one independent random stream."""

    master_seed: int
    role_tag: str
    trial_index: int = 0

    def __post_init__(self) -> None:
        for name in ("master_seed", "trial_index"):
            value = getattr(self, name)
            if not 0 <= value < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")

    def stream(self) -> np.random.Generator:
        return derive_stream(self)


def derive_stream(spec: SeedSpec) -> np.random.Generator:
    """Deterministic Philox stream keyed by a BLAKE2b hash of ``spec``.

    The derivation uses only fixed-width little-endian encodings, so the same
    spec yields the same words on every platform.
    """
    tag = spec.role_tag.encode("utf-8")
    payload = struct.pack("<QQI", spec.master_seed, spec.trial_index, len(tag)) + tag
    digest = hashlib.blake2b(payload, key=_STREAM_KEY, digest_size=16).digest()
    key = int.from_bytes(digest, "little")
    return np.random.Generator(np.random.Philox(key=key))


def stream_for(master_seed: int, role_tag: str, trial_index: int = 0) -> np.random.Generator:
    return derive_stream(SeedSpec(master_seed, role_tag, trial_index))


def random_words(stream: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` uniform 64-bit words from ``stream``."""
    return np.asarray(stream.bit_generator.random_raw(count), dtype=np.uint64)
