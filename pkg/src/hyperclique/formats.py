"""Text (``.hg``), binary (``.hgb``) and truth-sidecar (``.truth``) formats.

Vertices are 0-based in memory and 1-based in the text formats.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .combinatorics import rank_array
from .model import H0, H1, DUniformHypergraph, PlantedInstance

MAGIC = b"HPCB"
VERSION = 1
_HEADER = struct.Struct("<4sBBQ")


class FormatError(ValueError):
    """Malformed hypergraph or sidecar input."""

    def __init__(self, message: str, line: int | None = None, offset: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif offset is not None:
            where = f"byte {offset}: "
        super().__init__(where + message)
        self.line = line
        self.offset = offset


def encode_text(g: DUniformHypergraph) -> bytes:
    edges = g.edge_array()
    lines = [f"{g.d} {g.n} {len(edges)}"]
    lines.extend(" ".join(str(v + 1) for v in row) for row in edges.tolist())
    return ("\n".join(lines) + "\n").encode("ascii")


def _ints(text: str, line: int) -> list[int]:
    fields = text.split(" ")
    if not all(f.isdigit() for f in fields):
        raise FormatError(f"expected space-separated decimals, got {text!r}", line)
    return [int(f) for f in fields]


def decode_text(data: bytes) -> DUniformHypergraph:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError("non-ASCII content", offset=exc.start) from None
    if not text.endswith("\n"):
        raise FormatError("missing final LF", len(text.split("\n")))
    lines = text[:-1].split("\n")
    header = _ints(lines[0], 1)
    if len(header) != 3:
        raise FormatError("header must be 'd N M'", 1)
    d, n, m = header
    if not 2 <= d <= 8 or n < 1:
        raise FormatError(f"unsupported header d={d} N={n}", 1)
    if len(lines) - 1 != m:
        raise FormatError(f"header declares {m} edges, found {len(lines) - 1}", 1)
    edges = np.zeros((m, d), dtype=np.int64)
    for i, body in enumerate(lines[1:]):
        lineno = i + 2
        vs = _ints(body, lineno)
        if len(vs) != d:
            raise FormatError(f"edge has {len(vs)} vertices, expected {d}", lineno)
        if any(v < 1 or v > n for v in vs):
            raise FormatError(f"vertex out of range [1, {n}]", lineno)
        if len(set(vs)) != d:
            raise FormatError("duplicate vertex in edge", lineno)
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise FormatError("edge vertices must be strictly increasing", lineno)
        edges[i] = vs
    edges -= 1
    ranks = rank_array(edges, n) if m else np.zeros(0, dtype=np.int64)
    seen, first = np.unique(ranks, return_index=True)
    if len(seen) != m:
        dup = sorted(set(range(m)) - set(first.tolist()))[0]
        raise FormatError("duplicate edge", dup + 2)
    mask = np.zeros(math.comb(n, d), dtype=bool)
    mask[ranks] = True
    return DUniformHypergraph.from_mask(n, d, mask)


def encode_binary(g: DUniformHypergraph) -> bytes:
    return _HEADER.pack(MAGIC, VERSION, g.d, g.n) + g.packed.tobytes()


def decode_binary(data: bytes) -> DUniformHypergraph:
    if len(data) < _HEADER.size:
        raise FormatError("truncated header", offset=len(data))
    magic, version, d, n = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    if not 2 <= d <= 8 or n < 1:
        raise FormatError(f"unsupported d={d} N={n}", offset=5)
    expected = (math.comb(n, d) + 7) // 8
    body = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
    if body.size != expected:
        raise FormatError(
            f"expected {expected} payload bytes, found {body.size}", offset=_HEADER.size
        )
    try:
        return DUniformHypergraph(n, d, body)
    except ValueError as exc:
        raise FormatError(str(exc), offset=len(data) - 1) from None


def encode(g: DUniformHypergraph, fmt: str = "text") -> bytes:
    if fmt == "text":
        return encode_text(g)
    if fmt == "binary":
        return encode_binary(g)
    raise ValueError(f"unknown format {fmt!r}")


def decode(data: bytes, fmt: str | None = None) -> DUniformHypergraph:
    """Decode ``data``; the format is sniffed from the magic bytes if not given."""
    if fmt is None:
        fmt = "binary" if data[:4] == MAGIC else "text"
    if fmt == "text":
        return decode_text(data)
    if fmt == "binary":
        return decode_binary(data)
    raise ValueError(f"unknown format {fmt!r}")


def encode_truth(instance: PlantedInstance) -> bytes:
    if instance.label == H0:
        return b"H0\n"
    ids = " ".join(str(v + 1) for v in instance.clique)
    return f"H1\n{ids}\n".encode("ascii")


def decode_truth(data: bytes, n: int | None = None) -> tuple[str, tuple[int, ...] | None]:
    """Parse a sidecar into ``(label, clique)`` with 0-based clique ids."""
    text = data.decode("ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] not in (H0, H1):
        raise FormatError("first line must be H0 or H1", 1)
    if lines[0] == H0:
        if len(lines) != 1:
            raise FormatError("unexpected content after H0", 2)
        return H0, None
    if len(lines) != 2:
        raise FormatError("H1 sidecar needs exactly one vertex line", 2)
    ids = _ints(lines[1], 2) if lines[1] else []
    if any(a >= b for a, b in zip(ids, ids[1:])) or any(v < 1 for v in ids):
        raise FormatError("clique ids must be increasing and 1-based", 2)
    if n is not None and any(v > n for v in ids):
        raise FormatError(f"clique vertex out of range [1, {n}]", 2)
    return H1, tuple(v - 1 for v in ids)


def _format_for(path: Path) -> str:
    return "binary" if path.suffix == ".hgb" else "text"


def truth_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".truth")


def write_hypergraph(path: str | Path, g: DUniformHypergraph) -> None:
    path = Path(path)
    path.write_bytes(encode(g, _format_for(path)))


def read_hypergraph(path: str | Path) -> DUniformHypergraph:
    return decode(Path(path).read_bytes())


def write_instance(path: str | Path, instance: PlantedInstance) -> None:
    """Write the graph to ``path`` and the ground truth to its ``.truth`` sidecar."""
    write_hypergraph(path, instance.graph)
    truth_path(path).write_bytes(encode_truth(instance))


def read_instance(path: str | Path) -> PlantedInstance:
    g = read_hypergraph(path)
    label, clique = decode_truth(truth_path(path).read_bytes(), g.n)
    return PlantedInstance(g, label, clique)
