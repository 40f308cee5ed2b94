"""Graph file loading: whitespace/comma edge lists and MatrixMarket files."""
from __future__ import annotations

import os
from dataclasses import dataclass

from .problems import CoverageInstanceData


class GraphParseError(ValueError):
    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        where = f"{path}:{lineno}" if lineno else str(path)
        super().__init__(f"{where}: {message}")


@dataclass
class EdgeListFile:
    path: str
    format: str
    node_count: int
    edge_count: int
    duplicate_edges: int
    self_loops: int
    data: CoverageInstanceData


def _split(line: str) -> list[str]:
    return line.replace(",", " ").split()


def _is_comment(line: str) -> bool:
    return line.startswith("%") or line.startswith("#")


def read_graph(path, name: str | None = None) -> EdgeListFile:
    """Parse ``path`` into an undirected simple graph.

    MatrixMarket files (``%%MatrixMarket`` header) keep their declared
    dimension, so isolated nodes survive; ids are shifted to start at 0.
    Plain edge lists are compacted: the distinct node labels, sorted
    numerically when all are integers, map to ``0..n-1``.  Extra columns
    such as weights are ignored.  Duplicate edges (in either direction) and
    self-loops are dropped and counted.
    """
    path = os.fspath(path)
    name = name or os.path.splitext(os.path.basename(path))[0]
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    first = next((ln.strip() for ln in lines if ln.strip()), "")
    mm = first.lower().startswith("%%matrixmarket")
    raw_edges: list[tuple[str, str, int]] = []
    declared_n = None
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or _is_comment(s):
            continue
        toks = _split(s)
        if mm and declared_n is None:
            try:
                rows, cols = int(toks[0]), int(toks[1])
            except (IndexError, ValueError):
                raise GraphParseError(path, lineno, f"bad MatrixMarket size line {s!r}") from None
            declared_n = max(rows, cols)
            continue
        if len(toks) < 2:
            raise GraphParseError(path, lineno, f"expected two node ids, got {s!r}")
        raw_edges.append((toks[0], toks[1], lineno))

    if mm:
        if declared_n is None:
            raise GraphParseError(path, 0, "MatrixMarket file without size line")
        n = declared_n
        edges = []
        for a, b, lineno in raw_edges:
            try:
                u, v = int(a) - 1, int(b) - 1
            except ValueError:
                raise GraphParseError(path, lineno, f"non-integer id in {a!r} {b!r}") from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphParseError(path, lineno, f"id outside 1..{n}")
            edges.append((u, v))
    else:
        labels = {t for a, b, _ in raw_edges for t in (a, b)}
        try:
            ordered = sorted(labels, key=int)
        except ValueError:
            ordered = sorted(labels)
        index = {lab: i for i, lab in enumerate(ordered)}
        n = len(ordered)
        edges = [(index[a], index[b]) for a, b, _ in raw_edges]

    if n == 0 or not edges:
        raise GraphParseError(path, 0, "graph has no edges")

    seen = set()
    loops = dups = 0
    for u, v in edges:
        if u == v:
            loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            dups += 1
        else:
            seen.add(key)
    data = CoverageInstanceData.from_edges(n, sorted(seen), name)
    return EdgeListFile(path, "matrixmarket" if mm else "edgelist", n, len(seen), dups, loops, data)


def load_graph(path, name: str | None = None) -> CoverageInstanceData:
    return read_graph(path, name).data
