"""Compact immutable directed graph with an in-degree index.

The graph stores the edge list as two parallel ``int64`` arrays plus a
CSR-style index from each vertex to the sources that point at it, so
in-degree lookup is O(1) and edge iteration is a linear array pass.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UsageError

__all__ = [
    "BuildReport",
    "DirectedGraph",
    "InDegreeHistogram",
    "build_graph",
    "in_degree_histogram",
]


@dataclass(frozen=True)
class BuildReport:
    """Edges discarded while building a simple digraph."""

    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0


class DirectedGraph:
    """Immutable simple directed graph over dense 0-based vertex ids.

    Parameters
    ----------
    n_vertices : int
        Vertex count; every edge endpoint must be < n_vertices.
    src, dst : array_like of int
        Parallel arrays, one directed edge per position. Edge storage
        order is preserved and is the order used when writing the graph
        back out.
    original_ids : ndarray, optional
        Dense-id -> raw-id mapping kept from ingestion, for reports.
    validate : bool
        Check simplicity (no self-loops, no duplicate edges) and bounds.
        Generators that construct edges distinct-by-design pass False.
    """

    __slots__ = ("n_vertices", "src", "dst", "in_degree", "original_ids",
                 "_indptr", "_sources_by_target")

    def __init__(self, n_vertices, src, dst, original_ids=None, validate=True):
        src = np.ascontiguousarray(src, dtype=np.int64)
        dst = np.ascontiguousarray(dst, dtype=np.int64)
        if src.shape != dst.shape or src.ndim != 1:
            raise UsageError("src and dst must be 1-d arrays of equal length")
        if validate and src.size:
            if src.min() < 0 or dst.min() < 0 \
                    or src.max() >= n_vertices or dst.max() >= n_vertices:
                raise UsageError("edge endpoint outside [0, n_vertices)")
            if np.any(src == dst):
                raise UsageError("self-loop present; use build_graph to drop")
            key = src * np.int64(n_vertices) + dst
            if np.unique(key).size != key.size:
                raise UsageError("duplicate edge present; use build_graph to drop")

        self.n_vertices = int(n_vertices)
        self.src = src
        self.dst = dst
        self.in_degree = np.bincount(dst, minlength=self.n_vertices).astype(np.int64)
        self.original_ids = original_ids

        # CSR over targets: sources_by_target[indptr[v]:indptr[v+1]] are the
        # in-neighbors of v, in edge storage order.
        order = np.argsort(dst, kind="stable")
        self._sources_by_target = src[order]
        self._indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.cumsum(self.in_degree, out=self._indptr[1:])

        for a in (self.src, self.dst, self.in_degree,
                  self._sources_by_target, self._indptr):
            a.setflags(write=False)

    @property
    def n_edges(self):
        return int(self.src.size)

    def in_neighbors(self, v):
        """Sources of all edges pointing at v (length == in_degree[v])."""
        return self._sources_by_target[self._indptr[v]:self._indptr[v + 1]]

    def has_edge(self, u, v):
        if not (0 <= v < self.n_vertices):
            return False
        return bool(np.any(self.in_neighbors(v) == u))

    def edges(self):
        """Iterate (source, target) pairs in storage order."""
        return zip(self.src.tolist(), self.dst.tolist())

    def __repr__(self):
        return f"DirectedGraph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class InDegreeHistogram:
    """Vertex counts per in-degree: counts[k] = number of vertices with d_i = k."""

    counts: dict
    n_vertices: int

    def as_arrays(self):
        """(degrees, counts) as sorted int64 arrays, zero-count degrees omitted."""
        ks = np.array(sorted(self.counts), dtype=np.int64)
        ns = np.array([self.counts[int(k)] for k in ks], dtype=np.int64)
        return ks, ns

    @property
    def total_edges(self):
        return int(sum(k * n for k, n in self.counts.items()))


def _densify(raw):
    """Map raw ids to 0..n-1 in first-appearance order (row-major scan)."""
    flat = raw.reshape(-1)
    uniq, first_idx, inverse = np.unique(flat, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(uniq.size, dtype=np.int64)
    rank[order] = np.arange(uniq.size, dtype=np.int64)
    dense = rank[inverse].reshape(raw.shape)
    return dense, uniq[order]


def build_graph(edge_pairs):
    """Build a simple DirectedGraph from raw (source, target) id pairs.

    Raw ids may be arbitrary unsigned 64-bit integers; they are densified
    to 0..N-1 in first-appearance order (sources before targets within a
    pair). Self-loops and duplicate (source, target) pairs are dropped,
    with counts reported. Empty input yields a valid empty graph.

    Returns
    -------
    (DirectedGraph, BuildReport)
    """
    arr = np.asarray(edge_pairs, dtype=np.uint64)
    if arr.size == 0:
        return DirectedGraph(0, [], []), BuildReport()
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise UsageError("edge_pairs must be a sequence of (source, target) pairs")

    dense, original_ids = _densify(arr)
    n = original_ids.size
    src, dst = dense[:, 0], dense[:, 1]

    loop_mask = src == dst
    n_loops = int(loop_mask.sum())
    if n_loops:
        src, dst = src[~loop_mask], dst[~loop_mask]

    # Dedup keeping the first occurrence; n < 2**31 in practice so the
    # packed int64 key cannot overflow.
    key = src * np.int64(n) + dst
    _, first_pos = np.unique(key, return_index=True)
    n_dups = int(key.size - first_pos.size)
    if n_dups:
        keep = np.sort(first_pos)
        src, dst = src[keep], dst[keep]

    g = DirectedGraph(n, src, dst, original_ids=original_ids, validate=False)
    return g, BuildReport(self_loops_dropped=n_loops, duplicate_edges_dropped=n_dups)


def in_degree_histogram(g):
    """Count vertices per in-degree, including k = 0."""
    binned = np.bincount(g.in_degree)
    counts = {int(k): int(c) for k, c in enumerate(binned) if c > 0}
    return InDegreeHistogram(counts=counts, n_vertices=g.n_vertices)
