"""Sparse multi-view graph data model and text-format ingestion.

Graphs are undirected and weighted. Every view of a multi-view graph is
indexed against one shared node registry, so embeddings computed on any
combination of views line up row-by-row with the original identifiers.

File formats
------------
Edge list   : ``src<TAB>dst[<TAB>weight]``, one edge per line, ``#`` comments.
Label file  : ``node<TAB>label1,label2,...``.
View manifest: ``view_name<TAB>path``, one view per line.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


class ParseError(ValueError):
    """Malformed input text; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class NodeRegistry:
    """Bijective map between string node identifiers and dense indices.

    Indices are assigned in first-appearance order, which makes every run
    reproducible from identical inputs.
    """

    def __init__(self):
        self._index = {}
        self._names = []

    def intern(self, name: str) -> int:
        """Return the index for ``name``, registering it if unseen."""
        idx = self._index.get(name)
        if idx is None:
            idx = len(self._names)
            self._index[name] = idx
            self._names.append(name)
        return idx

    def index_of(self, name: str) -> int:
        """Return the index for a known ``name`` (KeyError if absent)."""
        return self._index[name]

    def __contains__(self, name) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._names)

    def name_of(self, idx: int) -> str:
        return self._names[idx]

    @property
    def names(self) -> list:
        return list(self._names)


class SparseAdjacency:
    """Symmetric weighted adjacency of one view in CSR form.

    Each undirected edge {i, j} is stored in both directions with the same
    positive weight; a self-loop is a single diagonal entry. ``total_weight``
    is the sum over all stored entries.
    """

    def __init__(self, mat: sp.csr_array):
        mat = sp.csr_array(mat)
        mat.sum_duplicates()
        mat.sort_indices()
        self.mat = mat
        self.total_weight = float(mat.data.sum()) if mat.nnz else 0.0
        self._coo_rows = None

    @classmethod
    def from_coo(cls, rows, cols, weights, n: int) -> "SparseAdjacency":
        """Build from already-symmetrized COO triples (duplicates summed)."""
        mat = sp.coo_array(
            (np.asarray(weights, dtype=np.float64),
             (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(n, n),
        ).tocsr()
        return cls(mat)

    @classmethod
    def from_undirected(cls, rows, cols, weights, n: int) -> "SparseAdjacency":
        """Build from one canonical triple per undirected edge occurrence.

        Duplicates are summed once per undirected edge and the summed value
        is mirrored to both directions, so symmetry is bit-exact.
        """
        i = np.asarray(rows, dtype=np.int64)
        j = np.asarray(cols, dtype=np.int64)
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        upper = sp.coo_array(
            (np.asarray(weights, dtype=np.float64), (lo, hi)), shape=(n, n)
        ).tocsr()
        upper.sum_duplicates()
        return cls(upper + sp.triu(upper, k=1).T)

    @classmethod
    def empty(cls, n: int) -> "SparseAdjacency":
        return cls(sp.csr_array((n, n), dtype=np.float64))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    @property
    def nnz(self) -> int:
        return self.mat.nnz

    @property
    def indptr(self):
        return self.mat.indptr

    @property
    def indices(self):
        return self.mat.indices

    @property
    def values(self):
        return self.mat.data

    @property
    def coo_rows(self):
        """Row index of every stored entry, in CSR data order (cached)."""
        if self._coo_rows is None:
            self._coo_rows = np.repeat(
                np.arange(self.n, dtype=np.int64), np.diff(self.mat.indptr)
            )
        return self._coo_rows

    def degrees(self):
        """Number of stored entries per row (self-loop counts once)."""
        return np.diff(self.mat.indptr)

    def weighted_degrees(self):
        return np.asarray(self.mat.sum(axis=1)).ravel()

    def active_nodes(self):
        """Indices of nodes with degree > 0 in this view."""
        return np.flatnonzero(self.degrees() > 0)

    def edge_count(self) -> int:
        """Undirected edge count: off-diagonal entries / 2 plus self-loops."""
        diag_nnz = int(np.count_nonzero(self.mat.diagonal()))
        return (self.nnz - diag_nnz) // 2 + diag_nnz

    def with_n(self, n: int) -> "SparseAdjacency":
        """Return a copy reindexed into a larger node space."""
        if n < self.n:
            raise ValueError(f"cannot shrink adjacency from {self.n} to {n} nodes")
        if n == self.n:
            return self
        mat = sp.csr_array((self.values.copy(), self.indices.copy(), self.indptr.copy()),
                           shape=(self.n, self.n))
        mat.resize((n, n))
        return SparseAdjacency(mat)

    def is_symmetric(self, tol: float = 0.0) -> bool:
        diff = (self.mat - self.mat.T).tocoo()
        if diff.nnz == 0:
            return True
        return bool(np.abs(diff.data).max() <= tol)

    def validate(self):
        """Check structural invariants; raises ValueError on violation."""
        if self.nnz and self.values.min() <= 0:
            raise ValueError("adjacency stores a non-positive weight")
        if not self.is_symmetric():
            raise ValueError("adjacency is not symmetric")
        total = float(self.values.sum()) if self.nnz else 0.0
        if abs(total - self.total_weight) > 1e-12 * max(1.0, abs(total)):
            raise ValueError("total_weight out of sync with stored values")


@dataclass
class MultiViewGraph:
    """Global node registry plus one adjacency per view."""

    registry: NodeRegistry
    view_names: list
    views: list  # list[SparseAdjacency], all sized to len(registry)

    @property
    def k(self) -> int:
        return len(self.views)

    @property
    def n(self) -> int:
        return len(self.registry)

    def active_counts(self):
        """Per-view count of nodes with degree > 0."""
        return np.array([len(v.active_nodes()) for v in self.views], dtype=np.int64)


class LabelStore:
    """Multi-label assignments per node, with a string-label vocabulary.

    Label ids are assigned in first-appearance order. Nodes absent from the
    store are unlabeled.
    """

    def __init__(self):
        self._vocab = {}
        self._vocab_names = []
        self._labels = {}  # node index -> set[int]

    def label_id(self, name: str) -> int:
        lid = self._vocab.get(name)
        if lid is None:
            lid = len(self._vocab_names)
            self._vocab[name] = lid
            self._vocab_names.append(name)
        return lid

    def add(self, node: int, label_names):
        ids = {self.label_id(x) for x in label_names}
        self._labels.setdefault(node, set()).update(ids)

    def labels_of(self, node: int) -> frozenset:
        return frozenset(self._labels.get(node, ()))

    def labeled_nodes(self):
        """Sorted indices of nodes with at least one label."""
        return sorted(i for i, s in self._labels.items() if s)

    @property
    def num_labels(self) -> int:
        return len(self._vocab_names)

    @property
    def vocabulary(self) -> list:
        return list(self._vocab_names)

    def label_name(self, lid: int) -> str:
        return self._vocab_names[lid]


def _iter_data_lines(source):
    """Yield (line_no, stripped_line) skipping blanks and # comments."""
    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_no, line


def _open_maybe(source):
    """Accept a path or an open text stream; returns (stream, needs_close)."""
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    return source, False


def parse_edges(source, registry: NodeRegistry, weighted: bool = True):
    """Parse an edge-list stream into one COO triple per line.

    The triples are direction-agnostic (symmetrization happens when the
    adjacency is materialized). The registry is extended with unseen
    identifiers in first-appearance order.
    """
    stream, close = _open_maybe(source)
    rows, cols, weights = [], [], []
    try:
        for line_no, line in _iter_data_lines(stream):
            parts = line.split("\t")
            if len(parts) == 1:
                parts = line.split()
            if len(parts) == 2:
                w = 1.0
            elif len(parts) == 3:
                if not weighted:
                    raise ParseError("weight column present in unweighted load", line_no)
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(f"bad weight {parts[2]!r}", line_no) from None
                if not np.isfinite(w) or w <= 0:
                    raise ParseError(f"non-positive weight {parts[2]!r}", line_no)
            else:
                raise ParseError(f"expected 2 or 3 fields, got {len(parts)}", line_no)
            i = registry.intern(parts[0])
            j = registry.intern(parts[1])
            rows.append(i); cols.append(j); weights.append(w)
    finally:
        if close:
            stream.close()
    return rows, cols, weights


def load_edge_list(source, registry: NodeRegistry | None = None,
                   weighted: bool = True):
    """Load one edge list into a symmetric adjacency.

    Duplicate edges sum their weights; self-loops are retained as single
    diagonal entries. Returns (SparseAdjacency, registry).
    """
    if registry is None:
        registry = NodeRegistry()
    rows, cols, weights = parse_edges(source, registry, weighted=weighted)
    adj = SparseAdjacency.from_undirected(rows, cols, weights, len(registry))
    return adj, registry


def write_edge_list(adj: SparseAdjacency, registry: NodeRegistry, sink):
    """Write the upper triangle (plus self-loops) so a reload round-trips."""
    stream, close = (open(sink, "w", encoding="utf-8"), True) \
        if isinstance(sink, (str, os.PathLike)) else (sink, False)
    try:
        rows = adj.coo_rows
        cols = adj.indices
        vals = adj.values
        for e in range(adj.nnz):
            i, j = int(rows[e]), int(cols[e])
            if i > j:
                continue
            stream.write(f"{registry.name_of(i)}\t{registry.name_of(j)}\t{float(vals[e])!r}\n")
    finally:
        if close:
            stream.close()


def load_labels(source, registry: NodeRegistry) -> LabelStore:
    """Load a multi-label file keyed by registered node identifiers.

    Repeated lines for one node union their label sets. Unknown node
    identifiers are rejected.
    """
    store = LabelStore()
    stream, close = _open_maybe(source)
    try:
        for line_no, line in _iter_data_lines(stream):
            parts = line.split("\t")
            if len(parts) == 1:
                parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParseError("expected `node<TAB>label1,label2,...`", line_no)
            name, labels = parts
            if name not in registry:
                raise ParseError(f"unknown node identifier {name!r}", line_no)
            names = [x.strip() for x in labels.split(",") if x.strip()]
            store.add(registry.index_of(name), names)
    finally:
        if close:
            stream.close()
    return store


def build_multiview(manifest) -> MultiViewGraph:
    """Assemble a multi-view graph from (view_name, edge-list source) pairs.

    All views are indexed against one shared registry (the union of node
    identifiers across views).
    """
    manifest = list(manifest)
    if not manifest:
        raise ValueError("empty view manifest")
    registry = NodeRegistry()
    parsed = []
    for name, source in manifest:
        parsed.append((name, parse_edges(source, registry)))
    n = len(registry)
    names, views = [], []
    for name, (rows, cols, weights) in parsed:
        names.append(name)
        views.append(SparseAdjacency.from_undirected(rows, cols, weights, n))
    return MultiViewGraph(registry=registry, view_names=names, views=views)


def read_manifest(path):
    """Read a `view_name<TAB>path` manifest; paths resolved against its dir."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in _iter_data_lines(fh):
            parts = line.split("\t")
            if len(parts) == 1:
                parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected `view_name<TAB>path`", line_no)
            name, p = parts
            if not os.path.isabs(p):
                p = os.path.join(base, p)
            entries.append((name, p))
    return entries


def view_stats(graph: MultiViewGraph):
    """Per-view node/edge counts and a degree-distribution summary."""
    out = []
    for name, adj in zip(graph.view_names, graph.views):
        deg = adj.degrees()
        active = deg[deg > 0]
        summary = {
            "min": int(active.min()) if active.size else 0,
            "max": int(active.max()) if active.size else 0,
            "mean": float(active.mean()) if active.size else 0.0,
            "median": float(np.median(active)) if active.size else 0.0,
        }
        out.append({
            "view": name,
            "nodes": int(active.size),
            "edges": adj.edge_count(),
            "total_weight": adj.total_weight,
            "degree": summary,
        })
    return out
