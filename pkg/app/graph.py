# app/graph.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from app.errors import DomainError
from app.schemas import IngestReport

logger = logging.getLogger(__name__)


class Graph:
    """
    Immutable undirected simple graph over dense vertex indices 0..n-1.

    Adjacency is stored CSR-style: the neighbours of u are
    indices[indptr[u]:indptr[u+1]], sorted ascending. External string ids,
    when the graph was ingested from a file, live in `labels`.
    """

    __slots__ = ("n", "indptr", "indices", "degrees", "labels", "_csr")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, labels: Optional[Sequence[str]] = None):
        if n < 0:
            raise DomainError("vertex count must be non-negative")
        indptr = np.array(indptr, dtype=np.int64)
        indices = np.array(indices, dtype=np.int64)
        if indptr.shape != (n + 1,) or indptr[0] != 0 or indptr[-1] != indices.size:
            raise DomainError("malformed adjacency offsets")
        if labels is not None and len(labels) != n:
            raise DomainError("labels must name every vertex")

        csr = sparse.csr_matrix((np.ones(indices.size, dtype=np.int8), indices, indptr), shape=(n, n))
        _check_simple_undirected(csr, indptr, indices)

        for arr in (indptr, indices):
            arr.setflags(write=False)
        degrees = np.diff(indptr)
        degrees.setflags(write=False)

        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.degrees = degrees
        self.labels = tuple(labels) if labels is not None else None
        self._csr = csr

    # ---------- construction ----------
    @classmethod
    def from_pairs(cls, n: int, u: np.ndarray, v: np.ndarray, labels: Optional[Sequence[str]] = None) -> "Graph":
        """Build from distinct undirected pairs (u[i], v[i]), u != v."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        coo = sparse.coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))
        csr = coo.tocsr()
        csr.sort_indices()
        return cls(n, csr.indptr, csr.indices, labels=labels)

    # ---------- queries ----------
    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    @property
    def adjacency(self) -> List[List[int]]:
        return [self.indices[self.indptr[u]:self.indptr[u + 1]].tolist() for u in range(self.n)]

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.degrees[u])

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)

    def edges(self) -> np.ndarray:
        """(|E|, 2) array of edges with u < v, in CSR order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def to_sparse(self) -> sparse.csr_matrix:
        return self._csr

    def __repr__(self) -> str:
        return f"<Graph n={self.n} edges={self.num_edges}>"


def _check_simple_undirected(csr: sparse.csr_matrix, indptr: np.ndarray, indices: np.ndarray) -> None:
    if indices.size and (indices.min() < 0 or indices.max() >= csr.shape[0]):
        raise DomainError("neighbor index out of range")
    if csr.diagonal().any():
        raise DomainError("self-loop in adjacency")
    # sorted and duplicate-free within each row: strictly increasing except at row starts
    if indices.size > 1:
        step = np.diff(indices)
        row_start = np.zeros(indices.size, dtype=bool)
        row_start[indptr[:-1][indptr[:-1] < indices.size]] = True
        if np.any((step <= 0) & ~row_start[1:]):
            raise DomainError("adjacency lists must be sorted without repeated neighbours")
    if (csr != csr.T).nnz:
        raise DomainError("adjacency is not symmetric")


# ---------- degree / components ----------
def mean_degree(g: Graph) -> float:
    if g.n < 1:
        raise DomainError("mean degree of an empty graph is undefined")
    return float(g.degrees.sum()) / g.n


@dataclass(frozen=True)
class ComponentLabeling:
    label: np.ndarray
    component_sizes: List[int]

    @property
    def count(self) -> int:
        return len(self.component_sizes)


def connected_components(g: Graph) -> ComponentLabeling:
    """
    Component ids ordered by size descending; equal sizes ordered by the
    smallest vertex index they contain.
    """
    if g.n == 0:
        return ComponentLabeling(label=np.zeros(0, dtype=np.int64), component_sizes=[])
    k, raw = csgraph.connected_components(g.to_sparse(), directed=False)
    sizes = np.bincount(raw, minlength=k)
    first = np.full(k, g.n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(g.n))
    order = np.lexsort((first, -sizes))
    remap = np.empty(k, dtype=np.int64)
    remap[order] = np.arange(k)
    label = remap[raw]
    label.setflags(write=False)
    return ComponentLabeling(label=label, component_sizes=sizes[order].tolist())


def is_connected(g: Graph) -> bool:
    return connected_components(g).count == 1


# ---------- ingestion ----------
def from_edge_list(edges: Iterable[Tuple[str, str]]) -> Tuple[Graph, IngestReport]:
    """
    Build a simple graph from (id, id) pairs with arbitrary string ids.

    Ids get dense indices in order of first appearance. Self-loops are dropped
    and repeated edges collapsed; both are counted in the report.
    """
    index: dict[str, int] = {}
    seen: set[Tuple[int, int]] = set()
    us: List[int] = []
    vs: List[int] = []
    self_loops = duplicates = 0

    for a, b in edges:
        ia = index.setdefault(str(a), len(index))
        ib = index.setdefault(str(b), len(index))
        if ia == ib:
            self_loops += 1
            continue
        key = (ia, ib) if ia < ib else (ib, ia)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        us.append(key[0])
        vs.append(key[1])

    g = Graph.from_pairs(len(index), np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), labels=list(index))
    report = IngestReport(vertices=g.n, edges=g.num_edges, duplicate_edges=duplicates, self_loops=self_loops)
    if duplicates or self_loops:
        logger.info("[ingest] dropped %d self-loops, collapsed %d duplicate edges", self_loops, duplicates)
    return g, report
