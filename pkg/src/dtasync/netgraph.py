"""Undirected networks carrying spatial and attention information.

Networks are immutable once built. The adjacency is always held as a CSR
matrix (the dynamics multiply it against batched state arrays); a dense copy
is available for small graphs.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Literal

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

__all__ = [
    "Network",
    "NetworkSpec",
    "NetworkError",
    "generate",
    "load_edge_list",
    "aspl",
]

MAX_RESAMPLE = 100
DENSE_LIMIT = 2048

Kind = Literal["complete", "watts-strogatz", "erdos-renyi", "barabasi-albert", "edge-list"]


class NetworkError(ValueError):
    """Raised for invalid network parameters, files, or topologies."""


@dataclass(frozen=True, eq=False)
class Network:
    """Symmetric 0/1 adjacency with zero diagonal and no isolated nodes."""

    adjacency: sp.csr_matrix
    complete: bool = False
    name: str = ""
    _validated: bool = field(default=False, repr=False)

    def __post_init__(self):
        adj = sp.csr_matrix(self.adjacency, dtype=np.float64)
        adj.sum_duplicates()
        adj.eliminate_zeros()
        object.__setattr__(self, "adjacency", adj)
        n = adj.shape[0]
        if adj.shape != (n, n) or n < 2:
            raise NetworkError(f"adjacency must be square with n >= 2, got {adj.shape}")
        if np.any(adj.data != 1.0):
            raise NetworkError("adjacency entries must be 0 or 1")
        if adj.diagonal().any():
            raise NetworkError("adjacency has self-loops")
        if (adj != adj.T).nnz:
            raise NetworkError("adjacency is not symmetric")
        if np.any(self.degrees == 0):
            isolated = np.flatnonzero(self.degrees == 0)
            raise NetworkError(f"isolated node(s): {isolated[:10].tolist()}")

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel().astype(np.int64)

    @property
    def n_edges(self) -> int:
        return self.adjacency.nnz // 2

    @cached_property
    def dense(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise NetworkError(f"dense adjacency not kept for n > {DENSE_LIMIT}")
        return self.adjacency.toarray()

    @cached_property
    def neighbors(self) -> list[np.ndarray]:
        a = self.adjacency
        return [a.indices[a.indptr[i]:a.indptr[i + 1]] for i in range(self.n)]

    def edges(self) -> np.ndarray:
        """Edges (i, j) with i < j, sorted."""
        upper = sp.triu(self.adjacency, k=1).tocoo()
        e = np.column_stack([upper.row, upper.col]).astype(np.int64)
        return e[np.lexsort((e[:, 1], e[:, 0]))]

    def is_connected(self) -> bool:
        ncomp, _ = connected_components(self.adjacency, directed=False)
        return ncomp == 1

    def content_hash(self) -> str:
        """SHA-1 of the sorted edge list, stable across runs and platforms."""
        h = hashlib.sha1()
        h.update(np.int64(self.n).tobytes())
        h.update(self.edges().tobytes())
        return h.hexdigest()

    @classmethod
    def from_edges(cls, n: int, edges, **kwargs) -> "Network":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise NetworkError(f"edge endpoint out of range [0, {n})")
        if np.any(e[:, 0] == e[:, 1]):
            raise NetworkError("self-loop in edge list")
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        adj = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()
        adj.data[:] = 1.0  # duplicates collapse to one undirected edge
        return cls(adj, **kwargs)

    @classmethod
    def from_networkx(cls, g: nx.Graph, **kwargs) -> "Network":
        g = nx.convert_node_labels_to_integers(g, ordering="sorted")
        return cls.from_edges(g.number_of_nodes(), g.edges(), **kwargs)


@dataclass(frozen=True)
class NetworkSpec:
    """What to build. Parameters not used by ``kind`` are ignored."""

    kind: Kind
    n: int = 200
    seed: int = 0
    k: int = 4
    p: float = 0.1
    m: int = 2
    path: str | None = None
    indexing: int = 1

    def validate(self) -> None:
        if self.kind == "edge-list":
            if not self.path:
                raise NetworkError("edge-list spec needs a path")
            return
        if self.n < 2:
            raise NetworkError(f"n must be >= 2, got {self.n}")
        if self.kind == "watts-strogatz":
            if self.k % 2 or not 2 <= self.k < self.n:
                raise NetworkError(f"watts-strogatz needs even k with 2 <= k < n, got k={self.k}")
            if not 0.0 <= self.p <= 1.0:
                raise NetworkError(f"rewiring probability must lie in [0, 1], got {self.p}")
        elif self.kind == "erdos-renyi":
            if not 0.0 <= self.p <= 1.0:
                raise NetworkError(f"connection probability must lie in [0, 1], got {self.p}")
        elif self.kind == "barabasi-albert":
            if not 1 <= self.m < self.n:
                raise NetworkError(f"barabasi-albert needs 1 <= m < n, got m={self.m}")
        elif self.kind != "complete":
            raise NetworkError(f"unknown network kind {self.kind!r}")


def _sample(spec: NetworkSpec, seed: int) -> nx.Graph:
    if spec.kind == "watts-strogatz":
        return nx.watts_strogatz_graph(spec.n, spec.k, spec.p, seed=seed)
    if spec.kind == "erdos-renyi":
        return nx.gnp_random_graph(spec.n, spec.p, seed=seed)
    if spec.kind == "barabasi-albert":
        return nx.barabasi_albert_graph(spec.n, spec.m, seed=seed)
    raise AssertionError(spec.kind)


def generate(spec: NetworkSpec) -> Network:
    """Build the network described by ``spec``.

    Random kinds are resampled with sub-seeds ``seed, seed+1, ...`` until the
    sample is connected; after ``MAX_RESAMPLE`` failures a NetworkError is
    raised.
    """
    spec.validate()
    if spec.kind == "edge-list":
        return load_edge_list(spec.path, indexing=spec.indexing)
    if spec.kind == "complete":
        adj = sp.csr_matrix(np.ones((spec.n, spec.n)) - np.eye(spec.n))
        return Network(adj, complete=True, name=f"complete(n={spec.n})")
    for attempt in range(MAX_RESAMPLE):
        g = _sample(spec, spec.seed + attempt)
        if nx.is_connected(g):
            return Network.from_networkx(g, name=f"{spec.kind}(n={spec.n}, seed={spec.seed + attempt})")
    raise NetworkError(f"no connected sample for {spec} within {MAX_RESAMPLE} tries")


def load_edge_list(path: str | Path, indexing: int = 1) -> Network:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` and blank lines are skipped. The node
    count is one more than the largest (re-based) index; every node in that
    range must end up with at least one edge.
    """
    if indexing not in (0, 1):
        raise NetworkError(f"indexing must be 0 or 1, got {indexing}")
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s[0] in "#%":
                continue
            tokens = s.split()
            if len(tokens) < 2:
                raise NetworkError(f"{path}:{lineno}: expected two integers, got {s!r}")
            try:
                i, j = int(tokens[0]) - indexing, int(tokens[1]) - indexing
            except ValueError:
                raise NetworkError(f"{path}:{lineno}: expected two integers, got {s!r}") from None
            if i < 0 or j < 0:
                raise NetworkError(f"{path}:{lineno}: negative index after {indexing}-based shift")
            if i == j:
                raise NetworkError(f"{path}:{lineno}: self-loop on node {tokens[0]}")
            edges.append((i, j))
    if not edges:
        raise NetworkError(f"{path}: no edges")
    n = max(max(e) for e in edges) + 1
    return Network.from_edges(n, edges, name=Path(path).name)


def aspl(net: Network) -> float:
    """Average shortest-path hop count over all unordered node pairs (exact)."""
    if net.complete:
        return 1.0
    if not net.is_connected():
        raise NetworkError("aspl is undefined for a disconnected network")
    dist = shortest_path(net.adjacency, method="D", directed=False, unweighted=True)
    n = net.n
    return float(dist.sum() / (n * (n - 1)))
