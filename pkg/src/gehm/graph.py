"""Weighted undirected graphs: construction, random models, normalization, I/O.

A :class:`WeightedGraph` stores every undirected edge as two directed
entries ``(i, j)`` and ``(j, i)``, sorted by source then target.  Weights are
per directed entry so that row normalization (which breaks value symmetry)
can be represented; the *structure* is always symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import GraphParseError, GraphValidationError, ParameterError
from .rng import substream

HEADER_PREFIX = "gehm-graph v1"
MODELS = ("barabasi_albert", "erdos_renyi", "watts_strogatz")
SCHEMES = ("row", "symmetric", "none")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


class WeightedGraph:
    """Immutable weighted graph on nodes ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of nodes.
    src, dst : array_like of int
        Directed edge endpoints.  Both orientations of each undirected edge
        must be present.
    weight : array_like of float, optional
        Per directed edge weight; defaults to 1.
    """

    __slots__ = ("n", "src", "dst", "weight", "_degree", "_reverse")

    def __init__(self, n, src, dst, weight=None):
        n = int(n)
        if n < 0:
            raise GraphValidationError("node count must be non-negative")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise GraphValidationError("src and dst differ in length")
        if weight is None:
            weight = np.ones(src.shape[0])
        weight = np.asarray(weight, dtype=np.float64).ravel()
        if weight.shape != src.shape:
            raise GraphValidationError("weight length differs from edge count")

        if src.size:
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise GraphValidationError(f"edge endpoint outside [0, {n})")
            if np.any(src == dst):
                raise GraphValidationError("self-loops are not allowed")
        if not np.all(np.isfinite(weight)) or np.any(weight < 0):
            raise GraphValidationError("weights must be finite and non-negative")

        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        if src.size > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(dup):
                k = int(np.flatnonzero(dup)[0])
                raise GraphValidationError(f"duplicate edge ({src[k]}, {dst[k]})")

        # position of (j, i) for every (i, j)
        keys = src * n + dst
        rkeys = dst * n + src
        pos = np.searchsorted(keys, rkeys)
        pos_ok = pos < keys.size
        if not (np.all(pos_ok) and np.all(keys[np.minimum(pos, keys.size - 1)] == rkeys)):
            raise GraphValidationError("edge set is not symmetric")

        self.n = n
        self.src = _frozen(src, np.int64)
        self.dst = _frozen(dst, np.int64)
        self.weight = _frozen(weight, np.float64)
        self._reverse = _frozen(pos, np.int64)
        self._degree = _frozen(np.bincount(src, minlength=n), np.int64)

    @classmethod
    def from_edges(cls, n, edges, weights=None):
        """Build from undirected pairs ``(i, j)``; each pair gets both orientations."""
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        i, j = edges[:, 0], edges[:, 1]
        w = None
        if weights is not None:
            w = np.asarray(weights, dtype=np.float64)
            w = np.concatenate([w, w])
        return cls(n, np.concatenate([i, j]), np.concatenate([j, i]), w)

    @property
    def num_directed_edges(self):
        return int(self.src.size)

    @property
    def num_edges(self):
        """Number of undirected edges."""
        return int(self.src.size // 2)

    @property
    def degree_cache(self):
        return self._degree

    @property
    def reverse_index(self):
        """Index of ``(j, i)`` for each directed edge ``(i, j)``."""
        return self._reverse

    @property
    def edges(self):
        return [(int(i), int(j), float(w)) for i, j, w in zip(self.src, self.dst, self.weight)]

    def undirected_pairs(self):
        """Indices of directed entries with ``i < j`` (one per undirected edge)."""
        return np.flatnonzero(self.src < self.dst)

    def with_weights(self, weight):
        return WeightedGraph(self.n, self.src, self.dst, weight)

    def is_value_symmetric(self, atol=0.0):
        return bool(np.all(np.abs(self.weight - self.weight[self._reverse]) <= atol))

    def weight_matrix(self, fmt="csr"):
        """Sparse ``n x n`` matrix with ``W[i, j] = w_ij``."""
        m = sp.coo_matrix((self.weight, (self.src, self.dst)), shape=(self.n, self.n))
        return m.asformat(fmt)

    def adjacency_matrix(self, fmt="csr"):
        """Sparse 0/1 structural adjacency, ignoring weights."""
        ones = np.ones(self.src.size)
        m = sp.coo_matrix((ones, (self.src, self.dst)), shape=(self.n, self.n))
        return m.asformat(fmt)

    def laplacian_dense(self):
        """Dense ``D - W`` with ``D`` the diagonal of row sums of ``W``."""
        W = self.weight_matrix().toarray()
        return np.diag(W.sum(axis=1)) - W

    def is_connected(self):
        if self.n == 0:
            return True
        ncomp, _ = connected_components(self.adjacency_matrix(), directed=False)
        return ncomp == 1

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    def __hash__(self):
        return hash((self.n, self.src.tobytes(), self.dst.tobytes(), self.weight.tobytes()))

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class GraphModelSpec:
    """Random graph model and its parameters.

    Only the parameters of the chosen ``model`` are used: ``m`` for
    Barabasi-Albert, ``prob`` for Erdos-Renyi, ``k`` and ``beta`` for
    Watts-Strogatz.
    """

    model: str = "barabasi_albert"
    n: int = 2000
    seed: int = 123456
    m: int | None = 3
    prob: float | None = None
    k: int | None = None
    beta: float | None = None

    def problems(self):
        out = []
        if self.model not in MODELS:
            return [f"graph.model must be one of {MODELS}, got {self.model!r}"]
        if not isinstance(self.n, (int, np.integer)) or self.n <= 0:
            out.append(f"graph.n must be a positive integer, got {self.n!r}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            out.append(f"graph.seed must be a non-negative integer, got {self.seed!r}")
        n = self.n if isinstance(self.n, (int, np.integer)) else 0
        if self.model == "barabasi_albert":
            if self.m is None or int(self.m) != self.m or not 1 <= self.m < n:
                out.append(f"graph.m must satisfy 1 <= m < n, got m={self.m!r}")
        elif self.model == "erdos_renyi":
            if self.prob is None or not 0.0 <= self.prob <= 1.0:
                out.append(f"graph.prob must lie in [0, 1], got {self.prob!r}")
        else:
            if self.k is None or int(self.k) != self.k or self.k < 0 or self.k % 2 or self.k >= n:
                out.append(f"graph.k must be even with 0 <= k < n, got k={self.k!r}")
            if self.beta is None or not 0.0 <= self.beta <= 1.0:
                out.append(f"graph.beta must lie in [0, 1], got {self.beta!r}")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise ParameterError("; ".join(probs))
        return self

    def label(self):
        if self.model == "barabasi_albert":
            return f"BA(n={self.n}, m={self.m})"
        if self.model == "erdos_renyi":
            return f"ER(n={self.n}, p={self.prob:.6g})"
        return f"WS(n={self.n}, k={self.k}, beta={self.beta:.6g})"


def _barabasi_albert(n, m, rng):
    # seed core: complete graph on m nodes
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    repeated = [v for e in pairs for v in e]
    for v in range(m, n):
        targets = set()
        while len(targets) < m:
            if repeated:
                t = repeated[int(rng.integers(len(repeated)))]
            else:
                t = int(rng.integers(v))
            targets.add(t)
        for t in sorted(targets):
            pairs.append((t, v))
            repeated.extend((t, v))
    return pairs


def _erdos_renyi(n, prob, rng):
    if n < 2 or prob == 0.0:
        return np.empty((0, 2), dtype=np.int64)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < prob
    return np.column_stack([iu[keep], ju[keep]])


def _watts_strogatz(n, k, beta, rng):
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(1, k // 2 + 1):
            t = (i + j) % n
            adj[i].add(t)
            adj[t].add(i)
    if beta > 0:
        for j in range(1, k // 2 + 1):
            for i in range(n):
                t = (i + j) % n
                if t not in adj[i] or rng.random() >= beta:
                    continue
                if len(adj[i]) >= n - 1:
                    continue
                w = int(rng.integers(n))
                while w == i or w in adj[i]:
                    w = int(rng.integers(n))
                adj[i].discard(t)
                adj[t].discard(i)
                adj[i].add(w)
                adj[w].add(i)
    return [(i, j) for i in range(n) for j in sorted(adj[i]) if i < j]


def generate_graph(spec: GraphModelSpec) -> WeightedGraph:
    """Draw a unit-weight graph from ``spec``; a pure function of the spec."""
    spec.validate()
    rng = substream(spec.seed, "graph-gen")
    if spec.model == "barabasi_albert":
        pairs = _barabasi_albert(spec.n, int(spec.m), rng)
    elif spec.model == "erdos_renyi":
        pairs = _erdos_renyi(spec.n, float(spec.prob), rng)
    else:
        pairs = _watts_strogatz(spec.n, int(spec.k), float(spec.beta), rng)
    return WeightedGraph.from_edges(spec.n, pairs)


def matched_specs(n, m, ws_beta=0.1, seed=123456):
    """BA/ER/WS specs sharing the expected mean degree of BA(n, m)."""
    ba_edges = m * (m - 1) // 2 + m * (n - m)
    mean_degree = 2.0 * ba_edges / n
    return [
        GraphModelSpec("barabasi_albert", n=n, seed=seed, m=m),
        GraphModelSpec("erdos_renyi", n=n, seed=seed, m=None, prob=mean_degree / (n - 1)),
        GraphModelSpec("watts_strogatz", n=n, seed=seed, m=None, k=2 * m, beta=ws_beta),
    ]


def degree_vector(graph: WeightedGraph) -> np.ndarray:
    """Number of structural neighbours of each node."""
    return graph.degree_cache.copy()


def normalize_weights(graph: WeightedGraph, scheme: str = "row") -> WeightedGraph:
    """Rescale edge weights.

    ``row`` divides each weight by the row sum of its source node, so every
    non-isolated row sums to one.  ``symmetric`` divides by
    ``sqrt(d_i d_j)`` with ``d`` the weighted degree.  On unit-weight graphs
    both reduce to the adjacency-based formulas.  Zero rows stay zero.
    """
    if scheme == "none":
        return graph
    if scheme not in SCHEMES:
        raise ParameterError(f"unknown normalization scheme {scheme!r}")
    rowsum = np.bincount(graph.src, weights=graph.weight, minlength=graph.n)
    w = graph.weight
    if scheme == "row":
        denom = rowsum[graph.src]
    else:
        denom = np.sqrt(rowsum[graph.src] * rowsum[graph.dst])
    out = np.zeros_like(w)
    nz = denom > 0
    out[nz] = w[nz] / denom[nz]
    return graph.with_weights(out)


def write_graph(graph: WeightedGraph, path) -> None:
    lines = [f"{HEADER_PREFIX} n={graph.n}"]
    lines += [f"{i} {j} {w:.17g}" for i, j, w in zip(graph.src, graph.dst, graph.weight)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_graph(path) -> WeightedGraph:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    header = lines[0].strip() if lines else ""
    if not header.startswith(HEADER_PREFIX + " n="):
        raise GraphParseError(f"expected header '{HEADER_PREFIX} n=<n>'", line=1)
    try:
        n = int(header[len(HEADER_PREFIX) + 3 :])
    except ValueError:
        raise GraphParseError("node count in header is not an integer", line=1) from None
    src, dst, w = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphParseError(f"expected 'i j w', got {line!r}", line=lineno)
        try:
            i, j, wij = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphParseError(f"cannot parse {line!r}", line=lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise GraphValidationError(f"line {lineno}: node id outside [0, {n})")
        if not math.isfinite(wij):
            raise GraphValidationError(f"line {lineno}: non-finite weight")
        src.append(i)
        dst.append(j)
        w.append(wij)
    return WeightedGraph(n, src, dst, w)


def graph_io(graph, path, direction):
    """Read or write the plain-text edge-list format."""
    if direction == "write":
        write_graph(graph, path)
        return None
    if direction == "read":
        return read_graph(path)
    raise ParameterError(f"direction must be 'read' or 'write', got {direction!r}")
