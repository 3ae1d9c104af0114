"""Graph families and the max-degree doubly stochastic contact matrix.

Node labels 0..n-1 exist only for simulator bookkeeping. Protocol code never
reads them; it sees opaque per-node state plus a neighbor-sampling capability,
so the anonymity constraint is enforced by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    EdgeListParseError,
    GraphGenerationError,
    InvalidParameterError,
    SelfLoopError,
)
from .seeding import UniformStream

# Rejecting c**d above this keeps adjacency structures within sane memory.
MAX_GRID_NODES = 1 << 26

DEFAULT_PAIRING_RETRIES = 1000


@dataclass(frozen=True)
class Graph:
    """Undirected connected graph: node count plus canonical edge tuple.

    Edges are stored sorted, each as (u, v) with u < v. Construction
    validates no self-loops, no duplicates, in-range endpoints, and
    connectivity.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError("graph needs at least one node")
        canonical = []
        for u, v in self.edges:
            if u == v:
                raise SelfLoopError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidParameterError(f"edge ({u}, {v}) out of range for n={self.n}")
            canonical.append((u, v) if u < v else (v, u))
        canonical.sort()
        for a, b in zip(canonical, canonical[1:]):
            if a == b:
                raise DuplicateEdgeError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(canonical))
        if not _connected(self.n, self.edges):
            raise DisconnectedGraphError("graph is not connected")

    def adjacency(self) -> list[list[int]]:
        """Sorted neighbor lists, one per node."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def max_degree(self) -> int:
        return max(self.degrees()) if self.edges else 0


def _connected(n: int, edges: tuple[tuple[int, int], ...]) -> bool:
    if n == 1:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                count += 1
                stack.append(y)
    return count == n


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Doubly stochastic contact-probability matrix aligned with a graph."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)

    def validate(self, graph: Graph | None = None, tol: float = 1e-12) -> None:
        """Raise if the doubly stochastic / edge-support invariants fail."""
        p = self.entries
        if p.shape != (self.n, self.n):
            raise InvalidParameterError(f"matrix shape {p.shape} does not match n={self.n}")
        if np.any(p < -tol) or np.any(p > 1.0 + tol):
            raise InvalidParameterError("entries must lie in [0, 1]")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > tol:
            raise InvalidParameterError("row sums must equal 1")
        if np.max(np.abs(p.sum(axis=0) - 1.0)) > tol:
            raise InvalidParameterError("column sums must equal 1")
        if graph is not None:
            allowed = np.eye(self.n, dtype=bool)
            for u, v in graph.edges:
                allowed[u, v] = allowed[v, u] = True
            if np.any(p[~allowed] != 0.0):
                raise InvalidParameterError("nonzero entry off the edge set")


def build_complete(n: int) -> Graph:
    """Complete graph on n >= 2 nodes."""
    if n < 2:
        raise InvalidParameterError("complete graph needs n >= 2")
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def build_ring(n: int) -> Graph:
    """Cycle on n >= 3 nodes."""
    if n < 3:
        raise InvalidParameterError("ring needs n >= 3")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def build_path(n: int) -> Graph:
    """Simple path on n >= 2 nodes."""
    if n < 2:
        raise InvalidParameterError("path needs n >= 2")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def build_grid(d: int, c: int) -> Graph:
    """d-dimensional grid with side c: one node per vector in {1..c}^d.

    Nodes are adjacent iff they differ by exactly 1 in exactly one
    coordinate, so the maximum degree is 2d.
    """
    if d < 1:
        raise InvalidParameterError("grid needs d >= 1")
    if c < 2:
        raise InvalidParameterError("grid needs c >= 2")
    n = c**d
    if n > MAX_GRID_NODES:
        raise InvalidParameterError(f"grid size c^d = {n} exceeds the {MAX_GRID_NODES}-node cap")
    # Row-major index: coordinate k contributes a_k * c**k.
    strides = [c**k for k in range(d)]
    edges = []
    for idx in range(n):
        rem = idx
        for k in range(d):
            coord = rem % c
            rem //= c
            if coord + 1 < c:
                edges.append((idx, idx + strides[k]))
    return Graph(n, tuple(edges))


def build_random_regular(n: int, deg: int, seed: int, max_retries: int = DEFAULT_PAIRING_RETRIES) -> Graph:
    """Connected deg-regular simple graph via the pairing model.

    Samples a perfect matching on n*deg half-edge stubs and resamples
    whenever the result has a self-loop, a multi-edge, or is disconnected.
    """
    if deg < 3:
        raise InvalidParameterError("regular graph generator needs deg >= 3")
    if deg >= n:
        raise InvalidParameterError("regular graph needs deg < n")
    if (n * deg) % 2 != 0:
        raise InvalidParameterError("n * deg must be even")
    stream = UniformStream(seed)
    stubs = [node for node in range(n) for _ in range(deg)]
    for _ in range(max_retries):
        order = stream.permutation(len(stubs))
        shuffled = [stubs[i] for i in order]
        edges = set()
        ok = True
        for a, b in zip(shuffled[::2], shuffled[1::2]):
            if a == b:
                ok = False
                break
            e = (a, b) if a < b else (b, a)
            if e in edges:
                ok = False
                break
            edges.add(e)
        if not ok:
            continue
        canonical = tuple(sorted(edges))
        if _connected(n, canonical):
            return Graph(n, canonical)
    raise GraphGenerationError(
        f"no connected {deg}-regular pairing found in {max_retries} attempts (n={n}, seed={seed})"
    )


def load_edge_list(text: str) -> Graph:
    """Parse edge-list text: header line "n <count>" then "u v" lines.

    Blank lines are ignored and '#' starts a comment, whole-line or
    trailing. Validation errors (self-loop, duplicate edge, disconnected)
    surface as their distinct exception types.
    """
    n: int | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise EdgeListParseError(f"line {lineno}: expected header 'n <count>', got {line!r}")
            try:
                n = int(parts[1])
            except ValueError:
                raise EdgeListParseError(f"line {lineno}: node count {parts[1]!r} is not an integer") from None
            continue
        if len(parts) != 2:
            raise EdgeListParseError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"line {lineno}: non-integer endpoint in {line!r}") from None
        edges.append((u, v))
    if n is None:
        raise EdgeListParseError("missing 'n <count>' header line")
    return Graph(n, tuple(edges))


def edge_list_text(graph: Graph) -> str:
    """Serialize a graph in the edge-list format accepted by load_edge_list."""
    lines = [f"n {graph.n}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


def max_degree_matrix(graph: Graph) -> TransitionMatrix:
    """Contact matrix with 1/max_degree per neighbor and the rest on the diagonal.

    Every off-diagonal entry on an edge is 1/max_degree and row i keeps
    1 - degree(i)/max_degree on the diagonal, which makes the matrix
    symmetric and doubly stochastic.
    """
    n = graph.n
    p = np.zeros((n, n))
    delta = graph.max_degree()
    if delta == 0:
        # Single isolated node: the only stochastic choice is staying put.
        np.fill_diagonal(p, 1.0)
        return TransitionMatrix(n, p)
    w = 1.0 / delta
    for u, v in graph.edges:
        p[u, v] = w
        p[v, u] = w
    for i, d in enumerate(graph.degrees()):
        p[i, i] = 1.0 - d * w
    return TransitionMatrix(n, p)
