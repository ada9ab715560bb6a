"""Graph representation and shortest-path combinatorics.

Vertices are dense integers ``0..n-1``.  Undirected graphs are stored
symmetrically: the directed edge (u, v) is present iff (v, u) is, with
conjugate weight, so the adjacency matrix of an undirected graph is
Hermitian by construction.  All distances are hop counts.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, InputError, PathOverflowError

#: Default cap on the number of explicitly enumerated shortest paths.
DEFAULT_PATH_LIMIT = 10**6


@dataclass(frozen=True)
class Graph:
    """A simple graph with optionally complex-weighted edges.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of (tail, head) or (tail, head, weight)
        For undirected graphs each edge is given once in either
        orientation; the reverse direction is stored automatically with
        the conjugate weight.
    directed : bool
        Whether the edges are directed.
    """

    n: int
    edges: tuple = ()
    directed: bool = False
    _adj: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("graph needs at least one vertex")
        adj: dict[int, dict[int, complex]] = {u: {} for u in range(self.n)}
        canonical = []
        for e in self.edges:
            if len(e) == 2:
                u, v = e
                w = 1.0 + 0.0j
            else:
                u, v, w = e
                w = complex(w)
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u},{v}) has a vertex id outside 0..{self.n - 1}")
            if u == v:
                raise DomainError(f"self-loop at vertex {u} is not allowed")
            if v in adj[u] or (not self.directed and u in adj[v]):
                raise DomainError(f"duplicate edge ({u},{v})")
            adj[u][v] = w
            if not self.directed:
                adj[v][u] = w.conjugate()
                if u > v:
                    u, v, w = v, u, w.conjugate()
            canonical.append((u, v, w))
        object.__setattr__(self, "edges", tuple(canonical))
        object.__setattr__(self, "_adj", adj)

    # -- queries ---------------------------------------------------------

    def check_vertex(self, v: int) -> int:
        if not (0 <= v < self.n):
            raise DomainError(f"vertex id {v} outside 0..{self.n - 1}")
        return int(v)

    def out_neighbors(self, u: int) -> tuple[int, ...]:
        """Heads of edges leaving ``u``, ascending."""
        return tuple(sorted(self._adj[self.check_vertex(u)]))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[self.check_vertex(u)]

    def weight(self, u: int, v: int) -> complex:
        try:
            return self._adj[self.check_vertex(u)][self.check_vertex(v)]
        except KeyError:
            raise DomainError(f"({u},{v}) is not an edge") from None

    def degree(self, u: int) -> int:
        return len(self._adj[self.check_vertex(u)])

    @property
    def undirected_edges(self) -> tuple[tuple[int, int], ...]:
        """Canonical (min, max) vertex pairs, one per undirected edge."""
        if self.directed:
            raise DomainError("graph is directed")
        return tuple((u, v) for u, v, _ in self.edges)

    def is_unit_weighted(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)


@dataclass(frozen=True)
class PathSet:
    """All shortest directed paths between one vertex pair.

    ``distance`` is ``None`` when the target is unreachable; then
    ``paths`` is empty.  Every path is a vertex tuple of length
    ``distance + 1`` starting at ``source`` and ending at ``target``, and
    the tuple of paths is sorted lexicographically.
    """

    source: int
    target: int
    distance: Optional[int]
    paths: tuple[tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.paths)

    @property
    def reachable(self) -> bool:
        return self.distance is not None


class StandardMatrices(NamedTuple):
    adjacency: np.ndarray
    degree: np.ndarray
    laplacian: np.ndarray
    max_degree: int


def distances_and_counts(g: Graph, source: int) -> tuple[list, list]:
    """BFS distances and exact shortest-path counts from ``source``.

    Returns ``(dist, count)`` where ``dist[v]`` is the directed hop
    distance (``None`` if unreachable) and ``count[v]`` the number of
    distinct shortest directed paths, accumulated layer by layer over the
    BFS shortest-path DAG.  Counts are exact Python integers.
    """
    source = g.check_vertex(source)
    dist: list[Optional[int]] = [None] * g.n
    count = [0] * g.n
    dist[source] = 0
    count[source] = 1
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.out_neighbors(u):
            if dist[v] is None:
                dist[v] = dist[u] + 1
                queue.append(v)
            if dist[v] == dist[u] + 1:
                count[v] += count[u]
    return dist, count


def enumerate_shortest_paths(
    g: Graph, source: int, target: int, limit: int = DEFAULT_PATH_LIMIT
) -> PathSet:
    """Every shortest directed path from ``source`` to ``target``.

    Paths are produced in lexicographic order by walking the BFS DAG
    forward.  If the exact path count exceeds ``limit`` the enumeration
    is refused with :class:`PathOverflowError` (the count itself is still
    cheap through :func:`distances_and_counts`).
    """
    source, target = g.check_vertex(source), g.check_vertex(target)
    dist, count = distances_and_counts(g, source)
    if dist[target] is None:
        return PathSet(source, target, None, ())
    if count[target] > limit:
        raise PathOverflowError(count[target], limit)
    d_target = dist[target]
    # distance-to-target over reversed edges restricts the DAG to vertices
    # that actually lie on a shortest source->target path
    rev_dist = _reverse_distances(g, target)
    paths: list[tuple[int, ...]] = []
    stack = [(source,)]
    while stack:
        path = stack.pop()
        u = path[-1]
        if u == target:
            paths.append(path)
            continue
        du = dist[u]
        # descending here so the stack pops ascending -> lexicographic output
        for v in sorted(g.out_neighbors(u), reverse=True):
            if (
                dist[v] == du + 1
                and rev_dist[v] is not None
                and dist[v] + rev_dist[v] == d_target
            ):
                stack.append(path + (v,))
    return PathSet(source, target, d_target, tuple(paths))


def _reverse_distances(g: Graph, target: int) -> list:
    """Hop distances to ``target`` along reversed edges."""
    preds: list[list[int]] = [[] for _ in range(g.n)]
    for u in range(g.n):
        for v in g.out_neighbors(u):
            preds[v].append(u)
    dist: list[Optional[int]] = [None] * g.n
    dist[target] = 0
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for u in preds[v]:
            if dist[u] is None:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def adjacency_matrix(g: Graph) -> np.ndarray:
    """Complex adjacency matrix; Hermitian for undirected graphs."""
    a = np.zeros((g.n, g.n), dtype=complex)
    for u in range(g.n):
        for v in g.out_neighbors(u):
            a[v, u] = g.weight(u, v)
    return a


def standard_matrices(g: Graph) -> StandardMatrices:
    """Adjacency, degree and Laplacian ``L = D - A`` of an undirected
    unit-weighted graph, plus its maximum degree.

    The Laplacian (hence this function) is only defined for undirected
    graphs with unit weights; use :func:`adjacency_matrix` for anything
    else.
    """
    if g.directed:
        raise DomainError("Laplacian is defined for undirected graphs only")
    if not g.is_unit_weighted():
        raise DomainError("Laplacian is defined for unit edge weights only")
    a = adjacency_matrix(g).real
    d = np.diag(a.sum(axis=0))
    degrees = [g.degree(u) for u in range(g.n)]
    return StandardMatrices(a, d, d - a, max(degrees) if degrees else 0)


def from_adjacency_support(matrix: np.ndarray, directed: bool = True) -> Graph:
    """Graph whose directed edge (n, m) marks a nonzero entry ``matrix[m, n]``.

    The column index is the tail: entry (m, n) couples vertex n into
    vertex m.  Diagonal entries are ignored.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("support requires a square matrix")
    n = m.shape[0]
    edges = [
        (tail, head, m[head, tail])
        for tail in range(n)
        for head in range(n)
        if head != tail and m[head, tail] != 0
    ]
    if not directed:
        edges = [(u, v, w) for u, v, w in edges if u < v]
    return Graph(n, tuple(edges), directed=directed)


# -- stock graphs --------------------------------------------------------


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise DomainError("a cycle needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def binary_tree(depth: int) -> Graph:
    """Complete binary tree; vertex i has children 2i+1 and 2i+2."""
    n = 2 ** (depth + 1) - 1
    return Graph(n, tuple((i, c) for i in range(n) for c in (2 * i + 1, 2 * i + 2) if c < n))


def diamond_with_chord() -> Graph:
    """Two length-2 routes 0-2-1 and 0-3-1 plus the chord 2-3.

    The smallest graph on which hopping phases can cancel the two
    shortest-path amplitudes between 0 and 1 while leaving the next
    order alive.
    """
    return Graph(4, ((0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform random attachment tree on n vertices."""
    edges = tuple((int(rng.integers(0, i)), i) for i in range(1, n))
    return Graph(n, edges)


def random_connected_graph(
    n: int, rng: np.random.Generator, extra_edge_prob: float = 0.3
) -> Graph:
    """Random spanning tree plus Bernoulli extra edges."""
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_edge_prob:
                edges.add((u, v))
    return Graph(n, tuple(sorted(edges)))


# -- file formats --------------------------------------------------------


def parse_graph_json(obj: dict) -> tuple[Graph, Optional[dict]]:
    """Graph from the JSON object format.

    ``{"directed": bool, "n": int, "edges": [{"u", "v", "w": [re, im]?,
    "theta": float?}]}``.  Returns the graph and, when any edge carries a
    ``theta``, the map from canonical undirected edge to hopping phase.
    """
    try:
        n = int(obj["n"])
        directed = bool(obj.get("directed", False))
        raw_edges = obj["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("graph", f"missing or malformed field: {exc}") from exc
    edges = []
    thetas = {}
    for i, e in enumerate(raw_edges):
        try:
            u, v = int(e["u"]), int(e["v"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"edges[{i}]", f"needs integer u and v: {exc}") from exc
        w = 1.0 + 0.0j
        if "w" in e:
            try:
                re, im = e["w"]
                w = complex(float(re), float(im))
            except (TypeError, ValueError) as exc:
                raise InputError(f"edges[{i}].w", "expected [re, im]") from exc
        if "theta" in e:
            try:
                thetas[(min(u, v), max(u, v))] = float(e["theta"])
            except (TypeError, ValueError) as exc:
                raise InputError(f"edges[{i}].theta", "expected a real angle") from exc
        edges.append((u, v, w))
    try:
        g = Graph(n, tuple(edges), directed=directed)
    except DomainError as exc:
        raise InputError("edges", str(exc)) from exc
    return g, (thetas or None)


def parse_edge_list(text: str) -> Graph:
    """Undirected unit-weight graph from "u v" lines; # starts a comment."""
    edges = []
    nmax = -1
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno}", f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InputError(f"line {lineno}", "vertex ids must be integers") from exc
        edges.append((u, v))
        nmax = max(nmax, u, v)
    if nmax < 0:
        raise InputError("edge list", "no edges found")
    try:
        return Graph(nmax + 1, tuple(edges))
    except DomainError as exc:
        raise InputError("edge list", str(exc)) from exc


def load_graph(path) -> tuple[Graph, Optional[dict]]:
    """Load a graph file; JSON when the suffix is .json, edge list otherwise."""
    text = open(path, "r", encoding="utf-8").read()
    if str(path).endswith(".json"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("graph file", f"invalid JSON: {exc}") from exc
        return parse_graph_json(obj)
    return parse_edge_list(text), None


def graph_to_json(g: Graph, thetas: Optional[dict] = None) -> dict:
    edges = []
    for u, v, w in g.edges:
        e: dict = {"u": u, "v": v}
        if w != 1:
            e["w"] = [w.real, w.imag]
        if thetas and (u, v) in thetas:
            e["theta"] = thetas[(u, v)]
        edges.append(e)
    return {"directed": g.directed, "n": g.n, "edges": edges}
