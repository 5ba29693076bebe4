"""MaxCut instances: graphs, random regular generation, cut arithmetic and a brute-force oracle."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, DimensionError, EdgeListError, ParameterError

BRUTE_FORCE_CAP = 24


@dataclass(frozen=True)
class Graph:
    """Simple undirected unweighted graph on nodes ``0 .. num_nodes-1``.

    Edges are stored as sorted ``(i, j)`` pairs with ``i < j``.
    """

    num_nodes: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, num_nodes: int, edges: Iterable[Sequence[int]] = ()):
        if num_nodes < 1:
            raise ParameterError(f"num_nodes must be positive, got {num_nodes}")
        canon = set()
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ParameterError(f"self-loop at node {i}")
            if not (0 <= i < num_nodes and 0 <= j < num_nodes):
                raise ParameterError(f"edge ({i}, {j}) out of range for {num_nodes} nodes")
            key = (min(i, j), max(i, j))
            if key in canon:
                raise ParameterError(f"duplicate edge {key}")
            canon.add(key)
        object.__setattr__(self, "num_nodes", int(num_nodes))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.num_nodes
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def neighbors(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.num_nodes)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def is_bipartite(self) -> bool:
        adj = self.neighbors()
        color = [-1] * self.num_nodes
        for start in range(self.num_nodes):
            if color[start] >= 0:
                continue
            color[start] = 0
            stack = [start]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if color[v] < 0:
                        color[v] = 1 - color[u]
                        stack.append(v)
                    elif color[v] == color[u]:
                        return False
        return True


@dataclass(frozen=True)
class CutResult:
    cut: int
    ratio: float


def generate_random_regular(n: int, d: int, seed: int, max_attempts: int = 10_000) -> Graph:
    """Random simple ``d``-regular graph on ``n`` nodes via the pairing model.

    Each attempt shuffles the ``n*d`` half-edge stubs with a generator seeded by
    ``(seed, attempt)`` and pairs them in order; pairings with self-loops or
    repeated edges are rejected and the next attempt is drawn.
    """
    if n <= d:
        raise ParameterError(f"need n > d, got n={n}, d={d}")
    if d < 0 or (n * d) % 2:
        raise ParameterError(f"n*d must be even, got n={n}, d={d}")
    stubs = np.repeat(np.arange(n), d)
    for attempt in range(max_attempts):
        rng = np.random.default_rng([int(seed), attempt])
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keys = {(min(a, b), max(a, b)) for a, b in pairs.tolist()}
        if len(keys) != len(pairs):
            continue
        return Graph(n, keys)
    raise ParameterError(f"no simple {d}-regular graph found after {max_attempts} attempts")


def _check_bits(g: Graph, bits: Sequence[int]) -> None:
    if len(bits) != g.num_nodes:
        raise DimensionError(f"bit vector has length {len(bits)}, graph has {g.num_nodes} nodes")
    for b in bits:
        if b not in (0, 1):
            raise ParameterError(f"bits must be 0 or 1, got {b!r}")


def cut_value(g: Graph, bits: Sequence[int]) -> int:
    """Number of edges whose endpoints carry different bits."""
    _check_bits(g, bits)
    return sum(1 for i, j in g.edges if bits[i] != bits[j])


def complement(bits: Sequence[int]) -> list[int]:
    return [1 - int(b) for b in bits]


def max_cut_bruteforce(g: Graph, cap: int = BRUTE_FORCE_CAP) -> tuple[list[int], int]:
    """Exhaustive MaxCut with node 0 pinned to bit 0.

    Returns the lexicographically smallest maximizer and its cut value.
    """
    n = g.num_nodes
    if n > cap:
        raise CapExceededError(f"brute force capped at {cap} nodes, graph has {n}")
    if n == 1 or not g.edges:
        return [0] * n, 0
    # config x encodes bit of node i at position n-1-i, so integer order is
    # lexicographic order of the bit tuple
    shifts = [(n - 1 - i, n - 1 - j) for i, j in g.edges]
    total = 1 << (n - 1)
    chunk = 1 << 20
    best_val, best_x = -1, 0
    for start in range(0, total, chunk):
        x = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cuts = np.zeros(len(x), dtype=np.int32)
        for si, sj in shifts:
            cuts += ((x >> si) ^ (x >> sj)) & 1
        k = int(np.argmax(cuts))
        if cuts[k] > best_val:
            best_val, best_x = int(cuts[k]), int(x[k])
    bits = [(best_x >> (n - 1 - i)) & 1 for i in range(n)]
    return bits, best_val


def approximation_ratio(cut: int, optimal: int) -> float:
    if optimal <= 0:
        raise ParameterError("approximation ratio undefined for optimal cut 0")
    if not 0 <= cut <= optimal:
        raise ParameterError(f"cut {cut} outside [0, {optimal}]")
    return cut / optimal


def score(g: Graph, bits: Sequence[int], optimal: int | None = None) -> CutResult:
    if optimal is None:
        optimal = max_cut_bruteforce(g)[1]
    c = cut_value(g, bits)
    return CutResult(c, approximation_ratio(c, optimal))


# -- edge-list text format ---------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``n m`` header followed by ``m`` lines of 0-indexed ``i j`` pairs."""
    # '#' starts a comment, whole-line or trailing
    stripped = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [(k + 1, ln) for k, ln in enumerate(stripped) if ln]
    if not rows:
        raise EdgeListError(1, "missing 'n m' header")
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
        raise EdgeListError(lineno, f"expected 'n m' header, got {header!r}")
    n, m = int(parts[0]), int(parts[1])
    if n < 1 or m < 0:
        raise EdgeListError(lineno, f"invalid header values n={n}, m={m}")
    edges = []
    seen = set()
    for lineno, row in rows[1:]:
        parts = row.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise EdgeListError(lineno, f"expected 'i j', got {row!r}")
        i, j = int(parts[0]), int(parts[1])
        if i >= n or j >= n:
            raise EdgeListError(lineno, f"node index out of range for n={n}")
        if i == j:
            raise EdgeListError(lineno, f"self-loop at node {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise EdgeListError(lineno, f"duplicate edge {key}")
        seen.add(key)
        edges.append(key)
    if len(edges) != m:
        raise EdgeListError(rows[-1][0], f"header declares {m} edges, found {len(edges)}")
    return Graph(n, edges)


def format_edge_list(g: Graph) -> str:
    out = [f"{g.num_nodes} {g.num_edges}"]
    out += [f"{i} {j}" for i, j in g.edges]
    return "\n".join(out) + "\n"


def read_edge_list(path: str | os.PathLike) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def write_edge_list(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))
