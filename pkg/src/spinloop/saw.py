"""Self-avoiding walks on the hexagonal lattice: exact counts and the
connective constant.

Counts s_k are exact big integers from depth-first search with visited-set
pruning; sub-multiplicativity makes mu = lim s_k^{1/k} = inf_k s_k^{1/k},
which on the hexagonal lattice equals sqrt(2 + sqrt 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lattice.circuits import HexDomain
from .lattice.hexgrid import make_vertex, vertex_neighbors

K_MAX_CAP = 30
DEFAULT_ORIGIN = make_vertex((0, 0), (0, 2), (1, 1))

MU_HEXAGONAL = math.sqrt(2.0 + math.sqrt(2.0))


@dataclass
class SawCountTable:
    counts: dict = field(default_factory=dict)   # k -> exact integer s_k

    def __post_init__(self):
        if self.counts.get(0) != 1:
            raise ValueError("s_0 must be 1")

    def growth_sequence(self):
        return {k: s ** (1.0 / k) for k, s in self.counts.items() if k >= 1}

    def check_bounds(self):
        """2^(k/2) <= s_k <= 3 * 2^(k-1) for k >= 1."""
        for k, s in self.counts.items():
            if k == 0:
                continue
            if not (2.0 ** (k / 2.0) <= s <= 3 * 2 ** (k - 1)):
                raise AssertionError(f"count s_{k} = {s} violates the walk bounds")

    def check_submultiplicative(self):
        ks = sorted(self.counts)
        for k in ks:
            for m in ks:
                if k >= 1 and m >= 1 and k + m in self.counts:
                    if self.counts[k + m] > self.counts[k] * self.counts[m]:
                        raise AssertionError(f"s_{k+m} > s_{k} s_{m}")


def enumerate_saw(k_max: int, origin=DEFAULT_ORIGIN,
                  symmetry_reduction: bool = False) -> SawCountTable:
    """Exact s_k for k <= k_max by DFS.

    symmetry_reduction explores a single first step and multiplies by 3
    (vertex-transitivity); it is verified against the full count in tests.
    """
    if k_max > K_MAX_CAP:
        raise ValueError(f"exact DFS budget capped at k_max = {K_MAX_CAP}")
    if k_max == 0:
        return SawCountTable({0: 1})

    first_steps = vertex_neighbors(origin)
    multiplier = 1
    if symmetry_reduction:
        first_steps = first_steps[:1]
        multiplier = 3

    visited = {origin}
    out = [0] * (k_max + 1)
    out[0] = 1

    def dfs(vertex, depth):
        out[depth] += 1
        if depth == k_max:
            return
        visited.add(vertex)
        for nxt in vertex_neighbors(vertex):
            if nxt not in visited:
                dfs(nxt, depth + 1)
        visited.discard(vertex)

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, k_max + 100))
    try:
        for w in first_steps:
            dfs(w, 1)
    finally:
        sys.setrecursionlimit(old_limit)
    table = {0: 1}
    for k in range(1, k_max + 1):
        table[k] = out[k] * multiplier
    return SawCountTable(table)


def brute_force_counts(k_max: int, origin=DEFAULT_ORIGIN) -> dict:
    """Independent oracle: enumerate all 3^k neighbor sequences (tiny k)."""
    if k_max > 10:
        raise ValueError("the brute-force oracle is for tiny k only")
    counts = {0: 1}
    paths = [[origin]]
    for k in range(1, k_max + 1):
        new_paths = []
        for p in paths:
            for w in vertex_neighbors(p[-1]):
                new_paths.append(p + [w])
        self_avoiding = [p for p in new_paths if len(set(p)) == len(p)]
        counts[k] = len(self_avoiding)
        paths = new_paths  # keep all sequences; prune only when counting
    return counts


@dataclass
class ConnectiveEstimates:
    growth: dict                 # k -> s_k^(1/k)
    running_infimum: dict        # k -> min over j <= k
    mu_reference: float          # sqrt(2 + sqrt 2)

    def gap_at(self, k: int) -> float:
        return self.growth[k] - self.mu_reference


def connective_estimates(table: SawCountTable) -> ConnectiveEstimates:
    """s_k^{1/k}, the running infimum (an upper bound on mu), and the gap to
    the exact connective constant."""
    ks = sorted(k for k in table.counts if k >= 1)
    if not ks or ks[-1] < 10:
        raise ValueError("need counts up to k >= 10")
    growth = {k: table.counts[k] ** (1.0 / k) for k in ks}
    running = {}
    cur = math.inf
    for k in ks:
        cur = min(cur, growth[k])
        running[k] = cur
    return ConnectiveEstimates(growth, running, MU_HEXAGONAL)


def saw_two_edge_partition(domain: HexDomain, x: float, e1, e2, k_max: int) -> float:
    """Truncated SAW partition function between two boundary edges.

    Sums x^len over self-avoiding paths whose first and last edges are e1 and
    e2, where len counts the connection edges strictly between them (e1 = e2
    contributes the zero-length term 1).  Exact under the cap.
    """
    e1 = tuple(sorted(map(tuple, e1)))
    e2 = tuple(sorted(map(tuple, e2)))
    boundary = set()
    for i in domain.boundary_vertex_ids:
        boundary.update(domain.vertex_edge_ids[i])
    for e in (e1, e2):
        if e not in domain.edge_index or domain.edge_index[e] not in boundary:
            raise ValueError(f"{e} is not a boundary edge of the domain")
    if e1 == e2:
        return 1.0

    id1, id2 = domain.edge_index[e1], domain.edge_index[e2]
    total = 0.0

    def dfs(vertex, visited, length):
        nonlocal total
        for ei in domain.vertex_edge_ids[vertex]:
            if ei == id1:
                continue
            a, b = domain.edge_vertex_ids[ei]
            nxt = b if a == vertex else a
            if ei == id2:
                if nxt not in visited:
                    total += x**length
                continue
            if nxt in visited or length >= k_max:
                continue
            dfs(nxt, visited | {nxt}, length + 1)

    # each path subgraph fixes which endpoint of e1 is its open end, so the
    # two orientations enumerate disjoint families
    a1, b1 = domain.edge_vertex_ids[id1]
    for outer, inner in ((a1, b1), (b1, a1)):
        dfs(inner, {outer, inner}, 0)
    return total
