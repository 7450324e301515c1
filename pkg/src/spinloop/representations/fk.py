"""Edwards-Sokal coupling of Ising spins with the random-cluster model.

Alternating the two conditional resamplings (edges given spins, spins given
edges) is the Swendsen-Wang chain; its stationary joint law has the FK
marginal q^N(E) p^|E| (1-p)^... with q = 2, p = 1 - exp(-2 beta), and the
Ising marginal at inverse temperature beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class FkState:
    """Edge subset with its cluster count."""

    n_vertices: int
    edges: list                # full edge list of the graph
    open_mask: int             # bitmask over edges
    n_clusters: int
    p: float
    q: float

    def open_edges(self):
        return [e for i, e in enumerate(self.edges) if (self.open_mask >> i) & 1]


def _clusters(n_vertices: int, open_edge_list):
    parent = list(range(n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in open_edge_list:
        ra, rb = find(u), find(v)
        if ra != rb:
            parent[ra] = rb
    roots = {}
    labels = []
    for i in range(n_vertices):
        r = find(i)
        if r not in roots:
            roots[r] = len(roots)
        labels.append(roots[r])
    return len(roots), labels


class SwendsenWangChain:
    """The Edwards-Sokal alternation on an arbitrary finite graph (q = 2)."""

    def __init__(self, n_vertices: int, edges, beta: float):
        if beta < 0:
            raise ValueError("need beta >= 0")
        self.n_vertices = n_vertices
        self.edges = [tuple(e) for e in edges]
        self.beta = beta
        self.p = 1.0 - math.exp(-2.0 * beta)
        self.spins = np.ones(n_vertices, dtype=np.int8)

    def step(self, rng: np.random.Generator) -> FkState:
        # edges | spins: open each aligned edge with probability p
        mask = 0
        opened = []
        us = rng.random(len(self.edges))
        for i, (u, v) in enumerate(self.edges):
            if self.spins[u] == self.spins[v] and us[i] < self.p:
                mask |= 1 << i
                opened.append((u, v))
        n_cl, labels = _clusters(self.n_vertices, opened)
        # spins | edges: uniform +-1 per cluster
        flips = rng.choice(np.array([-1, 1], dtype=np.int8), size=n_cl)
        self.spins = flips[np.array(labels)]
        return FkState(self.n_vertices, self.edges, mask, n_cl, self.p, 2.0)


def edwards_sokal_sample(n_vertices: int, edges, beta: float,
                         rng: np.random.Generator, sweeps: int = 100):
    """Run the chain and return one (FkState, spins) joint sample."""
    chain = SwendsenWangChain(n_vertices, edges, beta)
    # randomize the start
    chain.spins = rng.choice(np.array([-1, 1], dtype=np.int8), size=n_vertices)
    state = None
    for _ in range(sweeps):
        state = chain.step(rng)
    return state, chain.spins.copy()
