"""Integer flows, dual height functions and Fourier edge weights.

The spin O(2) partition function with potential U expands over anti-symmetric
integer edge labels with zero divergence ("flows"), weighted by the Fourier
coefficients of g(t) = exp(-U(cos 2 pi t)).  On a planar graph flows biject
with integer height functions on the dual pinned at the outer face, which is
how the partition sum is enumerated here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def fourier_weight(model: str, beta: float, k: int, tol: float = 1e-14,
                   max_terms: int = 400) -> float:
    """Fourier coefficient g_hat(k) of the edge interaction.

    XY: the modified Bessel function I_k(beta) summed to relative tol;
    Villain: sqrt(2 pi / beta) * exp(-2 pi^2 k^2 / beta).  Both symmetric in
    k and positive.
    """
    if beta <= 0:
        raise ValueError("need beta > 0")
    k = abs(int(k))
    if model == "villain":
        return math.sqrt(2.0 * math.pi / beta) * math.exp(-2.0 * math.pi**2 * k**2 / beta)
    if model != "xy":
        raise ValueError("model must be 'xy' or 'villain'")
    half = beta / 2.0
    term = half**k / math.factorial(k)
    total = term
    for m in range(1, max_terms):
        term *= half * half / (m * (m + k))
        total += term
        if term <= tol * total:
            return total
    raise ArithmeticError(
        f"Bessel series for I_{k}({beta}) did not converge within {max_terms} terms"
    )


def villain_g(beta: float, t: float, terms: int = 40) -> float:
    """The periodized Gaussian sum_k exp(-beta (t+k)^2 / 2)."""
    return sum(math.exp(-beta * (t + k) ** 2 / 2.0) for k in range(-terms, terms + 1))


@dataclass
class PlanarGraph:
    """Finite planar graph with explicit face data.

    faces[i] is the counterclockwise boundary of face i as a list of
    (edge_id, sign); sign +1 means the canonical edge direction agrees with
    the traversal.  Face 0 is the outer face.  Every edge must occur in
    exactly two faces, once with each sign, which defines its left and right
    faces.
    """

    n_vertices: int
    edges: list
    faces: list
    left: list = field(init=False)
    right: list = field(init=False)

    def __post_init__(self):
        self.edges = [tuple(e) for e in self.edges]
        self.left = [None] * len(self.edges)
        self.right = [None] * len(self.edges)
        for fi, boundary in enumerate(self.faces):
            for (ei, sign) in boundary:
                if sign == 1:
                    if self.left[ei] is not None:
                        raise ValueError(f"edge {ei} has two left faces")
                    self.left[ei] = fi
                else:
                    if self.right[ei] is not None:
                        raise ValueError(f"edge {ei} has two right faces")
                    self.right[ei] = fi
        if any(l is None for l in self.left) or any(r is None for r in self.right):
            raise ValueError("every edge needs a face on each side")

    @property
    def n_faces(self):
        return len(self.faces)

    def dual_distances(self) -> list:
        """BFS distance of every face from the outer face in the dual graph."""
        from collections import deque

        dist = [None] * self.n_faces
        dist[0] = 0
        queue = deque([0])
        adj = {i: set() for i in range(self.n_faces)}
        for ei in range(len(self.edges)):
            adj[self.left[ei]].add(self.right[ei])
            adj[self.right[ei]].add(self.left[ei])
        while queue:
            f = queue.popleft()
            for g in adj[f]:
                if dist[g] is None:
                    dist[g] = dist[f] + 1
                    queue.append(g)
        return dist


def flow_from_height(graph: PlanarGraph, heights) -> list:
    """k_e = f(left(e)) - f(right(e)); heights are indexed by faces, outer 0."""
    if heights[0] != 0:
        raise ValueError("heights must vanish on the outer face")
    return [heights[graph.left[ei]] - heights[graph.right[ei]]
            for ei in range(len(graph.edges))]


def height_from_flow(graph: PlanarGraph, flow) -> list:
    """Inverse bijection; checks the zero-divergence (face cycle) condition."""
    div = [0] * graph.n_vertices
    for ei, (u, v) in enumerate(graph.edges):
        div[u] += flow[ei]
        div[v] -= flow[ei]
    if any(d != 0 for d in div):
        raise ValueError("edge labels are not a flow (nonzero divergence)")
    heights = [None] * graph.n_faces
    heights[0] = 0
    from collections import deque

    queue = deque([0])
    while queue:
        f = queue.popleft()
        for ei in range(len(graph.edges)):
            l, r = graph.left[ei], graph.right[ei]
            if l == f and heights[r] is None:
                heights[r] = heights[f] - flow[ei]
                queue.append(r)
            elif r == f and heights[l] is None:
                heights[l] = heights[f] + flow[ei]
                queue.append(l)
    # consistency (guaranteed by zero divergence, checked anyway)
    for ei in range(len(graph.edges)):
        if heights[graph.left[ei]] - heights[graph.right[ei]] != flow[ei]:
            raise AssertionError("height reconstruction inconsistent")
    return heights


def flow_partition(graph: PlanarGraph, g_hat, k_max: int) -> dict:
    """Z = sum over flows of prod_e g_hat(k_e), enumerated in height
    coordinates: |f(x)| <= k_max * dist(x) catches every flow with
    max |k_e| <= k_max.  Reports convergence and tail diagnostics.
    """
    dist = graph.dual_distances()
    inner = list(range(1, graph.n_faces))
    bounds = [k_max * dist[f] for f in inner]
    if any(b is None for b in bounds):
        raise ValueError("disconnected dual graph")

    def z_for(limit_scale: int):
        total = 0.0
        radii = [min(b, limit_scale * d) for b, d in zip(bounds, (dist[f] for f in inner))]
        heights = [0] * graph.n_faces

        def rec(idx: int, acc: float):
            nonlocal total
            if idx == len(inner):
                total += acc
                return
            f = inner[idx]
            r = radii[idx]
            for val in range(-r, r + 1):
                heights[f] = val
                # multiply the weights of edges whose two faces are both set
                w = acc
                ok = True
                for ei in range(len(graph.edges)):
                    l, rgt = graph.left[ei], graph.right[ei]
                    later = max(l, rgt)  # faces are filled in index order
                    if later != f:
                        continue
                    k = heights[l] - heights[rgt]
                    w *= g_hat(k)
                    if w == 0.0:
                        ok = False
                        break
                if ok and w != 0.0:
                    rec(idx + 1, w)
            heights[f] = 0

        base = 1.0
        for ei in range(len(graph.edges)):
            if max(graph.left[ei], graph.right[ei]) == 0:
                base *= g_hat(0)  # both sides outer: the label is forced to 0
        rec(0, base)
        return total

    z_full = z_for(k_max)
    z_prev = z_for(k_max - 1) if k_max >= 2 else None
    tail = 2.0 * sum(g_hat(k) for k in range(k_max + 1, k_max + 20)) / g_hat(0)
    return {
        "Z": z_full,
        "k_max": k_max,
        "Z_prev_k": z_prev,
        "delta_prev_k": None if z_prev is None else abs(z_full - z_prev),
        "edge_tail_ratio": tail,
    }


def flow_height_json(graph: PlanarGraph, flow) -> dict:
    """Debug serialization of a flow with its dual height function."""
    heights = height_from_flow(graph, flow)
    return {
        "edges": [list(e) for e in graph.edges],
        "flow": [int(k) for k in flow],
        "heights": [int(f) for f in heights],
    }


def cycle_graph(m: int) -> PlanarGraph:
    """The m-cycle with its inner face; edges i -> i+1 counterclockwise."""
    edges = [(i, (i + 1) % m) for i in range(m)]
    inner = [(i, 1) for i in range(m)]
    outer = [(i, -1) for i in range(m)]
    return PlanarGraph(m, edges, [outer, inner])


def grid_graph(w: int, h: int) -> PlanarGraph:
    """(w x h)-vertex grid graph with unit-square faces."""

    def vid(i, j):
        return i * h + j

    edges = []
    eid = {}
    for i in range(w):
        for j in range(h):
            if i + 1 < w:
                eid[(i, j, "r")] = len(edges)
                edges.append((vid(i, j), vid(i + 1, j)))
            if j + 1 < h:
                eid[(i, j, "u")] = len(edges)
                edges.append((vid(i, j), vid(i, j + 1)))
    faces = [None]
    for i in range(w - 1):
        for j in range(h - 1):
            # counterclockwise: right, up, left(reversed), down(reversed)
            faces.append([
                (eid[(i, j, "r")], 1),
                (eid[(i + 1, j, "u")], 1),
                (eid[(i, j + 1, "r")], -1),
                (eid[(i, j, "u")], -1),
            ])
    # outer face: every edge with a missing side, traversed oppositely
    used = {}
    for f in faces[1:]:
        for (ei, s) in f:
            used.setdefault(ei, []).append(s)
    outer = []
    for ei in range(len(edges)):
        signs = used.get(ei, [])
        if 1 not in signs:
            outer.append((ei, 1))
        if -1 not in signs:
            outer.append((ei, -1))
    faces[0] = outer
    return PlanarGraph(w * h, edges, faces)
