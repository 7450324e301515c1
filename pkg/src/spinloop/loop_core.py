"""Loop configurations on hexagonal domains.

A configuration is a set of domain edges with even degree (0 or 2) at every
vertex; on the 3-regular hexagonal lattice this makes the loop decomposition
unambiguous (loops are automatically vertex-disjoint).  Weights are
x^(#edges) * n^(#loops); the x = infinity model compares configurations by
the lexicographic key (edge count, loop weight).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .lattice.circuits import HexDomain
from .lattice.hexgrid import hex_color, hex_neighbors, vertices_of_hexagon


class OddVertexError(ValueError):
    def __init__(self, vertex):
        super().__init__(f"odd degree at vertex {vertex}")
        self.vertex = vertex


@dataclass(frozen=True)
class Loop:
    """One loop: edge ids and vertex ids in traversal order."""

    edge_ids: tuple
    vertex_ids: tuple

    def __len__(self):
        return len(self.edge_ids)


class LoopConfig:
    """Even edge subset of a domain, stored as a set of edge ids."""

    def __init__(self, domain: HexDomain, edge_ids):
        self.domain = domain
        self.edge_ids = frozenset(int(e) for e in edge_ids)
        for ei in self.edge_ids:
            if not 0 <= ei < domain.n_edges:
                raise ValueError(f"edge id {ei} outside the domain")
        self._check_even()

    def _check_even(self):
        deg = [0] * self.domain.n_vertices
        for ei in self.edge_ids:
            a, b = self.domain.edge_vertex_ids[ei]
            deg[a] += 1
            deg[b] += 1
        for i, d in enumerate(deg):
            if d % 2 == 1:
                raise OddVertexError(self.domain.vertices[i])

    @classmethod
    def empty(cls, domain: HexDomain) -> "LoopConfig":
        return cls(domain, ())

    @classmethod
    def from_edges(cls, domain: HexDomain, edges) -> "LoopConfig":
        """Validate a raw set of edges (hexagon pairs) as a loop configuration."""
        ids = []
        for e in edges:
            key = tuple(sorted(map(tuple, e)))
            if key not in domain.edge_index:
                raise ValueError(f"edge {key} is not an edge of the domain")
            ids.append(domain.edge_index[key])
        return cls(domain, ids)

    @classmethod
    def ground_state(cls, domain: HexDomain, c: int = 0) -> "LoopConfig":
        """The class-c ground state restricted to the domain: trivial loops
        around every interior class-c hexagon."""
        ids = set()
        for hid, h in enumerate(domain.hexagons):
            if hex_color(h) == c:
                ids.update(domain.hexagon_edge_ids[hid])
        return cls(domain, ids)

    @property
    def o(self) -> int:
        return len(self.edge_ids)

    def edges(self):
        return [self.domain.edges[ei] for ei in sorted(self.edge_ids)]

    def loops(self) -> list:
        """Loop decomposition via traversal (3-regularity makes it unique)."""
        dom = self.domain
        present = self.edge_ids
        seen = set()
        out = []
        for start in sorted(present):
            if start in seen:
                continue
            edge_seq = [start]
            a, b = dom.edge_vertex_ids[start]
            vertex_seq = [a, b]
            seen.add(start)
            cur_edge, cur_vertex = start, b
            while True:
                nxt = None
                for ei in dom.vertex_edge_ids[cur_vertex]:
                    if ei != cur_edge and ei in present:
                        nxt = ei
                        break
                if nxt is None:
                    raise OddVertexError(dom.vertices[cur_vertex])
                x, y = dom.edge_vertex_ids[nxt]
                cur_vertex = y if x == cur_vertex else x
                cur_edge = nxt
                seen.add(nxt)
                if cur_vertex == a:
                    edge_seq.append(nxt)
                    break
                edge_seq.append(nxt)
                vertex_seq.append(cur_vertex)
            out.append(Loop(tuple(edge_seq), tuple(vertex_seq)))
        return out

    @property
    def n_loops(self) -> int:
        return len(self.loops())

    def flip_hexagon(self, hex_id: int) -> "LoopConfig":
        """Symmetric difference with a hexagonal face (cycle-space move)."""
        face = set(self.domain.hexagon_edge_ids[hex_id])
        return LoopConfig(self.domain, set(self.edge_ids) ^ face)

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "model": "loop",
            "circuit": [list(h) for h in self.domain.circuit.hexagons],
            "edges": [[list(g), list(h)] for (g, h) in self.edges()],
        }

    @classmethod
    def from_json(cls, data) -> "LoopConfig":
        from .lattice.circuits import Circuit

        domain = HexDomain(Circuit([tuple(h) for h in data["circuit"]]))
        return cls.from_edges(domain, [tuple(map(tuple, e)) for e in data["edges"]])


def validate(edges, domain: HexDomain) -> LoopConfig:
    """Accept a raw edge set iff all degrees are even; reports the offender."""
    return LoopConfig.from_edges(domain, edges)


def loop_weight(cfg: LoopConfig, n: float, x: float) -> float:
    """log weight o(w) ln x + L(w) ln n (finite x only)."""
    if n <= 0 or x <= 0 or math.isinf(x):
        raise ValueError("finite log-weights need n > 0 and 0 < x < inf")
    return cfg.o * math.log(x) + cfg.n_loops * math.log(n)


def packing_key(cfg: LoopConfig, n: float):
    """Comparison key for the x = infinity model: maximize o first, then the
    loop weight n^L (lexicographic)."""
    if n <= 0:
        raise ValueError("need n > 0")
    return (cfg.o, cfg.n_loops * math.log(n))


def loop_inside_hexagons(cfg: LoopConfig, loop: Loop):
    """Hexagons enclosed by one loop, by flood fill on the dual blocked at
    the loop's edges (the edge {g,h} is the wall between faces g and h)."""
    dom = cfg.domain
    wall = {dom.edges[ei] for ei in loop.edge_ids}
    hexes = {h for e in wall for h in e}
    amin = min(h[0] for h in hexes) - 2
    amax = max(h[0] for h in hexes) + 2
    bmin = min(h[1] for h in hexes) - 4
    bmax = max(h[1] for h in hexes) + 4

    def inside_window(h):
        return amin <= h[0] <= amax and bmin <= h[1] <= bmax

    border = [
        (a, b)
        for a in range(amin, amax + 1)
        for b in range(bmin + (a - bmin) % 2, bmax + 1, 2)
        if a in (amin, amax) or b in (bmin, bmin + 1, bmax - 1, bmax)
    ]
    outside = set(border)
    queue = deque(border)
    while queue:
        g = queue.popleft()
        for h in hex_neighbors(g):
            if not inside_window(h) or h in outside:
                continue
            key = (g, h) if g <= h else (h, g)
            if key in wall:
                continue
            outside.add(h)
            queue.append(h)
    inside = set()
    for a in range(amin, amax + 1):
        for b in range(bmin + (a - bmin) % 2, bmax + 1, 2):
            if (a, b) not in outside:
                inside.add((a, b))
    return inside


def loops_surrounding(cfg: LoopConfig, u) -> list:
    """Loops surrounding vertex u: u lies on the loop or strictly inside it.

    Returns (loop, length) pairs.
    """
    dom = cfg.domain
    u_id = dom.vertex_index[u]
    out = []
    for loop in cfg.loops():
        if u_id in loop.vertex_ids:
            out.append((loop, len(loop)))
            continue
        inside = loop_inside_hexagons(cfg, loop)
        if all(h in inside for h in u):
            out.append((loop, len(loop)))
    return out


def vertices_on_loops(cfg: LoopConfig) -> set:
    """Vertex ids lying on some loop (degree 2 in the configuration)."""
    deg = {}
    for ei in cfg.edge_ids:
        a, b = cfg.domain.edge_vertex_ids[ei]
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
    return {v for v, d in deg.items() if d == 2}


def ground_flowers(cfg: LoopConfig, c: int) -> set:
    """Interior class-c hexagon ids whose full trivial loop lies in the config."""
    dom = cfg.domain
    out = set()
    for hid, h in enumerate(dom.hexagons):
        if hex_color(h) == c and all(ei in cfg.edge_ids for ei in dom.hexagon_edge_ids[hid]):
            out.add(hid)
    return out


def ground_vertices(cfg: LoopConfig, c: int) -> set:
    """Vertex ids on loops of (config intersect class-c ground state): these
    are exactly the vertices bordering class-c flowers."""
    dom = cfg.domain
    out = set()
    for hid in ground_flowers(cfg, c):
        h = dom.hexagons[hid]
        for v in vertices_of_hexagon(h):
            out.add(dom.vertex_index[v])
    return out


def connectivity(cfg: LoopConfig, u, v, mode: str = "loop", c: int = 0) -> bool:
    """Loop- or ground(c)-connectivity of two vertices.

    mode "loop": a path whose vertices all belong to loops of the config;
    mode "ground": same with the config intersected with the class-c ground
    state (i.e. through class-c flowers).
    """
    dom = cfg.domain
    u_id, v_id = dom.vertex_index[u], dom.vertex_index[v]
    if mode == "loop":
        allowed = vertices_on_loops(cfg)
    elif mode == "ground":
        allowed = ground_vertices(cfg, c)
    else:
        raise ValueError("mode must be 'loop' or 'ground'")
    if u_id not in allowed or v_id not in allowed:
        return False
    seen = {u_id}
    queue = deque([u_id])
    while queue:
        cur = queue.popleft()
        if cur == v_id:
            return True
        for ei in dom.vertex_edge_ids[cur]:
            a, b = dom.edge_vertex_ids[ei]
            nxt = b if a == cur else a
            if nxt in allowed and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def fully_packed_witness(domain: HexDomain) -> LoopConfig | None:
    """A fully-packed configuration when one is evident: the class-c ground
    state restricted to a type-c domain covers every vertex twice."""
    for c in range(3):
        if domain.is_type(c):
            cfg = LoopConfig.ground_state(domain, c)
            if len(vertices_on_loops(cfg)) == domain.n_vertices:
                return cfg
    return None


def max_edges(domain: HexDomain, cap: int = 22) -> int:
    """o_H = max edges over loop configurations: the fully-packed witness when
    available, exhaustive search under the cycle-space cap otherwise."""
    witness = fully_packed_witness(domain)
    if witness is not None:
        return witness.o
    dim = len(domain.hexagons)
    if dim > cap:
        raise ValueError(f"cycle-space dimension {dim} exceeds the search cap")
    from .oracle import even_subgraph_masks

    return max(mask.bit_count() for mask in even_subgraph_masks(domain))


def critical_x(n: float) -> float:
    """Conjectured critical edge weight x_c(n) = 1 / sqrt(2 + sqrt(2 - n))."""
    if not 0 <= n <= 2:
        raise ValueError("x_c(n) is defined for 0 <= n <= 2")
    return 1.0 / math.sqrt(2.0 + math.sqrt(2.0 - n))


def hard_hexagon_lambda_c() -> float:
    """Baxter's critical fugacity (2 cos(pi/5))^5 = (11 + 5 sqrt 5)/2."""
    return (11.0 + 5.0 * math.sqrt(5.0)) / 2.0
