"""Circuits in the triangular dual and the hexagonal domains they enclose.

A circuit is a simple closed path of hexagons; removing its dual edge set
splits the hexagonal lattice into exactly two components and the finite one,
as an induced subgraph, is the domain enclosed.  Circuits and domains are in
bijection, and both directions are implemented here: flood-fill interior for
circuit -> domain, boundary reconstruction for domain -> circuit.

All "infinite lattice" computations happen inside a bounding window with a
few hexagons of margin; every defining condition is local to the domain, so
the margin only has to be wide enough to keep the exterior connected.
"""

from __future__ import annotations

from collections import deque

from .hexgrid import (
    edge_endpoints,
    edges_of_hexagon,
    hex_adjacent,
    hex_color,
    hex_neighbors,
    make_edge,
    vertex_edges,
    vertex_neighbors,
    vertices_of_hexagon,
)

WINDOW_MARGIN_A = 3
WINDOW_MARGIN_B = 6


class Circuit:
    """Cyclic sequence of pairwise-distinct, consecutively adjacent hexagons."""

    def __init__(self, hexagons):
        hexagons = [tuple(h) for h in hexagons]
        if hexagons and hexagons[0] == hexagons[-1]:
            hexagons = hexagons[:-1]
        if len(hexagons) < 3:
            raise ValueError("a circuit visits at least 3 hexagons")
        if len(set(hexagons)) != len(hexagons):
            raise ValueError("circuit hexagons must be pairwise distinct")
        m = len(hexagons)
        for i in range(m):
            if not hex_adjacent(hexagons[i], hexagons[(i + 1) % m]):
                raise ValueError(
                    f"consecutive hexagons {hexagons[i]}, {hexagons[(i+1)%m]} not adjacent"
                )
        self.hexagons = tuple(hexagons)

    def __len__(self):
        return len(self.hexagons)

    def __iter__(self):
        return iter(self.hexagons)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return set(self.dual_edges()) == set(other.dual_edges())

    def __hash__(self):
        return hash(frozenset(self.dual_edges()))

    def dual_edges(self):
        """The edge set gamma^* of the hexagonal lattice crossed by the circuit."""
        m = len(self.hexagons)
        return [make_edge(self.hexagons[i], self.hexagons[(i + 1) % m]) for i in range(m)]

    def colors(self):
        return {hex_color(h) for h in self.hexagons}

    def avoids_class(self, c: int) -> bool:
        return c not in self.colors()

    def to_json(self):
        return {"circuit": [list(h) for h in self.hexagons]}

    @classmethod
    def from_json(cls, data):
        return cls([tuple(h) for h in data["circuit"]])


def _window(hexagons, extra=0):
    amin = min(h[0] for h in hexagons) - WINDOW_MARGIN_A - extra
    amax = max(h[0] for h in hexagons) + WINDOW_MARGIN_A + extra
    bmin = min(h[1] for h in hexagons) - WINDOW_MARGIN_B - 2 * extra
    bmax = max(h[1] for h in hexagons) + WINDOW_MARGIN_B + 2 * extra
    return amin, amax, bmin, bmax


def window_vertices(hexagons, extra=0):
    """All lattice vertices whose three hexagons lie in the bounding window."""
    amin, amax, bmin, bmax = _window(hexagons, extra)

    def inside(h):
        return amin <= h[0] <= amax and bmin <= h[1] <= bmax

    verts = set()
    for a in range(amin, amax + 1):
        for b in range(bmin + (a - bmin) % 2, bmax + 1, 2):
            h = (a, b)
            for v in vertices_of_hexagon(h):
                if all(inside(g) for g in v):
                    verts.add(v)
    return verts, inside


def exterior_component(blocked_edges, hexagons, extra=0):
    """Vertices of the window connected to its border avoiding blocked edges.

    Returns (window vertex set, exterior vertex set).
    """
    verts, inside = window_vertices(hexagons, extra)
    amin, amax, bmin, bmax = _window(hexagons, extra)

    def on_border(v):
        return any(
            h[0] in (amin, amax) or h[1] in (bmin, bmin + 1, bmax - 1, bmax) for h in v
        )

    blocked = set(blocked_edges)
    seeds = [v for v in verts if on_border(v)]
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        v = queue.popleft()
        for w in vertex_neighbors(v):
            if w in seen or w not in verts:
                continue
            shared = tuple(sorted(set(v) & set(w)))
            if shared in blocked:
                continue
            seen.add(w)
            queue.append(w)
    return verts, seen


def circuit_interior(circuit: Circuit):
    """Interior (vertices, edges, hexagons) enclosed by a circuit.

    The dual edges of the circuit are removed and the finite component is
    returned as an induced subgraph; raises if the removal does not split
    the window into exactly two pieces (i.e. the input is not a circuit).
    """
    star = set(circuit.dual_edges())
    verts, exterior = exterior_component(star, circuit.hexagons)
    interior = verts - exterior
    if not interior:
        raise ValueError("circuit has empty interior")

    # Must be a single connected component (discrete Jordan property).
    start = next(iter(interior))
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in vertex_neighbors(v):
            if w in interior and w not in seen:
                shared = tuple(sorted(set(v) & set(w)))
                if shared in star:
                    continue
                seen.add(w)
                queue.append(w)
    if seen != interior:
        raise ValueError("interior is not connected: not a valid circuit")

    int_edges = set()
    for v in interior:
        for e in vertex_edges(v):
            u1, u2 = edge_endpoints(e)
            if u1 in interior and u2 in interior:
                if e in star:
                    raise ValueError("dual edge of circuit has both endpoints inside")
                int_edges.add(e)

    int_hexes = set()
    for v in interior:
        for h in v:
            if h not in int_hexes and all(u in interior for u in vertices_of_hexagon(h)):
                int_hexes.add(h)
    return interior, int_edges, int_hexes


def enclosing_circuit(int_vertices) -> Circuit:
    """Recover the circuit whose interior vertex set is the given set."""
    int_vertices = set(int_vertices)
    if not int_vertices:
        raise ValueError("empty vertex set has no enclosing circuit")
    hexes = set()
    for v in int_vertices:
        hexes.update(v)
    int_hexes = {h for h in hexes if all(u in int_vertices for u in vertices_of_hexagon(h))}
    ring = hexes - int_hexes
    # Consecutive circuit hexagons are adjacent pairs whose shared lattice
    # edge has exactly one endpoint inside.
    links = {h: [] for h in ring}
    for g in ring:
        for h in hex_neighbors(g):
            if h <= g or h not in ring:
                continue
            e = make_edge(g, h)
            u1, u2 = edge_endpoints(e)
            if (u1 in int_vertices) != (u2 in int_vertices):
                links[g].append(h)
                links[h].append(g)
    for h, nbrs in links.items():
        if len(nbrs) != 2:
            raise ValueError(
                f"vertex set is not the interior of a single circuit (hexagon {h} "
                f"has {len(nbrs)} circuit links)"
            )
    start = min(ring)
    seq = [start]
    prev = None
    while True:
        cur = seq[-1]
        nxt = links[cur][0] if links[cur][0] != prev else links[cur][1]
        if nxt == start:
            break
        seq.append(nxt)
        prev = cur
    if len(seq) != len(ring):
        raise ValueError("circuit links do not form a single cycle")
    circuit = Circuit(seq)
    return circuit


class HexDomain:
    """A hexagonal domain: the induced subgraph enclosed by a circuit.

    Precomputes integer ids for vertices, edges and interior hexagons so that
    samplers can run on flat arrays.  Immutable after construction.
    """

    def __init__(self, circuit: Circuit):
        self.circuit = circuit
        interior, int_edges, int_hexes = circuit_interior(circuit)
        self.vertices = sorted(interior)
        self.edges = sorted(int_edges)
        self.hexagons = sorted(int_hexes)

        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.hex_index = {h: i for i, h in enumerate(self.hexagons)}

        self.edge_vertex_ids = []
        for e in self.edges:
            u1, u2 = edge_endpoints(e)
            self.edge_vertex_ids.append((self.vertex_index[u1], self.vertex_index[u2]))

        self.vertex_edge_ids = [[] for _ in self.vertices]
        for ei, (i1, i2) in enumerate(self.edge_vertex_ids):
            self.vertex_edge_ids[i1].append(ei)
            self.vertex_edge_ids[i2].append(ei)

        self.hexagon_edge_ids = [
            tuple(self.edge_index[e] for e in edges_of_hexagon(h)) for h in self.hexagons
        ]
        # corner vertices of each interior hexagon (the 6 endpoints of its face)
        self.hexagon_vertex_ids = [
            tuple(self.vertex_index[v] for v in vertices_of_hexagon(h))
            for h in self.hexagons
        ]

        self.boundary_vertex_ids = [
            i for i, incident in enumerate(self.vertex_edge_ids) if len(incident) < 3
        ]

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def is_type(self, c: int) -> bool:
        """Type c: the enclosing circuit avoids color class c."""
        return self.circuit.avoids_class(c)

    def ground_edge_ids(self, c: int):
        """Ids of domain edges lying in the class-c ground state."""
        return [
            i
            for i, (g, h) in enumerate(self.edges)
            if hex_color(g) == c or hex_color(h) == c
        ]

    def interior_hex_ids_of_class(self, c: int):
        return [i for i, h in enumerate(self.hexagons) if hex_color(h) == c]

    def to_json(self):
        return self.circuit.to_json()

    @classmethod
    def from_json(cls, data):
        return cls(Circuit.from_json(data))


def single_hexagon_domain(h=(0, 0)) -> HexDomain:
    """The domain consisting of one hexagonal cell."""
    return HexDomain(Circuit(hex_neighbors(h)))


def triangle_domain(v=None) -> HexDomain:
    """Domain of three mutually adjacent hexagonal cells around one vertex."""
    if v is None:
        v = ((0, 0), (0, 2), (1, 1))
    cells = set()
    for h in v:
        cells.update(vertices_of_hexagon(h))
    return HexDomain(enclosing_circuit(cells))


def flower_parallelogram_domain(cols: int, rows: int, origin=(0, 0)) -> HexDomain:
    """Type-0 domain made of a cols x rows parallelogram of class-0 cells.

    The class-0 hexagons form a triangular sublattice with basis (2,0), (1,3);
    the domain is the union of the closed hexagonal cells at those sites.
    """
    if cols < 1 or rows < 1:
        raise ValueError("need at least one cell in each direction")
    a0, b0 = origin
    if hex_color((a0, b0)) != 0:
        raise ValueError("origin must be a class-0 hexagon")
    cells = set()
    flowers = []
    for i in range(cols):
        for j in range(rows):
            z = (a0 + 2 * i + j, b0 + 3 * j)
            flowers.append(z)
            cells.update(vertices_of_hexagon(z))
    dom = HexDomain(enclosing_circuit(cells))
    if not dom.is_type(0):
        raise AssertionError("flower parallelogram should be a type-0 domain")
    return dom
