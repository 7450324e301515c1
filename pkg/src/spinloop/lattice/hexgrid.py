"""Hexagonal lattice geometry via its triangular dual.

A hexagon (= face of the hexagonal lattice = vertex of the triangular dual)
is an integer pair (a, b) with a == b (mod 2), sitting at Euclidean position
(sqrt(3) * a, b).  These are exactly the points of the lattice spanned by
(0,2) and (sqrt(3),1).  The color classes of the proper 3-coloring are
color(a, b) = (-b) mod 3, which fixes (0,0) in class 0 and (0,2) in class 1;
the up-shift (a, b) -> (a, b+2) maps class c to c+1 mod 3.

Vertices of the hexagonal lattice are the triangular faces of the dual, i.e.
sorted triples of mutually adjacent hexagons.  An edge of the hexagonal
lattice is identified with its dual edge: the sorted pair of the two hexagons
it separates.  With this encoding all of the loop-model machinery (loops,
circuits, gardens, shifts) speaks a single vocabulary of integer pairs.
"""

from __future__ import annotations

# Neighbor offsets of a hexagon in the triangular dual.
HEX_OFFSETS = ((0, 2), (1, 1), (1, -1), (0, -2), (-1, -1), (-1, 1))

SQRT3 = 3.0**0.5


def is_valid_hexagon(h) -> bool:
    a, b = h
    return (a - b) % 2 == 0


def _check(h):
    if not is_valid_hexagon(h):
        raise ValueError(f"{h} is not a hexagon: a and b must have equal parity")
    return h


def hex_position(h):
    """Euclidean position of a hexagon center."""
    a, b = h
    return (SQRT3 * a, float(b))


def hex_color(h) -> int:
    """Color class in {0, 1, 2}; proper on the triangular adjacency."""
    _check(h)
    return (-h[1]) % 3


def hex_neighbors(h):
    """The six neighbors in the triangular dual, in cyclic order."""
    a, b = _check(h)
    return [(a + da, b + db) for da, db in HEX_OFFSETS]


def hex_adjacent(g, h) -> bool:
    return (h[0] - g[0], h[1] - g[1]) in HEX_OFFSETS


def shift_up(h):
    """Graph automorphism of the dual mapping every hexagon to a neighbor;
    takes color class c to c+1 mod 3."""
    a, b = _check(h)
    return (a, b + 2)


def shift_down(h):
    a, b = _check(h)
    return (a, b - 2)


def shift(h, direction: str):
    if direction == "up":
        return shift_up(h)
    if direction == "down":
        return shift_down(h)
    raise ValueError("direction must be 'up' or 'down'")


def shift_vertex(v, direction: str):
    return make_vertex(*(shift(h, direction) for h in v))


def shift_edge(e, direction: str):
    return make_edge(*(shift(h, direction) for h in e))


def make_edge(g, h):
    """Canonical edge: sorted pair of adjacent hexagons."""
    if not hex_adjacent(g, h):
        raise ValueError(f"hexagons {g}, {h} are not adjacent")
    return (g, h) if g <= h else (h, g)


def make_vertex(h1, h2, h3):
    """Canonical vertex: sorted triple of mutually adjacent hexagons."""
    triple = tuple(sorted((h1, h2, h3)))
    if not (
        hex_adjacent(triple[0], triple[1])
        and hex_adjacent(triple[0], triple[2])
        and hex_adjacent(triple[1], triple[2])
    ):
        raise ValueError(f"{triple} is not a triangular face")
    return triple


def vertices_of_hexagon(h):
    """The six vertices bordering hexagon h, in cyclic order."""
    nbrs = hex_neighbors(h)
    return [make_vertex(h, nbrs[i], nbrs[(i + 1) % 6]) for i in range(6)]


def edges_of_hexagon(h):
    """The six edges bordering hexagon h (its trivial loop), cyclic order."""
    return [make_edge(h, w) for w in hex_neighbors(h)]


def edge_endpoints(e):
    """The two vertices of the hexagonal lattice joined by edge e."""
    g, h = e
    s = (g[0] + h[0], g[1] + h[1])
    # The common neighbors w, w' of two adjacent hexagons satisfy w + w' = g + h.
    common = [w for w in hex_neighbors(g) if hex_adjacent(w, h)]
    w1 = common[0]
    w2 = (s[0] - w1[0], s[1] - w1[1])
    return make_vertex(g, h, w1), make_vertex(g, h, w2)


def vertex_neighbors(v):
    """The three neighboring vertices (hexagonal lattice is 3-regular)."""
    out = []
    for i in range(3):
        pair = [v[j] for j in range(3) if j != i]
        mirror = (pair[0][0] + pair[1][0] - v[i][0], pair[0][1] + pair[1][1] - v[i][1])
        out.append(make_vertex(pair[0], pair[1], mirror))
    return out


def vertex_edges(v):
    """The three edges incident to vertex v (pairs of v's hexagons)."""
    return [
        make_edge(v[0], v[1]),
        make_edge(v[0], v[2]),
        make_edge(v[1], v[2]),
    ]


def vertex_position(v):
    xs = [hex_position(h) for h in v]
    return (sum(p[0] for p in xs) / 3.0, sum(p[1] for p in xs) / 3.0)


def edge_between(u, v):
    """The edge joining two adjacent vertices: the shared hexagon pair."""
    shared = tuple(sorted(set(u) & set(v)))
    if len(shared) != 2:
        raise ValueError(f"vertices {u}, {v} are not adjacent")
    return shared


def vertex_borders(v, h) -> bool:
    return h in v


def class_hexagon_of_vertex(v, c: int):
    """The unique hexagon of color c among the triple v."""
    for h in v:
        if hex_color(h) == c:
            return h
    raise ValueError(f"vertex {v} borders no color-{c} hexagon")
