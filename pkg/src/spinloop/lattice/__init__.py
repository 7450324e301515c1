from .torus import TorusLattice, box_adjacent
from .hexgrid import (
    hex_color,
    hex_neighbors,
    hex_position,
    shift,
    shift_down,
    shift_up,
    make_edge,
    make_vertex,
    edge_endpoints,
    edges_of_hexagon,
    vertices_of_hexagon,
    vertex_neighbors,
    vertex_edges,
    is_valid_hexagon,
)
from .circuits import (
    Circuit,
    HexDomain,
    circuit_interior,
    enclosing_circuit,
    flower_parallelogram_domain,
    single_hexagon_domain,
    triangle_domain,
)

__all__ = [
    "TorusLattice",
    "box_adjacent",
    "hex_color",
    "hex_neighbors",
    "hex_position",
    "shift",
    "shift_down",
    "shift_up",
    "make_edge",
    "make_vertex",
    "edge_endpoints",
    "edges_of_hexagon",
    "vertices_of_hexagon",
    "vertex_neighbors",
    "vertex_edges",
    "is_valid_hexagon",
    "Circuit",
    "HexDomain",
    "circuit_interior",
    "enclosing_circuit",
    "flower_parallelogram_domain",
    "single_hexagon_domain",
    "triangle_domain",
]
