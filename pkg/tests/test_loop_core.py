import math

import numpy as np
import pytest

from spinloop.lattice import (
    HexDomain,
    flower_parallelogram_domain,
    single_hexagon_domain,
    triangle_domain,
)
from spinloop.lattice.hexgrid import edges_of_hexagon, hex_color, vertices_of_hexagon
from spinloop.loop_core import (
    LoopConfig,
    OddVertexError,
    connectivity,
    critical_x,
    fully_packed_witness,
    ground_vertices,
    hard_hexagon_lambda_c,
    loop_weight,
    loops_surrounding,
    max_edges,
    packing_key,
    validate,
    vertices_on_loops,
)
from spinloop.oracle import even_subgraph_masks, exact_loop
from spinloop.stats import make_rng


@pytest.fixture
def hex_dom():
    return single_hexagon_domain()


@pytest.fixture
def tri_dom():
    return triangle_domain()


class TestValidate:
    def test_empty_config(self, hex_dom):
        cfg = validate([], hex_dom)
        assert cfg.o == 0 and cfg.n_loops == 0

    def test_trivial_loop(self, hex_dom):
        cfg = validate(edges_of_hexagon((0, 0)), hex_dom)
        assert cfg.o == 6 and cfg.n_loops == 1

    def test_five_edges_invalid(self, hex_dom):
        edges = edges_of_hexagon((0, 0))[:5]
        with pytest.raises(OddVertexError) as err:
            validate(edges, hex_dom)
        assert err.value.vertex in hex_dom.vertices

    def test_foreign_edge_rejected(self, hex_dom):
        with pytest.raises(ValueError):
            validate(edges_of_hexagon((5, 5)), hex_dom)


class TestWeights:
    def test_empty_weight_zero(self, hex_dom):
        assert loop_weight(LoopConfig.empty(hex_dom), n=2.0, x=0.5) == 0.0

    def test_trivial_loop_weight(self, hex_dom):
        cfg = validate(edges_of_hexagon((0, 0)), hex_dom)
        expected = 6 * math.log(0.5) + math.log(2.0)
        assert loop_weight(cfg, n=2.0, x=0.5) == pytest.approx(expected, abs=1e-12)

    def test_normalized_weights_sum_to_one(self, tri_dom):
        table = exact_loop(tri_dom, n=1.4, x=0.6)
        assert sum(table.distribution.values()) == pytest.approx(1.0, abs=1e-12)

    def test_packing_key_orders_by_edges_then_loops(self, tri_dom):
        cfgs = [LoopConfig(tri_dom, _mask_ids(m)) for m in even_subgraph_masks(tri_dom)]
        best = max(cfgs, key=lambda c: packing_key(c, n=2.0))
        assert best.o == max_edges(tri_dom)


def _mask_ids(mask):
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


class TestLoopStructure:
    def test_loop_count_bounds(self, tri_dom):
        for mask in even_subgraph_masks(tri_dom):
            cfg = LoopConfig(tri_dom, _mask_ids(mask))
            assert cfg.o <= tri_dom.n_edges
            assert cfg.n_loops <= cfg.o / 6

    def test_cycle_space_closure(self, tri_dom):
        rng = make_rng(1)
        masks = list(even_subgraph_masks(tri_dom))
        for _ in range(30):
            mask = masks[int(rng.integers(len(masks)))]
            cfg = LoopConfig(tri_dom, _mask_ids(mask))
            hid = int(rng.integers(len(tri_dom.hexagons)))
            flipped = cfg.flip_hexagon(hid)  # validity is checked on build
            assert (flipped.o - cfg.o) % 2 == 0

    def test_json_roundtrip(self, tri_dom):
        cfg = validate(edges_of_hexagon((0, 0)), tri_dom)
        data = cfg.to_json()
        back = LoopConfig.from_json(data)
        assert back.edge_ids == cfg.edge_ids
        assert data["model"] == "loop"


class TestSurrounding:
    def test_trivial_loop_surrounds_own_vertices(self, hex_dom):
        cfg = validate(edges_of_hexagon((0, 0)), hex_dom)
        for u in vertices_of_hexagon((0, 0)):
            found = loops_surrounding(cfg, u)
            assert len(found) == 1 and found[0][1] == 6

    def test_far_vertex_not_surrounded(self):
        dom = flower_parallelogram_domain(3, 1)
        z_far = dom.hexagons[-1] if hex_color(dom.hexagons[-1]) == 0 else (4, 0)
        cfg = LoopConfig(dom, dom.hexagon_edge_ids[dom.hex_index[(0, 0)]])
        far_vertex = None
        for v in dom.vertices:
            if (4, 0) in v:
                far_vertex = v
                break
        assert loops_surrounding(cfg, far_vertex) == []

    def test_nested_loops(self):
        # a trivial loop at the center plus the 18-edge boundary of its
        # 7-hexagon neighborhood: the center vertices are surrounded by both
        dom = flower_parallelogram_domain(3, 3)
        center = (3, 3)
        assert hex_color(center) == 0 and center in dom.hex_index
        from spinloop.lattice.hexgrid import hex_neighbors

        inner = set(dom.hexagon_edge_ids[dom.hex_index[center]])
        big = set()
        for h in [center] + hex_neighbors(center):
            big ^= set(dom.hexagon_edge_ids[dom.hex_index[h]])
        cfg = LoopConfig(dom, inner | big)
        assert cfg.n_loops == 2
        u = vertices_of_hexagon(center)[0]
        found = loops_surrounding(cfg, u)
        assert sorted(length for _, length in found) == [6, 18]


class TestConnectivity:
    def test_isolated_vertex_not_connected(self, tri_dom):
        cfg = validate(edges_of_hexagon((0, 0)), tri_dom)
        u = vertices_of_hexagon((0, 0))[0]
        isolated = next(
            v for v in tri_dom.vertices
            if tri_dom.vertex_index[v] not in vertices_on_loops(cfg)
        )
        assert not connectivity(cfg, u, isolated, mode="loop")

    def test_same_trivial_loop_connected_both_modes(self):
        dom = flower_parallelogram_domain(2, 2)
        z = (0, 0)
        cfg = LoopConfig(dom, dom.hexagon_edge_ids[dom.hex_index[z]])
        u, v = vertices_of_hexagon(z)[0], vertices_of_hexagon(z)[3]
        assert connectivity(cfg, u, v, mode="loop")
        assert connectivity(cfg, u, v, mode="ground", c=0)

    def test_ground_state_connects_everything_to_boundary(self):
        dom = flower_parallelogram_domain(6, 6)
        cfg = LoopConfig.ground_state(dom, 0)
        assert len(vertices_on_loops(cfg)) == dom.n_vertices  # fully packed
        boundary = dom.vertices[dom.boundary_vertex_ids[0]]
        for i in range(0, dom.n_vertices, 7):
            assert connectivity(cfg, dom.vertices[i], boundary, mode="ground", c=0)


class TestEnumeration:
    def test_single_hexagon_two_configs(self, hex_dom):
        assert len(list(even_subgraph_masks(hex_dom))) == 2

    def test_single_hexagon_partition_function(self, hex_dom):
        n, x = 2.0, 0.5
        table = exact_loop(hex_dom, n, x)
        assert table.z == pytest.approx(1 + n * x**6, rel=1e-12)


class TestPackedAndConstants:
    def test_fully_packed_witness_type0(self):
        dom = flower_parallelogram_domain(2, 2)
        cfg = fully_packed_witness(dom)
        assert cfg is not None
        assert cfg.o == dom.n_vertices  # degree 2 everywhere

    def test_max_edges_witness_matches_enumeration(self):
        dom = flower_parallelogram_domain(2, 1)
        by_witness = max_edges(dom)
        by_search = max(m.bit_count() for m in even_subgraph_masks(dom))
        assert by_witness == by_search == dom.n_vertices

    def test_max_edges_exhaustive_on_triangle(self, tri_dom):
        assert fully_packed_witness(tri_dom) is None  # 13 vertices: no packing
        assert max_edges(tri_dom) == 12

    def test_critical_x_values(self):
        assert critical_x(1.0) == pytest.approx(1 / math.sqrt(3), abs=1e-12)
        assert critical_x(1.0) == pytest.approx(0.57735, abs=1e-5)
        assert critical_x(0.0) == pytest.approx(0.54120, abs=1e-5)
        assert critical_x(2.0) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        with pytest.raises(ValueError):
            critical_x(2.5)

    def test_hard_hexagon_lambda_c(self):
        lam = hard_hexagon_lambda_c()
        assert lam == pytest.approx(11.09017, abs=1e-5)
        assert lam == pytest.approx((2 * math.cos(math.pi / 5)) ** 5, abs=1e-10)


def test_ground_vertices_are_flower_vertices():
    dom = flower_parallelogram_domain(2, 2)
    cfg = LoopConfig.ground_state(dom, 0)
    assert ground_vertices(cfg, 0) == set(range(dom.n_vertices))
    empty = LoopConfig.empty(dom)
    assert ground_vertices(empty, 0) == set()
