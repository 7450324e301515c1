import math

import numpy as np
import pytest

from spinloop.lattice import (
    flower_parallelogram_domain,
    single_hexagon_domain,
    triangle_domain,
)
from spinloop.loop_core import LoopConfig, validate, vertices_on_loops
from spinloop.loop_samplers import (
    FaceFlipChain,
    IsingInterfaceChain,
    delta_counts,
    face_flip_step,
    ising_interface_sample,
)
from spinloop.oracle import even_subgraph_masks, exact_loop, loop_count
from spinloop.stats import chi_squared_gof, make_rng


def mask_of(cfg: LoopConfig) -> int:
    return sum(1 << ei for ei in cfg.edge_ids)


class TestDeltaCounts:
    def test_empty_flip_creates_trivial_loop(self):
        dom = single_hexagon_domain()
        assert delta_counts(dom, set(), 0) == (6, 1)

    def test_full_flip_destroys_trivial_loop(self):
        dom = single_hexagon_domain()
        assert delta_counts(dom, set(range(6)), 0) == (-6, -1)

    def test_local_equals_global_recount(self):
        dom = flower_parallelogram_domain(3, 2)
        rng = make_rng(0)
        masks = None
        chain = FaceFlipChain(dom, 1.4, 0.6)
        chain.run(2000, rng)
        for _ in range(1000):
            chain.run(5, rng)
            hid = int(rng.integers(len(dom.hexagons)))
            present = set(chain.present)
            d_o, d_l = delta_counts(dom, present, hid)
            before = loop_count(dom, sum(1 << e for e in present))
            flipped = present ^ set(dom.hexagon_edge_ids[hid])
            after = loop_count(dom, sum(1 << e for e in flipped))
            assert d_l == after - before
            assert d_o == len(flipped) - len(present)


class TestFaceFlip:
    def test_involution(self):
        dom = triangle_domain()
        rng = make_rng(1)
        chain = FaceFlipChain(dom, 1.0, 1.0)
        chain.run(100, rng)
        start = set(chain.present)
        chain.present ^= chain._face_sets[1]
        chain.present ^= chain._face_sets[1]
        assert chain.present == start

    def test_functional_step_returns_valid_config(self):
        dom = triangle_domain()
        rng = make_rng(2)
        cfg = LoopConfig.empty(dom)
        for _ in range(100):
            cfg, _ = face_flip_step(cfg, dom, 1.4, 0.6, rng)
        cfg._check_even()

    def test_acceptance_probability_from_empty(self):
        # accept probability of the first flip is min(1, x^6 n)
        dom = single_hexagon_domain()
        n, x = 2.0, 0.5
        rng = make_rng(3)
        hits = 0
        trials = 40000
        for _ in range(trials):
            chain = FaceFlipChain(dom, n, x)
            if chain.step(rng):
                hits += 1
        p = n * x**6
        se = math.sqrt(p * (1 - p) / trials)
        assert abs(hits / trials - p) < 4 * se

    def test_ergodic_reaches_every_configuration(self):
        dom = triangle_domain()
        rng = make_rng(4)
        chain = FaceFlipChain(dom, 1.4, 0.6)
        seen = set()
        target = set(even_subgraph_masks(dom))
        for _ in range(20000):
            chain.step(rng)
            seen.add(sum(1 << e for e in chain.present))
            if seen == target:
                break
        assert seen == target

    def test_stationarity_grid(self):
        # detailed balance against enumeration across an (n, x) grid
        dom = triangle_domain()
        table_masks = list(even_subgraph_masks(dom))
        for n in (0.5, 1.0, 1.4, 8.0):
            for x in (0.2, 0.6, 2.0):
                probs = {}
                logs = []
                for m in table_masks:
                    logs.append(m.bit_count() * math.log(x) + loop_count(dom, m) * math.log(n))
                mx = max(logs)
                ws = [math.exp(v - mx) for v in logs]
                z = sum(ws)
                probs = {m: w / z for m, w in zip(table_masks, ws)}
                rng = make_rng(int(n * 100 + x * 10))
                chain = FaceFlipChain(dom, n, x)
                chain.run(2000, rng)
                counts = {}
                # thin well past the mixing time so chi-square counts are
                # effectively independent draws
                for _ in range(4000):
                    chain.run(100, rng)
                    m = sum(1 << e for e in chain.present)
                    counts[m] = counts.get(m, 0) + 1
                stat, dof, p = chi_squared_gof(counts, probs, min_expected=10)
                assert p > 0.001, f"(n={n}, x={x}): chi2={stat:.1f} dof={dof} p={p:.5f}"

    def test_chi_squared_at_spec_point(self):
        # n = 1.4, x = 0.6 on the 3-hexagon domain, 1e7 proposals
        dom = triangle_domain()
        n, x = 1.4, 0.6
        table = exact_loop(dom, n, x)
        rng = make_rng(20240802)
        chain = FaceFlipChain(dom, n, x)
        chain.run(10000, rng)
        counts = {}
        seen = []

        def obs(step, ch):
            m = sum(1 << e for e in ch.present)
            counts[m] = counts.get(m, 0) + 1

        chain.run(10_000_000, rng, observer=obs, observe_every=50)
        stat, dof, p = chi_squared_gof(counts, table.distribution, min_expected=10)
        assert p > 0.01, f"chi2={stat:.1f} dof={dof} p={p:.5f}"

    def test_x_infinity_rejects_edge_losses(self):
        dom = single_hexagon_domain()
        rng = make_rng(6)
        chain = FaceFlipChain(dom, 2.0, math.inf)
        accepted_first = chain.step(rng)   # empty -> full is edge-gaining
        assert accepted_first
        for _ in range(50):
            assert not chain.step(rng)     # full -> empty loses edges
        assert len(chain.present) == 6


class TestIsingInterface:
    def test_small_x_empty_dominates(self):
        dom = triangle_domain()
        rng = make_rng(7)
        empties = 0
        for _ in range(50):
            cfg = ising_interface_sample(dom, x=0.02, rng=rng, sweeps=30)
            empties += cfg.o == 0
        assert empties >= 45

    def test_marginal_matches_enumeration(self):
        dom = triangle_domain()
        x = 0.6
        table = exact_loop(dom, n=1.0, x=x)
        rng = make_rng(8)
        chain = IsingInterfaceChain(dom, x)
        for _ in range(200):
            chain.sweep(rng)
        counts = {}
        for _ in range(40000):
            chain.sweep(rng)
            m = sum(1 << e for e in chain.wall_mask())
            counts[m] = counts.get(m, 0) + 1
        stat, dof, p = chi_squared_gof(counts, table.distribution, min_expected=10)
        assert p > 0.01, f"chi2={stat:.1f} dof={dof} p={p:.4f}"

    def test_x_one_is_uniform_percolation(self):
        # x = 1: iid fair spins; the wall law is uniform over configurations
        dom = triangle_domain()
        table = exact_loop(dom, n=1.0, x=1.0)
        vals = set(table.distribution.values())
        assert max(vals) - min(vals) < 1e-12
        rng = make_rng(9)
        chain = IsingInterfaceChain(dom, 1.0)
        counts = {}
        for _ in range(30000):
            chain.sweep(rng)
            m = sum(1 << e for e in chain.wall_mask())
            counts[m] = counts.get(m, 0) + 1
        stat, dof, p = chi_squared_gof(counts, table.distribution, min_expected=10)
        assert p > 0.01

    def test_walls_are_valid_loop_configs(self):
        dom = flower_parallelogram_domain(2, 2)
        rng = make_rng(10)
        chain = IsingInterfaceChain(dom, 0.8)
        for _ in range(50):
            chain.sweep(rng)
            chain.config()._check_even()


class TestFkgSmoke:
    def test_lattice_condition_and_positive_correlations(self):
        # spin representation of the loop model: FKG regime n >= 1, n x^2 <= 1
        dom = triangle_domain()
        hex_count = len(dom.hexagons)
        for n, x in [(1.0, 0.9), (1.5, 0.8), (4.0, 0.5)]:
            assert n >= 1 and n * x * x <= 1
            weights = {}
            for bits in range(1 << hex_count):
                spins = [1 if (bits >> i) & 1 else -1 for i in range(hex_count)]
                chain = IsingInterfaceChain(dom, x)
                chain.spins = spins
                mask = sum(1 << e for e in chain.wall_mask())
                o = mask.bit_count()
                loops = loop_count(dom, mask)
                weights[bits] = x**o * n**loops
            # FKG lattice condition on the spin field
            for a in range(1 << hex_count):
                for b in range(1 << hex_count):
                    up, down = a | b, a & b
                    lhs = weights[up] * weights[down]
                    rhs = weights[a] * weights[b]
                    assert lhs >= rhs - 1e-12
            # two-spin correlations non-negative
            z = sum(weights.values())
            for i in range(hex_count):
                for j in range(i + 1, hex_count):
                    corr = sum(
                        w
                        * (1 if (bits >> i) & 1 else -1)
                        * (1 if (bits >> j) & 1 else -1)
                        for bits, w in weights.items()
                    ) / z
                    assert corr >= -1e-12


class TestXInfinityCompound:
    def test_optimal_set_irreducibility_by_enumeration(self):
        # enumerate the optimally-packed configurations of small domains and
        # check which move sets connect them at x = infinity (edge-count
        # conserving dynamics); compound pair moves restore connectivity
        # whenever single flips alone do not
        from spinloop.lattice import flower_parallelogram_domain
        from spinloop.lattice.hexgrid import hex_adjacent

        for size in [(2, 1), (2, 2)]:
            dom = flower_parallelogram_domain(*size)
            masks = list(even_subgraph_masks(dom))
            o_max = max(m.bit_count() for m in masks)
            optimal = [m for m in masks if m.bit_count() == o_max]
            faces = [sum(1 << e for e in f) for f in dom.hexagon_edge_ids]
            pair_moves = [
                faces[i] ^ faces[j]
                for i in range(len(faces))
                for j in range(i + 1, len(faces))
                if hex_adjacent(dom.hexagons[i], dom.hexagons[j])
            ]
            moves = faces + pair_moves
            # BFS over the optimal set using edge-count-preserving moves
            optset = set(optimal)
            seen = {optimal[0]}
            stack = [optimal[0]]
            while stack:
                cur = stack.pop()
                for mv in moves:
                    nxt = cur ^ mv
                    if nxt in optset and nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            assert seen == optset, f"{size}: optimal set not connected"

    def test_compound_chain_preserves_stationarity(self):
        # detailed balance of the mixed single/pair proposal chain against
        # enumeration at finite parameters
        dom = triangle_domain()
        n, x = 1.4, 0.6
        table = exact_loop(dom, n, x)
        rng = make_rng(4242)
        chain = FaceFlipChain(dom, n, x, compound_moves=True)
        chain.run(2000, rng)
        counts = {}
        for _ in range(4000):
            chain.run(100, rng)
            m = sum(1 << e for e in chain.present)
            counts[m] = counts.get(m, 0) + 1
        stat, dof, p = chi_squared_gof(counts, table.distribution, min_expected=10)
        assert p > 0.001, f"chi2={stat:.1f} dof={dof} p={p:.5f}"

    def test_compound_chain_stays_optimal_at_x_infinity(self):
        import math as _math

        dom = flower_parallelogram_domain(2, 2)
        rng = make_rng(777)
        chain = FaceFlipChain(dom, 2.0, _math.inf,
                              start=LoopConfig.ground_state(dom, 0),
                              compound_moves=True)
        o_start = len(chain.present)
        for _ in range(2000):
            chain.step(rng)
            assert len(chain.present) >= o_start  # never loses edges
