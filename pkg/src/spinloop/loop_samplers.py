"""Glauber dynamics for the loop O(n) model and the n=1 interface sampler.

The move set is the symmetric difference with a single hexagonal face:
faces generate the cycle space of the domain, so the chain is irreducible on
even configurations at finite x, and the loop-count change is computable by
retraversing only the loops that touch the flipped hexagon.  At x = infinity
edge-losing moves are rejected; irreducibility of that restricted chain on
the optimally-packed set is checked by enumeration on small domains only.
"""

from __future__ import annotations

import math

import numpy as np

from .lattice.circuits import HexDomain
from .loop_core import LoopConfig


def _affected_loop_count(domain: HexDomain, present: set, vertex_ids) -> int:
    """Number of distinct loops through any of the given vertices."""
    vertex_edges = domain.vertex_edge_ids
    edge_verts = domain.edge_vertex_ids
    seen_edges = set()
    count = 0
    for v in vertex_ids:
        start = None
        for ei in vertex_edges[v]:
            if ei in present and ei not in seen_edges:
                start = ei
                break
        if start is None:
            continue
        count += 1
        seen_edges.add(start)
        a, b = edge_verts[start]
        cur_edge, cur_vertex = start, b
        while cur_vertex != a:
            for ei in vertex_edges[cur_vertex]:
                if ei != cur_edge and ei in present:
                    break
            seen_edges.add(ei)
            x, y = edge_verts[ei]
            cur_vertex = y if x == cur_vertex else x
            cur_edge = ei
    return count


def delta_counts(domain: HexDomain, present: set, hex_id: int):
    """(delta o, delta L) for flipping one hexagonal face.

    delta o is edge-set arithmetic; delta L retraverses only the loops
    passing through the hexagon's six corners (before and after), which
    equals a global recount.
    """
    face = domain.hexagon_edge_ids[hex_id]
    corners = domain.hexagon_vertex_ids[hex_id]
    n_present = sum(1 for ei in face if ei in present)
    d_o = 6 - 2 * n_present
    before = _affected_loop_count(domain, present, corners)
    after_set = set(present)
    after_set ^= set(face)
    after = _affected_loop_count(domain, after_set, corners)
    return d_o, after - before


class FaceFlipChain:
    """Glauber chain on loop configurations of a domain.

    Boundary hexagons never enter the proposal set (every proposable hexagon
    is fully interior), which enforces vacant boundary conditions.
    """

    def __init__(self, domain: HexDomain, n: float, x: float,
                 start: LoopConfig | None = None, compound_moves: bool = False):
        """compound_moves additionally proposes simultaneous flips of two
        adjacent interior hexagons, which can restore irreducibility of the
        edge-count-conserving chain at x = infinity (verified by enumeration
        on small domains only)."""
        if n <= 0:
            raise ValueError("need n > 0")
        if x <= 0:
            raise ValueError("need x > 0 (math.inf allowed)")
        self.domain = domain
        self.n = n
        self.x = x
        self.present = set(start.edge_ids) if start is not None else set()
        self.log_n = math.log(n)
        self.log_x = math.log(x) if not math.isinf(x) else None
        self.steps = 0
        self.accepted = 0
        # per-hexagon caches for the hot loop
        self._faces = domain.hexagon_edge_ids
        self._face_sets = [frozenset(f) for f in domain.hexagon_edge_ids]
        self._corners = domain.hexagon_vertex_ids
        self._vertex_edges = domain.vertex_edge_ids
        self.compound_moves = compound_moves
        if compound_moves:
            from .lattice.hexgrid import hex_adjacent

            self._pairs = [
                (i, j)
                for i in range(len(domain.hexagons))
                for j in range(i + 1, len(domain.hexagons))
                if hex_adjacent(domain.hexagons[i], domain.hexagons[j])
            ]

    def config(self) -> LoopConfig:
        return LoopConfig(self.domain, self.present)

    def _delta(self, hex_id: int):
        present = self.present
        face = self._faces[hex_id]
        corners = self._corners[hex_id]
        n_present = 0
        for ei in face:
            if ei in present:
                n_present += 1
        d_o = 6 - 2 * n_present
        # fast path: isolated face flip creates/destroys one trivial loop
        vertex_edges = self._vertex_edges
        outside = 0
        for v in corners:
            for ei in vertex_edges[v]:
                if ei in present and ei not in self._face_sets[hex_id]:
                    outside += 1
        if outside == 0:
            if n_present == 0:
                return 6, 1
            if n_present == 6:
                return -6, -1
        # general case: retraverse affected loops, flipping in place
        before = _affected_loop_count(self.domain, present, corners)
        face_set = self._face_sets[hex_id]
        present ^= face_set
        after = _affected_loop_count(self.domain, present, corners)
        present ^= face_set
        return d_o, after - before

    def step_at(self, hex_id: int, u: float) -> bool:
        self.steps += 1
        d_o, d_l = self._delta(hex_id)
        if self.log_x is None:
            if d_o < 0:
                return False
            log_ratio = d_l * self.log_n
        else:
            log_ratio = d_o * self.log_x + d_l * self.log_n
        if log_ratio < 0 and u >= math.exp(log_ratio):
            return False
        self.present ^= self._face_sets[hex_id]
        self.accepted += 1
        return True

    def step_pair(self, pair_index: int, u: float) -> bool:
        """Compound move: flip two adjacent faces simultaneously."""
        self.steps += 1
        i, j = self._pairs[pair_index]
        combined = self._face_sets[i] ^ self._face_sets[j]
        present = self.present
        d_o = sum(-1 if e in present else 1 for e in combined)
        touched = set(self._corners[i]) | set(self._corners[j])
        before = _affected_loop_count(self.domain, present, touched)
        present ^= combined
        after = _affected_loop_count(self.domain, present, touched)
        present ^= combined
        d_l = after - before
        if self.log_x is None:
            if d_o < 0:
                return False
            log_ratio = d_l * self.log_n
        else:
            log_ratio = d_o * self.log_x + d_l * self.log_n
        if log_ratio < 0 and u >= math.exp(log_ratio):
            return False
        self.present ^= combined
        self.accepted += 1
        return True

    def step(self, rng: np.random.Generator) -> bool:
        """One proposal at a uniform interior hexagon; returns acceptance.

        With compound moves enabled, half the proposals are adjacent-pair
        flips (the proposal mixture is fixed, so reversibility holds)."""
        if self.compound_moves and self._pairs and rng.random() < 0.5:
            return self.step_pair(int(rng.integers(len(self._pairs))),
                                  float(rng.random()))
        hex_id = int(rng.integers(len(self.domain.hexagons)))
        return self.step_at(hex_id, float(rng.random()))

    def run(self, steps: int, rng: np.random.Generator, observer=None,
            observe_every: int = 0):
        """Drive the chain; observer(step_index, chain) at the given cadence."""
        if self.compound_moves:
            for done in range(1, steps + 1):
                self.step(rng)
                if observe_every and done % observe_every == 0 and observer:
                    observer(done, self)
            return
        n_hex = len(self.domain.hexagons)
        done = 0
        while done < steps:
            block = min(steps - done, 16384)
            hex_ids = rng.integers(n_hex, size=block).tolist()
            us = rng.random(block).tolist()
            for i in range(block):
                self.step_at(hex_ids[i], us[i])
                done += 1
                if observe_every and done % observe_every == 0 and observer:
                    observer(done, self)


def face_flip_step(cfg: LoopConfig, domain: HexDomain, n: float, x: float,
                   rng: np.random.Generator):
    """Single-step functional interface: returns (new config, accepted)."""
    chain = FaceFlipChain(domain, n, x, start=cfg)
    accepted = chain.step(rng)
    return chain.config(), accepted


class IsingInterfaceChain:
    """+-1 spins on interior hexagons with weight x^(#domain walls).

    Domain walls (edges between unequal spins, exterior fixed to +1) are in
    bijection with loop configurations, so the wall marginal is the loop
    O(1) law at edge weight x; x = exp(-2 beta) matches the triangular-
    lattice Ising model at inverse temperature beta.
    """

    def __init__(self, domain: HexDomain, x: float):
        if x <= 0 or math.isinf(x):
            raise ValueError("need 0 < x < inf")
        self.domain = domain
        self.x = x
        self.log_x = math.log(x)
        self.spins = [1] * len(domain.hexagons)
        # hexagons bordering each edge; non-interior ones are fixed +1 (id -1)
        self._edge_hexes = []
        for (g, h) in domain.edges:
            self._edge_hexes.append(
                (domain.hex_index.get(g, -1), domain.hex_index.get(h, -1))
            )

    def _spin_of(self, hid: int) -> int:
        return 1 if hid < 0 else self.spins[hid]

    def wall_mask(self) -> frozenset:
        out = set()
        for ei, (g, h) in enumerate(self._edge_hexes):
            if self._spin_of(g) != self._spin_of(h):
                out.add(ei)
        return frozenset(out)

    def sweep(self, rng: np.random.Generator):
        """Heat-bath sweep: each hexagon is resampled from its conditional.

        (Metropolis would flip deterministically at x = 1, where walls are
        invariant under the global flip, and the chain would freeze.)
        """
        dom = self.domain
        order = rng.permutation(len(dom.hexagons))
        unif = rng.random(len(dom.hexagons))
        for t, hid in enumerate(order.tolist()):
            s = self.spins[hid]
            d_walls = 0
            for ei in dom.hexagon_edge_ids[hid]:
                g, h = self._edge_hexes[ei]
                other = g if h == hid else h
                if self._spin_of(other) == s:
                    d_walls += 1  # flipping creates a wall
                else:
                    d_walls -= 1
            ratio = math.exp(d_walls * self.log_x)  # w(flipped) / w(current)
            if unif[t] < ratio / (1.0 + ratio):
                self.spins[hid] = -s

    def config(self) -> LoopConfig:
        return LoopConfig(self.domain, self.wall_mask())


def ising_interface_sample(domain: HexDomain, x: float, rng: np.random.Generator,
                           sweeps: int = 200) -> LoopConfig:
    """Sample the loop O(1) model at weight x through the spin interface chain."""
    chain = IsingInterfaceChain(domain, x)
    # random initial spins to shorten burn-in
    for hid in range(len(domain.hexagons)):
        if rng.random() < 0.5:
            chain.spins[hid] = -1
    for _ in range(sweeps):
        chain.sweep(rng)
    return chain.config()
