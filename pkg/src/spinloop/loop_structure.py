"""Ground states, flowers, gardens, clusters, the repair map and its
exact counting identities.

A class-c garden is determined by a circuit avoiding color c; such circuits
are in bijection with finite simply-connected sets S of class-c hexagons
(under the class-c sublattice adjacency), their interiors being the union of
the six-vertex cells of S, and their edge sets all edges incident to those
cells.  The garden condition constrains only the sublattice boundary of S:
every boundary class-c hexagon must carry a trivial loop.  Maximal gardens
are therefore computed by shrinking the full class-c interior to the largest
subset whose boundary is all flowers (a monotone fixpoint), splitting into
components and filling holes.  Clusters are the inclusion-maximal gardens
across the three classes.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

from .lattice.circuits import Circuit, HexDomain, enclosing_circuit, window_vertices
from .lattice.hexgrid import (
    edge_endpoints,
    hex_color,
    shift_edge,
    vertex_edges,
    vertex_neighbors,
    vertices_of_hexagon,
)
from .loop_core import LoopConfig

# class-c sublattice steps (same for every class)
SUBLATTICE_OFFSETS = ((2, 0), (-2, 0), (1, 3), (-1, -3), (1, -3), (-1, 3))


def _sub_neighbors(z):
    return [(z[0] + da, z[1] + db) for da, db in SUBLATTICE_OFFSETS]


def ground_edges(edge_set, c: int):
    """Subset of an edge set lying in the class-c ground state (an edge is a
    ground edge iff one of its two hexagons has color c)."""
    return {e for e in edge_set if hex_color(e[0]) == c or hex_color(e[1]) == c}


def count_loops_of_edges(edges) -> int:
    """Loop count of an arbitrary even edge set given as hexagon-pair tuples."""
    incident = {}
    for e in edges:
        u1, u2 = edge_endpoints(e)
        incident.setdefault(u1, []).append(e)
        incident.setdefault(u2, []).append(e)
    for v, es in incident.items():
        if len(es) % 2 == 1:
            raise ValueError(f"odd degree at {v}")
    seen = set()
    loops = 0
    for e in edges:
        if e in seen:
            continue
        loops += 1
        seen.add(e)
        first, cur = edge_endpoints(e)
        cur_edge = e
        while cur != first:
            nxt = next(x for x in incident[cur] if x != cur_edge)
            seen.add(nxt)
            a, b = edge_endpoints(nxt)
            cur = b if a == cur else a
            cur_edge = nxt
    return loops


@dataclass
class Garden:
    c: int
    hexagons: frozenset          # the set S of class-c hexagons
    cells: frozenset             # union of their six-vertex cells
    edges: frozenset             # all edges incident to the cells

    def circuit(self) -> Circuit:
        return enclosing_circuit(self.cells)


@dataclass
class ClusterDecomposition:
    clusters: list                     # maximal gardens across classes
    universe: frozenset                # IntEdge(gamma) union gamma*
    by_class: dict = field(default_factory=dict)

    def class_edges(self, c: int) -> frozenset:
        out = set()
        for g in self.clusters:
            if g.c == c:
                out |= g.edges
        return frozenset(out)

    @property
    def e_bar(self) -> frozenset:
        """Edges in no cluster."""
        used = set()
        for g in self.clusters:
            used |= g.edges
        return frozenset(self.universe - used)


class _DomainContext:
    """Cached geometry for cluster analysis relative to one circuit."""

    def __init__(self, gamma: Circuit):
        self.gamma = gamma
        self.domain = HexDomain(gamma)
        dom = self.domain
        self.int_vertices = set(dom.vertices)
        self.universe = frozenset(set(dom.edges) | set(gamma.dual_edges()))
        self.cell_of = {}
        self.class_hexes = {0: set(), 1: set(), 2: set()}
        for h in dom.hexagons:
            self.class_hexes[hex_color(h)].add(h)
        # incident edges of each interior vertex within the universe
        self.incident = {
            v: [e for e in vertex_edges(v)] for v in dom.vertices
        }


_CONTEXT_CACHE: dict = {}


def _context(gamma: Circuit) -> _DomainContext:
    key = frozenset(gamma.dual_edges())
    ctx = _CONTEXT_CACHE.get(key)
    if ctx is None:
        ctx = _DomainContext(gamma)
        if len(_CONTEXT_CACHE) > 16:
            _CONTEXT_CACHE.clear()
        _CONTEXT_CACHE[key] = ctx
    return ctx


def _as_edge_set(omega, gamma: Circuit):
    if isinstance(omega, LoopConfig):
        edges = {omega.domain.edges[ei] for ei in omega.edge_ids}
    else:
        edges = {tuple(sorted(map(tuple, e))) for e in omega}
    star = set(gamma.dual_edges())
    if edges & star:
        raise ValueError("circuit is not vacant in the configuration")
    return edges


def _flowers(omega_edges, hexes):
    from .lattice.hexgrid import edges_of_hexagon

    out = set()
    for z in hexes:
        if all(e in omega_edges for e in edges_of_hexagon(z)):
            out.add(z)
    return out


def _fill_holes(component, available):
    """Add the finite complement pockets of a sublattice component."""
    if not component:
        return set(component)
    amin = min(z[0] for z in component) - 2
    amax = max(z[0] for z in component) + 2
    bmin = min(z[1] for z in component) - 6
    bmax = max(z[1] for z in component) + 6
    base = next(iter(component))

    def in_window(z):
        return amin <= z[0] <= amax and bmin <= z[1] <= bmax

    # window hexagons of the same sublattice as the component
    window = set()
    queue = deque([base])
    window.add(base)
    while queue:
        z = queue.popleft()
        for w in _sub_neighbors(z):
            if in_window(w) and w not in window:
                window.add(w)
                queue.append(w)
    outside = set()
    border = [z for z in window if not all(in_window(w) for w in _sub_neighbors(z))]
    queue = deque([z for z in border if z not in component])
    outside.update(queue)
    while queue:
        z = queue.popleft()
        for w in _sub_neighbors(z):
            if w in window and w not in outside and w not in component:
                outside.add(w)
                queue.append(w)
    filled = set(component)
    for z in window - outside - set(component):
        filled.add(z)
    return filled


def find_gardens(omega, gamma: Circuit, c: int):
    """Maximal class-c gardens of (omega intersect IntEdge gamma)."""
    ctx = _context(gamma)
    omega_edges = _as_edge_set(omega, gamma)
    universe_c = ctx.class_hexes[c]
    flowers = _flowers(omega_edges, universe_c)

    s = set(universe_c)
    # monotone shrink: drop non-flower hexagons on the sublattice boundary
    changed = True
    while changed:
        changed = False
        drop = [
            z for z in s
            if z not in flowers and any(w not in s for w in _sub_neighbors(z))
        ]
        if drop:
            s.difference_update(drop)
            changed = True

    # split into sublattice components, fill holes, build gardens
    gardens = []
    remaining = set(s)
    while remaining:
        seed = remaining.pop()
        comp = {seed}
        queue = deque([seed])
        while queue:
            z = queue.popleft()
            for w in _sub_neighbors(z):
                if w in remaining:
                    remaining.discard(w)
                    comp.add(w)
                    queue.append(w)
        comp = _fill_holes(comp, universe_c)
        cells = set()
        for z in comp:
            cells.update(vertices_of_hexagon(z))
        edges = set()
        for v in cells:
            edges.update(ctx.incident.get(v, vertex_edges(v)))
        if not edges <= ctx.universe:
            raise AssertionError("garden edges leak outside the circuit")
        gardens.append(Garden(c, frozenset(comp), frozenset(cells), frozenset(edges)))
    return gardens


def find_clusters(omega, gamma: Circuit) -> ClusterDecomposition:
    """Inclusion-maximal gardens of all three classes (the clusters)."""
    ctx = _context(gamma)
    all_gardens = []
    for c in range(3):
        all_gardens.extend(find_gardens(omega, gamma, c))
    keep = []
    for g in all_gardens:
        if not any(other is not g and g.edges < other.edges for other in all_gardens):
            keep.append(g)
    # drop duplicates by edge set, then check pairwise disjointness
    uniq = {}
    for g in keep:
        uniq.setdefault(g.edges, g)
    clusters = list(uniq.values())
    for i, a in enumerate(clusters):
        for b in clusters[i + 1 :]:
            if a.edges & b.edges:
                raise AssertionError(
                    f"overlapping maximal gardens (classes {a.c}, {b.c})"
                )
    decomp = ClusterDecomposition(clusters, ctx.universe)
    for c in range(3):
        decomp.by_class[c] = decomp.class_edges(c)
    return decomp


def boundary_deviation(omega, gamma: Circuit, decomposition=None) -> set:
    """V(omega, gamma): interior vertices whose three edges do not all lie in
    a single cluster of (omega intersect IntEdge gamma)."""
    ctx = _context(gamma)
    decomp = decomposition or find_clusters(omega, gamma)
    out = set()
    for v in ctx.int_vertices:
        es = ctx.incident[v]
        if not any(all(e in g.edges for e in es) for g in decomp.clusters):
            out.add(v)
    return out


def repair(omega, gamma: Circuit, decomposition=None):
    """The repair map: shift 1-clusters down, 2-clusters up, keep 0-clusters,
    overwrite the remaining (bad) region with the 0-phase ground state.

    Returns the repaired edge set (hexagon-pair tuples inside IntEdge gamma).
    """
    if not gamma.avoids_class(0):
        raise ValueError("repair needs a circuit avoiding the 0 class")
    ctx = _context(gamma)
    omega_edges = _as_edge_set(omega, gamma)
    decomp = decomposition or find_clusters(omega, gamma)
    e0 = decomp.by_class[0]
    e1 = decomp.by_class[1]
    e2 = decomp.by_class[2]
    e_bad = set(ctx.universe)
    e_bad -= e0
    e_bad -= {shift_edge(e, "down") for e in e1}
    e_bad -= {shift_edge(e, "up") for e in e2}

    part0 = omega_edges & e0
    part1 = {shift_edge(e, "down") for e in omega_edges & e1}
    part2 = {shift_edge(e, "up") for e in omega_edges & e2}
    ground_bad = ground_edges(e_bad, 0)
    pieces = [part0, part1 | part2, ground_bad]
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if pieces[i] & pieces[j]:
                raise AssertionError("repair pieces are not disjoint")
    return part0 | part1 | part2 | ground_bad


@dataclass
class RepairAudit:
    delta_o: int
    delta_l: int
    v_size: int
    bar_edges: int
    bar_loops: int

    def as_dict(self):
        return {
            "delta_o": self.delta_o,
            "delta_l": self.delta_l,
            "V": self.v_size,
            "omega_bar_edges": self.bar_edges,
            "omega_bar_loops": self.bar_loops,
        }


class RepairIdentityError(AssertionError):
    def __init__(self, message, omega_edges, gamma, audit):
        payload = {
            "circuit": [list(h) for h in gamma.hexagons],
            "omega": sorted([list(g), list(h)] for (g, h) in omega_edges),
            "audit": audit,
        }
        super().__init__(message + "\n" + json.dumps(payload))


def _decomposition_overlay(decomp) -> dict:
    return {
        f"class_{c}": sorted(
            sorted([list(g), list(h)] for (g, h) in garden.edges)
            for garden in decomp.clusters if garden.c == c
        )
        for c in range(3)
    }


def repair_identities(omega, gamma: Circuit) -> RepairAudit:
    """Verify the exact counting identities of the repair map and return the
    audited quantities; failures raise with a serialized counterexample
    carrying the full cluster decomposition overlay."""
    omega_edges = _as_edge_set(omega, gamma)
    decomp = find_clusters(omega, gamma)
    v_set = boundary_deviation(omega, gamma, decomp)
    repaired = repair(omega, gamma, decomp)
    star = set(gamma.dual_edges())
    if repaired & star or not repaired <= set(decomp.universe):
        raise RepairIdentityError(
            "repaired configuration leaves the domain", omega_edges, gamma, {}
        )
    bar = omega_edges & decomp.e_bar
    bar_loops = count_loops_of_edges(bar)
    delta_o = len(repaired) - len(omega_edges)
    delta_l = count_loops_of_edges(repaired) - count_loops_of_edges(omega_edges)
    audit = RepairAudit(delta_o, delta_l, len(v_set), len(bar), bar_loops).as_dict()

    def fail(msg):
        payload = dict(audit)
        payload["decomposition"] = _decomposition_overlay(decomp)
        raise RepairIdentityError(msg, omega_edges, gamma, payload)

    if len(v_set) % 6 != 0:
        fail("|V| is not divisible by 6")
    if delta_o != len(v_set) - len(bar):
        fail("delta o != |V| - |omega & Ebar|")
    if delta_l != len(v_set) // 6 - bar_loops:
        fail("delta L != |V|/6 - L(omega & Ebar)")
    if not (0 <= delta_o <= len(v_set)):
        fail("delta o outside [0, |V|]")
    if delta_l < len(v_set) / 15 + abs(delta_o) / 10 - 1e-9:
        fail("delta L < |V|/15 + |delta o|/10")
    return RepairAudit(delta_o, delta_l, len(v_set), len(bar), bar_loops)


def weight_gain_check(omega, gamma: Circuit, n: float, x: float) -> bool:
    """Check x^do n^dL >= (n min(x^6,1))^(|V|/15) in log space."""
    if n < 1 or n * min(x, 1e300) ** 6 < 1:
        raise ValueError("the bound is asserted for n >= 1 and n x^6 >= 1")
    audit = repair_identities(omega, gamma)
    log_x = 0.0 if math.isinf(x) else math.log(x)
    lhs = audit.delta_o * log_x + audit.delta_l * math.log(n)
    rhs = (audit.v_size / 15.0) * (math.log(n) + min(6.0 * log_x, 0.0))
    return lhs >= rhs - 1e-9


def find_breakup(omega, domain: HexDomain, u):
    """The breakup circuit of a vertex: the enclosing circuit of its component
    after removing everything ground(0)-connected to the boundary.

    Returns None when u belongs to the ground-connected sea.  The returned
    circuit is vacant, avoids class 0, and its interior boundary lies in
    V(omega, circuit).
    """
    if not domain.is_type(0):
        raise ValueError("the breakup is defined on type-0 domains")
    gamma = domain.circuit
    omega_edges = _as_edge_set(omega, gamma)
    flowers = _flowers(omega_edges, {h for h in domain.hexagons if hex_color(h) == 0})
    a_vertices = set()
    for z in flowers:
        a_vertices.update(vertices_of_hexagon(z))

    verts, _ = window_vertices(gamma.hexagons, extra=1)
    interior = set(domain.vertices)
    exterior = verts - interior
    b_candidate = a_vertices | exterior

    # infinite (window-border-touching) component of the candidate set
    seeds = [v for v in exterior]
    b_set = set()
    queue = deque()
    for v in seeds:
        if v not in b_set:
            b_set.add(v)
            queue.append(v)
    while queue:
        v = queue.popleft()
        for w in vertex_neighbors(v):
            if w in b_candidate and w not in b_set:
                b_set.add(w)
                queue.append(w)

    if u not in interior:
        raise ValueError("u must be a domain vertex")
    if u in b_set:
        return None
    comp = {u}
    queue = deque([u])
    while queue:
        v = queue.popleft()
        for w in vertex_neighbors(v):
            if w in verts and w not in b_set and w not in comp:
                comp.add(w)
                queue.append(w)
    circuit = enclosing_circuit(comp)
    if not circuit.avoids_class(0):
        raise AssertionError("breakup circuit touches the 0 class")
    if set(circuit.dual_edges()) & omega_edges:
        raise AssertionError("breakup circuit is not vacant")
    ctx = _context(circuit)
    omega_in = {e for e in omega_edges if e in ctx.universe}
    v_dev = boundary_deviation(omega_in, circuit)
    boundary = {
        ctx.domain.vertices[i] for i in ctx.domain.boundary_vertex_ids
    }
    if not boundary <= v_dev:
        raise AssertionError("interior boundary escapes V(omega, circuit)")
    return circuit


@dataclass
class MapCountingReport:
    p: float
    q: float
    pr_e: float
    pr_f: float
    bound: float
    holds: bool
    first_violation: object = None


def map_counting_check(probabilities: dict, event_e, event_f, t_map: dict,
                       p: float, q: float) -> MapCountingReport:
    """Verify Pr(E) <= (q/p) Pr(F) given a map T: E -> F with probability
    gain p and preimage multiplicity at most q.

    Reports the first hypothesis violation instead of silently proceeding.
    """
    event_e = set(event_e)
    event_f = set(event_f)
    preimages = {}
    for e in event_e:
        if e not in t_map:
            return MapCountingReport(p, q, 0, 0, 0, False, ("unmapped", e))
        f = t_map[e]
        if f not in event_f:
            return MapCountingReport(p, q, 0, 0, 0, False, ("image outside F", e))
        if probabilities[f] < p * probabilities[e] - 1e-12:
            return MapCountingReport(p, q, 0, 0, 0, False, ("gain fails", e))
        preimages[f] = preimages.get(f, 0) + 1
    for f, count in preimages.items():
        if count > q:
            return MapCountingReport(p, q, 0, 0, 0, False, ("multiplicity", f))
    pr_e = sum(probabilities[e] for e in event_e)
    pr_f = sum(probabilities[f] for f in event_f)
    bound = q / p * pr_f
    return MapCountingReport(p, q, pr_e, pr_f, bound, pr_e <= bound + 1e-12)


def turning_numbers(cfg: LoopConfig, loop) -> tuple:
    """(left turns, right turns) of a loop traversed counterclockwise."""
    from .lattice.hexgrid import vertex_position

    pts = [vertex_position(cfg.domain.vertices[vid]) for vid in loop.vertex_ids]
    k = len(pts)
    # signed area decides orientation
    area = sum(
        pts[i][0] * pts[(i + 1) % k][1] - pts[(i + 1) % k][0] * pts[i][1]
        for i in range(k)
    )
    if area < 0:
        pts = pts[::-1]
    left = right = 0
    for i in range(k):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % k]
        cx, cy = pts[(i + 2) % k]
        cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
        if cross > 1e-9:
            left += 1
        elif cross < -1e-9:
            right += 1
        else:
            raise AssertionError("straight step on the hexagonal lattice")
    return left, right
