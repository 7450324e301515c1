"""Exact loop-to-spin representations via Perron-Frobenius weights.

For a finite connected graph G on a spin set S with Perron eigenvalue
lambda and eigenvector psi > 0, the triangular interaction h_a = 1,
h_{a,b} = x (psi_a / psi_b)^{1/6} turns hexagon colorings into loop
configurations whose law is the loop O(lambda) model at edge weight x.
The key algebraic fact is the single-loop identity
sum_b h_{b,a}^m h_{a,b}^{m'} = x^|l| lambda with m = m' + 6.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..lattice.circuits import HexDomain
from ..lattice.hexgrid import hex_neighbors, vertices_of_hexagon
from ..loop_core import LoopConfig


@dataclass
class SpinRepresentation:
    labels: list                  # spin set S
    adjacency: np.ndarray         # symmetric 0/1 matrix on S
    psi: np.ndarray               # Perron eigenvector, positive
    eigenvalue: float             # lambda = loop weight n
    x: float

    def h_pair(self, a: int, b: int) -> float:
        """h_{a,b} = h(a, b, b) for indices into the label list."""
        if a == b:
            return 1.0
        if not self.adjacency[a, b]:
            return 0.0
        return self.x * (self.psi[a] / self.psi[b]) ** (1.0 / 6.0)

    def triangle_weight(self, a: int, b: int, c: int) -> float:
        values = {a, b, c}
        if len(values) == 1:
            return 1.0
        if len(values) == 3:
            return 0.0
        # determine the odd one out
        if a == b:
            return self.h_pair(c, a)
        if a == c:
            return self.h_pair(b, a)
        return self.h_pair(a, b)


def perron_representation(adjacency, x: float, tol: float = 1e-13,
                          labels=None) -> SpinRepresentation:
    """Perron eigenpair by power iteration, then the representation weights."""
    a = np.asarray(adjacency, dtype=float)
    if a.shape[0] != a.shape[1] or not np.allclose(a, a.T):
        raise ValueError("adjacency must be symmetric")
    if x <= 0:
        raise ValueError("need x > 0")
    n = a.shape[0]
    # connectivity check (Perron structure)
    reach = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in np.nonzero(a[i])[0]:
            if j not in reach:
                reach.add(int(j))
                frontier.append(int(j))
    if len(reach) != n:
        raise ValueError("graph is disconnected: no Perron structure")
    # power iteration on A + I (the shift breaks the +-lambda oscillation on
    # bipartite graphs); the Rayleigh quotient recovers lambda for A itself
    v = np.ones(n) / math.sqrt(n)
    for _ in range(500_000):
        w = a @ v + v
        w /= np.linalg.norm(w)
        lam = float(w @ (a @ w))
        if np.linalg.norm(a @ w - lam * w) < tol:
            v = w
            break
        v = w
    else:
        raise ArithmeticError("power iteration did not reach the residual target")
    v = np.abs(v)
    return SpinRepresentation(labels or list(range(n)), a.astype(int), v, lam, x)


def star_graph(q: int):
    """Star on {0, 1, ..., q} with center 0; closed form psi(0) = sqrt(q),
    psi(i) = 1, lambda = sqrt(q)."""
    a = np.zeros((q + 1, q + 1), dtype=int)
    for i in range(1, q + 1):
        a[0, i] = a[i, 0] = 1
    psi = np.ones(q + 1)
    psi[0] = math.sqrt(q)
    return a, psi, math.sqrt(q)


def tree_representation(n: int, x: float) -> SpinRepresentation:
    """The n-regular-tree representation with constant psi and lambda = n.

    For n = 1 this is the two-point set {+, -} (the Ising interface map);
    general n is realized here on the finite complete bipartite stand-in only
    through its constant-eigenvector identity, which is all the loop weights
    use."""
    if n == 1:
        a = np.array([[0, 1], [1, 0]])
        rep = perron_representation(a, x, labels=["+", "-"])
        return rep
    raise NotImplementedError("finite materialization only exists for n = 1")


def spins_to_loops(domain: HexDomain, values: dict, s0) -> LoopConfig:
    """Domain walls of a hexagon coloring: edges between unequal values.

    values maps interior hexagons to spins; everything else is fixed to s0.
    """
    ids = []
    for ei, (g, h) in enumerate(domain.edges):
        vg = values.get(g, s0)
        vh = values.get(h, s0)
        if vg != vh:
            ids.append(ei)
    return LoopConfig(domain, ids)


def enumerate_coloring_pushforward(domain: HexDomain, rep: SpinRepresentation,
                                   s0_index: int) -> dict:
    """Exact pushforward of the coloring law under the domain-wall map.

    Enumerates all colorings of the interior hexagons (boundary fixed to
    s0), weights them by the product of triangle interactions over lattice
    vertices involving an interior hexagon, and accumulates the weight per
    wall configuration.  Returns {edge-id frozenset: probability}.
    """
    free = list(domain.hexagons)
    n_free = len(free)
    s = len(rep.labels)
    # relevant lattice vertices: those bordering a hexagon with an edge in H
    hexes_with_edge = set()
    for (g, h) in domain.edges:
        hexes_with_edge.add(g)
        hexes_with_edge.add(h)
    triangles = set()
    for z in hexes_with_edge:
        for v in vertices_of_hexagon(z):
            if any(hh in hexes_with_edge for hh in v):
                triangles.add(v)

    hex_pos = {h: i for i, h in enumerate(free)}
    out = {}
    total = 0.0
    for assignment in itertools.product(range(s), repeat=n_free):
        def val(h):
            i = hex_pos.get(h)
            return s0_index if i is None else assignment[i]

        weight = 1.0
        for v in triangles:
            weight *= rep.triangle_weight(val(v[0]), val(v[1]), val(v[2]))
            if weight == 0.0:
                break
        if weight == 0.0:
            continue
        walls = frozenset(
            ei for ei, (g, h) in enumerate(domain.edges) if val(g) != val(h)
        )
        out[walls] = out.get(walls, 0.0) + weight
        total += weight
    return {k: w / total for k, w in out.items()}


def single_loop_identity_defect(rep: SpinRepresentation, a: int, length: int) -> float:
    """|sum_b h_{b,a}^m h_{a,b}^m' - x^length * lambda| with m = m' + 6.

    m + m' = length; traversing the loop counterclockwise, m and m' count
    left and right turns.
    """
    if length < 6 or length % 2 == 1:
        raise ValueError("hexagonal loops have even length >= 6")
    m_prime = (length - 6) // 2
    m = m_prime + 6
    lhs = sum(
        rep.h_pair(b, a) ** m * rep.h_pair(a, b) ** m_prime
        for b in range(len(rep.labels))
        if rep.adjacency[a, b]
    )
    rhs = rep.x**length * rep.eigenvalue
    return abs(lhs - rhs)
