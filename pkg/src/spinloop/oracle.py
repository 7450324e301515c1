"""Brute-force exact computations for tiny systems.

Everything statistical in this package is checked against one of these
oracles: full 2^N enumeration for Ising-type models, clock-discretized
quadrature (with an M vs 2M convergence certificate) for XY-type models,
cycle-space enumeration for loop configurations and direct subset sums for
the random-cluster model.  Enumerations stream; only distributions needed
for chi-square tests are materialized.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .lattice.circuits import HexDomain


ISING_VERTEX_CAP = 24
LOOP_EDGE_CAP = 36
FK_EDGE_CAP = 20
XY_VERTEX_CAP = 8


@dataclass
class ExactTable:
    """Exact oracle output: partition function and named observables.

    `distribution` maps a state key to its probability (present only when the
    state space was small enough to materialize, which chi-square tests need).
    """

    model: str
    log_z: float
    observables: dict = field(default_factory=dict)
    distribution: dict | None = None

    @property
    def z(self) -> float:
        return math.exp(self.log_z)


# ---------------------------------------------------------------------------
# Ising


def exact_ising(n_vertices: int, edges, beta: float | None = None, couplings=None,
                correlation_pairs=(), product_sets=(), materialize: bool = True) -> ExactTable:
    """Full 2^N enumeration of an Ising model with per-edge couplings.

    edges: list of (u, v); a repeated pair doubles that coupling.  The weight
    of sigma is exp(sum_e J_e sigma_u sigma_v) under the uniform counting
    measure on {-1,1}^N (no 2^-N prefactor; it cancels in every observable).
    """
    if n_vertices > ISING_VERTEX_CAP:
        raise ValueError(f"vertex cap {ISING_VERTEX_CAP} exceeded")
    edges = [tuple(e) for e in edges]
    if couplings is None:
        if beta is None:
            raise ValueError("provide beta or couplings")
        couplings = {i: beta for i in range(len(edges))}
        js = np.full(len(edges), float(beta))
    else:
        js = np.array([couplings[i] if i in couplings else couplings[e]
                       for i, e in enumerate(edges)], dtype=float)

    n_states = 1 << n_vertices
    ids = np.arange(n_states, dtype=np.int64)
    spins = np.empty((n_states, n_vertices), dtype=np.int8)
    for i in range(n_vertices):
        spins[:, i] = ((ids >> i) & 1) * 2 - 1

    energy_field = np.zeros(n_states)
    for (u, v), j in zip(edges, js):
        energy_field += j * spins[:, u] * spins[:, v]
    shift = energy_field.max()
    weights = np.exp(energy_field - shift)
    z = weights.sum()
    log_z = math.log(z) + shift
    probs = weights / z

    obs = {}
    for (x, y) in correlation_pairs:
        obs[("rho", x, y)] = float((probs * spins[:, x] * spins[:, y]).sum())
    for a_set in product_sets:
        prod = np.ones(n_states)
        for x in a_set:
            prod = prod * spins[:, x]
        obs[("prod", tuple(a_set))] = float((probs * prod).sum())

    dist = None
    if materialize:
        dist = {int(s): float(p) for s, p in zip(ids, probs)}
    return ExactTable("ising", log_z, obs, dist)


def ising_correlation_matrix(n_vertices: int, edges, beta: float) -> np.ndarray:
    pairs = [(x, y) for x in range(n_vertices) for y in range(n_vertices)]
    table = exact_ising(n_vertices, edges, beta=beta,
                        correlation_pairs=pairs, materialize=False)
    rho = np.zeros((n_vertices, n_vertices))
    for (tag, x, y), val in table.observables.items():
        rho[x, y] = val
    return rho


# ---------------------------------------------------------------------------
# XY / clock quadrature


def _eliminate(n_vars: int, factors, m: int):
    """Sum over all clock states of a product of factors by variable elimination.

    factors: list of (vars tuple, array); returns the full sum (no 1/M^N).
    """
    factors = [(tuple(vs), np.asarray(arr, dtype=float)) for vs, arr in factors]
    alive = set(range(n_vars))
    while alive:
        # min-degree style: pick the variable in the fewest factors.
        counts = {v: 0 for v in alive}
        for vs, _ in factors:
            for v in vs:
                if v in alive:
                    counts[v] += 1
        v = min(alive, key=lambda u: (counts[u], u))
        involved = [f for f in factors if v in f[0]]
        rest = [f for f in factors if v not in f[0]]
        union = sorted({u for vs, _ in involved for u in vs})
        prod = np.ones([m] * len(union))
        for vs, arr in involved:
            # permute axes into union (sorted) order, broadcast missing vars
            idx = [union.index(u) for u in vs]
            expand = np.transpose(arr, axes=np.argsort(idx))
            expand = expand.reshape([m if u in vs else 1 for u in union])
            prod = prod * expand
        axis = union.index(v)
        summed = prod.sum(axis=axis)
        new_vars = tuple(u for u in union if u != v)
        if new_vars:
            factors = rest + [(new_vars, summed)]
        else:
            factors = rest + [((), summed)]
        alive.remove(v)
    total = 1.0
    for vs, arr in factors:
        total *= float(arr) if np.ndim(arr) == 0 else float(arr.item())
    return total


def _clock_weight_matrix(m: int, beta: float | None, potential=None,
                         g_function=None) -> np.ndarray:
    k = np.arange(m)
    if g_function is not None:
        # g is 1-periodic in the angle fraction t = (i - j) / m
        t = (k[:, None] - k[None, :]) / m
        return np.array([[g_function(t[i, j]) for j in range(m)] for i in range(m)])
    diff = 2.0 * np.pi * (k[:, None] - k[None, :]) / m
    r = np.cos(diff)
    if potential is None:
        return np.exp(beta * r)
    with np.errstate(over="ignore"):
        vals = np.array([[potential(r[i, j]) for j in range(m)] for i in range(m)])
    out = np.exp(-vals)
    out[np.isinf(vals)] = 0.0
    return out


def exact_xy_quadrature(n_vertices: int, edges, beta: float | None = None, potential=None,
                        m: int = 64, correlation_pairs=(), pair_product_pairs=(),
                        tol: float = 1e-8, max_m: int = 4096,
                        certify: bool = True, g_function=None) -> ExactTable:
    """Clock-discretized partition function and correlations for n = 2 spins.

    Doubles M until log Z moves by less than tol (relative); the certificate
    (both values) lands in the observables.  certify=False evaluates at the
    given M only (hard-support indicators converge too slowly to certify, and
    there the fixed-M value *is* the exact constrained count).
    """
    if n_vertices > XY_VERTEX_CAP:
        raise ValueError(f"vertex cap {XY_VERTEX_CAP} exceeded")
    edges = [tuple(e) for e in edges]

    def run(m_now):
        w = _clock_weight_matrix(m_now, beta, potential, g_function)
        factors = [((u, v), w) for (u, v) in edges]
        z = _eliminate(n_vertices, factors, m_now) / m_now**n_vertices
        obs = {}
        k = np.arange(m_now)
        cosmat = np.cos(2.0 * np.pi * (k[:, None] - k[None, :]) / m_now)
        for (x, y) in correlation_pairs:
            num = _eliminate(n_vertices, factors + [((x, y), cosmat)], m_now) / m_now**n_vertices
            obs[("rho", x, y)] = num / z
        for (x, y), (zz, ww) in pair_product_pairs:
            num = _eliminate(
                n_vertices, factors + [((x, y), cosmat), ((zz, ww), cosmat)], m_now
            ) / m_now**n_vertices
            obs[("rho2", (x, y), (zz, ww))] = num / z
        return z, obs

    if not certify:
        z_only, obs_only = run(m)
        obs_only[("certificate", "m")] = m
        return ExactTable("xy-quadrature", math.log(z_only), obs_only)

    z_prev, obs_prev = run(m)
    m_now = m
    while m_now < max_m:
        m_now *= 2
        z_now, obs_now = run(m_now)
        if abs(z_now - z_prev) <= tol * abs(z_now):
            obs_now[("certificate", "m")] = m_now
            obs_now[("certificate", "z_prev")] = z_prev
            return ExactTable("xy-quadrature", math.log(z_now), obs_now)
        z_prev, obs_prev = z_now, obs_now
    raise RuntimeError(f"clock quadrature did not converge below {tol} by M={max_m}")


def ginibre_integral(n: int, n_vertices: int, k_exp: dict, l_exp: dict, m: int = 32) -> float:
    """The Ginibre double integral for n in {1,2}: mean over (sigma, sigma')
    of prod (cos_ij - cos'_ij)^k_ij (cos_ij + cos'_ij)^l_ij.

    Exact for n=1; for n=2 the clock mean with M > 2 * total degree is exact
    because the integrand is a trigonometric polynomial.
    """
    if n not in (1, 2):
        raise ValueError("the Ginibre lemma concerns n in {1, 2}")
    pairs = sorted(set(k_exp) | set(l_exp))
    deg = sum(k_exp.get(p, 0) + l_exp.get(p, 0) for p in pairs)
    if n == 1:
        grid = np.array([0.0, np.pi])
        m_eff = 2
    else:
        m_eff = max(m, 2 * deg + 2)
        grid = 2.0 * np.pi * np.arange(m_eff) / m_eff

    # Fix theta_1 = theta'_1 = 0 (global-shift invariance of the integrand).
    free = n_vertices - 1
    shape = [m_eff] * (2 * free)
    total = 0.0
    mesh = np.meshgrid(*([grid] * (2 * free)), indexing="ij") if free else []

    def angle(which, i):
        if i == 0:
            return 0.0
        return mesh[which * free + (i - 1)]

    val = np.ones(shape if free else ())
    for (i, j) in pairs:
        c = np.cos(angle(0, i) - angle(0, j))
        cp = np.cos(angle(1, i) - angle(1, j))
        ke = k_exp.get((i, j), 0)
        le = l_exp.get((i, j), 0)
        if ke:
            val = val * (c - cp) ** ke
        if le:
            val = val * (c + cp) ** le
    total = float(np.mean(val))
    return total


# ---------------------------------------------------------------------------
# Loop model


def loop_count(domain: HexDomain, edge_mask: int) -> int:
    """Number of loops of an even edge set given as a bitmask over domain edges."""
    present = edge_mask
    loops = 0
    seen = 0
    while present & ~seen:
        start = (present & ~seen).bit_length() - 1
        loops += 1
        edge = start
        seen |= 1 << edge
        i1, i2 = domain.edge_vertex_ids[edge]
        vertex = i2
        first_vertex = i1
        while vertex != first_vertex:
            nxt = None
            for ei in domain.vertex_edge_ids[vertex]:
                if ei != edge and (present >> ei) & 1:
                    nxt = ei
                    break
            if nxt is None:
                raise ValueError("odd-degree vertex inside loop traversal")
            edge = nxt
            seen |= 1 << edge
            a, b = domain.edge_vertex_ids[edge]
            vertex = b if a == vertex else a
    return loops


def even_subgraph_masks(domain: HexDomain):
    """All even edge sets via Gray code over the facial cycle basis."""
    faces = [sum(1 << ei for ei in hex_edges) for hex_edges in domain.hexagon_edge_ids]
    dim = len(faces)
    mask = 0
    yield mask
    gray_prev = 0
    for i in range(1, 1 << dim):
        gray = i ^ (i >> 1)
        changed = (gray ^ gray_prev).bit_length() - 1
        mask ^= faces[changed]
        gray_prev = gray
        yield mask


def exact_loop(domain: HexDomain, n: float, x: float,
               materialize: bool = True) -> ExactTable:
    """Exact loop O(n) distribution on a domain: weights x^o(w) n^L(w)."""
    if domain.n_edges > LOOP_EDGE_CAP:
        raise ValueError(f"edge cap {LOOP_EDGE_CAP} exceeded")
    if n <= 0 or x <= 0:
        raise ValueError("need n > 0 and 0 < x < inf for exact weights")
    rows = []
    for mask in even_subgraph_masks(domain):
        o = mask.bit_count()
        loops = loop_count(domain, mask)
        rows.append((mask, o, loops))
    logs = np.array([o * math.log(x) + loops * math.log(n) for _, o, loops in rows])
    shift = logs.max()
    weights = np.exp(logs - shift)
    z = weights.sum()
    log_z = math.log(z) + shift
    probs = weights / z
    obs = {
        ("mean", "o"): float(sum(p * o for p, (_, o, _) in zip(probs, rows))),
        ("mean", "L"): float(sum(p * l for p, (_, _, l) in zip(probs, rows))),
        ("count", "configs"): len(rows),
    }
    dist = {mask: float(p) for (mask, _, _), p in zip(rows, probs)} if materialize else None
    return ExactTable("loop", log_z, obs, dist)


def loop_z_polynomial(domain: HexDomain, n: float, x: float) -> float:
    """Z_loop = sum x^o n^L without normalization, as a float."""
    total = 0.0
    for mask in even_subgraph_masks(domain):
        total += x ** mask.bit_count() * n ** loop_count(domain, mask)
    return total


def _find_simple_paths(domain: HexDomain, mask: int, u_id: int, v_id: int, all_paths=False):
    """Simple u-v paths using only edges present in mask; edge-id tuples."""
    paths = []
    stack = [(u_id, frozenset([u_id]), ())]
    while stack:
        vertex, visited, used = stack.pop()
        if vertex == v_id and used:
            paths.append(used)
            if not all_paths:
                return paths
            continue
        for ei in sorted(domain.vertex_edge_ids[vertex], reverse=True):
            if not (mask >> ei) & 1 or ei in used:
                continue
            a, b = domain.edge_vertex_ids[ei]
            nxt = b if a == vertex else a
            if nxt in visited and nxt != v_id:
                continue
            if nxt == v_id:
                paths.append(used + (ei,))
                if not all_paths:
                    return paths
                continue
            stack.append((nxt, visited | {nxt}, used + (ei,)))
    return paths


def _three_disjoint_paths(domain: HexDomain, mask: int, u_id: int, v_id: int) -> bool:
    """Menger check: three vertex-disjoint u-v paths within the masked subgraph.

    On a 3-regular graph this needs deg(u) = deg(v) = 3 in the mask and unit
    vertex capacities elsewhere; implemented as three augmenting BFS passes.
    """
    deg_u = sum(1 for ei in domain.vertex_edge_ids[u_id] if (mask >> ei) & 1)
    deg_v = sum(1 for ei in domain.vertex_edge_ids[v_id] if (mask >> ei) & 1)
    if deg_u < 3 or deg_v < 3:
        return False
    # Vertex-split max flow: node -> (node_in, node_out); cap 1 except u, v.
    n_v = domain.n_vertices
    capacity = {}

    def add(a, b, cap):
        capacity[(a, b)] = capacity.get((a, b), 0) + cap
        capacity.setdefault((b, a), 0)

    for i in range(n_v):
        cap = 3 if i in (u_id, v_id) else 1
        add(("in", i), ("out", i), cap)
    for ei, (a, b) in enumerate(domain.edge_vertex_ids):
        if (mask >> ei) & 1:
            add(("out", a), ("in", b), 1)
            add(("out", b), ("in", a), 1)
    flow = 0
    from collections import deque as _dq

    while flow < 3:
        parent = {("out", u_id): None}
        queue = _dq([("out", u_id)])
        while queue:
            node = queue.popleft()
            if node == ("in", v_id):
                break
            for (a, b), cap in capacity.items():
                if a == node and cap > 0 and b not in parent:
                    parent[b] = a
                    queue.append(b)
        if ("in", v_id) not in parent:
            return False
        node = ("in", v_id)
        while parent[node] is not None:
            prev = parent[node]
            capacity[(prev, node)] -= 1
            capacity[(node, prev)] += 1
            node = prev
        flow += 1
    return True


def enumerate_odd_pair(domain: HexDomain, u, v, n: float | None = None,
                       check_path_independence: bool = False):
    """All spanning subgraphs with odd degree exactly at u and v.

    Returns rows (mask, o, L_prime, three_disjoint, j_factor); J = 3n/(n+2)
    when three vertex-disjoint u-v paths exist, else 1 (n needed only then).
    Raises if L' depends on the removed simple path and checking is on.
    """
    if domain.n_edges > LOOP_EDGE_CAP:
        raise ValueError(f"edge cap {LOOP_EDGE_CAP} exceeded")
    u_id, v_id = domain.vertex_index[u], domain.vertex_index[v]
    full = (1 << domain.n_edges) - 1
    base_paths = _find_simple_paths(domain, full, u_id, v_id)
    if not base_paths:
        return []
    base = 0
    for ei in base_paths[0]:
        base ^= 1 << ei
    rows = []
    for mask in even_subgraph_masks(domain):
        lam = mask ^ base
        o = lam.bit_count()
        paths = _find_simple_paths(domain, lam, u_id, v_id, all_paths=check_path_independence)
        if not paths:
            raise AssertionError("odd-pair configuration without a simple path")
        l_primes = set()
        for path in paths if check_path_independence else paths[:1]:
            removed = lam
            for ei in path:
                removed &= ~(1 << ei)
            l_primes.add(loop_count(domain, removed))
        if len(l_primes) != 1:
            raise AssertionError(
                f"L' depends on the removed path for mask {lam:#x}: {sorted(l_primes)}"
            )
        l_prime = l_primes.pop()
        three = _three_disjoint_paths(domain, lam, u_id, v_id)
        j = (3.0 * n / (n + 2.0)) if (three and n is not None) else 1.0
        rows.append((lam, o, l_prime, three, j))
    return rows


# ---------------------------------------------------------------------------
# FK random-cluster


def _cluster_count(n_vertices: int, edge_list) -> int:
    parent = list(range(n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edge_list:
        ra, rb = find(u), find(v)
        if ra != rb:
            parent[ra] = rb
    return len({find(i) for i in range(n_vertices)})


def exact_fk(n_vertices: int, edges, p: float, q: float,
             materialize: bool = True) -> ExactTable:
    """Exact random-cluster model: weight q^N(E) p^|E| (1-p)^(|edges|-|E|)."""
    edges = [tuple(e) for e in edges]
    if len(edges) > FK_EDGE_CAP:
        raise ValueError(f"edge cap {FK_EDGE_CAP} exceeded")
    if not (0 <= p <= 1) or q <= 0:
        raise ValueError("need p in [0,1] and q > 0")
    total = 0.0
    rows = []
    for mask in range(1 << len(edges)):
        sub = [e for i, e in enumerate(edges) if (mask >> i) & 1]
        ne = len(sub)
        ncl = _cluster_count(n_vertices, sub)
        w = q**ncl * p**ne * (1 - p) ** (len(edges) - ne)
        rows.append((mask, ncl, w))
        total += w
    obs = {
        ("mean", "n_open"): sum(w * bin(m).count("1") for m, _, w in rows) / total,
        ("mean", "clusters"): sum(w * c for _, c, w in rows) / total,
    }
    dist = {m: w / total for m, _, w in rows} if materialize else None
    return ExactTable("fk", math.log(total), obs, dist)


def fk_connection_probability(n_vertices: int, edges, p: float, q: float, x: int, y: int) -> float:
    edges = [tuple(e) for e in edges]
    total = 0.0
    conn = 0.0
    for mask in range(1 << len(edges)):
        sub = [e for i, e in enumerate(edges) if (mask >> i) & 1]
        w = q ** _cluster_count(n_vertices, sub) * p ** len(sub) * (1 - p) ** (len(edges) - len(sub))
        total += w
        parent = list(range(n_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in sub:
            ra, rb = find(u), find(v)
            if ra != rb:
                parent[ra] = rb
        if find(x) == find(y):
            conn += w
    return conn / total


# ---------------------------------------------------------------------------
# Spin-loop relation, n = 1


def domain_graph(domain: HexDomain):
    """Vertex count and edge list (by vertex ids) of the domain graph."""
    return domain.n_vertices, list(domain.edge_vertex_ids)


def relation_check_n1(domain: HexDomain, beta: float, u, v):
    """Both sides of the exact n=1 spin-loop correlation identity.

    Left: rho_uv of the Ising model on the domain graph at beta.  Right: the
    odd-parity loop sum at x = tanh(beta) divided by the even partition sum.
    """
    x = math.tanh(beta)
    nv, edges = domain_graph(domain)
    if u == v:
        return 1.0, 1.0
    ui, vi = domain.vertex_index[u], domain.vertex_index[v]
    table = exact_ising(nv, edges, beta=beta, correlation_pairs=[(ui, vi)],
                        materialize=False)
    lhs = table.observables[("rho", ui, vi)]
    z_even = 0.0
    for mask in even_subgraph_masks(domain):
        z_even += x ** mask.bit_count()
    z_odd = 0.0
    for (lam, o, _, _, _) in enumerate_odd_pair(domain, u, v):
        z_odd += x**o
    rhs = z_odd / z_even
    return lhs, rhs


# ---------------------------------------------------------------------------
# Disk cache for oracle results (content-hash keys)


def cache_key(model: str, params: dict) -> str:
    blob = json.dumps({"model": model, "params": params}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def cached_scalar(cache_dir: str | None, model: str, params: dict, compute):
    """Compute-or-load a JSON-serializable oracle result."""
    if cache_dir is None:
        return compute()
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, cache_key(model, params) + ".json")
    if os.path.exists(path):
        with open(path) as fh:
            return json.load(fh)["result"]
    result = compute()
    with open(path, "w") as fh:
        json.dump({"model": model, "params": params, "result": result}, fh)
    return result
