"""Discrete torus of side 2L in d dimensions.

Vertices are labelled by integer tuples in {-L+1, ..., L}^d and two vertices
are adjacent when they differ by exactly 1 modulo 2L in a single coordinate.
Internally everything is flattened to indices 0 .. (2L)^d - 1 so that spin
configurations can live in contiguous numpy arrays.
"""

from __future__ import annotations

import itertools

import numpy as np


class TorusLattice:
    """Immutable geometry of the torus; safe to share between chains."""

    def __init__(self, d: int, L: int):
        if d < 1 or L < 1:
            raise ValueError("need d >= 1 and L >= 1")
        self.d = d
        self.L = L
        self.side = 2 * L
        self.n_vertices = self.side**d

        # neighbor_table[i, 2*axis + {0,1}] = flat index of i +/- e_axis.
        # For L = 1 the two entries per axis coincide (doubled edges), which
        # keeps |E| = d * N and every vertex with exactly 2d neighbor slots.
        idx = np.arange(self.n_vertices)
        coords = self._unravel(idx)
        table = np.empty((self.n_vertices, 2 * d), dtype=np.int64)
        for axis in range(d):
            for s, off in enumerate((1, -1)):
                shifted = coords.copy()
                shifted[:, axis] = (shifted[:, axis] + off) % self.side
                table[:, 2 * axis + s] = self._ravel(shifted)
        self.neighbor_table = table
        self.neighbor_table.setflags(write=False)
        # plain-python neighbor tuples for tight single-site loops
        self.neighbor_lists = tuple(tuple(int(x) for x in row) for row in table)

        # Forward edge list (u, v) with v = u + e_axis; length d * N.
        us = np.repeat(idx, d)
        vs = table[:, 0::2].reshape(-1)
        self.edges = np.stack([us, vs], axis=1)
        self.edges.setflags(write=False)
        self.n_edges = len(self.edges)

    # -- coordinate conversions ------------------------------------------

    def _ravel(self, coords: np.ndarray) -> np.ndarray:
        out = coords[..., 0] % self.side
        for axis in range(1, self.d):
            out = out * self.side + (coords[..., axis] % self.side)
        return out

    def _unravel(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        out = np.empty(idx.shape + (self.d,), dtype=np.int64)
        rem = idx
        for axis in range(self.d - 1, -1, -1):
            out[..., axis] = rem % self.side
            rem = rem // self.side
        return out

    def index_of(self, vertex) -> int:
        """Flat index of a vertex given as a tuple in {-L+1,..,L}^d."""
        vertex = tuple(int(c) for c in vertex)
        if len(vertex) != self.d:
            raise ValueError(f"vertex {vertex} has wrong dimension")
        for c in vertex:
            if not (-self.L + 1 <= c <= self.L):
                raise ValueError(f"coordinate {c} outside {{-L+1,..,L}}")
        return int(self._ravel(np.array(vertex)))

    def vertex_of(self, index: int) -> tuple:
        """Canonical tuple label (coordinates in {-L+1,..,L}) of a flat index."""
        raw = self._unravel(np.array(index))
        return tuple(int(c) if c <= self.L else int(c) - self.side for c in raw)

    def vertices(self):
        """All vertex labels, in flat-index order."""
        return [self.vertex_of(i) for i in range(self.n_vertices)]

    # -- graph structure ---------------------------------------------------

    def neighbors(self, vertex) -> list:
        """The 2d neighbors of a vertex (with multiplicity when L = 1)."""
        i = self.index_of(vertex)
        return [self.vertex_of(j) for j in self.neighbor_table[i]]

    def distance(self, u, v) -> int:
        """Graph distance ||u - v||_1 on the torus."""
        iu, iv = self.index_of(u), self.index_of(v)
        cu, cv = self._unravel(np.array(iu)), self._unravel(np.array(iv))
        diff = np.abs(cu - cv)
        return int(np.minimum(diff, self.side - diff).sum())

    def displacement_index(self, r) -> int:
        """Flat index of a displacement vector (used by translation averages)."""
        r = np.asarray(r)
        return int(self._ravel(r))


def box_adjacent(u, v, L: int) -> bool:
    """Nearest or diagonal next-nearest adjacency on the 2d torus of side 2L.

    u, v are vertex tuples; true iff they differ by 1 mod 2L in exactly one
    coordinate, or by 1 mod 2L in both coordinates.
    """
    if len(u) != 2 or len(v) != 2:
        raise ValueError("box adjacency is defined on the 2d torus")
    side = 2 * L
    d0 = (u[0] - v[0]) % side
    d1 = (u[1] - v[1]) % side
    one0 = d0 in (1, side - 1)
    one1 = d1 in (1, side - 1)
    return (one0 and d1 == 0) or (one1 and d0 == 0) or (one0 and one1)


def all_vertices(d: int, L: int):
    """Vertex tuples of the torus in lexicographic order (test helper)."""
    rng = range(-L + 1, L + 1)
    return list(itertools.product(rng, repeat=d))
