"""Hard-hexagon model: independent sets on a periodic triangular patch.

The n -> infinity, n x^6 -> lambda limit of the loop model: configurations
are sets of non-adjacent sites weighted lambda^(#occupied).  Sublattice
occupation densities distinguish the fluid phase (all equal) from the
ordered phase above Baxter's lambda_c, where one sublattice is favored.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

TRI_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


class TriangularTorusPatch:
    """Periodic triangular lattice with a consistent 3-sublattice structure.

    Both dimensions must be divisible by 3 so the coloring (i - j) mod 3
    survives the wrap.
    """

    def __init__(self, a: int, b: int):
        if a % 3 or b % 3 or a < 3 or b < 3:
            raise ValueError("patch dimensions must be positive multiples of 3")
        self.a = a
        self.b = b
        self.n_sites = a * b
        self.neighbors = []
        for i in range(a):
            for j in range(b):
                self.neighbors.append(
                    tuple(((i + di) % a) * b + (j + dj) % b for di, dj in TRI_OFFSETS)
                )
        self.sublattice = np.array(
            [(i - j) % 3 for i in range(a) for j in range(b)], dtype=np.int8
        )

    def site(self, i: int, j: int) -> int:
        return (i % self.a) * self.b + (j % self.b)

    def coords(self, s: int):
        return divmod(s, self.b)


class HardHexagonChain:
    """Single-site insert/delete Metropolis at fugacity lambda."""

    def __init__(self, patch: TriangularTorusPatch, lam: float,
                 initial: str = "empty"):
        if lam <= 0:
            raise ValueError("need lambda > 0")
        self.patch = patch
        self.lam = lam
        self.occupied = np.zeros(patch.n_sites, dtype=bool)
        if initial == "sublattice0":
            self.occupied[patch.sublattice == 0] = True
        elif initial != "empty":
            raise ValueError("initial must be 'empty' or 'sublattice0'")
        self.steps = 0

    def sweep(self, rng: np.random.Generator):
        patch, lam = self.patch, self.lam
        occ = self.occupied
        sites = rng.integers(patch.n_sites, size=patch.n_sites).tolist()
        us = rng.random(patch.n_sites).tolist()
        p_remove = min(1.0, 1.0 / lam)
        p_insert = min(1.0, lam)
        for t, s in enumerate(sites):
            self.steps += 1
            if occ[s]:
                if us[t] < p_remove:
                    occ[s] = False
            else:
                blocked = False
                for w in patch.neighbors[s]:
                    if occ[w]:
                        blocked = True
                        break
                if not blocked and us[t] < p_insert:
                    occ[s] = True

    def sublattice_densities(self) -> np.ndarray:
        out = np.zeros(3)
        for c in range(3):
            mask = self.patch.sublattice == c
            out[c] = self.occupied[mask].mean()
        return out

    def density(self) -> float:
        return float(self.occupied.mean())

    def to_json(self) -> dict:
        occ = [list(self.patch.coords(int(s))) for s in np.nonzero(self.occupied)[0]]
        return {
            "schema": "v1",
            "model": "hardhex",
            "dims": [self.patch.a, self.patch.b],
            "occupied": occ,
        }


def enumerate_independent_sets(patch: TriangularTorusPatch, lam: float) -> dict:
    """Exact distribution over independent sets (tiny patches only)."""
    if patch.n_sites > 20:
        raise ValueError("enumeration capped at 20 sites")
    probs = {}
    total = 0.0
    for bits in range(1 << patch.n_sites):
        ok = True
        for s in range(patch.n_sites):
            if (bits >> s) & 1:
                for w in patch.neighbors[s]:
                    if w > s and (bits >> w) & 1:
                        ok = False
                        break
                if not ok:
                    break
        if not ok:
            continue
        w = lam ** bits.bit_count()
        probs[bits] = w
        total += w
    return {k: v / total for k, v in probs.items()}
