"""Spin configurations, pair potentials and energies for the O(n) model.

A configuration assigns a unit vector in R^n to every torus vertex (n = 1 is
the Ising model, values exactly +-1).  The Boltzmann weight is
exp(-sum_edges U(<s_u, s_v>)); the ferromagnetic model is U(r) = -beta * r.
Hard-support potentials (U = infinity below a threshold r0) are never fed
into floating-point arithmetic: energies report rejection through math.inf at
the API boundary, and the samplers test the constraint before exponentiating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lattice.torus import TorusLattice

UNIT_NORM_TOL = 1e-12


@dataclass
class Potential:
    """Pair potential U(<s_u, s_v>) with declared analytic flags.

    Flags drive which invariant suites apply; no symbolic analysis is done.
    hard_support_threshold r0 means U(r) = inf exactly for r < r0.
    """

    u: Callable[[float], float]
    non_increasing: bool = False
    hard_support_threshold: float | None = None
    beta: float | None = None
    name: str = "general"
    pure_hard: bool = False  # U identically zero on its support

    @classmethod
    def ferromagnetic(cls, beta: float) -> "Potential":
        if beta < 0:
            raise ValueError("ferromagnetic potential needs beta >= 0")
        return cls(lambda r: -beta * r, non_increasing=True, beta=beta, name="ferromagnetic")

    @classmethod
    def antiferromagnetic(cls, beta: float) -> "Potential":
        if beta <= 0:
            raise ValueError("anti-ferromagnetic potential needs beta > 0")
        return cls(lambda r: beta * r, non_increasing=False, beta=beta, name="antiferromagnetic")

    @classmethod
    def hard_support(cls, r0: float, u_inside: Callable[[float], float] | None = None,
                     non_increasing: bool = True) -> "Potential":
        """U(r) = inf for r < r0, u_inside(r) (default 0) otherwise."""
        inner = u_inside or (lambda r: 0.0)

        def u(r):
            return math.inf if r < r0 else inner(r)

        return cls(u, non_increasing=non_increasing, hard_support_threshold=r0,
                   name=f"hard(r0={r0:g})", pure_hard=u_inside is None)

    def __call__(self, r: float) -> float:
        return self.u(r)

    def violates(self, r) -> np.ndarray | bool:
        if self.hard_support_threshold is None:
            return np.zeros(np.shape(r), dtype=bool) if np.ndim(r) else False
        return np.asarray(r) < self.hard_support_threshold

    def edge_energies(self, r: np.ndarray) -> np.ndarray:
        """Vectorized U over an array of inner products (finite entries only)."""
        if self.name == "ferromagnetic":
            return -self.beta * r
        if self.name == "antiferromagnetic":
            return self.beta * r
        return np.array([self.u(x) for x in np.ravel(r)]).reshape(np.shape(r))


class SpinConfig:
    """Per-vertex unit vectors, shape (N, n).  Single-writer; copy to share."""

    def __init__(self, lattice: TorusLattice, n: int, values: np.ndarray):
        if n < 1:
            raise ValueError("n >= 1 spin components required")
        values = np.asarray(values, dtype=float)
        if values.shape != (lattice.n_vertices, n):
            raise ValueError(
                f"values must have shape ({lattice.n_vertices}, {n}), got {values.shape}"
            )
        self.lattice = lattice
        self.n = n
        self.values = values
        self.check_norms()

    @classmethod
    def aligned(cls, lattice: TorusLattice, n: int) -> "SpinConfig":
        values = np.zeros((lattice.n_vertices, n))
        values[:, 0] = 1.0
        return cls(lattice, n, values)

    @classmethod
    def random(cls, lattice: TorusLattice, n: int, rng: np.random.Generator) -> "SpinConfig":
        if n == 1:
            values = rng.choice([-1.0, 1.0], size=(lattice.n_vertices, 1))
        else:
            values = rng.normal(size=(lattice.n_vertices, n))
            values /= np.linalg.norm(values, axis=1, keepdims=True)
        return cls(lattice, n, values)

    def copy(self) -> "SpinConfig":
        return SpinConfig(self.lattice, self.n, self.values.copy())

    def check_norms(self):
        norms = np.linalg.norm(self.values, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("spin vectors must be unit length")
        if self.n == 1 and not np.all(np.abs(self.values) == 1.0):
            raise ValueError("n=1 spins must be exactly +-1")

    def renormalize_site(self, i: int):
        """Renormalize after an update; bounds floating drift over long runs."""
        v = self.values[i]
        v /= np.linalg.norm(v)

    def angles(self) -> np.ndarray:
        if self.n != 2:
            raise ValueError("angles are only defined for n = 2")
        return np.arctan2(self.values[:, 1], self.values[:, 0])

    @classmethod
    def from_angles(cls, lattice: TorusLattice, theta: np.ndarray) -> "SpinConfig":
        theta = np.asarray(theta, dtype=float).reshape(lattice.n_vertices)
        return cls(lattice, 2, np.stack([np.cos(theta), np.sin(theta)], axis=1))

    def edge_inner_products(self) -> np.ndarray:
        e = self.lattice.edges
        return np.einsum("ij,ij->i", self.values[e[:, 0]], self.values[e[:, 1]])

    def to_json(self) -> dict:
        out = {
            "schema": "v1",
            "model": "spin",
            "n": self.n,
            "d": self.lattice.d,
            "L": self.lattice.L,
            "values": [float(x) for x in self.values.reshape(-1)],
        }
        if self.n == 2:
            out["angles"] = [float(t) for t in self.angles()]
        return out

    @classmethod
    def from_json(cls, data) -> "SpinConfig":
        lat = TorusLattice(int(data["d"]), int(data["L"]))
        values = np.array(data["values"], dtype=float).reshape(lat.n_vertices, int(data["n"]))
        return cls(lat, int(data["n"]), values)


def energy(cfg: SpinConfig, lat: TorusLattice, pot: Potential) -> float:
    """Total energy sum_edges U(<s_u, s_v>); math.inf when a hard constraint fails."""
    if cfg.lattice is not lat and cfg.lattice.n_vertices != lat.n_vertices:
        raise ValueError("configuration does not live on this lattice")
    r = cfg.edge_inner_products()
    if pot.hard_support_threshold is not None and np.any(pot.violates(r)):
        return math.inf
    return float(pot.edge_energies(r).sum())


def embedded_ising_couplings(cfg: SpinConfig, pot: Potential) -> dict:
    """Edge couplings of the Ising model induced on the first-component signs.

    Conditioned on components 2..n, the signs of component 1 follow an Ising
    model with J_uv = -U(+|s1_u||s1_v| + rest)/2 + U(-|s1_u||s1_v| + rest)/2;
    these are non-negative whenever U is non-increasing.
    """
    if cfg.n < 2:
        raise ValueError("the embedded-Ising map needs n >= 2")
    values = cfg.values
    abs1 = np.abs(values[:, 0])
    rest = values[:, 1:]
    couplings = {}
    for u, v in cfg.lattice.edges:
        s = float(np.dot(rest[u], rest[v]))
        prod = abs1[u] * abs1[v]
        up = pot(prod + s)
        down = pot(-prod + s)
        if math.isinf(up) and math.isinf(down):
            raise ValueError(f"potential infinite at both arguments on edge ({u},{v})")
        couplings[(int(u), int(v))] = 0.5 * (down - up)
    return couplings
