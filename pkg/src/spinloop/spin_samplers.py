"""Markov-chain Monte Carlo for the spin O(n) model on the torus.

Single-site Metropolis handles any potential (hard constraints simply
auto-reject); the Wolff cluster update is only offered for the ferromagnetic
inner-product interaction, where the reflection construction is valid.
Chains are deterministic functions of (seed, schedule); the RNG algorithm
identifier is recorded with every estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice.torus import TorusLattice
from .spin_core import Potential, SpinConfig
from .stats import RNG_ALGORITHM, ChainEstimate, make_rng


def metropolis_sweep(cfg: SpinConfig, lat: TorusLattice, pot: Potential,
                     rng: np.random.Generator, proposal_angle: float = math.pi) -> float:
    """One sweep of |V| single-site proposals in random order.

    n = 1 proposes a sign flip; n >= 2 rotates the spin by a uniform angle in
    (0, proposal_angle] inside a random 2-plane through it.  Acceptance is
    min(1, exp(-dU)); proposals violating a hard constraint are rejected
    before any exponential is formed.  Returns the accepted fraction.
    """
    if not (0 < proposal_angle <= math.pi):
        raise ValueError("proposal_angle must lie in (0, pi]")
    values = cfg.values
    table = lat.neighbor_table
    n = cfg.n
    order = rng.permutation(lat.n_vertices)
    unif = rng.random(lat.n_vertices)
    accepted = 0
    r0 = pot.hard_support_threshold

    if n == 1:
        beta = pot.beta if pot.name == "ferromagnetic" else None
        svals = values[:, 0].tolist()
        nbrs = lat.neighbor_lists
        exp = math.exp
        ulist = unif.tolist()
        for t, i in enumerate(order.tolist()):
            s = svals[i]
            nn = 0.0
            for j in nbrs[i]:
                nn += svals[j]
            if beta is not None:
                d_en = 2.0 * beta * s * nn
            else:
                old = sum(pot(s * svals[j]) for j in nbrs[i])
                new = sum(pot(-s * svals[j]) for j in nbrs[i])
                if math.isinf(new):
                    continue
                d_en = new - old
            if d_en <= 0 or ulist[t] < exp(-d_en):
                svals[i] = -s
                accepted += 1
        values[:, 0] = svals
        return accepted / lat.n_vertices

    if n == 2:
        # angle representation: the only 2-plane is the whole spin space, so
        # the proposal is theta += uniform(-angle, angle)
        theta = np.arctan2(values[:, 1], values[:, 0]).tolist()
        deltas = rng.uniform(-proposal_angle, proposal_angle, lat.n_vertices).tolist()
        ulist = unif.tolist()
        nbrs = lat.neighbor_lists
        cos = math.cos
        exp = math.exp
        is_ferro = pot.name == "ferromagnetic"
        beta = pot.beta if is_ferro else None
        pure_hard = r0 is not None and pot.pure_hard
        for t, i in enumerate(order.tolist()):
            old = theta[i]
            new = old + deltas[t]
            if r0 is not None:
                ok = True
                for j in nbrs[i]:
                    if cos(new - theta[j]) < r0:
                        ok = False
                        break
                if not ok:
                    continue
                if pure_hard:
                    theta[i] = new
                    accepted += 1
                    continue
            if is_ferro:
                d_en = 0.0
                for j in nbrs[i]:
                    d_en -= beta * (cos(new - theta[j]) - cos(old - theta[j]))
            else:
                d_en = 0.0
                for j in nbrs[i]:
                    d_en += pot(cos(new - theta[j])) - pot(cos(old - theta[j]))
            if d_en <= 0 or ulist[t] < exp(-d_en):
                theta[i] = new
                accepted += 1
        arr = np.array(theta)
        values[:, 0] = np.cos(arr)
        values[:, 1] = np.sin(arr)
        return accepted / lat.n_vertices

    angles = rng.uniform(0.0, proposal_angle, lat.n_vertices)
    gauss = rng.normal(size=(lat.n_vertices, n))
    is_ferro = pot.name == "ferromagnetic"
    beta = pot.beta if is_ferro else None
    for t, i in enumerate(order):
        old_spin = values[i].copy()
        # random unit vector orthogonal to the current spin
        g = gauss[t]
        g = g - (g @ old_spin) * old_spin
        norm = np.linalg.norm(g)
        if norm < 1e-14:
            continue
        new_spin = math.cos(angles[t]) * old_spin + math.sin(angles[t]) * (g / norm)
        new_spin /= np.linalg.norm(new_spin)
        nbr = values[table[i]]
        r_new = nbr @ new_spin
        if r0 is not None and np.any(r_new < r0):
            continue
        r_old = nbr @ old_spin
        if is_ferro:
            d_en = -beta * float((r_new - r_old).sum())
        else:
            d_en = float(sum(pot(x) for x in r_new) - sum(pot(x) for x in r_old))
        if d_en <= 0 or unif[t] < math.exp(-d_en):
            values[i] = new_spin
            accepted += 1
    return accepted / lat.n_vertices


def wolff_step(cfg: SpinConfig, lat: TorusLattice, beta: float,
               rng: np.random.Generator) -> int:
    """One Wolff cluster update for the ferromagnetic model; returns |cluster|.

    A uniform reflection hyperplane through the origin and a uniform seed are
    drawn; neighbor w joins the cluster of u with probability
    1 - exp(min(0, -2 beta <r,s_u><r,s_w>)), then the cluster is reflected.
    """
    if beta < 0:
        raise ValueError("wolff_step requires a ferromagnetic beta >= 0")
    values = cfg.values
    n = cfg.n
    if n == 1:
        proj = values[:, 0].copy()
        normal = None
    else:
        normal = rng.normal(size=n)
        normal /= np.linalg.norm(normal)
        proj = values @ normal

    in_cluster = np.zeros(lat.n_vertices, dtype=bool)
    seed = int(rng.integers(lat.n_vertices))
    in_cluster[seed] = True
    frontier = np.array([seed])
    table = lat.neighbor_table
    while frontier.size:
        nbrs = table[frontier]  # (f, 2d)
        bond = -2.0 * beta * proj[frontier][:, None] * proj[nbrs]
        p_open = -np.expm1(np.minimum(bond, 0.0))
        accept = (rng.random(p_open.shape) < p_open) & ~in_cluster[nbrs]
        new = np.unique(nbrs[accept])
        new = new[~in_cluster[new]]
        in_cluster[new] = True
        frontier = new

    if n == 1:
        values[in_cluster, 0] *= -1.0
    else:
        values[in_cluster] -= 2.0 * np.outer(proj[in_cluster], normal)
        norms = np.linalg.norm(values[in_cluster], axis=1, keepdims=True)
        values[in_cluster] /= norms
    return int(in_cluster.sum())


@dataclass
class SamplerSpec:
    """Sampler choice plus schedule for run_chain."""

    lattice: TorusLattice
    n: int
    potential: Potential
    sampler: str = "metropolis"       # "metropolis" | "wolff" | "mixed"
    sweeps: int = 1000
    burn_in: int = 100
    thinning: int = 1
    proposal_angle: float = math.pi
    tune_proposal: bool = True
    wolff_per_sweep: int = 1
    initial: str = "random"           # "random" | "aligned"
    metadata: dict = field(default_factory=dict)


def _make_initial(spec: SamplerSpec, rng) -> SpinConfig:
    if spec.initial == "aligned":
        return SpinConfig.aligned(spec.lattice, spec.n)
    cfg = SpinConfig.random(spec.lattice, spec.n, rng)
    if spec.potential.hard_support_threshold is not None:
        # hard constraints: start from the aligned configuration (always valid
        # for thresholds < 1) so the chain never leaves the support
        return SpinConfig.aligned(spec.lattice, spec.n)
    return cfg


def run_chain(spec: SamplerSpec, observable, seed: int,
              on_sample=None) -> ChainEstimate:
    """Drive a chain; deterministic given the seed.

    observable: callable SpinConfig -> float or 1d array, evaluated on each
    retained sample.  on_sample, if given, receives (sweep_index, cfg) for
    streaming consumers (CSV writers, accumulation).
    """
    if spec.sweeps <= 0 or spec.burn_in < 0 or spec.thinning <= 0:
        raise ValueError("schedule must have positive sweeps and thinning")
    if spec.sampler not in ("metropolis", "wolff", "mixed"):
        raise ValueError(f"unknown sampler {spec.sampler!r}")
    if spec.sampler in ("wolff", "mixed") and spec.potential.name != "ferromagnetic":
        raise ValueError("wolff updates require the ferromagnetic potential")

    rng = make_rng(seed)
    cfg = _make_initial(spec, rng)
    lat, pot = spec.lattice, spec.potential
    angle = spec.proposal_angle
    acc_history = []
    cluster_sizes = []

    def one_sweep():
        acc = None
        if spec.sampler in ("metropolis", "mixed"):
            acc = metropolis_sweep(cfg, lat, pot, rng, angle)
            acc_history.append(acc)
        if spec.sampler in ("wolff", "mixed"):
            for _ in range(spec.wolff_per_sweep):
                cluster_sizes.append(wolff_step(cfg, lat, pot.beta, rng))
        return acc

    # burn-in, with optional proposal-angle tuning toward 40-60% acceptance;
    # the angle freezes before measurement so stationarity is untouched.
    for sweep in range(spec.burn_in):
        acc = one_sweep()
        if (
            spec.tune_proposal
            and spec.sampler in ("metropolis", "mixed")
            and spec.n >= 2
            and (sweep + 1) % 10 == 0
        ):
            recent = float(np.mean(acc_history[-10:]))
            if recent < 0.4:
                angle = max(angle * 0.8, 0.01)
            elif recent > 0.6:
                angle = min(angle * 1.25, math.pi)

    series = []
    for sweep in range(spec.sweeps):
        one_sweep()
        if (sweep + 1) % spec.thinning == 0:
            series.append(np.asarray(observable(cfg), dtype=float))
            if on_sample is not None:
                on_sample(sweep, cfg)

    series = np.array(series)
    metadata = {
        "rng": RNG_ALGORITHM,
        "sampler": spec.sampler,
        "proposal_angle_final": angle,
        "acceptance_mean": float(np.mean(acc_history)) if acc_history else None,
        "cluster_mean": float(np.mean(cluster_sizes)) if cluster_sizes else None,
        "reflection": "uniform-random-hyperplane" if spec.n >= 2 else "sign-flip",
        **spec.metadata,
    }
    est = ChainEstimate.from_series(
        series if series.ndim == 1 else series, seed=seed,
        sweeps=spec.burn_in + spec.sweeps, metadata=metadata,
    )
    est.metadata["final_config"] = cfg
    return est
