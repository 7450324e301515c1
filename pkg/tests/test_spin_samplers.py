import math

import numpy as np
import pytest

from spinloop.lattice import TorusLattice
from spinloop.oracle import exact_ising
from spinloop.spin_core import Potential, SpinConfig
from spinloop.spin_samplers import SamplerSpec, metropolis_sweep, run_chain, wolff_step
from spinloop.stats import chi_squared_gof, make_rng


def state_mask(cfg):
    return int(sum(1 << i for i, s in enumerate(cfg.values[:, 0]) if s > 0))


class TestMetropolisBasics:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_beta_zero_accepts_everything(self, n):
        lat = TorusLattice(2, 2)
        rng = make_rng(0)
        cfg = SpinConfig.random(lat, n, rng)
        acc = metropolis_sweep(cfg, lat, Potential.ferromagnetic(0.0), rng)
        assert acc == 1.0

    def test_proposal_angle_validated(self):
        lat = TorusLattice(2, 2)
        rng = make_rng(0)
        cfg = SpinConfig.random(lat, 2, rng)
        with pytest.raises(ValueError):
            metropolis_sweep(cfg, lat, Potential.ferromagnetic(1.0), rng, proposal_angle=0.0)

    def test_hard_support_never_violated(self):
        lat = TorusLattice(2, 4)
        rng = make_rng(3)
        r0 = 1.0 / math.sqrt(2.0)
        pot = Potential.hard_support(r0)
        cfg = SpinConfig.aligned(lat, 2)
        for _ in range(300):
            metropolis_sweep(cfg, lat, pot, rng, proposal_angle=0.8)
            assert cfg.edge_inner_products().min() >= r0 - 1e-12

    def test_matches_exact_boltzmann_t22(self):
        # 1e6 sweeps on the 16-vertex torus against full enumeration
        lat = TorusLattice(2, 2)
        beta = 0.3
        table = exact_ising(lat.n_vertices, lat.edges.tolist(), beta=beta)
        rng = make_rng(20240801)
        cfg = SpinConfig.random(lat, 1, rng)
        pot = Potential.ferromagnetic(beta)
        counts = {}
        for _ in range(2000):  # burn-in
            metropolis_sweep(cfg, lat, pot, rng)
        for _ in range(1_000_000):
            metropolis_sweep(cfg, lat, pot, rng)
            m = state_mask(cfg)
            counts[m] = counts.get(m, 0) + 1
        stat, dof, p = chi_squared_gof(counts, table.distribution, min_expected=10)
        assert p > 0.01, f"chi2={stat:.1f} dof={dof} p={p:.4f}"

    def test_detailed_balance_t12(self):
        # pi(a) P(a,b) = pi(b) P(b,a) for single-flip transitions, 1e7 proposals
        lat = TorusLattice(2, 1)
        beta = 0.35
        pot = Potential.ferromagnetic(beta)
        table = exact_ising(lat.n_vertices, lat.edges.tolist(), beta=beta)
        rng = make_rng(99)
        cfg = SpinConfig.random(lat, 1, rng)
        n_sweeps = 2_500_000  # 4 proposals per sweep
        prev = state_mask(cfg)
        flow = {}
        for _ in range(n_sweeps):
            metropolis_sweep(cfg, lat, pot, rng)
            cur = state_mask(cfg)
            if (prev ^ cur).bit_count() == 1:
                flow[(prev, cur)] = flow.get((prev, cur), 0) + 1
            prev = cur
        checked = 0
        for (a, b), nab in flow.items():
            if a >= b:
                continue
            nba = flow.get((b, a), 0)
            # reversibility at stationarity: equal counts of a->b and b->a
            z = abs(nab - nba) / math.sqrt(nab + nba)
            checked += 1
            assert z < 3.0, f"{a}->{b}: {nab} vs {nba} (z={z:.2f})"
        # exactly the ground <-> single-excitation pairs admit single-net-flip
        # sweeps here (zero-energy proposals always accept, so excited states
        # always move); the other pairs are balanced trivially at zero flow
        assert checked == 8


class TestWolff:
    def test_beta_zero_cluster_is_single_site(self):
        lat = TorusLattice(2, 4)
        rng = make_rng(1)
        for n in (1, 2):
            cfg = SpinConfig.random(lat, n, rng)
            for _ in range(50):
                assert wolff_step(cfg, lat, 0.0, rng) == 1

    def test_preserves_unit_norms(self):
        lat = TorusLattice(2, 4)
        rng = make_rng(2)
        cfg = SpinConfig.random(lat, 3, rng)
        for _ in range(200):
            wolff_step(cfg, lat, 0.8, rng)
        cfg.check_norms()

    def test_two_point_matches_oracle_t22(self):
        lat = TorusLattice(2, 2)
        beta = 0.5
        x, y = lat.index_of((0, 0)), lat.index_of((1, 1))
        table = exact_ising(lat.n_vertices, lat.edges.tolist(), beta=beta,
                            correlation_pairs=[(x, y)], materialize=False)
        exact = table.observables[("rho", x, y)]
        rng = make_rng(7)
        cfg = SpinConfig.random(lat, 1, rng)
        for _ in range(1000):
            wolff_step(cfg, lat, beta, rng)
        vals = []
        for _ in range(100_000):
            wolff_step(cfg, lat, beta, rng)
            vals.append(cfg.values[x, 0] * cfg.values[y, 0])
        vals = np.array(vals)
        from spinloop.stats import blocked_jackknife

        mean, se = blocked_jackknife(vals, 50)
        assert abs(mean - exact) < 3 * se, f"{mean}+-{se} vs {exact}"

    def test_state_distribution_t22(self):
        # long-run Wolff marginal vs exact Boltzmann (chi-square)
        lat = TorusLattice(2, 2)
        beta = 0.5
        table = exact_ising(lat.n_vertices, lat.edges.tolist(), beta=beta)
        rng = make_rng(11)
        cfg = SpinConfig.random(lat, 1, rng)
        counts = {}
        for _ in range(500):
            wolff_step(cfg, lat, beta, rng)
        for _ in range(200_000):
            wolff_step(cfg, lat, beta, rng)
            m = state_mask(cfg)
            counts[m] = counts.get(m, 0) + 1
        stat, dof, p = chi_squared_gof(counts, table.distribution, min_expected=10)
        assert p > 0.001, f"chi2={stat:.1f} dof={dof} p={p:.4f}"


class TestRunChain:
    def spec(self, **kw):
        lat = TorusLattice(2, 2)
        defaults = dict(
            lattice=lat, n=1, potential=Potential.ferromagnetic(0.4),
            sampler="metropolis", sweeps=500, burn_in=50,
        )
        defaults.update(kw)
        return SamplerSpec(**defaults)

    @staticmethod
    def magnetization(cfg):
        return float(np.abs(cfg.values[:, 0].mean()))

    def test_zero_length_chain_errors(self):
        with pytest.raises(ValueError):
            run_chain(self.spec(sweeps=0), self.magnetization, seed=1)

    def test_same_seed_bit_identical(self):
        a = run_chain(self.spec(), self.magnetization, seed=42)
        b = run_chain(self.spec(), self.magnetization, seed=42)
        assert a.mean == b.mean
        assert a.std_error == b.std_error
        assert a.metadata["rng"] == "numpy-pcg64"

    def test_disjoint_seeds_agree(self):
        a = run_chain(self.spec(sweeps=4000), self.magnetization, seed=101)
        b = run_chain(self.spec(sweeps=4000), self.magnetization, seed=202)
        combined = math.hypot(float(a.std_error), float(b.std_error))
        assert abs(float(a.mean) - float(b.mean)) < 4 * combined

    def test_wolff_requires_ferromagnetic(self):
        with pytest.raises(ValueError):
            run_chain(self.spec(sampler="wolff", potential=Potential.hard_support(0.0)),
                      self.magnetization, seed=1)

    def test_acceptance_and_cluster_stats_recorded(self):
        est = run_chain(self.spec(sampler="mixed"), self.magnetization, seed=5)
        assert est.metadata["acceptance_mean"] is not None
        assert est.metadata["cluster_mean"] is not None
        assert est.autocorrelation_time_estimate >= 0.5

    def test_proposal_tuning_targets_acceptance(self):
        lat = TorusLattice(2, 4)
        spec = self.spec(lattice=lat, n=2, potential=Potential.ferromagnetic(1.1),
                         sweeps=400, burn_in=400, proposal_angle=math.pi)
        est = run_chain(spec, lambda c: float(c.values[:, 0].mean()), seed=9)
        angle = est.metadata["proposal_angle_final"]
        assert 0.01 <= angle <= math.pi
        # acceptance during measurement should sit near the 40-60% target
        assert 0.25 < est.metadata["acceptance_mean"] < 0.75


def test_wolff_xy_cluster_fraction_regression():
    # pilot-derived regression value: equilibrated mean cluster fraction at
    # d=2, side 64, n=2, beta=1.5 comfortably exceeds 0.2
    lat = TorusLattice(2, 32)
    rng = make_rng(31415)
    cfg = SpinConfig.random(lat, 2, rng)
    for _ in range(500):
        wolff_step(cfg, lat, 1.5, rng)
    sizes = [wolff_step(cfg, lat, 1.5, rng) for _ in range(400)]
    fraction = float(np.mean(sizes)) / lat.n_vertices
    assert fraction > 0.2, f"mean cluster fraction {fraction:.3f}"


def test_wolff_state_distribution_t12_doubled_edges():
    # the side-2 torus has doubled edges; Wolff must attempt each of the 2d
    # neighbor slots independently to stay consistent with |E| = d |V|
    lat = TorusLattice(2, 1)
    beta = 0.35
    table = exact_ising(lat.n_vertices, lat.edges.tolist(), beta=beta)
    rng = make_rng(2718)
    cfg = SpinConfig.random(lat, 1, rng)
    for _ in range(200):
        wolff_step(cfg, lat, beta, rng)
    counts = {}
    for _ in range(120_000):
        wolff_step(cfg, lat, beta, rng)
        m = state_mask(cfg)
        counts[m] = counts.get(m, 0) + 1
    stat, dof, p = chi_squared_gof(counts, table.distribution, min_expected=10)
    assert p > 0.001, f"chi2={stat:.1f} dof={dof} p={p:.4f}"
