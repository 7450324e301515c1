import math

import numpy as np
import pytest

from spinloop.lattice import TorusLattice
from spinloop.spin_core import Potential, SpinConfig, embedded_ising_couplings, energy
from spinloop.stats import make_rng


@pytest.fixture
def lat22():
    return TorusLattice(2, 2)


class TestEnergy:
    def test_aligned_ground_state(self, lat22):
        cfg = SpinConfig.aligned(lat22, 2)
        beta = 0.7
        assert lat22.n_edges == 32
        assert energy(cfg, lat22, Potential.ferromagnetic(beta)) == pytest.approx(-32 * beta)

    def test_checkerboard(self, lat22):
        coords = np.array([lat22.vertex_of(i) for i in range(lat22.n_vertices)])
        signs = (-1.0) ** coords.sum(axis=1)
        cfg = SpinConfig(lat22, 1, signs.reshape(-1, 1))
        beta = 0.3
        assert energy(cfg, lat22, Potential.ferromagnetic(beta)) == pytest.approx(32 * beta)

    def test_matches_bruteforce_edge_sum(self, lat22):
        rng = make_rng(11)
        cfg = SpinConfig.random(lat22, 3, rng)
        pot = Potential(lambda r: r**2 - 0.25 * r)
        # independent summation order over explicit edges
        brute = 0.0
        for u, v in lat22.edges:
            brute += pot(float(cfg.values[u] @ cfg.values[v]))
        assert energy(cfg, lat22, pot) == pytest.approx(brute, abs=1e-10)

    def test_rotation_invariance(self, lat22):
        rng = make_rng(5)
        cfg = SpinConfig.random(lat22, 3, rng)
        pot = Potential.ferromagnetic(1.1)
        base = energy(cfg, lat22, pot)
        mat = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        rotated = SpinConfig(lat22, 3, cfg.values @ mat.T)
        assert energy(rotated, lat22, pot) == pytest.approx(base, abs=1e-9)

    def test_bipartite_isomorphism(self, lat22):
        # flipping one bipartite class maps beta to -beta exactly
        rng = make_rng(7)
        cfg = SpinConfig.random(lat22, 1, rng)
        coords = np.array([lat22.vertex_of(i) for i in range(lat22.n_vertices)])
        odd = coords.sum(axis=1) % 2 == 1
        flipped_values = cfg.values.copy()
        flipped_values[odd] *= -1.0
        flipped = SpinConfig(lat22, 1, flipped_values)
        beta = 0.45
        e_ferro = energy(cfg, lat22, Potential.ferromagnetic(beta))
        e_anti = energy(flipped, lat22, Potential.antiferromagnetic(beta))
        assert e_anti == pytest.approx(e_ferro, abs=1e-12)

    def test_hard_support_energy(self, lat22):
        pot = Potential.hard_support(1.0 / math.sqrt(2.0))
        aligned = SpinConfig.aligned(lat22, 2)
        assert energy(aligned, lat22, pot) == 0.0
        theta = np.zeros(lat22.n_vertices)
        theta[0] = 3.0  # a single wild angle violates the cone constraint
        bad = SpinConfig.from_angles(lat22, theta)
        assert energy(bad, lat22, pot) == math.inf


class TestSpinConfig:
    def test_unit_norm_enforced(self, lat22):
        values = np.zeros((lat22.n_vertices, 2))
        values[:, 0] = 1.5
        with pytest.raises(ValueError):
            SpinConfig(lat22, 2, values)

    def test_ising_exact_signs(self, lat22):
        values = np.ones((lat22.n_vertices, 1)) * 0.5
        with pytest.raises(ValueError):
            SpinConfig(lat22, 1, values)

    def test_angles_roundtrip(self, lat22):
        rng = make_rng(3)
        theta = rng.uniform(-np.pi, np.pi, lat22.n_vertices)
        cfg = SpinConfig.from_angles(lat22, theta)
        np.testing.assert_allclose(cfg.angles(), theta, atol=1e-12)

    def test_json_roundtrip(self, lat22):
        rng = make_rng(4)
        cfg = SpinConfig.random(lat22, 2, rng)
        data = cfg.to_json()
        assert data["schema"] == "v1"
        assert len(data["angles"]) == lat22.n_vertices
        back = SpinConfig.from_json(data)
        np.testing.assert_allclose(back.values, cfg.values)


class TestEmbeddedIsing:
    def test_linear_potential_formula(self, lat22):
        rng = make_rng(9)
        cfg = SpinConfig.random(lat22, 3, rng)
        beta = 0.8
        pot = Potential.ferromagnetic(beta)
        js = embedded_ising_couplings(cfg, pot)
        abs1 = np.abs(cfg.values[:, 0])
        for (u, v), j in js.items():
            assert j == pytest.approx(beta * abs1[u] * abs1[v], abs=1e-12)
            assert j >= 0

    def test_zero_first_component(self, lat22):
        theta = np.full(lat22.n_vertices, np.pi / 2)
        cfg = SpinConfig.from_angles(lat22, theta)  # sigma^1 = 0 everywhere
        js = embedded_ising_couplings(cfg, Potential.ferromagnetic(1.0))
        assert all(abs(j) < 1e-12 for j in js.values())

    def test_sign_matches_potential_difference(self, lat22):
        rng = make_rng(13)
        cfg = SpinConfig.random(lat22, 3, rng)
        pot = Potential(lambda r: r**2)
        js = embedded_ising_couplings(cfg, pot)
        abs1 = np.abs(cfg.values[:, 0])
        rest = cfg.values[:, 1:]
        for (u, v), j in js.items():
            s = float(rest[u] @ rest[v])
            p = abs1[u] * abs1[v]
            direct = 0.5 * (pot(-p + s) - pot(p + s))
            assert j == pytest.approx(direct, abs=1e-12)

    def test_nonincreasing_gives_nonnegative(self, lat22):
        rng = make_rng(17)
        cfg = SpinConfig.random(lat22, 2, rng)
        pot = Potential(lambda r: -math.atan(2 * r), non_increasing=True)
        js = embedded_ising_couplings(cfg, pot)
        assert all(j >= -1e-14 for j in js.values())

    def test_requires_two_components(self, lat22):
        cfg = SpinConfig.aligned(lat22, 1)
        with pytest.raises(ValueError):
            embedded_ising_couplings(cfg, Potential.ferromagnetic(1.0))
