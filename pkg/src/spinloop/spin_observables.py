"""Correlation, Fourier and vortex diagnostics for spin configurations.

Includes the infra-red bound report, the Gaussian-domination expectation
E[W(s+t)/W(s)], the d-dimensional lattice Green integral with its 1/d
asymptotics, vortex detection for n = 2 and the constrained-XY crossing
experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .lattice.torus import TorusLattice
from .spin_core import SpinConfig
from .stats import blocked_jackknife


# ---------------------------------------------------------------------------
# Fourier machinery


def is_power_of_two(m: int) -> bool:
    return m > 0 and (m & (m - 1)) == 0


def _direct_dft(grid: np.ndarray) -> np.ndarray:
    """Direct DFT along every axis; used when the side is not a power of two."""
    side = grid.shape[0]
    idx = np.arange(side)
    w = np.exp(-2j * np.pi * np.outer(idx, idx) / side)
    out = grid.astype(complex)
    for axis in range(grid.ndim):
        out = np.tensordot(w, out, axes=([1], [axis]))
        out = np.moveaxis(out, 0, axis)
    return out


def fourier_modes(cfg: SpinConfig) -> np.ndarray:
    """sigma_hat[j, k-grid] = sum_v sigma^j_v exp(-i <k, v>), k = pi m / L.

    Fast transform when the side is a power of two, direct summation
    otherwise; both agree to rounding.
    """
    lat = cfg.lattice
    shape = (lat.side,) * lat.d
    out = np.empty((cfg.n,) + shape, dtype=complex)
    for j in range(cfg.n):
        grid = cfg.values[:, j].reshape(shape)
        out[j] = np.fft.fftn(grid) if is_power_of_two(lat.side) else _direct_dft(grid)
    return out


def mode_vectors(lat: TorusLattice) -> np.ndarray:
    """k vectors (pi/L) * m for every FFT index, shape (side,)*d + (d,)."""
    ms = np.array([m if m <= lat.L else m - lat.side for m in range(lat.side)])
    grids = np.meshgrid(*([ms] * lat.d), indexing="ij")
    return np.stack(grids, axis=-1) * (np.pi / lat.L)


def laplacian_eigenvalue(k) -> float:
    """lambda_k = 2 sum_j (1 - cos k_j), the (-Laplacian) eigenvalue of e^{i<k,v>}."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    return float(2.0 * np.sum(1.0 - np.cos(k)))


def laplacian_eigenvalues(lat: TorusLattice) -> np.ndarray:
    ks = mode_vectors(lat)
    return 2.0 * np.sum(1.0 - np.cos(ks), axis=-1)


def apply_neg_laplacian(lat: TorusLattice, f: np.ndarray) -> np.ndarray:
    """(-Delta f)_u = sum_{v ~ u} (f_u - f_v) using the neighbor table."""
    flat = f.reshape(lat.n_vertices)
    out = 2 * lat.d * flat - flat[lat.neighbor_table].sum(axis=1)
    return out.reshape(f.shape)


def parseval_defect(cfg: SpinConfig) -> float:
    """|1 - (1/|V|^2) sum_{j,k} |sigma_hat^j_k|^2| for one configuration."""
    hat = fourier_modes(cfg)
    total = float(np.sum(np.abs(hat) ** 2)) / cfg.lattice.n_vertices**2
    return abs(total - 1.0)


# ---------------------------------------------------------------------------
# Two-point functions


def correlation_profile(cfg: SpinConfig) -> np.ndarray:
    """Translation-averaged C(r) = (1/N) sum_x <s_x, s_{x+r}> for one sample."""
    lat = cfg.lattice
    shape = (lat.side,) * lat.d
    acc = np.zeros(shape)
    for j in range(cfg.n):
        grid = cfg.values[:, j].reshape(shape)
        hat = np.fft.fftn(grid)
        acc += np.fft.ifftn(hat * np.conjugate(hat)).real
    return acc / lat.n_vertices


def torus_distance_grid(lat: TorusLattice) -> np.ndarray:
    """||r||_1 for every displacement index."""
    m = np.arange(lat.side)
    m = np.minimum(m, lat.side - m)
    grids = np.meshgrid(*([m] * lat.d), indexing="ij")
    return np.sum(np.stack(grids), axis=0)


def write_profile_csv(path, distances, rho, stderr):
    """Correlation profile as CSV (r, rho, stderr): comma, LF, header row."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["r", "rho", "stderr"])
        for r, m, s in zip(distances, rho, stderr):
            writer.writerow([r, f"{m:.12g}", f"{s:.12g}"])


def two_point(samples, x, y, lat: TorusLattice, n_blocks: int = 20):
    """Estimate rho_{x,y} = E <s_x, s_y> from a sample list.

    Returns (mean, stderr) with blocked-jackknife errors.  x == y gives
    exactly 1 with zero error (unit spins).
    """
    ix, iy = lat.index_of(x), lat.index_of(y)
    vals = np.array([float(c.values[ix] @ c.values[iy]) for c in samples])
    if len(vals) == 0:
        raise ValueError("empty sample set")
    if ix == iy:
        return 1.0, 0.0
    return blocked_jackknife(vals, n_blocks)


def averaged_profile(samples, lat: TorusLattice, n_blocks: int = 20):
    """Blocked mean and stderr of the translation-averaged profile C(r)."""
    profiles = np.array([correlation_profile(c).reshape(-1) for c in samples])
    mean, se = blocked_jackknife(profiles, n_blocks)
    shape = (lat.side,) * lat.d
    return mean.reshape(shape), se.reshape(shape)


# ---------------------------------------------------------------------------
# Infra-red bound


@dataclass
class InfraredReport:
    beta: float
    flagged: list
    n_modes_checked: int
    worst_z: float
    details: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        return {
            "beta": self.beta,
            "n_modes_checked": self.n_modes_checked,
            "worst_z": self.worst_z,
            "flagged": self.flagged,
        }


def infrared_check(samples, beta: float, lat: TorusLattice, z_threshold: float = 4.0,
                   block_size: int = 100) -> InfraredReport:
    """Check E|sigma_hat^j_k|^2 <= |V| / (beta lambda_k) for all k != 0.

    Flags modes exceeding the bound by more than z_threshold standard errors.
    The k = 0 mode is excluded (the bound is void at lambda_0 = 0).  The
    sample stream is consumed incrementally; contiguous blocks of block_size
    samples absorb the autocorrelation in the error bars.
    """
    if beta <= 0:
        raise ValueError("the infra-red bound needs beta > 0")
    lam = laplacian_eigenvalues(lat).reshape(-1)
    blocks = []
    acc = None
    in_acc = 0
    n_comp = None
    for cfg in samples:
        hat = fourier_modes(cfg)
        n_comp = hat.shape[0]
        p = np.abs(hat.reshape(n_comp, -1)) ** 2
        if acc is None:
            acc = np.zeros_like(p)
        acc += p
        in_acc += 1
        if in_acc == block_size:
            blocks.append(acc / in_acc)
            acc = np.zeros_like(p)
            in_acc = 0
    if in_acc > 0:
        blocks.append(acc / in_acc)
    if not blocks:
        raise ValueError("empty sample stream")
    block_means = np.stack(blocks)
    nb = len(blocks)
    mean = block_means.mean(axis=0)
    if nb > 1:
        se = block_means.std(axis=0, ddof=1) / math.sqrt(nb)
    else:
        se = np.zeros_like(mean)

    flagged = []
    worst = -math.inf
    checked = 0
    for mode in range(lam.size):
        if lam[mode] == 0.0:
            continue
        bound = lat.n_vertices / (beta * lam[mode])
        for j in range(n_comp):
            checked += 1
            z = (mean[j, mode] - bound) / se[j, mode] if se[j, mode] > 0 else (
                math.inf if mean[j, mode] > bound else -math.inf
            )
            worst = max(worst, z)
            if z > z_threshold:
                flagged.append({"mode": mode, "component": j,
                                "estimate": float(mean[j, mode]),
                                "stderr": float(se[j, mode]), "bound": float(bound),
                                "z": float(z)})
    return InfraredReport(beta, flagged, checked, float(worst))


# ---------------------------------------------------------------------------
# Gaussian domination


def gaussian_domination_ratio(cfg: SpinConfig, beta: float, tau: np.ndarray) -> float:
    """W(sigma+tau) / W(sigma) computed purely from edge gradients."""
    lat = cfg.lattice
    e = lat.edges
    dtau = tau[e[:, 0]] - tau[e[:, 1]]
    dsig = cfg.values[e[:, 0]] - cfg.values[e[:, 1]]
    expo = -0.5 * beta * float(np.sum(dtau * dtau) + 2.0 * np.sum(dsig * dtau))
    return math.exp(expo)


def gaussian_domination_estimate(samples, beta: float, tau: np.ndarray,
                                 n_blocks: int = 20):
    """Estimate E[W(sigma+tau)/W(sigma)] (Gaussian domination bounds it by 1)."""
    ratios = np.array([gaussian_domination_ratio(c, beta, tau) for c in samples])
    return blocked_jackknife(ratios, n_blocks)


def exact_z_ratio_ising(lat: TorusLattice, beta: float, tau: np.ndarray) -> float:
    """Z(tau)/Z(0) for n = 1 by full enumeration (tiny tori only)."""
    n = lat.n_vertices
    if n > 20:
        raise ValueError("exact Z(tau) enumeration capped at 20 vertices")
    ids = np.arange(1 << n, dtype=np.int64)
    spins = np.empty((1 << n, n))
    for i in range(n):
        spins[:, i] = ((ids >> i) & 1) * 2.0 - 1.0
    e = lat.edges
    tau = tau.reshape(n)

    def log_w(shift_field):
        grad = (spins[:, e[:, 0]] + shift_field[e[:, 0]]) - (
            spins[:, e[:, 1]] + shift_field[e[:, 1]]
        )
        return -0.5 * beta * (grad**2).sum(axis=1)

    lw_tau = log_w(tau)
    lw_zero = log_w(np.zeros(n))
    m = lw_zero.max()
    return float(np.exp(lw_tau - m).sum() / np.exp(lw_zero - m).sum())


# ---------------------------------------------------------------------------
# Vortices (n = 2, d = 2)


def vortex_field(cfg: SpinConfig) -> np.ndarray:
    """Vortex charges in {-1, 0, +1} (units of 2 pi) per plaquette.

    theta differences are folded to [-pi, pi) (ties at -pi broken downward)
    and summed clockwise around each plaquette.
    """
    if cfg.n != 2 or cfg.lattice.d != 2:
        raise ValueError("vortices are defined for n = 2 on the 2d torus")
    side = cfg.lattice.side
    theta = cfg.angles().reshape(side, side)

    def fold(x):
        return (x + np.pi) % (2.0 * np.pi) - np.pi

    # plaquette with corners v, v+e2, v+e1+e2, v+e1 traversed clockwise
    d1 = fold(np.roll(theta, -1, axis=1) - theta)
    d2 = fold(np.roll(theta, (-1, -1), axis=(0, 1)) - np.roll(theta, -1, axis=1))
    d3 = fold(np.roll(theta, -1, axis=0) - np.roll(theta, (-1, -1), axis=(0, 1)))
    d4 = fold(theta - np.roll(theta, -1, axis=0))
    total = d1 + d2 + d3 + d4
    charges = np.rint(total / (2.0 * np.pi)).astype(int)
    if not np.all(np.isin(charges, (-1, 0, 1))):
        raise AssertionError("plaquette winding outside {-2pi, 0, 2pi}")
    return charges


# ---------------------------------------------------------------------------
# The d-dimensional Green integral


@dataclass
class IrIntegral:
    d: int
    value: float
    divergent: bool
    coarse: float | None = None
    fine: float | None = None
    method: str = "midpoint-richardson"


MIDPOINT_MAX_DIM = 4


def _midpoint(d: int, grid: int) -> float:
    t = (np.arange(grid) + 0.5) / grid
    one_minus_cos = 1.0 - np.cos(np.pi * t)
    # base tensor over the trailing d-1 axes, chunked over the leading axis
    base = np.zeros((1,) * (d - 1))
    for axis in range(d - 1):
        shape = [1] * (d - 1)
        shape[axis] = grid
        base = base + one_minus_cos.reshape(shape)
    total = 0.0
    for lead in one_minus_cos:
        total += float(np.mean(1.0 / (lead + base)))
    return total / grid


def ir_integral(d: int, grid: int = 64) -> IrIntegral:
    """integral over [0,1]^d of 1 / sum_j (1 - cos(pi t_j)).

    Finite for d >= 3, divergent for d <= 2 (flagged, value = inf).  Midpoint
    rule avoiding t = 0, Richardson-extrapolated across grid and 2*grid; in
    high dimension the equivalent 1-d Laplace form
    integral_0^inf (e^{-s} I_0(s))^d ds is integrated instead.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d <= 2:
        return IrIntegral(d, math.inf, True, method="divergence-flag")
    if grid < 64:
        raise ValueError("need at least 64 points per axis")
    if d <= MIDPOINT_MAX_DIM:
        coarse = _midpoint(d, grid)
        fine = _midpoint(d, 2 * grid)
        value = 2.0 * fine - coarse  # leading midpoint error is O(1/grid)
        return IrIntegral(d, value, False, coarse, fine)
    # Bessel-Laplace reduction: 1/A = int e^{-sA} ds factorizes the integrand.
    val, _ = integrate.quad(lambda s: special.i0e(s) ** d, 0.0, np.inf, limit=200)
    return IrIntegral(d, float(val), False, method="bessel-laplace")


# ---------------------------------------------------------------------------
# Aizenman crossing experiment (hard-support XY, r0 = 1/sqrt(2))


def _crossing(mask: np.ndarray, box: bool, top_bottom: bool) -> bool:
    """Crossing of an l x l boolean grid; box=True adds diagonal steps."""
    ell = mask.shape[0]
    if box:
        steps = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    else:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if top_bottom:
        seeds = [(0, j) for j in range(ell) if mask[0, j]]
        goal = {(ell - 1, j) for j in range(ell)}
    else:
        seeds = [(i, 0) for i in range(ell) if mask[i, 0]]
        goal = {(i, ell - 1) for i in range(ell)}
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        cell = stack.pop()
        if cell in goal:
            return True
        for di, dj in steps:
            nxt = (cell[0] + di, cell[1] + dj)
            if (
                0 <= nxt[0] < ell and 0 <= nxt[1] < ell
                and nxt not in seen and mask[nxt]
            ):
                seen.add(nxt)
                stack.append(nxt)
    return False


def crossing_duality_holds(r0_mask: np.ndarray) -> bool:
    """The geometric fact: box top-bottom crossing of R0 or nearest-neighbor
    left-right crossing of the complement."""
    return _crossing(r0_mask, box=True, top_bottom=True) or _crossing(
        ~r0_mask, box=False, top_bottom=False
    )


@dataclass
class AizenmanReport:
    ell: int
    bound: float
    max_correlation: float
    max_correlation_se: float
    p_top_bottom_box: float
    p_left_right_nn: float
    duality_violations: int
    vortex_count: int
    n_samples: int


def aizenman_crossing_experiment(samples, lat: TorusLattice, ell: int,
                                 n_blocks: int = 20) -> AizenmanReport:
    """Evaluate Aizenman's bound ingredients on hard-support XY samples.

    Reports max_{||x-y||_1 >= ell} rho (translation-averaged) against the
    1/(2 ell^2) bound, crossing-event frequencies on the ell x ell square
    with V0 = {|s^1_v| >= 1/sqrt 2}, per-sample duality, and vortex counts.
    """
    if ell < 1 or ell > lat.L:
        raise ValueError("need 1 <= ell <= L")
    side = lat.side
    dist = torus_distance_grid(lat).reshape(-1)
    profiles = []
    e_count = f_count = violations = vortices = 0
    n_samples = 0
    for cfg in samples:
        n_samples += 1
        profiles.append(correlation_profile(cfg).reshape(-1))
        vortices += int(np.abs(vortex_field(cfg)).sum())
        comp1 = cfg.values[:, 0].reshape(side, side)
        v0 = np.abs(comp1) >= 1.0 / math.sqrt(2.0) - 1e-12
        square = v0[1 : ell + 1, 1 : ell + 1]
        ev = _crossing(square, box=True, top_bottom=True)
        fv = _crossing(~square, box=False, top_bottom=False)
        e_count += ev
        f_count += fv
        violations += not (ev or fv)
    profiles = np.array(profiles)
    mean, se = blocked_jackknife(profiles, n_blocks)
    far = dist >= ell
    best = int(np.argmax(np.where(far, mean, -np.inf)))
    return AizenmanReport(
        ell=ell,
        bound=1.0 / (2.0 * ell * ell),
        max_correlation=float(mean[best]),
        max_correlation_se=float(se[best]),
        p_top_bottom_box=e_count / n_samples,
        p_left_right_nn=f_count / n_samples,
        duality_violations=violations,
        vortex_count=vortices,
        n_samples=n_samples,
    )


# ---------------------------------------------------------------------------
# Decay-regime model selection


def fit_decay_models(r: np.ndarray, rho: np.ndarray):
    """AIC of least-squares fits of log rho against r (exponential decay)
    and against log r (power-law decay); both models have two parameters."""
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    keep = rho > 0
    r, rho = r[keep], rho[keep]
    y = np.log(rho)

    def aic(design):
        a = np.stack([np.ones_like(r), design], axis=1)
        coef, *_ = np.linalg.lstsq(a, y, rcond=None)
        resid = y - a @ coef
        rss = float(resid @ resid)
        n = len(y)
        return n * math.log(rss / n) + 2 * 2, coef

    aic_exp, coef_exp = aic(-r)
    aic_pow, coef_pow = aic(-np.log(r))
    return {
        "aic_exponential": aic_exp,
        "aic_power": aic_pow,
        "correlation_length": 1.0 / coef_exp[1] if coef_exp[1] > 0 else math.inf,
        "power_exponent": coef_pow[1],
    }
