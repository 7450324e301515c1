"""Chain summaries and the small statistical toolbox used by the tests.

Error bars on Markov-chain averages come from the integrated autocorrelation
time with automatic windowing (the window is the smallest W with W >= c *
tau_int(W)); naive errors on correlated series are the classic footgun.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _scipy_stats

RNG_ALGORITHM = "numpy-pcg64"


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """Seeded generator; chains derive independent streams from (seed, index)."""
    if stream is None:
        return np.random.default_rng(np.random.SeedSequence(seed))
    return np.random.default_rng(np.random.SeedSequence((seed, stream)))


def integrated_autocorrelation_time(series, c: float = 6.0) -> float:
    """Sokal-windowed estimate of tau_int = 1/2 + sum_t rho(t)."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 4:
        return 0.5
    x = x - x.mean()
    var = np.dot(x, x) / n
    if var <= 0:
        return 0.5
    # FFT autocovariance.
    m = 1
    while m < 2 * n:
        m *= 2
    f = np.fft.rfft(x, m)
    acov = np.fft.irfft(f * np.conjugate(f), m)[:n].real / n
    rho = acov / var
    tau = 0.5
    for w in range(1, n // 2):
        tau += rho[w]
        if w >= c * tau:
            return max(tau, 0.5)
    return max(tau, 0.5)


@dataclass
class ChainEstimate:
    """Monte Carlo estimate with autocorrelation-inflated standard error."""

    mean: float | np.ndarray
    std_error: float | np.ndarray
    n_samples: int
    autocorrelation_time_estimate: float
    seed: int
    sweeps: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("an estimate needs at least one sample")
        if np.any(np.asarray(self.std_error) < 0):
            raise ValueError("standard error must be non-negative")

    @classmethod
    def from_series(cls, series, seed: int, sweeps: int = 0, metadata=None):
        x = np.asarray(series, dtype=float)
        n = x.shape[0]
        if x.ndim == 1:
            tau = integrated_autocorrelation_time(x)
            var = x.var(ddof=1) if n > 1 else 0.0
            se = float(np.sqrt(2.0 * tau * var / n)) if n > 1 else 0.0
            mean = float(x.mean())
        else:
            taus = [integrated_autocorrelation_time(x[:, j]) for j in range(x.shape[1])]
            tau = float(max(taus))
            var = x.var(axis=0, ddof=1) if n > 1 else np.zeros(x.shape[1])
            se = np.sqrt(2.0 * np.asarray(taus) * var / n)
            mean = x.mean(axis=0)
        return cls(mean, se, n, float(tau), seed, sweeps, metadata or {})


def blocked_jackknife(samples, n_blocks: int = 20):
    """Mean and jackknife stderr over contiguous blocks of a sample series.

    samples: array of shape (n, ...); blocking absorbs autocorrelation.
    """
    x = np.asarray(samples, dtype=float)
    n = len(x)
    n_blocks = max(2, min(n_blocks, n))
    edges = np.linspace(0, n, n_blocks + 1, dtype=int)
    block_means = np.stack([x[edges[i] : edges[i + 1]].mean(axis=0) for i in range(n_blocks)])
    total = block_means.mean(axis=0)
    leave_one = (block_means.sum(axis=0) - block_means) / (n_blocks - 1)
    var = (n_blocks - 1) / n_blocks * ((leave_one - total) ** 2).sum(axis=0)
    return total, np.sqrt(var)


def chi_squared_gof(observed_counts: dict, probabilities: dict, min_expected: float = 5.0):
    """Chi-square goodness of fit of observed category counts to given probs.

    Categories with expected count below min_expected are merged into a tail
    bin so the asymptotic chi^2 distribution applies.  Returns (stat, dof, p).
    """
    n = sum(observed_counts.values())
    if n == 0:
        raise ValueError("no observations")
    keys = list(probabilities.keys())
    expected = np.array([probabilities[k] * n for k in keys])
    observed = np.array([observed_counts.get(k, 0) for k in keys], dtype=float)
    extra_obs = n - observed.sum()  # observations outside the listed support
    order = np.argsort(-expected)
    expected, observed = expected[order], observed[order]

    exp_bins, obs_bins = [], []
    acc_e = 0.0
    acc_o = 0.0
    for e, o in zip(expected, observed):
        if e >= min_expected:
            exp_bins.append(e)
            obs_bins.append(o)
        else:
            acc_e += e
            acc_o += o
    if acc_e > 0:
        exp_bins.append(acc_e)
        obs_bins.append(acc_o + extra_obs)
    elif extra_obs > 0:
        obs_bins[-1] += extra_obs
    exp_arr = np.array(exp_bins)
    obs_arr = np.array(obs_bins)
    # Renormalize tiny drift so the test is well posed.
    exp_arr *= obs_arr.sum() / exp_arr.sum()
    stat = float(((obs_arr - exp_arr) ** 2 / exp_arr).sum())
    dof = len(exp_arr) - 1
    if dof < 1:
        return 0.0, 0, 1.0
    p = float(_scipy_stats.chi2.sf(stat, dof))
    return stat, dof, p


def chi2_sf(stat: float, dof: int) -> float:
    return float(_scipy_stats.chi2.sf(stat, dof))
