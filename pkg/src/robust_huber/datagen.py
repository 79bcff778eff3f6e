"""Deterministic synthetic data: designs, sparse signals, noise families, and
full problem instances.

Every generator is a pure function of its parameters and a 64-bit seed.
Independent streams (design, signal, noise, per-trial) are derived from the
seed through numpy SeedSequence keys, so parallel trial execution cannot
change any draw.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import norm

from .estimators import PcaProblem, RegressionProblem

__all__ = [
    "NoiseSpec",
    "SignalSpec",
    "stream_rng",
    "gen_gaussian_design",
    "gen_sparse_signal",
    "gen_oblivious_noise_vector",
    "gen_deterministic_outlier_noise",
    "gen_flat_lowrank",
    "gen_lb_noise",
    "gen_matrix_completion_scenario",
    "make_regression_instance",
    "make_gaussian_design_instance",
    "make_pca_instance",
    "trial_seed",
]

NOISE_FAMILIES = (
    "symmetric_mixture",
    "gaussian",
    "deterministic_sparse_outliers",
    "lb_geometric_even",
)

# stream tags keep the draw order of one generator independent of the others
_DESIGN, _SIGNAL, _NOISE, _LOWRANK, _MASK = 11, 13, 17, 19, 23


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key...); schedule-invariant."""
    if not (0 <= int(seed) < 2**64):
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def trial_seed(seed: int, point: int, trial: int) -> int:
    """Scalar instance seed for one (grid point, trial) cell.

    Stable under scheduling and worker count, so serial and parallel batch
    runs generate identical instances.
    """
    ss = np.random.SeedSequence([int(seed), int(point), int(trial)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class NoiseSpec:
    """Entrywise noise law.

    alpha is the inlier probability: P(|entry| <= zeta) >= alpha for every
    family.  outlier_scale only matters for symmetric_mixture; xi only for
    lb_geometric_even.
    """

    family: str
    alpha: float
    zeta: float = 1.0
    outlier_scale: float = 100.0
    xi: Optional[float] = None

    def __post_init__(self):
        if self.family not in NOISE_FAMILIES:
            raise ValueError(f"unknown noise family {self.family!r}")
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must lie in (0, 1]")
        if not (np.isfinite(self.zeta) and self.zeta >= 0):
            raise ValueError("zeta must be >= 0")
        if not (np.isfinite(self.outlier_scale) and self.outlier_scale > 0):
            raise ValueError("outlier_scale must be positive")


@dataclass(frozen=True)
class SignalSpec:
    """k-sparse signal with entries of fixed magnitude and random sign."""

    k: int
    magnitude: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not (np.isfinite(self.magnitude) and self.magnitude > 0):
            raise ValueError("magnitude must be positive")


def gen_gaussian_design(n: int, d: int, sigma, seed: int) -> np.ndarray:
    """Rows i.i.d. N(0, sigma); sigma must be symmetric positive definite."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (d, d):
        raise ValueError(f"sigma must be {d}x{d}")
    if not np.allclose(sigma, sigma.T, atol=1e-10):
        raise ValueError("sigma must be symmetric")
    chol = np.linalg.cholesky(sigma)  # LinAlgError on non-PD input
    rng = stream_rng(seed, _DESIGN)
    return rng.standard_normal((n, d)) @ chol.T


def gen_sparse_signal(d: int, spec: SignalSpec, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Random support of size k, entries +-magnitude; returns (beta, support)."""
    if spec.k > d:
        raise ValueError("k cannot exceed d")
    rng = stream_rng(seed, _SIGNAL)
    support = np.sort(rng.choice(d, size=spec.k, replace=False))
    beta = np.zeros(d)
    beta[support] = spec.magnitude * (2 * rng.integers(0, 2, size=spec.k) - 1)
    return beta, support


def _mixture_noise(shape, spec: NoiseSpec, rng) -> np.ndarray:
    inlier = rng.uniform(-spec.zeta, spec.zeta, size=shape)
    heavy = (
        spec.outlier_scale
        * np.abs(rng.standard_cauchy(size=shape))
        * (2 * rng.integers(0, 2, size=shape) - 1)
    )
    mask = rng.random(size=shape) < spec.alpha
    return np.where(mask, inlier, heavy)


def _gaussian_noise(shape, spec: NoiseSpec, rng) -> np.ndarray:
    if spec.alpha >= 1.0:
        return np.zeros(shape)
    if spec.zeta <= 0:
        raise ValueError("gaussian family needs zeta > 0 when alpha < 1")
    sigma = spec.zeta / norm.ppf((1 + spec.alpha) / 2)
    return rng.normal(0.0, sigma, size=shape)


def gen_oblivious_noise_vector(n: int, spec: NoiseSpec, seed: int) -> np.ndarray:
    """Length-n noise draw from a symmetric family with P(|entry|<=zeta) >= alpha."""
    rng = stream_rng(seed, _NOISE)
    if spec.family == "symmetric_mixture":
        return _mixture_noise(n, spec, rng)
    if spec.family == "gaussian":
        return _gaussian_noise(n, spec, rng)
    if spec.family == "deterministic_sparse_outliers":
        return gen_deterministic_outlier_noise(n, spec.alpha, seed)
    raise ValueError(f"family {spec.family!r} is not an entrywise vector family")


OUTLIER_MAGNITUDE = 1e6


def gen_deterministic_outlier_noise(n: int, alpha: float, seed: int) -> np.ndarray:
    """floor(alpha*n) entries uniform on [-1,1], the rest +-1e6.

    Positions and signs are a pure function of the seed; callers must use a
    seed stream distinct from the design stream (make_gaussian_design_instance
    enforces this split).
    """
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    n_in = int(np.floor(alpha * n))
    if n_in < 1:
        raise ValueError("alpha*n must be >= 1 so at least one inlier exists")
    rng = stream_rng(seed, _NOISE, 2)
    positions = rng.choice(n, size=n_in, replace=False)
    eta = OUTLIER_MAGNITUDE * (2.0 * rng.integers(0, 2, size=n) - 1.0)
    eta[positions] = rng.uniform(-1.0, 1.0, size=n_in)
    return eta


def gen_flat_lowrank(n: int, r: int, rho_over_n: float, seed: int) -> np.ndarray:
    """Rank <= r matrix with every entry exactly +-rho_over_n.

    Built as sum_k u_k v_k^T where u_k is a +-1 indicator of the k-th row
    block (sizes floor(n/r) or ceil(n/r)) and v_k is uniform on {+-1}^n.
    """
    if not (1 <= r <= n):
        raise ValueError("need 1 <= r <= n")
    if not (np.isfinite(rho_over_n) and rho_over_n > 0):
        raise ValueError("rho_over_n must be positive")
    rng = stream_rng(seed, _LOWRANK)
    sizes = [n // r + (1 if i < n % r else 0) for i in range(r)]
    L = np.zeros((n, n))
    row = 0
    for size in sizes:
        u = 2.0 * rng.integers(0, 2, size=size) - 1.0
        v = 2.0 * rng.integers(0, 2, size=n) - 1.0
        L[row : row + size, :] = np.outer(u, v)
        row += size
    return rho_over_n * L


def lb_noise_params(n: int, r: int, xi: float) -> tuple[float, float]:
    """(a, q) of the even-geometric law P[N=0]=a, P[N=+-2m]=a q^m.

    Valid whenever 0 < xi*sqrt(r) <= sqrt(n); the regime of the impossibility
    statement additionally has xi <= 1/2.
    """
    root = xi * np.sqrt(r)
    if not (0 < root <= np.sqrt(n)):
        raise ValueError("xi*sqrt(r) must lie in (0, sqrt(n)]")
    a = root / (2 * np.sqrt(n) - root)
    q = 1.0 - root / np.sqrt(n)
    return float(a), float(q)


def gen_lb_noise(n: int, r: int, xi: float, seed: int) -> np.ndarray:
    """n x n noise with the even-geometric law; P[N=0] = a = the inlier rate."""
    a, q = lb_noise_params(n, r, xi)
    rng = stream_rng(seed, _NOISE, 3)
    zero_mask = rng.random((n, n)) < a
    magnitudes = 2.0 * rng.geometric(1.0 - q, size=(n, n)) if q > 0 else np.full((n, n), 2.0)
    signs = 2.0 * rng.integers(0, 2, size=(n, n)) - 1.0
    return np.where(zero_mask, 0.0, signs * magnitudes)


def gen_matrix_completion_scenario(
    n: int, r: int, alpha: float, zeta: float, rho_over_n: float, seed: int
) -> PcaProblem:
    """Observed entries carry uniform noise, hidden entries a fixed huge value.

    Hidden entries (probability 1-alpha) are +-1000*rho/n with random sign,
    so they behave as oblivious outliers of known magnitude.
    """
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    hidden_magnitude = 1000.0 * rho_over_n
    if hidden_magnitude <= zeta:
        raise ValueError("hidden magnitude must exceed zeta")
    L = gen_flat_lowrank(n, r, rho_over_n, seed)
    rng = stream_rng(seed, _MASK)
    observed = rng.random((n, n)) < alpha
    inlier = rng.uniform(-zeta, zeta, size=(n, n))
    signs = 2.0 * rng.integers(0, 2, size=(n, n)) - 1.0
    N = np.where(observed, inlier, hidden_magnitude * signs)
    return PcaProblem(Y=L + N, rho_over_n=rho_over_n, zeta=zeta, L_star=L, r=r)


def make_regression_instance(
    n: int,
    d: int,
    signal: SignalSpec,
    noise: NoiseSpec,
    seed: int,
    sigma: Optional[np.ndarray] = None,
) -> RegressionProblem:
    """Gaussian design + sparse signal + entrywise noise, independent streams."""
    if sigma is None:
        sigma = np.eye(d)
    X = gen_gaussian_design(n, d, sigma, seed)
    beta, support = gen_sparse_signal(d, signal, seed)
    eta = gen_oblivious_noise_vector(n, noise, seed)
    problem = RegressionProblem(
        X=X, y=X @ beta + eta, beta_star=beta, support=support, k=signal.k
    )
    problem.nu = problem.column_norm_bound()
    return problem


def make_gaussian_design_instance(
    n: int,
    d: int,
    signal: SignalSpec,
    alpha: float,
    seed: int,
    sigma: Optional[np.ndarray] = None,
) -> RegressionProblem:
    """Gaussian design with the deterministic-outlier noise vector.

    The noise positions come from a different stream than the design, which
    is the independence the recovery statement needs.
    """
    noise = NoiseSpec(family="deterministic_sparse_outliers", alpha=alpha)
    return make_regression_instance(n, d, signal, noise, seed, sigma=sigma)


def make_pca_instance(
    n: int,
    r: int,
    noise: NoiseSpec,
    rho_over_n: float,
    seed: int,
    l_scale: float = 1.0,
) -> PcaProblem:
    """Flat low-rank truth plus entrywise noise.

    l_scale < 1 places L* strictly inside the max-norm box (entries
    +-l_scale*rho/n) while the problem keeps the box at rho/n.
    """
    if not (0 < l_scale <= 1):
        raise ValueError("l_scale must lie in (0, 1]")
    L = gen_flat_lowrank(n, r, l_scale * rho_over_n, seed)
    if noise.family == "lb_geometric_even":
        if noise.xi is None:
            raise ValueError("lb_geometric_even needs xi")
        N = gen_lb_noise(n, r, noise.xi, seed)
    else:
        N = gen_oblivious_noise_vector(n * n, noise, seed).reshape(n, n)
    return PcaProblem(Y=L + N, rho_over_n=rho_over_n, zeta=noise.zeta, L_star=L, r=r)
