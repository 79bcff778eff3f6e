"""Numerical checks for the conditions behind the recovery guarantees.

The certificate machinery measures, on a concrete instance, the five
quantities that drive the generic recovery bound for regularized M-estimators:
decomposability of the regularizer, the cone contraction constant s, the dual
norm of the loss gradient at the truth, restricted strong convexity kappa on
the expansion cone at a given radius, and the radius formula R = 4*gamma*s/kappa.

All Monte-Carlo checks draw per-trial generators keyed by (seed, tag, trial),
so results do not depend on scheduling, and adding trials never flips an
earlier draw (prefix stability).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .datagen import stream_rng
from .estimators import (
    EstimatorConstants,
    PcaProblem,
    RegressionProblem,
    build_pca_composite,
    build_regression_composite,
)
from .huber import HuberParams, huber_loss, huber_loss_grad
from .prox import dual_norm_linf, dual_norm_spectral, nuclear_norm
from .solver import certify_against_reference, composite_objective

__all__ = [
    "SparseCone",
    "LowRankCone",
    "RscSamplingError",
    "check_decomposability",
    "measure_contraction",
    "measure_gradient_dual_norm",
    "gradient_bound_regression",
    "gradient_bound_pca",
    "estimate_rsc",
    "check_re_property",
    "check_well_spread",
    "check_gaussian_concentration",
    "CertificateParams",
    "MetaCertificate",
    "assemble_certificate",
]

_T_DECOMP, _T_CONTRACT, _T_RSC, _T_RE, _T_SPREAD, _T_CONC = 31, 37, 41, 43, 47, 53


class RscSamplingError(RuntimeError):
    """No feasible cone sample found at the requested radius."""


# ---------------------------------------------------------------------------
# cone samplers for S_b(Omega_bar) = {u : ||u||_reg <= b * ||proj_bar(u)||_reg}


@dataclass
class SparseCone:
    """Expansion cone of the l1 norm around a support set."""

    support: np.ndarray
    dim: int
    expansion: float = 4.0

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=int)
        if self.support.size == 0:
            raise ValueError("support must be nonempty")
        if self.support.min() < 0 or self.support.max() >= self.dim:
            raise ValueError("support indices out of range")
        self.complement = np.setdiff1d(np.arange(self.dim), self.support)

    def reg_norm(self, u) -> float:
        return float(np.sum(np.abs(u)))

    def projection_norm(self, u) -> float:
        return float(np.sum(np.abs(np.asarray(u)[self.support])))

    def member(self, u, rtol: float = 1e-9) -> bool:
        return self.reg_norm(u) <= self.expansion * self.projection_norm(u) * (1 + rtol) + 1e-12

    def sample(self, rng) -> np.ndarray:
        u = np.zeros(self.dim)
        mode = rng.random()
        if mode < 0.1:
            u[self.support[rng.integers(self.support.size)]] = 1.0
            return u
        u[self.support] = rng.standard_normal(self.support.size)
        if self.complement.size == 0 or mode < 0.3:
            return u
        t = 1.0 if mode < 0.5 else rng.random()
        tail = rng.standard_normal(self.complement.size)
        l1_tail = np.sum(np.abs(tail))
        if l1_tail > 0:
            budget = (self.expansion - 1.0) * self.projection_norm(u)
            u[self.complement] = tail * (t * budget / l1_tail)
        return u


@dataclass
class LowRankCone:
    """Expansion cone of the nuclear norm around row/column spans."""

    col_basis: np.ndarray  # n x r, orthonormal columns
    row_basis: np.ndarray  # n x r, orthonormal columns
    expansion: float = 4.0
    col_perp: np.ndarray = field(default=None, repr=False)
    row_perp: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        U, V = self.col_basis, self.row_basis
        for name, B in (("col_basis", U), ("row_basis", V)):
            if not np.allclose(B.T @ B, np.eye(B.shape[1]), atol=1e-8):
                raise ValueError(f"{name} must have orthonormal columns")
        if self.col_perp is None:
            self.col_perp = _orthogonal_complement(U)
        if self.row_perp is None:
            self.row_perp = _orthogonal_complement(V)

    @classmethod
    def from_truth(cls, L_star, r: Optional[int] = None, expansion: float = 4.0):
        L_star = np.asarray(L_star, dtype=float)
        U, s, Vt = np.linalg.svd(L_star)
        tol = 1e-12 * (s[0] if s.size and s[0] > 0 else 1.0)
        rank = int(np.sum(s > tol))
        if r is not None:
            rank = min(rank, r)
        if rank == 0:
            raise ValueError("L_star is numerically zero; spans undefined")
        return cls(
            col_basis=U[:, :rank].copy(),
            row_basis=Vt[:rank].T.copy(),
            expansion=expansion,
            col_perp=U[:, rank:].copy(),
            row_perp=Vt[rank:].T.copy(),
        )

    @property
    def rank(self) -> int:
        return self.col_basis.shape[1]

    def project_omega_bar(self, M) -> np.ndarray:
        """Remove the component with rows and columns both outside the spans."""
        M = np.asarray(M, dtype=float)
        PU_M = self.col_basis @ (self.col_basis.T @ M)
        M_PV = (M @ self.row_basis) @ self.row_basis.T
        PU_M_PV = self.col_basis @ (self.col_basis.T @ M_PV)
        return PU_M + M_PV - PU_M_PV

    def reg_norm(self, M) -> float:
        return nuclear_norm(M)

    def projection_norm(self, M) -> float:
        return nuclear_norm(self.project_omega_bar(M))

    def member(self, M, rtol: float = 1e-6) -> bool:
        return self.reg_norm(M) <= self.expansion * self.projection_norm(M) * (1 + rtol) + 1e-9

    def sample(self, rng) -> np.ndarray:
        n = self.col_basis.shape[0]
        mode = rng.random()
        if mode < 0.1:
            # pure low-rank element of the spans themselves
            A = self.col_basis @ rng.standard_normal((self.rank, self.rank)) @ self.row_basis.T
            return A
        A = self.project_omega_bar(rng.standard_normal((n, n)))
        if self.col_perp.shape[1] == 0 or self.row_perp.shape[1] == 0 or mode < 0.3:
            return A
        G = rng.standard_normal((self.col_perp.shape[1], self.row_perp.shape[1]))
        B = self.col_perp @ G @ self.row_perp.T
        norm_B = nuclear_norm(B)
        if norm_B == 0:
            return A
        t = 1.0 if mode < 0.5 else rng.random()
        # triangle inequality keeps A + cB inside the cone for this c
        c = t * (self.expansion - 1.0) * nuclear_norm(A) / norm_B
        return A + c * B


def _orthogonal_complement(B) -> np.ndarray:
    n, r = B.shape
    if r >= n:
        return np.zeros((n, 0))
    # complete B to an orthonormal basis via SVD of the projector complement
    proj = np.eye(n) - B @ B.T
    U, _, _ = np.linalg.svd(proj)
    return U[:, : n - r]


# ---------------------------------------------------------------------------
# condition measurements


def _elements_from(basis, rng):
    if callable(basis):
        return basis(rng)
    basis = list(basis)
    coeffs = rng.standard_normal(len(basis))
    out = np.zeros_like(np.asarray(basis[0], dtype=float))
    for c, b in zip(coeffs, basis):
        out = out + c * np.asarray(b, dtype=float)
    return out


def check_decomposability(
    reg_norm: Callable, omega_basis, omega_bar_perp_basis, trials: int, seed: int,
    rtol: float = 1e-9,
) -> bool:
    """Additivity ||u + v|| = ||u|| + ||v|| for u from the model space and v
    from the complement space, on random elements of each."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for i in range(trials):
        rng = stream_rng(seed, _T_DECOMP, i)
        u = _elements_from(omega_basis, rng)
        v = _elements_from(omega_bar_perp_basis, rng)
        nu, nv = reg_norm(u), reg_norm(v)
        if abs(reg_norm(u + v) - nu - nv) > rtol * (nu + nv) + 1e-12:
            return False
    return True


def measure_contraction(cone, error_metric: Callable, trials: int, seed: int) -> float:
    """max over sampled cone directions of ||u||_reg / E(u)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    worst = 0.0
    for i in range(trials):
        rng = stream_rng(seed, _T_CONTRACT, i)
        u = cone.sample(rng)
        reg = cone.reg_norm(u)
        e = float(error_metric(u))
        if e <= 1e-14 * max(reg, 1.0):
            raise ValueError("error metric degenerate (zero) on a sampled cone direction")
        worst = max(worst, reg / e)
    return worst


def _regression_h(problem, constants: Optional[EstimatorConstants]) -> float:
    if constants is not None and constants.huber_h_override:
        return constants.huber_h_override
    return 2.0


def _pca_h(problem, constants: Optional[EstimatorConstants]) -> float:
    if constants is not None and constants.huber_h_override:
        return constants.huber_h_override
    return problem.zeta + problem.rho_over_n


def loss_gradient_at_truth(problem, h: Optional[float] = None):
    """Gradient of the smooth loss at the true parameter."""
    if isinstance(problem, RegressionProblem):
        if problem.beta_star is None:
            raise ValueError("problem carries no truth")
        hh = h if h is not None else 2.0
        eta = problem.y - problem.X @ problem.beta_star
        return -(problem.X.T @ huber_loss_grad(eta, HuberParams(hh)))
    if isinstance(problem, PcaProblem):
        if problem.L_star is None:
            raise ValueError("problem carries no truth")
        hh = h if h is not None else problem.zeta + problem.rho_over_n
        return -huber_loss_grad(problem.Y - problem.L_star, HuberParams(hh))
    raise TypeError(f"unsupported problem type {type(problem)!r}")


def measure_gradient_dual_norm(problem, h: Optional[float] = None) -> float:
    """Dual norm (l-inf or spectral) of the loss gradient at the truth."""
    g = loss_gradient_at_truth(problem, h=h)
    if isinstance(problem, RegressionProblem):
        return dual_norm_linf(g)
    return dual_norm_spectral(g)


def gradient_bound_regression(nu: float, n: int, d: int, delta: float) -> float:
    """High-probability bound 20*sqrt(nu*n*(log d + log(2/delta)))."""
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    return 20.0 * np.sqrt(nu * n * (np.log(d) + np.log(2.0 / delta)))


def gradient_bound_pca(h: float, n: int, delta: float) -> float:
    """High-probability bound 10*h*sqrt(n + log(2/delta))."""
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    return 10.0 * h * np.sqrt(n + np.log(2.0 / delta))


def estimate_rsc(
    problem,
    cone,
    radius: float,
    trials: int,
    seed: int,
    h: Optional[float] = None,
    max_attempt_factor: int = 50,
) -> float:
    """Lower-curvature ratio on the cone sphere of the given radius.

    Samples cone directions u rescaled to E(u) = radius (E is the prediction
    metric for regression, Frobenius for the matrix problem), and returns

        min_u [F(truth + u) - F(truth) - <grad F(truth), u>] / (radius^2 / 2).

    This is a one-sided (upper) estimate of the restricted strong convexity
    constant at that radius.  For the matrix problem, samples leaving the box
    are rejected; RscSamplingError is raised when too few are feasible.
    """
    if not (radius > 0 and np.isfinite(radius)):
        raise ValueError("radius must be positive and finite")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    if isinstance(problem, RegressionProblem):
        hh = h if h is not None else 2.0
        params = HuberParams(hh)
        eta = problem.y - problem.X @ problem.beta_star
        base = huber_loss(eta, params)
        clip_eta = huber_loss_grad(eta, params)
        sqrt_n = np.sqrt(problem.n)
        worst = np.inf
        for i in range(trials):
            rng = stream_rng(seed, _T_RSC, i)
            u = cone.sample(rng)
            v = problem.X @ u
            e = float(np.linalg.norm(v)) / sqrt_n
            if e <= 1e-14:
                raise RscSamplingError("sampled direction with zero prediction norm")
            v *= radius / e
            bracket = huber_loss(eta - v, params) - base + float(np.dot(clip_eta, v))
            worst = min(worst, bracket / (0.5 * radius * radius))
        return float(worst)

    if isinstance(problem, PcaProblem):
        hh = h if h is not None else problem.zeta + problem.rho_over_n
        params = HuberParams(hh)
        N = problem.Y - problem.L_star
        base = huber_loss(N, params)
        clip_N = huber_loss_grad(N, params)
        bound = problem.rho_over_n * (1 + 1e-12)
        worst = np.inf
        found = 0
        attempts = 0
        max_attempts = max_attempt_factor * trials
        i = 0
        while found < trials and attempts < max_attempts:
            rng = stream_rng(seed, _T_RSC, i)
            i += 1
            attempts += 1
            u = cone.sample(rng)
            norm_u = float(np.linalg.norm(u))
            if norm_u <= 1e-14:
                continue
            u = u * (radius / norm_u)
            if np.max(np.abs(problem.L_star + u)) > bound:
                continue
            found += 1
            bracket = huber_loss(N - u, params) - base + float(np.vdot(clip_N, u))
            worst = min(worst, bracket / (0.5 * radius * radius))
        if found < trials:
            raise RscSamplingError(
                f"only {found}/{trials} feasible cone samples at radius {radius:.6g}"
            )
        return float(worst)

    raise TypeError(f"unsupported problem type {type(problem)!r}")


# ---------------------------------------------------------------------------
# design-structure checkers (restricted eigenvalue, well-spreadness,
# concentration for correlated Gaussian designs)

RE_CONE_FRACTION = 0.1  # membership: ||u_S||_1 >= 0.1 * ||u||_1


def _re_cone_sample(support, complement, rng):
    d = support.size + complement.size
    u = np.zeros(d)
    u[support] = rng.standard_normal(support.size)
    if complement.size:
        tail = rng.standard_normal(complement.size)
        l1_tail = np.sum(np.abs(tail))
        if l1_tail > 0:
            t = rng.random()
            budget = 9.0 * np.sum(np.abs(u[support]))  # boundary of the 0.1 cone
            u[complement] = tail * (t * budget / l1_tail)
    return u


def check_re_property(
    X, support, trials: int, seed: int, exact: bool = False
) -> float:
    """Smallest sampled value of ||Xu||^2 / (n ||u||^2) over the sparse cone.

    The first |S| samples are deterministically the coordinate directions of
    the support, so the estimate can only decrease as trials grow.  With
    exact=True and d <= 12, all {-1,0,1} sign patterns inside the cone are
    enumerated as well.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    support = np.asarray(support, dtype=int)
    if support.size == 0:
        raise ValueError("support must be nonempty")
    complement = np.setdiff1d(np.arange(d), support)
    lam = np.inf
    for j in range(min(trials, support.size)):
        col = X[:, support[j]]
        lam = min(lam, float(np.dot(col, col)) / n)
    for i in range(max(0, trials - support.size)):
        rng = stream_rng(seed, _T_RE, i)
        u = _re_cone_sample(support, complement, rng)
        nu = float(np.dot(u, u))
        if nu <= 0:
            continue
        v = X @ u
        lam = min(lam, float(np.dot(v, v)) / (n * nu))
    if exact:
        if d > 12:
            raise ValueError("exact enumeration supported only for d <= 12")
        G = X.T @ X / n
        in_support = np.isin(np.arange(d), support)
        for pattern in itertools.product((-1.0, 0.0, 1.0), repeat=d):
            u = np.array(pattern)
            l1 = np.sum(np.abs(u))
            if l1 == 0:
                continue
            if np.sum(np.abs(u[in_support])) < RE_CONE_FRACTION * l1:
                continue
            lam = min(lam, float(u @ G @ u) / float(u @ u))
    return float(lam)


def check_well_spread(X, support, m: int, trials: int, seed: int) -> bool:
    """Whether sparse-cone image vectors keep half their norm after deleting
    their m largest-magnitude coordinates."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if not (0 <= m < n):
        raise ValueError("need 0 <= m < n")
    support = np.asarray(support, dtype=int)
    complement = np.setdiff1d(np.arange(d), support)
    for i in range(trials):
        rng = stream_rng(seed, _T_SPREAD, i)
        u = _re_cone_sample(support, complement, rng)
        v = X @ u
        total = float(np.dot(v, v))
        if total <= 0:
            return False
        if m:
            biggest = np.sort(v * v)[-m:]
            kept = total - float(np.sum(biggest))
        else:
            kept = total
        if np.sqrt(max(kept, 0.0)) < 0.5 * np.sqrt(total) - 1e-12 * np.sqrt(total):
            return False
    return True


def check_gaussian_concentration(
    X, sigma, sparsity: int, trials: int, seed: int
) -> bool:
    """Two-sided sandwich (1/2)||S u|| <= ||Xu||/sqrt(n) <= 2||S u|| with
    S = sigma^{1/2}, over approximately-sparse directions ||u||_1 <= sqrt(K)||u||.

    Includes, ahead of the random draws, the least-singular directions of a
    few random column submatrices, which are the natural worst cases.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    sigma = np.asarray(sigma, dtype=float)
    w, Q = np.linalg.eigh(sigma)
    if np.min(w) <= 0:
        raise ValueError("sigma must be positive definite")
    sqrt_sigma = (Q * np.sqrt(w)) @ Q.T
    K = int(sparsity)
    if not (1 <= K <= d):
        raise ValueError("sparsity must lie in [1, d]")

    def ok(u):
        num = float(np.linalg.norm(X @ u)) / np.sqrt(n)
        den = float(np.linalg.norm(sqrt_sigma @ u))
        if den == 0:
            return True
        return 0.5 * den <= num <= 2.0 * den

    probe_rng = stream_rng(seed, _T_CONC, 0)
    for _ in range(min(8, trials)):
        T = np.sort(probe_rng.choice(d, size=min(K, d), replace=False))
        _, _, Vt = np.linalg.svd(X[:, T], full_matrices=False)
        u = np.zeros(d)
        u[T] = Vt[-1]
        if not ok(u):
            return False
    for i in range(trials):
        rng = stream_rng(seed, _T_CONC, i + 1)
        size = int(rng.integers(1, K + 1))
        T = rng.choice(d, size=size, replace=False)
        u = np.zeros(d)
        u[T] = rng.standard_normal(size)
        if not ok(u):
            return False
    return True


# ---------------------------------------------------------------------------
# certificate


@dataclass(frozen=True)
class CertificateParams:
    """Knobs for assemble_certificate.

    alpha is the inlier rate of the noise law; the restricted-convexity flag
    compares the measured kappa against 0.01*alpha*n (regression) or
    0.01*alpha (matrix problem).
    """

    alpha: float
    delta: float = 0.05
    seed: int = 0
    expansion: float = 4.0
    trials_decomposability: int = 100
    trials_contraction: int = 400
    trials_rsc: int = 300
    trials_re: int = 300
    radius_rounds: int = 20
    radius_rtol: float = 0.15
    margin: float = 1e-6

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must lie in (0, 1]")


CONDITION_NAMES = (
    "decomposability",
    "contraction",
    "gradient_bound",
    "restricted_convexity",
    "radius_bound",
)


@dataclass
class MetaCertificate:
    gamma_measured: float
    s: float
    kappa: float
    R: float
    conditions: dict
    radius_formula_ok: bool
    # diagnostics
    kappa_radius: float
    rsc_vacuous: bool
    lambda_hat: Optional[float]
    contraction_measured: float
    cone_membership_ok: bool
    error_value: float
    error_lt_radius: bool
    gamma_est: float
    radius_est: float
    dominated_est: bool
    dominated_meas: bool

    def all_conditions(self) -> bool:
        return all(self.conditions[name] for name in CONDITION_NAMES)

    def to_report(self) -> str:
        lines = []
        for name in CONDITION_NAMES:
            lines.append(f"condition_{name} = {int(self.conditions[name])}")
        scalars = {
            "gamma_measured": self.gamma_measured,
            "s": self.s,
            "kappa": self.kappa,
            "R": self.R,
            "kappa_radius": self.kappa_radius,
            "contraction_measured": self.contraction_measured,
            "error_value": self.error_value,
            "gamma_est": self.gamma_est,
            "radius_est": self.radius_est,
        }
        if self.lambda_hat is not None:
            scalars["lambda_hat"] = self.lambda_hat
        for key in sorted(scalars):
            lines.append(f"{key} = {scalars[key]:.17g}")
        for key, val in (
            ("radius_formula_ok", self.radius_formula_ok),
            ("rsc_vacuous", self.rsc_vacuous),
            ("cone_membership_ok", self.cone_membership_ok),
            ("error_lt_radius", self.error_lt_radius),
            ("dominated_est", self.dominated_est),
            ("dominated_meas", self.dominated_meas),
        ):
            lines.append(f"{key} = {int(val)}")
        return "\n".join(lines) + "\n"


def _l1_sampler(indices, d):
    indices = np.asarray(indices, dtype=int)

    def sample(rng):
        u = np.zeros(d)
        if indices.size:
            u[indices] = rng.standard_normal(indices.size)
        return u

    return sample


def _nuclear_sampler(left, right):
    def sample(rng):
        if left.shape[1] == 0 or right.shape[1] == 0:
            return np.zeros((left.shape[0], right.shape[0]))
        return left @ rng.standard_normal((left.shape[1], right.shape[1])) @ right.T

    return sample


def _radius_fixed_point(problem, cone, gamma, s, params, h, kappa_init, radius_cap=None):
    """Iterate R -> 4*gamma*s/kappa(R) with geometric damping.

    kappa_init should be the quadratic-regime curvature (n for regression, 1
    for the matrix problem), so the iteration starts at the smallest plausible
    radius and grows only if the measured curvature is weaker.  Returns
    (kappa, kappa_radius, R, consistent): kappa is measured at kappa_radius,
    R is exactly 4*gamma*s/kappa, and consistent means the two radii agree
    within radius_rtol (the curvature was checked essentially at R).
    """
    quick_trials = max(40, params.trials_rsc // 4)
    R_cur = 4.0 * gamma * s / kappa_init
    if radius_cap is not None:
        R_cur = min(R_cur, radius_cap)
    if not np.isfinite(R_cur) or R_cur <= 0:
        # zero gradient at the truth collapses the radius to zero; an infinite
        # contraction constant makes it unbounded.  Report curvature at a
        # nominal radius instead of iterating.
        nominal = 1e-3 if radius_cap is None else min(1e-3, radius_cap)
        kappa = estimate_rsc(problem, cone, nominal, params.trials_rsc, params.seed, h=h)
        if R_cur <= 0 and kappa > 0:
            return kappa, nominal, 0.0, True
        return kappa, nominal, np.inf, False
    kappa = None
    for _ in range(params.radius_rounds):
        kappa = estimate_rsc(problem, cone, R_cur, quick_trials, params.seed, h=h)
        if kappa <= 0:
            return kappa, R_cur, np.inf, False
        R_next = 4.0 * gamma * s / kappa
        if radius_cap is not None:
            R_next = min(R_next, radius_cap)
        if abs(R_next - R_cur) <= 0.02 * R_cur:
            R_cur = R_next
            break
        R_cur = float(np.sqrt(R_cur * R_next))
    kappa = estimate_rsc(problem, cone, R_cur, params.trials_rsc, params.seed, h=h)
    if kappa <= 0:
        return kappa, R_cur, np.inf, False
    R = 4.0 * gamma * s / kappa
    consistent = abs(R - R_cur) <= params.radius_rtol * max(R, 1e-30)
    return kappa, R_cur, R, consistent


def assemble_certificate(
    problem,
    estimate,
    constants: EstimatorConstants,
    params: CertificateParams,
) -> MetaCertificate:
    """Measure every condition of the recovery bound on one solved instance.

    gamma_measured is twice the dual norm of the loss gradient at the truth;
    R = 4*gamma_measured*s/kappa with all quantities measured.  The
    gradient-bound flag checks that the estimator's regularization weight
    dominates gamma_measured, which is the form of the condition the computed
    estimate actually relies on; radius_est = 4*gamma_est*s/kappa is the
    radius certified for that weight.
    """
    if isinstance(problem, RegressionProblem):
        return _assemble_regression(problem, estimate, constants, params)
    if isinstance(problem, PcaProblem):
        return _assemble_pca(problem, estimate, constants, params)
    raise TypeError(f"unsupported problem type {type(problem)!r}")


def _assemble_regression(problem, estimate, constants, params):
    if problem.beta_star is None:
        raise ValueError("certificate requires ground truth")
    composite, info = build_regression_composite(problem, constants)
    h, gamma_est = info["h"], info["gamma"]
    X, support, d = problem.X, problem.support, problem.d
    n, k = problem.n, problem.k
    sqrt_n = np.sqrt(n)

    gamma_measured = 2.0 * measure_gradient_dual_norm(problem, h=h)
    lambda_hat = check_re_property(X, support, params.trials_re, params.seed)
    s = 4.0 * np.sqrt(k / lambda_hat) if lambda_hat > 0 else np.inf

    cone = SparseCone(support, d, params.expansion)
    decomp = check_decomposability(
        lambda u: float(np.sum(np.abs(u))),
        _l1_sampler(support, d),
        _l1_sampler(np.setdiff1d(np.arange(d), support), d),
        params.trials_decomposability,
        params.seed,
    )
    metric = lambda u: float(np.linalg.norm(X @ u)) / sqrt_n
    contraction_measured = measure_contraction(
        cone, metric, params.trials_contraction, params.seed
    )

    kappa, kappa_radius, R, consistent = _radius_fixed_point(
        problem, cone, gamma_measured, s, params, h, kappa_init=float(n)
    )
    radius_formula_ok = bool(kappa > 0 and np.isfinite(R))

    conditions = {
        "decomposability": bool(decomp),
        "contraction": bool(np.isfinite(s) and contraction_measured <= s * (1 + 1e-9)),
        "gradient_bound": bool(gamma_measured <= gamma_est * (1 + 1e-12)),
        "restricted_convexity": bool(kappa >= 0.01 * params.alpha * n),
        "radius_bound": bool(radius_formula_ok and consistent),
    }

    delta_hat = np.asarray(estimate, dtype=float) - problem.beta_star
    err = metric(delta_hat)
    cone_ok = cone.member(delta_hat, rtol=1e-6)
    dominated_est = certify_against_reference(
        composite, estimate, problem.beta_star, params.margin
    )
    hp = HuberParams(h)
    obj_meas = lambda b: huber_loss(problem.y - X @ b, hp) + gamma_measured * float(
        np.sum(np.abs(b))
    )
    dominated_meas = bool(
        obj_meas(np.asarray(estimate, dtype=float))
        <= obj_meas(problem.beta_star) + params.margin
    )

    return MetaCertificate(
        gamma_measured=gamma_measured,
        s=s,
        kappa=kappa,
        R=R,
        conditions=conditions,
        radius_formula_ok=radius_formula_ok,
        kappa_radius=kappa_radius,
        rsc_vacuous=False,
        lambda_hat=lambda_hat,
        contraction_measured=contraction_measured,
        cone_membership_ok=cone_ok,
        error_value=err,
        error_lt_radius=bool(err < R),
        gamma_est=gamma_est,
        radius_est=4.0 * gamma_est * s / kappa if kappa > 0 else np.inf,
        dominated_est=dominated_est,
        dominated_meas=dominated_meas,
    )


def _assemble_pca(problem, estimate, constants, params):
    if problem.L_star is None or problem.r is None:
        raise ValueError("certificate requires ground truth with rank metadata")
    composite, info = build_pca_composite(problem, constants)
    h, gamma_est = info["h"], info["gamma"]
    n, r = problem.n, problem.r
    L_star = problem.L_star

    gamma_measured = 2.0 * measure_gradient_dual_norm(problem, h=h)
    s = 4.0 * np.sqrt(2.0 * r)

    cone = LowRankCone.from_truth(L_star, r=r, expansion=params.expansion)
    decomp = check_decomposability(
        nuclear_norm,
        _nuclear_sampler(cone.col_basis, cone.row_basis),
        _nuclear_sampler(cone.col_perp, cone.row_perp),
        params.trials_decomposability,
        params.seed,
    )
    contraction_measured = measure_contraction(
        cone, lambda M: float(np.linalg.norm(M)), params.trials_contraction, params.seed
    )

    # largest Frobenius distance reachable inside the box from L_star; beyond
    # it the radius-R cone shell is empty and the curvature condition is vacuous
    feasible_diameter = float(
        np.linalg.norm(problem.rho_over_n + np.abs(L_star))
    )
    gap = problem.rho_over_n - float(np.max(np.abs(L_star)))
    sampling_cap = 0.8 * gap * n / 4.5 if gap > 0 else 0.0
    if sampling_cap <= 0:
        raise RscSamplingError(
            "truth sits on the box boundary; no feasible cone samples exist"
        )
    kappa, kappa_radius, R, consistent = _radius_fixed_point(
        problem, cone, gamma_measured, s, params, h, kappa_init=1.0,
        radius_cap=sampling_cap,
    )
    radius_formula_ok = bool(kappa > 0 and np.isfinite(R))
    rsc_vacuous = bool(radius_formula_ok and R > feasible_diameter)

    conditions = {
        "decomposability": bool(decomp),
        "contraction": bool(contraction_measured <= s * (1 + 1e-9)),
        "gradient_bound": bool(gamma_measured <= gamma_est * (1 + 1e-12)),
        "restricted_convexity": bool(kappa >= 0.01 * params.alpha),
        "radius_bound": bool(radius_formula_ok and (consistent or rsc_vacuous)),
    }

    delta_hat = np.asarray(estimate, dtype=float) - L_star
    err = float(np.linalg.norm(delta_hat))
    cone_ok = cone.member(delta_hat, rtol=1e-6)
    dominated_est = certify_against_reference(composite, estimate, L_star, params.margin)
    hp = HuberParams(h)
    obj_meas = lambda L: huber_loss(problem.Y - L, hp) + gamma_measured * nuclear_norm(L)
    dominated_meas = bool(
        obj_meas(np.asarray(estimate, dtype=float)) <= obj_meas(L_star) + params.margin
    )

    return MetaCertificate(
        gamma_measured=gamma_measured,
        s=s,
        kappa=kappa,
        R=R,
        conditions=conditions,
        radius_formula_ok=radius_formula_ok,
        kappa_radius=kappa_radius,
        rsc_vacuous=rsc_vacuous,
        lambda_hat=None,
        contraction_measured=contraction_measured,
        cone_membership_ok=cone_ok,
        error_value=err,
        error_lt_radius=bool(err < R),
        gamma_est=gamma_est,
        radius_est=4.0 * gamma_est * s / kappa if kappa > 0 else np.inf,
        dominated_est=dominated_est,
        dominated_meas=dominated_meas,
    )
