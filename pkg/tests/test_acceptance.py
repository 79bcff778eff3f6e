"""End-to-end acceptance suite.

One test per acceptance criterion, in order; `pytest -v tests/test_acceptance.py`
prints one pass/fail line per criterion.  Criteria 4, 5, 6, and 10 run the
checked-in configs under configs/ through the same runner and assertion rules
the CLI uses.  Each test also enforces its wall-clock budget.
"""

import dataclasses
import time
from pathlib import Path

import numpy as np

from robust_huber import (
    EstimatorConstants,
    HuberParams,
    NoiseSpec,
    SignalSpec,
    SolverConfig,
    curvature_lower_bound_holds,
    estimate_pca,
    estimate_sparse_regression,
    huber_loss,
    huber_loss_grad,
    huber_penalty,
    huber_penalty_deriv,
    make_pca_instance,
    make_regression_instance,
    prox_l1,
    prox_nuclear,
)
from robust_huber.datagen import (
    gen_gaussian_design,
    gen_lb_noise,
    gen_oblivious_noise_vector,
    lb_noise_params,
    make_gaussian_design_instance,
)
from robust_huber.estimators import build_regression_composite
from robust_huber.experiments import (
    ExperimentSpec,
    emit_csv,
    run_experiment,
    scenario_assertions,
)
from robust_huber.solver import composite_objective, solve_fista
from robust_huber.verification import (
    check_gaussian_concentration,
    check_re_property,
    check_well_spread,
    gradient_bound_pca,
    gradient_bound_regression,
    measure_gradient_dual_norm,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

H2 = HuberParams(2.0)


def run_config(name):
    """Run one checked-in config and require every scenario check to pass."""
    spec = ExperimentSpec.from_config(CONFIG_DIR / name)
    rows = run_experiment(spec)
    errors = [r.error for r in rows if r.error]
    assert not errors, f"{name}: {len(errors)} trial errors; first: {errors[0]}"
    checks = scenario_assertions(spec, rows)
    assert checks, f"{name}: scenario produced no checks"
    failed = [(cname, detail) for cname, ok, detail in checks if not ok]
    assert not failed, f"{name}: failed checks {failed}"
    return rows


# criterion 1: penalty examples, gradient vs finite differences on 1e3
# vectors, curvature predicate on 1e6 tuples, under 10 s


def test_criterion_01_huber_oracle():
    t0 = time.perf_counter()
    assert huber_penalty(0.0, H2) == 0.0
    assert huber_penalty(1.0, H2) == 0.5
    assert huber_penalty(3.0, H2) == 4.0
    assert huber_penalty_deriv(5.0, H2) == 2.0
    assert huber_loss(np.array([1.0, 3.0]), H2) == 4.5

    rng = np.random.default_rng(101)
    step = 1e-6
    for _ in range(1000):
        r = rng.uniform(-3 * H2.h, 3 * H2.h, size=20)
        grad = huber_loss_grad(r, H2)
        fd = np.array(
            [
                (huber_loss(r + step * e, H2) - huber_loss(r - step * e, H2))
                / (2 * step)
                for e in np.eye(20)
            ]
        )
        assert np.linalg.norm(fd - grad) <= 1e-5 * max(np.linalg.norm(grad), 1.0)

    n = 1_000_000
    eta = rng.uniform(-3 * H2.h, 3 * H2.h, size=n)
    delta = rng.uniform(-3 * H2.h, 3 * H2.h, size=n)
    tau = rng.uniform(0.0, H2.h, size=n)
    assert np.all(curvature_lower_bound_holds(eta, delta, tau, H2))
    assert time.perf_counter() - t0 < 10.0


# criterion 2: prox oracles under 30 s


def scalar_soft_threshold_oracle(v, t):
    # bisection on the strictly increasing subgradient x - v + t*sign(x);
    # value-based minimization cannot localize the argmin below sqrt(eps)
    def deriv(x):
        return x - v + t * np.sign(x)

    lo, hi = -abs(v) - t - 1.0, abs(v) + t + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if deriv(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_02_prox_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)

    vs = rng.uniform(-10.0, 10.0, size=1000)
    ts = rng.uniform(0.0, 5.0, size=1000)
    for v, t in zip(vs, ts):
        assert abs(prox_l1(np.array([v]), t)[0] - scalar_soft_threshold_oracle(v, t)) <= 1e-8

    for _ in range(100):
        M = rng.standard_normal((5, 5)) * rng.uniform(0.5, 3.0)
        t = rng.uniform(0.2, 2.0)
        P = prox_nuclear(M, t)

        def objective(Z):
            return 0.5 * np.sum((Z - M) ** 2) + t * np.sum(
                np.linalg.svd(Z, compute_uv=False)
            )

        base = objective(P)
        for _ in range(40):
            D = rng.standard_normal((5, 5))
            D *= 1e-4 / np.linalg.norm(D)
            assert objective(P + D) >= base - 1e-10

    for _ in range(1000):
        t = rng.uniform(0.0, 3.0)
        a, b = rng.standard_normal(30), rng.standard_normal(30)
        lhs = np.linalg.norm(prox_l1(a, t) - prox_l1(b, t))
        assert lhs <= np.linalg.norm(a - b) * (1 + 1e-12) + 1e-12
        A, B = rng.standard_normal((5, 5)), rng.standard_normal((5, 5))
        lhs = np.linalg.norm(prox_nuclear(A, t) - prox_nuclear(B, t))
        assert lhs <= np.linalg.norm(A - B) * (1 + 1e-12) + 1e-12
    assert time.perf_counter() - t0 < 30.0


# criterion 3: solver vs normal equations and brute-force grids, under 2 min


def test_criterion_03_solver_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)

    # quadratic regime: huge huber threshold and negligible l1 weight reduce
    # the problem to least squares
    for _ in range(5):
        n, d = 80, 6
        X = rng.standard_normal((n, d))
        beta = rng.standard_normal(d)
        y = X @ beta + 0.1 * rng.standard_normal(n)
        exact = np.linalg.solve(X.T @ X, X.T @ y)
        h = 1e6
        gamma = 1e-10

        def smooth(b):
            r = y - X @ b
            p = HuberParams(h)
            return huber_loss(r, p), -(X.T @ huber_loss_grad(r, p))

        from robust_huber.solver import CompositeProblem

        prob = CompositeProblem(
            smooth_eval=smooth,
            prox=lambda v, t: prox_l1(v, gamma * t),
            reg_value=lambda v: gamma * float(np.sum(np.abs(v))),
            shape=(d,),
        )
        res = solve_fista(prob, SolverConfig(max_iters=20000, rel_tol=1e-12), np.zeros(d))
        assert np.linalg.norm(res.point - exact) <= 1e-6 * max(1.0, np.linalg.norm(exact))

    # d = 2 regression against a dense objective grid
    reg = make_regression_instance(
        40, 2, SignalSpec(1, 1.5), NoiseSpec("symmetric_mixture", 0.8), seed=31
    )
    constants = EstimatorConstants(gamma_scale=1.0)
    beta_hat, reg_result = estimate_sparse_regression(
        reg, constants, SolverConfig(max_iters=20000, rel_tol=1e-9)
    )
    composite, info = build_regression_composite(reg, constants)
    g1, g2 = np.meshgrid(np.linspace(-3, 3, 241), np.linspace(-3, 3, 241))
    B = np.stack([g1.ravel(), g2.ravel()])
    R = reg.y[:, None] - reg.X @ B
    m = np.minimum(np.abs(R), info["h"])
    losses = np.sum(0.5 * m * m + info["h"] * (np.abs(R) - m), axis=0)
    grid_min = float(np.min(losses + info["gamma"] * np.sum(np.abs(B), axis=0)))
    assert composite_objective(composite, beta_hat) <= grid_min + 1e-4

    # 2x2 low-rank problem against a grid over the box
    pca = make_pca_instance(
        2, 1, NoiseSpec("symmetric_mixture", 0.8), 1.0, seed=32, l_scale=0.5
    )
    L_hat, pca_result = estimate_pca(
        pca, constants, SolverConfig(max_iters=20000, rel_tol=1e-9)
    )
    from robust_huber.estimators import build_pca_composite

    pcomp, pinfo = build_pca_composite(pca, constants)
    axis = np.linspace(-1.0, 1.0, 21)
    l11, l12, l21, l22 = (g.ravel() for g in np.meshgrid(axis, axis, axis, axis))

    def hub(t):
        mm = np.minimum(np.abs(t), pinfo["h"])
        return 0.5 * mm * mm + pinfo["h"] * (np.abs(t) - mm)

    loss = (
        hub(pca.Y[0, 0] - l11) + hub(pca.Y[0, 1] - l12)
        + hub(pca.Y[1, 0] - l21) + hub(pca.Y[1, 1] - l22)
    )
    fro2 = l11**2 + l12**2 + l21**2 + l22**2
    nuc = np.sqrt(fro2 + 2.0 * np.abs(l11 * l22 - l12 * l21))
    grid_min = float(np.min(loss + pinfo["gamma"] * nuc))
    assert composite_objective(pcomp, L_hat) <= grid_min + 1e-4

    # every solved instance with feasible truth must dominate the reference
    dominated = [bool(reg_result.reference_dominated), bool(pca_result.reference_dominated)]
    for i in range(6):
        p = make_regression_instance(
            60, 8, SignalSpec(2, 3.0), NoiseSpec("symmetric_mixture", 0.8), seed=330 + i
        )
        _, r = estimate_sparse_regression(
            p, EstimatorConstants(gamma_scale=2.0), SolverConfig(max_iters=5000, rel_tol=1e-7)
        )
        dominated.append(bool(r.reference_dominated))
    for i in range(4):
        p = make_pca_instance(
            30, 1, NoiseSpec("symmetric_mixture", 0.8), 1.0, seed=340 + i, l_scale=0.5
        )
        _, r = estimate_pca(
            p, EstimatorConstants(gamma_scale=2.0), SolverConfig(max_iters=1500, rel_tol=1e-5)
        )
        dominated.append(bool(r.reference_dominated))
    assert all(dominated)
    assert time.perf_counter() - t0 < 120.0


# criteria 4 and 5: rate laws from the checked-in sweep configs


def test_criterion_04_regression_rate():
    t0 = time.perf_counter()
    run_config("accept04_regression_n.ini")
    run_config("accept04_regression_alpha.ini")
    assert time.perf_counter() - t0 < 900.0


def test_criterion_05_pca_rate():
    t0 = time.perf_counter()
    run_config("accept05_pca_n.ini")
    run_config("accept05_pca_alpha.ini")
    assert time.perf_counter() - t0 < 1200.0


# criterion 6: certificates on 20 regression and 10 low-rank instances


def test_criterion_06_meta_certificates():
    t0 = time.perf_counter()
    reg_rows = run_config("accept06_meta_regression.ini")
    pca_rows = run_config("accept06_meta_pca.ini")
    assert len(reg_rows) == 20
    assert len(pca_rows) == 10
    assert time.perf_counter() - t0 < 600.0


# criterion 7: gradient-bound exceedance over 200 redraws per family


def test_criterion_07_gradient_bound_exceedance():
    t0 = time.perf_counter()
    allowance = 0.05 + 2.0 * np.sqrt(0.05 * 0.95 / 200.0)

    sig = SignalSpec(5, 3.0)
    noise = NoiseSpec("symmetric_mixture", 0.5)
    exceed = 0
    for i in range(200):
        prob = make_regression_instance(500, 50, sig, noise, seed=90000 + i)
        g = measure_gradient_dual_norm(prob)
        bound = gradient_bound_regression(prob.column_norm_bound(), prob.n, prob.d, 0.05)
        exceed += g > bound
    assert exceed / 200.0 <= allowance

    pca_noise = NoiseSpec("symmetric_mixture", 0.8)
    exceed = 0
    for i in range(200):
        prob = make_pca_instance(100, 2, pca_noise, 1.0, seed=91000 + i)
        g = measure_gradient_dual_norm(prob)
        bound = gradient_bound_pca(prob.zeta + prob.rho_over_n, prob.n, 0.05)
        exceed += g > bound
    assert exceed / 200.0 <= allowance
    assert time.perf_counter() - t0 < 300.0


# criterion 8: design-structure checkers with positive and negative controls


def test_criterion_08_design_structure():
    t0 = time.perf_counter()
    sigma = np.eye(50)
    X_good = gen_gaussian_design(1500, 50, sigma, seed=7001)
    assert check_gaussian_concentration(X_good, sigma, sparsity=5, trials=200, seed=7002)

    wide = np.eye(500)
    X_bad = gen_gaussian_design(10, 500, wide, seed=7003)
    assert not check_gaussian_concentration(X_bad, wide, sparsity=20, trials=100, seed=7004)

    inst = make_gaussian_design_instance(1000, 50, SignalSpec(5, 3.0), 0.5, seed=7005)
    lam = check_re_property(inst.X, inst.support, trials=300, seed=7006)
    assert lam >= 0.25  # sigma is the identity: sigma_min / 4

    assert check_well_spread(inst.X, inst.support, m=100, trials=100, seed=7007)
    rng = np.random.default_rng(7008)
    X_conc = 1e-3 * rng.standard_normal((50, 6))
    X_conc[0, :] = 100.0
    assert not check_well_spread(X_conc, np.array([0]), m=1, trials=50, seed=7009)
    assert time.perf_counter() - t0 < 300.0


# criterion 9: noise-model normalization, inlier rates, symmetry


def symmetry_gap(x):
    # max over thresholds of |P(X <= t) + P(X < -t) - 1| on the sample law
    xs = np.sort(np.asarray(x, dtype=float).ravel())
    n = xs.size
    t = np.abs(xs)
    F_le = np.searchsorted(xs, t, side="right") / n
    F_lt_neg = np.searchsorted(xs, -t, side="left") / n
    return float(np.max(np.abs(F_le + F_lt_neg - 1.0)))


def test_criterion_09_noise_models():
    t0 = time.perf_counter()
    for n, r, xi in [(4, 1, 0.5), (400, 1, 0.05), (100, 2, 0.3)]:
        a, q = lb_noise_params(n, r, xi)
        mass = a * (1.0 + 2.0 * np.sum(q ** np.arange(1, 20001)))
        assert mass >= 1.0 - 1e-9

    # empirical inlier rates within 3 sigma of the law for every family
    n_samp = 100_000
    for family in ("symmetric_mixture", "gaussian", "deterministic_sparse_outliers"):
        spec = NoiseSpec(family, alpha=0.7, zeta=1.0)
        x = gen_oblivious_noise_vector(n_samp, spec, seed=909)
        inliers = int(np.sum(np.abs(x) <= 1.0))
        assert abs(inliers - 0.7 * n_samp) <= 3.0 * np.sqrt(n_samp * 0.7 * 0.3)

    a, _ = lb_noise_params(100, 2, 0.3)
    grid = gen_lb_noise(100, 2, 0.3, seed=910)
    zeros = int(np.sum(grid == 0.0))
    assert abs(zeros - a * 100**2) <= 3.0 * np.sqrt(100**2 * a * (1 - a))

    for family in ("symmetric_mixture", "gaussian", "deterministic_sparse_outliers"):
        spec = NoiseSpec(family, alpha=0.6, zeta=1.0)
        x = gen_oblivious_noise_vector(n_samp, spec, seed=911)
        assert symmetry_gap(x) <= 0.01
    assert symmetry_gap(gen_lb_noise(317, 1, 0.5, seed=912)) <= 0.01
    assert time.perf_counter() - t0 < 60.0


# criterion 10: phase experiment around the weak-recovery threshold


def test_criterion_10_lowerbound_phase():
    t0 = time.perf_counter()
    run_config("accept10_phase.ini")
    assert time.perf_counter() - t0 < 900.0


# criterion 11: serial and parallel re-runs emit byte-identical CSVs


def test_criterion_11_reproducibility(tmp_path):
    t0 = time.perf_counter()
    spec = ExperimentSpec.from_config(CONFIG_DIR / "accept04_regression_n.ini")
    small = dataclasses.replace(spec, grid={"n": [500]})
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    emit_csv(run_experiment(small, threads=1), serial)
    emit_csv(run_experiment(small, threads=2), parallel)
    assert serial.read_bytes() == parallel.read_bytes()
    assert time.perf_counter() - t0 < 60.0
