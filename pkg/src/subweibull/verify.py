"""Self-verification suite: every structural invariant as a named check.

Each check returns a :class:`CheckResult`; ``run_all`` executes the whole
battery.  The Monte Carlo checks accept a trial budget so that a quick
smoke run and the full-strength run share one code path.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import ks_2samp

from . import concentration as conc
from . import dist, montecarlo, orlicz, tau
from .quadrature import improper_integral
from .streams import RandomStream


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name, bool(passed), detail)


# ---------------------------------------------------------------------------
# dist


def check_density_normalization() -> CheckResult:
    """Densities integrate to 1; the singular families are substituted u = x**(q/2)."""
    worst = 0.0
    cases = [
        dist.DistributionSpec.exponential(),
        dist.DistributionSpec.weibull(0.7, 1.5),
        dist.DistributionSpec.weibull(2.0, 1.0),
        dist.DistributionSpec.pnormal(1.0),
        dist.DistributionSpec.pnormal(3.0),
        dist.DistributionSpec.halfgauss_pow(1.5, 2.0),
    ]
    for spec in cases:
        q, theta = spec.order, spec.scale
        if spec.family == dist.FAMILY_EXP:
            total = improper_integral(lambda x: dist.density(spec, x))
        elif spec.family == dist.FAMILY_WEIBULL:
            e = 1.0 / q
            total = improper_integral(
                lambda u: dist.density(spec, theta * u**e) * theta * e * u ** (e - 1.0)
                if u > 0.0
                else 0.0
            )
        else:
            e = 2.0 / q
            total = improper_integral(
                lambda u: dist.density(spec, theta * u**e) * theta * e * u ** (e - 1.0)
                if u > 0.0
                else 0.0
            )
            if spec.symmetric:
                total *= 2.0
        worst = max(worst, abs(total - 1.0))
    return _result("dist.density_normalization", worst <= 1e-8, f"max |integral-1| = {worst:.3g}")


def check_mgf_quadrature() -> CheckResult:
    spec = dist.DistributionSpec.exponential()
    worst = 0.0
    for t in (-1.0, 0.0, 0.5, 0.9):
        closed = dist.mgf(spec, t)
        numeric = dist.mgf_quadrature(spec, t)
        worst = max(worst, abs(numeric - closed) / abs(closed))
    inf_ok = dist.mgf(spec, 1.0) == math.inf and dist.mgf_quadrature(spec, 1.0) == math.inf
    return _result(
        "dist.mgf_vs_quadrature",
        worst <= 1e-8 and inf_ok,
        f"max rel err = {worst:.3g}, divergent branch ok = {inf_ok}",
    )


def check_weibull_sampler_identity(n: int = 100_000) -> CheckResult:
    shape, scale = 1.7, 1.3
    spec = dist.DistributionSpec.weibull(shape, scale)
    a = dist.sample(spec, RandomStream(411, 0), n)
    e = dist.sample(dist.DistributionSpec.exponential(), RandomStream(411, 1), n)
    b = scale * e ** (1.0 / shape)
    stat, pvalue = ks_2samp(a, b)
    return _result(
        "dist.weibull_sampler_identity",
        pvalue > 1e-3,
        f"KS stat = {stat:.4g}, p-value = {pvalue:.4g}",
    )


def check_pnormal_symmetry() -> CheckResult:
    spec = dist.DistributionSpec.pnormal(3.0)
    x = dist.sample(spec, RandomStream(7, 0), 50_000)
    flip_exact = np.array_equal(np.sort(np.abs(x)), np.sort(np.abs(-x)))
    sign_balance = abs(float(np.mean(np.sign(x))))
    return _result(
        "dist.pnormal_symmetry",
        flip_exact and sign_balance < 4.0 / math.sqrt(x.size),
        f"sign mean = {sign_balance:.3g}",
    )


def check_sampler_moments() -> CheckResult:
    n = 1_000_000
    w = dist.sample(dist.DistributionSpec.weibull(1.0, 1.0), RandomStream(2024, 0), n)
    ok1 = abs(float(np.mean(w)) - 1.0) <= 0.005
    g = dist.sample(dist.DistributionSpec.pnormal(3.0), RandomStream(2024, 1), n)
    ok2 = abs(float(np.mean(np.abs(g) ** 3.0)) - 1.0) <= 0.01
    sigma = math.sqrt(dist.moment_abs(dist.DistributionSpec.pnormal(3.0), 2.0))
    ok3 = abs(float(np.mean(g))) <= 3.0 * sigma / 1e3
    return _result(
        "dist.sampler_moments",
        ok1 and ok2 and ok3,
        f"weibull mean ok={ok1}, |g_p|^p mean ok={ok2}, centered mean ok={ok3}",
    )


# ---------------------------------------------------------------------------
# orlicz


_TABLE_CASES: Sequence[tuple[dist.DistributionSpec, float, float, str]] = (
    (dist.DistributionSpec.exponential(), 1.0, 2.0, "exp p=1"),
    (dist.DistributionSpec.weibull(1.0, 1.0), 1.0, 2.0, "weibull(1,1)"),
    (dist.DistributionSpec.weibull(2.0, 1.0), 2.0, 2.0**0.5, "weibull(2,1)"),
    (dist.DistributionSpec.weibull(3.0, 2.0), 3.0, 2.0 * 2.0 ** (1.0 / 3.0), "weibull(3,2)"),
    (dist.DistributionSpec.pnormal(1.0), 1.0, 8.0 / 3.0, "pnormal(1)"),
    (dist.DistributionSpec.pnormal(2.0), 2.0, (8.0 / 3.0) ** 0.5, "pnormal(2)"),
    (dist.DistributionSpec.pnormal(3.0), 3.0, (8.0 / 3.0) ** (1.0 / 3.0), "pnormal(3)"),
    (dist.DistributionSpec.pnormal(4.0), 4.0, (8.0 / 3.0) ** 0.25, "pnormal(4)"),
)


def check_closed_form_table() -> CheckResult:
    lines = []
    worst = 0.0
    for spec, p, expected, label in _TABLE_CASES:
        analytic = orlicz.psi_norm_analytic(spec, p).value
        numeric = orlicz.psi_norm_quadrature(spec, p, tol=1e-8).value
        rel = abs(numeric - analytic) / analytic
        worst = max(worst, rel, abs(analytic - expected) / expected)
        lines.append(f"{label}: analytic={analytic:.12g} quadrature={numeric:.12g} rel={rel:.2e}")
    return _result("orlicz.closed_form_table", worst <= 1e-6, "\n    ".join(lines))


def check_norm_scaling() -> CheckResult:
    worst = 0.0
    for c in (0.5, 3.0):
        got = orlicz.psi_norm_quadrature(dist.DistributionSpec.weibull(1.5, c), 1.5).value
        want = c * 2.0 ** (1.0 / 1.5)
        worst = max(worst, abs(got - want) / want)
        got = orlicz.psi_norm_quadrature(dist.DistributionSpec.halfgauss_pow(2.5, c), 2.5).value
        want = c * (8.0 / 3.0) ** (1.0 / 2.5)
        worst = max(worst, abs(got - want) / want)
    return _result("orlicz.norm_scaling", worst <= 2e-6, f"max rel err = {worst:.3g}")


def check_power_identity() -> CheckResult:
    cases = [
        (dist.DistributionSpec.pnormal(2.0), 2.0, 1.0),
        (dist.DistributionSpec.exponential(), 2.0, 0.5),
        (dist.DistributionSpec.weibull(2.0, 1.0), 2.0, 1.0),
    ]
    worst = 0.0
    for spec, p, r in cases:
        lhs, rhs = orlicz.power_norm_identity(spec, p, r)
        worst = max(worst, abs(lhs - rhs))
    return _result("orlicz.power_identity", worst <= 1e-5, f"max |lhs-rhs| = {worst:.3g}")


def check_tail_bound_grid() -> CheckResult:
    cases = [
        (dist.DistributionSpec.exponential(), 1.0),
        (dist.DistributionSpec.weibull(2.0, 1.5), 2.0),
        (dist.DistributionSpec.pnormal(3.0), 3.0),
        (dist.DistributionSpec.halfgauss_pow(2.0, 0.5), 2.0),
    ]
    try:
        for spec, p in cases:
            k = orlicz.psi_norm_analytic(spec, p).value
            orlicz.check_equivalence(spec, p, k)
    except Exception as exc:  # a raise means a violated bound
        return _result("orlicz.tail_bound_grid", False, str(exc))
    return _result("orlicz.tail_bound_grid", True, f"{len(cases)} families certified")


def check_tail_to_norm_conversion() -> CheckResult:
    """A certified tail constant L bounds the norm by 3**(1/p) * L."""
    worst = -math.inf
    for spec, p in (
        (dist.DistributionSpec.exponential(), 1.0),
        (dist.DistributionSpec.weibull(3.0, 2.0), 3.0),
        (dist.DistributionSpec.pnormal(2.0), 2.0),
    ):
        L = orlicz.psi_norm_analytic(spec, p).value
        value = orlicz.psi_norm_quadrature(spec, p).value
        worst = max(worst, value - 3.0 ** (1.0 / p) * L)
    return _result(
        "orlicz.tail_to_norm_conversion", worst <= 1e-6, f"max excess = {worst:.3g}"
    )


def check_quasinorm_small_p() -> CheckResult:
    """For p < 1 only homogeneity and definiteness are claimed."""
    p = 0.5
    base = orlicz.psi_norm_quadrature(dist.DistributionSpec.weibull(p, 1.0), p).value
    scaled = orlicz.psi_norm_quadrature(dist.DistributionSpec.weibull(p, 2.5), p).value
    homogeneous = abs(scaled - 2.5 * base) / (2.5 * base) <= 2e-6
    definite = base > 0.0
    return _result(
        "orlicz.quasinorm_small_p",
        homogeneous and definite,
        f"norm={base:.6g}, scaled rel err={(abs(scaled - 2.5 * base) / (2.5 * base)):.2e}",
    )


def check_phi_monotone() -> CheckResult:
    law = dist.canonical(dist.DistributionSpec.pnormal(2.0))
    ks = np.linspace(1.3, 8.0, 12)
    vals = [orlicz.exp_moment(law, 2.0, float(k)) for k in ks]
    ok = all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    return _result("orlicz.exp_moment_monotone", ok, f"range [{vals[-1]:.4g}, {vals[0]:.4g}]")


def check_centering_bound() -> CheckResult:
    cases = [
        (dist.DistributionSpec.exponential(), 1.0),
        (dist.DistributionSpec.weibull(2.0, 1.0), 2.0),
        (dist.DistributionSpec.pnormal(3.0), 3.0),
    ]
    details = []
    ok = True
    for spec, p in cases:
        lhs, rhs = orlicz.centering_bound_check(spec, p)
        ok &= lhs <= rhs + 1e-6
        details.append(f"{spec.family}: {lhs:.6g} <= {rhs:.6g}")
    return _result("orlicz.centering_bound", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# tau


def check_conjugacy() -> CheckResult:
    worst = 0.0
    for t in np.linspace(-10.0, 10.0, 1000):
        got = tau.convex_conjugate(tau.phi_inf, float(t), search_bound=2.0)
        worst = max(worst, abs(got - float(tau.phi1(t))))
    return _result("tau.conjugacy", worst <= 1e-9, f"max |conj - phi1| = {worst:.3g}")


def check_biconjugacy() -> CheckResult:
    inner = lambda u: tau.convex_conjugate(tau.phi_inf, u, search_bound=2.0)
    worst = 0.0
    for t in np.linspace(-0.999, 0.999, 101):
        got = tau.convex_conjugate(inner, float(t), search_bound=50.0)
        worst = max(worst, abs(got - float(tau.phi_inf(t))))
    return _result("tau.biconjugacy", worst <= 1e-6, f"max err = {worst:.3g}")


def check_tau_values() -> CheckResult:
    details = []
    ok = True
    got = tau.tau_norm(tau.exp_centered(), tol=1e-8).value
    ok &= abs(got - 2.0) <= 1e-6
    details.append(f"exp_centered: {got:.9g}")
    for n in (1, 4, 9, 100):
        got = tau.tau_norm(tau.iid_sum(tau.exp_centered(), n), tol=1e-6).value
        ok &= abs(got - (math.sqrt(n) + 1.0)) <= 1e-4
        details.append(f"sum n={n}: {got:.8g}")
    for sigma in (0.5, 1.0, 2.0):
        got = tau.tau_norm(tau.gaussian(sigma), tol=1e-8).value
        ok &= abs(got - sigma) <= 1e-6
    return _result("tau.values", ok, "; ".join(details))


def check_tau_mgf_domination() -> CheckResult:
    cum = tau.exp_centered()
    k = tau.tau_norm(cum, tol=1e-8).value
    worst = -math.inf
    for t in np.linspace(-1.0 / k, 1.0 / k, 1000):
        slack = float(cum.value(float(t))) - 0.5 * (k * float(t)) ** 2
        worst = max(worst, slack)
    curvature_gap = abs(float(cum.curvature(1.0 / k)) - k * k)
    return _result(
        "tau.mgf_domination",
        worst <= 1e-9 and curvature_gap <= 1e-6,
        f"max violation = {worst:.3g}, boundary curvature gap = {curvature_gap:.3g}",
    )


def check_tau_tightness() -> CheckResult:
    ok = True
    for cum in (tau.exp_centered(), tau.gaussian(1.5)):
        value = tau.tau_norm(cum, tol=1e-8).value
        ok &= not tau.tau_feasible(cum, value * (1.0 - 1e-3))
        ok &= tau.tau_feasible(cum, value)
    return _result("tau.tightness", ok, "feasibility flips across the returned value")


def check_phi1_min_inequality() -> CheckResult:
    u = np.linspace(0.0, 10.0, 100_001)
    ok = bool(np.all(conc.phi1_min_inequality(u)))
    return _result("tau.phi1_min_inequality", ok, f"{u.size} grid points")


def check_tau_scaling() -> CheckResult:
    base = tau.exp_centered()
    worst = 0.0
    for a in (0.5, 2.0):
        got = tau.tau_norm(tau.scaled(base, a), tol=1e-8).value
        worst = max(worst, abs(got - 2.0 * a))
    return _result("tau.scaling", worst <= 1e-6, f"max |tau(aX) - a tau(X)| = {worst:.3g}")


def check_rotation_invariance() -> CheckResult:
    spec = dist.DistributionSpec.exponential()
    details = []
    ok = True
    for n in (1, 9, 100):
        lhs, rhs = tau.rotation_invariance_check([spec] * n)
        ok &= lhs <= rhs + 1e-6
        if n == 1:
            ok &= abs(lhs - rhs) <= 1e-6
        details.append(f"n={n}: {lhs:.6g} <= {rhs:.6g}")
    return _result("tau.rotation_invariance", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# concentration lemmas


def check_lemma_batches(cases: int = 100_000, seed: int = 20_240) -> CheckResult:
    gen = RandomStream(seed, 0).generator()
    a = gen.uniform(0.0, 50.0, cases)
    b = gen.uniform(0.0, 50.0, cases)
    p1 = gen.uniform(1.0, 8.0, cases)
    fail_concavity = int(np.count_nonzero(~conc.lemma_concavity(a, b, p1)))
    x = gen.uniform(0.0, 10.0, cases)
    delta = gen.uniform(0.0, 5.0, cases)
    fail_xalfa = int(np.count_nonzero(~conc.lemma_xalfa(x, delta, p1)))
    gamma = gen.uniform(0.0, 10.0, cases)
    p2 = gen.uniform(2.0, 8.0, cases)
    fail_phi1 = int(np.count_nonzero(~conc.lemma_phi1_power(gamma, p2)))
    u = gen.uniform(0.0, 20.0, cases)
    fail_min = int(np.count_nonzero(~conc.phi1_min_inequality(u)))
    fails = fail_concavity + fail_xalfa + fail_phi1 + fail_min
    return _result(
        "conc.lemma_batches",
        fails == 0,
        f"{cases} cases each: concavity={fail_concavity}, power={fail_xalfa}, "
        f"phi1_power={fail_phi1}, min_form={fail_min} failures",
    )


def check_norm_vs_moment() -> CheckResult:
    """The order-p norm to the p dominates the p-th absolute moment."""
    ok = True
    details = []
    for spec, p in (
        (dist.DistributionSpec.pnormal(2.5), 2.5),
        (dist.DistributionSpec.weibull(2.0, 1.7), 2.0),
        (dist.DistributionSpec.exponential(), 1.0),
    ):
        k_pow = orlicz.psi_norm_analytic(spec, p).value ** p
        mom = dist.moment_abs(spec, p)
        ok &= k_pow >= mom
        details.append(f"{spec.family}: {k_pow:.4g} >= {mom:.4g}")
    return _result("conc.norm_vs_moment", ok, "; ".join(details))


def check_lp_subadditivity(seed: int = 99) -> CheckResult:
    gen = RandomStream(seed, 0).generator()
    worst = -math.inf
    for _ in range(200):
        n = int(gen.integers(1, 40))
        p = float(gen.uniform(1.0, 6.0))
        x = gen.normal(size=n) * 10.0
        y = gen.normal(size=n) * 10.0
        worst = max(
            worst, conc.lp_norm(x + y, p) - conc.lp_norm(x, p) - conc.lp_norm(y, p)
        )
    return _result("conc.lp_subadditivity", worst <= 1e-9, f"max excess = {worst:.3g}")


# ---------------------------------------------------------------------------
# monte carlo


def check_center_values() -> CheckResult:
    worst = 0.0
    m = conc.VectorModel(dist.DistributionSpec.pnormal(3.0), 17, 3.0)
    worst = max(worst, abs(montecarlo.center_value(m) - 17.0 ** (1.0 / 3.0)))
    m = conc.VectorModel(dist.DistributionSpec.exponential(), 25, 1.0)
    worst = max(worst, abs(montecarlo.center_value(m) - 25.0))
    spec = dist.DistributionSpec.weibull(2.0, 1.5)
    m = conc.VectorModel(spec, 9, 2.0)
    worst = max(worst, abs(montecarlo.center_value(m) - 1.5 * 3.0))
    quad_moment = dist.moment_abs_quadrature(spec, 2.0)
    worst = max(worst, abs(quad_moment - dist.moment_abs(spec, 2.0)))
    return _result("mc.center_values", worst <= 1e-8, f"max abs err = {worst:.3g}")


def check_reproducibility(trials: int = 2_000) -> CheckResult:
    plan = montecarlo.ExperimentPlan(
        conc.VectorModel(dist.DistributionSpec.pnormal(2.0), 16, 2.0), trials, 31_337
    )
    outputs = []
    saved = os.environ.get(montecarlo.ENV_THREADS)
    try:
        for workers in ("1", "4"):
            os.environ[montecarlo.ENV_THREADS] = workers
            outputs.append(montecarlo.reports_to_csv([montecarlo.run_report(plan)]))
    finally:
        if saved is None:
            os.environ.pop(montecarlo.ENV_THREADS, None)
        else:
            os.environ[montecarlo.ENV_THREADS] = saved
    ok = outputs[0] == outputs[1]
    return _result("mc.reproducibility", ok, f"worker counts 1 vs 4 identical = {ok}")


def check_tail_monotone(trials: int = 10_000) -> CheckResult:
    plan = montecarlo.ExperimentPlan(
        conc.VectorModel(dist.DistributionSpec.exponential(), 32, 1.0), trials, 5
    )
    rows = montecarlo.tail_exceedance(plan)
    freqs = [f for _, f, _ in rows]
    ok = all(a >= b for a, b in zip(freqs, freqs[1:])) and freqs[0] == 1.0
    return _result("mc.tail_monotone", ok, f"freq range [{freqs[-1]:.3g}, {freqs[0]:.3g}]")


N_GRID = (16, 64, 256, 1024, 4096)


def check_growth_rates(trials: int = 20_000, seed: int = 777) -> CheckResult:
    ns = list(N_GRID)
    reports_g = montecarlo.growth_suite(
        dist.DistributionSpec.pnormal(2.0), 2.0, ns, trials, seed, bootstrap=False
    )
    slope_g = montecarlo.loglog_slope(ns, [r.emp_dev_norm for r in reports_g])
    single_c = max(r.thm14_C for r in reports_g)
    reports_e = montecarlo.growth_suite(
        dist.DistributionSpec.exponential(), 1.0, ns, trials, seed, bootstrap=False
    )
    slope_e = montecarlo.loglog_slope(ns, [r.emp_dev_norm for r in reports_e])
    c_vals = [r.prop13_C for r in reports_e]
    stable = max(c_vals) / min(c_vals) <= 1.8
    ok = (
        -0.1 <= slope_g <= 0.1
        and single_c <= 8.0
        and 0.4 <= slope_e <= 0.6
        and stable
    )
    return _result(
        "mc.growth_rates",
        ok,
        f"dimension-free slope = {slope_g:.4f} (C = {single_c:g}), "
        f"dimension-bound slope = {slope_e:.4f} (C range {min(c_vals):g}..{max(c_vals):g})",
    )


def check_bound_domination(trials: int = 10_000, seed: int = 778) -> CheckResult:
    ok = True
    details = []
    for spec, n, p in (
        (dist.DistributionSpec.exponential(), 100, 1.0),
        (dist.DistributionSpec.pnormal(3.0), 256, 3.0),
    ):
        plan = montecarlo.ExperimentPlan(conc.VectorModel(spec, n, p), trials, seed)
        report = montecarlo.run_report(plan, bootstrap=False)
        bad = [r for r in report.tail_rows if r.freq > r.bound + 3.0 * r.se]
        ok &= not bad
        details.append(f"{spec.family} n={n}: {len(report.tail_rows)} rows, {len(bad)} violations")
    return _result("mc.bound_domination", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# driver


def run_all(trials: int = 20_000, seed: int = 777) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        check_density_normalization,
        check_mgf_quadrature,
        check_weibull_sampler_identity,
        check_pnormal_symmetry,
        check_sampler_moments,
        check_closed_form_table,
        check_norm_scaling,
        check_power_identity,
        check_tail_bound_grid,
        check_tail_to_norm_conversion,
        check_quasinorm_small_p,
        check_phi_monotone,
        check_centering_bound,
        check_conjugacy,
        check_biconjugacy,
        check_tau_values,
        check_tau_mgf_domination,
        check_tau_tightness,
        check_phi1_min_inequality,
        check_tau_scaling,
        check_rotation_invariance,
        check_lemma_batches,
        check_norm_vs_moment,
        check_lp_subadditivity,
        check_center_values,
        check_reproducibility,
        check_tail_monotone,
        lambda: check_growth_rates(trials=trials, seed=seed),
        lambda: check_bound_domination(seed=seed),
    ]
    return [fn() for fn in checks]
