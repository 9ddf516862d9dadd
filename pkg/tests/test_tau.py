import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subweibull import (
    DistributionSpec,
    InfeasibleError,
    ParameterError,
    UnboundedSupremumError,
    bernstein_bound,
    centered_cumulant,
    convex_conjugate,
    exp_centered,
    gaussian,
    iid_sum,
    phi1,
    phi_inf,
    rotation_invariance_check,
    scaled,
    sum_of,
    tau_feasible,
    tau_norm,
)
from subweibull.tau import Cumulant


# ---------------------------------------------------------------------------
# the conjugate pair


def test_phi1_values():
    assert float(phi1(0.5)) == 0.125
    assert float(phi1(2.0)) == 1.5
    assert float(phi1(1.0)) == 0.5
    assert float(phi1(-2.0)) == 1.5


def test_phi_inf_values():
    assert float(phi_inf(1.5)) == math.inf
    assert float(phi_inf(1.0)) == 0.5
    assert float(phi_inf(-0.5)) == 0.125
    assert float(phi_inf(0.0)) == 0.0


@given(st.floats(-50, 50))
def test_phi1_even_and_continuous_at_knee(x):
    assert float(phi1(x)) == float(phi1(-x))
    assert float(phi1(x)) >= 0.0


@given(st.floats(0, 100))
def test_phi1_min_form(u):
    assert float(phi1(u)) >= 0.5 * min(u * u, u) - 1e-12


# ---------------------------------------------------------------------------
# convex conjugation


def test_conjugate_of_phi_inf_is_phi1():
    for t in (0.0, 0.5, -0.5, 1.0, 3.0, -7.5):
        got = convex_conjugate(phi_inf, t, search_bound=2.0)
        assert got == pytest.approx(float(phi1(t)), abs=1e-9)


def test_conjugacy_grid():
    worst = 0.0
    for t in np.linspace(-10.0, 10.0, 1000):
        got = convex_conjugate(phi_inf, float(t), search_bound=2.0)
        worst = max(worst, abs(got - float(phi1(t))))
    assert worst <= 1e-9


def test_quadratic_self_conjugate():
    got = convex_conjugate(lambda u: 0.5 * u * u, 2.0, search_bound=16.0)
    assert got == pytest.approx(2.0, abs=1e-9)


def test_conjugate_scaling_law():
    # f(u) = n phi_inf((2 c / n) u) has conjugate n phi1(t / (2 c))
    n, c = 4, 1.0
    f = lambda u: n * float(phi_inf((2.0 * c / n) * u))
    got = convex_conjugate(f, 1.0, search_bound=16.0)
    assert got == pytest.approx(n * float(phi1(1.0 / (2.0 * c))), abs=1e-9)
    assert got == pytest.approx(0.5, abs=1e-9)


def test_biconjugate_recovers_phi_inf_inside_unit_interval():
    inner = lambda u: convex_conjugate(phi_inf, u, search_bound=2.0)
    for t in np.linspace(-0.99, 0.99, 21):
        got = convex_conjugate(inner, float(t), search_bound=50.0)
        assert got == pytest.approx(float(phi_inf(t)), abs=1e-6)


def test_unbounded_sup_detected():
    # linear-growth conjugand evaluated past its slope: sup is at infinity
    with pytest.raises(UnboundedSupremumError):
        convex_conjugate(lambda u: 0.5 * u * u, 40.0, search_bound=16.0)
    with pytest.raises(UnboundedSupremumError):
        convex_conjugate(phi1, 2.0, search_bound=100.0)


def test_conjugate_rejects_bad_bound():
    with pytest.raises(ParameterError):
        convex_conjugate(phi_inf, 1.0, search_bound=0.0)


# ---------------------------------------------------------------------------
# cumulants


def test_exp_centered_values():
    c = exp_centered()
    assert c.value(0.0) == 0.0
    assert c.value(0.5) == pytest.approx(-0.5 - math.log(0.5), rel=1e-12)
    assert c.value(1.0) == math.inf  # domain edge
    assert c.value(2.0) == math.inf
    assert c.curvature(0.5) == pytest.approx(4.0, rel=1e-12)


def test_cumulant_domain_edge_buffer():
    c = exp_centered()
    assert c.value(1.0 - 1e-13) == math.inf
    assert math.isfinite(c.value(1.0 - 1e-9))


def test_cumulant_array_evaluation():
    c = exp_centered()
    t = np.array([-1.0, 0.0, 0.5, 1.5])
    v = c.value(t)
    assert v.shape == t.shape
    assert v[3] == math.inf and math.isfinite(v[0])


def test_centered_cumulant_table():
    assert centered_cumulant(DistributionSpec.exponential()).value(0.5) == pytest.approx(
        exp_centered().value(0.5)
    )
    c = centered_cumulant(DistributionSpec.weibull(1.0, 2.0))
    assert c.value(0.25) == pytest.approx(exp_centered().value(0.5), rel=1e-12)
    g = centered_cumulant(DistributionSpec.pnormal(2.0))
    assert g.value(3.0) == pytest.approx(4.5, rel=1e-12)
    from subweibull import NoClosedFormError

    with pytest.raises(NoClosedFormError):
        centered_cumulant(DistributionSpec.pnormal(3.0))


# ---------------------------------------------------------------------------
# the domination norm


def test_tau_exp_centered_is_two():
    result = tau_norm(exp_centered(), tol=1e-8)
    assert result.value == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("n", [1, 4, 9, 100])
def test_tau_centered_sum_sqrt_law(n):
    got = tau_norm(iid_sum(exp_centered(), n), tol=1e-6).value
    assert got == pytest.approx(math.sqrt(n) + 1.0, abs=1e-4)


@pytest.mark.parametrize("sigma", [0.25, 1.0, 3.0])
def test_tau_gaussian_is_sigma(sigma):
    assert tau_norm(gaussian(sigma), tol=1e-8).value == pytest.approx(sigma, abs=1e-6)


def test_tau_scaling():
    for a in (0.5, 2.0):
        got = tau_norm(scaled(exp_centered(), a), tol=1e-8).value
        assert got == pytest.approx(2.0 * a, abs=1e-6)


def test_tau_margin_profile_nonnegative_and_tight_at_zero():
    result = tau_norm(exp_centered(), tol=1e-8)
    slacks = [s for _, s in result.margin_profile]
    assert min(slacks) >= -1e-9
    assert any(s <= 1e-9 for s in slacks)  # slack vanishes at t = 0
    ts = [t for t, _ in result.margin_profile]
    assert max(np.abs(ts)) <= 1.0 / result.value + 1e-12


def test_tau_pointwise_domination_on_window():
    # at the returned value the parabola dominates the cumulant pointwise
    cum = exp_centered()
    k = tau_norm(cum, tol=1e-8).value
    for t in np.linspace(-1.0 / k, 1.0 / k, 1001):
        assert cum.value(float(t)) <= 0.5 * (k * float(t)) ** 2 + 1e-9


def test_tau_tightness():
    for cum in (exp_centered(), gaussian(1.0), iid_sum(exp_centered(), 9)):
        value = tau_norm(cum, tol=1e-8).value
        assert tau_feasible(cum, value)
        assert not tau_feasible(cum, value * (1.0 - 1e-3))


def test_tau_infeasible_cumulant():
    # a domain too narrow for any searchable window admits no finite norm
    c = Cumulant(fn=lambda t: t * 0.0, d2=lambda t: t * 0.0, domain=(-1e-9, 1e-9))
    with pytest.raises(InfeasibleError):
        tau_norm(c, k_max=1e6)


def test_rotation_invariance_nine_exponentials():
    lhs, rhs = rotation_invariance_check([DistributionSpec.exponential()] * 9)
    assert lhs == pytest.approx(4.0, abs=1e-4)
    assert rhs == pytest.approx(6.0, abs=1e-6)
    assert lhs <= rhs + 1e-6


def test_rotation_invariance_single_spec_equality():
    lhs, rhs = rotation_invariance_check([DistributionSpec.exponential()])
    assert lhs == pytest.approx(rhs, abs=1e-6)


def test_rotation_invariance_hundred():
    lhs, rhs = rotation_invariance_check([DistributionSpec.exponential()] * 100)
    assert lhs == pytest.approx(11.0, abs=1e-4)
    assert rhs == pytest.approx(20.0, abs=1e-6)


def test_sum_of_mixed_cumulants():
    mix = sum_of([exp_centered(), gaussian(2.0)])
    assert mix.value(0.5) == pytest.approx(exp_centered().value(0.5) + 0.5, rel=1e-12)
    lhs = tau_norm(mix).value
    rhs = math.sqrt(2.0**2 + 2.0**2)
    assert lhs <= rhs + 1e-6


# ---------------------------------------------------------------------------
# Bernstein bound


def test_bernstein_values():
    got = bernstein_bound(100, 0.5, 1.0, 1.0)
    assert got.value == pytest.approx(2.0 * math.exp(-3.125), rel=1e-12)
    assert bernstein_bound(7, 0.0, 1.0, 1.0).value == 2.0
    got = bernstein_bound(1, 4.0, 1.0, 1.0)
    assert got.value == pytest.approx(2.0 * math.exp(-1.5), rel=1e-12)


def test_bernstein_min_form_dominates_pointwise_inequality():
    # the exponent inequality behind the min form: phi1(u) >= min(u^2, u)/2
    for u in np.linspace(0.0, 5.0, 101):
        b = bernstein_bound(10, float(u) * 4.0, 1.0, 1.0)  # u = t / (2 C1 K)
        assert b.value <= b.min_form + 1e-15


def test_bernstein_validation():
    with pytest.raises(ParameterError):
        bernstein_bound(0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        bernstein_bound(5, 1.0, 1.0, 0.5)
    with pytest.raises(ParameterError):
        bernstein_bound(5, -1.0, 1.0)
