"""Cumulant-domination norm and the quadratic/linear conjugate pair.

``phi_inf`` is x**2/2 capped to |x| <= 1 (infinite outside); its convex
conjugate ``phi1`` is quadratic near zero and linear beyond 1.  A centered
law with cumulant generating function C is measured by the smallest K whose
parabola (Kt)**2/2 dominates C on the window |t| <= 1/K, i.e. dominates
phi_inf(Kt) everywhere.

Domination is certified through the second-order Taylor envelope: since
C(0) = C'(0) = 0, C(t) <= sup_{|s|<=|t|} C''(s) * t**2 / 2, so the condition

    sup over |t| <= 1/K of C''(t)  <=  K**2

is what the feasibility check decides.  It is monotone in K (a larger K
both shrinks the window and raises the parabola), so the norm is found by
bisection.  For the unit-rate centered exponential the binding equation is
C''(1/K) = K**2 with solution K = 2, and the centered sum of n copies gives
sqrt(n) + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .dist import (
    DistributionSpec,
    FAMILY_EXP,
    FAMILY_PNORMAL,
    FAMILY_WEIBULL,
)
from .errors import (
    InfeasibleError,
    NoClosedFormError,
    ParameterError,
    UnboundedSupremumError,
)

_DOMAIN_EDGE = 1e-12  # evaluations this close to a domain edge return inf


def phi1(x):
    """Quadratic below 1, linear above: x**2/2 if |x| <= 1 else |x| - 1/2."""
    if np.ndim(x) == 0:
        ax = abs(float(x))
        return 0.5 * ax * ax if ax <= 1.0 else ax - 0.5
    ax = np.abs(x)
    return np.where(ax <= 1.0, 0.5 * ax * ax, ax - 0.5)


def phi_inf(x):
    """x**2/2 on |x| <= 1, +inf outside."""
    if np.ndim(x) == 0:
        ax = abs(float(x))
        return 0.5 * ax * ax if ax <= 1.0 else math.inf
    ax = np.abs(x)
    return np.where(ax <= 1.0, 0.5 * ax * ax, np.inf)


# ---------------------------------------------------------------------------
# numerical convex conjugation


def convex_conjugate(f: Callable[[float], float], t: float, search_bound: float) -> float:
    """sup over u of t*u - f(u), for convex even f with f(0) = 0.

    The objective is concave, so a ternary search on [0, search_bound]
    (evenness reduces t to |t|) converges; +inf values of f are treated as
    infeasible points.  Raises ``UnboundedSupremumError`` when the objective
    is still climbing at the search bound.
    """
    if search_bound <= 0.0 or not math.isfinite(search_bound):
        raise ParameterError(f"search_bound must be finite and > 0, got {search_bound}")
    tt = abs(float(t))

    def objective(u: float) -> float:
        return tt * u - float(f(u))

    lo, hi = 0.0, search_bound
    best = 0.0  # objective at u = 0
    for _ in range(300):
        if hi - lo <= 1e-11 * max(1.0, search_bound):
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        g1, g2 = objective(m1), objective(m2)
        # f is even with an interval domain around 0, so -inf at a probe
        # means everything to its right is -inf as well
        if g2 == -math.inf:
            hi = m2
            best = max(best, g1) if g1 > -math.inf else best
            continue
        if g1 < g2:
            lo = m1
        else:
            hi = m2
        best = max(best, g1, g2)
    mid = 0.5 * (lo + hi)
    g_mid = objective(mid)
    if g_mid > -math.inf:
        best = max(best, g_mid)
    if hi >= search_bound * (1.0 - 1e-6):
        inner = objective(search_bound * (1.0 - 1e-6))
        outer = objective(search_bound)
        if outer > -math.inf and outer - inner > 1e-9 * max(1.0, tt, abs(outer)):
            raise UnboundedSupremumError(
                f"objective still increasing at search_bound={search_bound:g} for t={t:g}"
            )
        best = max(best, outer) if outer > -math.inf else best
    return best


# ---------------------------------------------------------------------------
# cumulant generating functions


@dataclass(frozen=True)
class Cumulant:
    """Cumulant generating function with its second derivative and domain.

    ``fn`` and ``d2`` must accept numpy arrays; the open interval ``domain``
    contains 0.  Values requested within 1e-12 of a domain edge come back as
    +inf, which downstream feasibility checks read as infeasible.
    """

    fn: Callable
    d2: Callable
    domain: tuple[float, float]
    name: str = ""

    def __post_init__(self) -> None:
        lo, hi = self.domain
        if not lo < 0.0 < hi:
            raise ParameterError(f"cumulant domain must contain 0, got {self.domain}")

    def _mask(self, t: np.ndarray) -> np.ndarray:
        lo, hi = self.domain
        inside = np.ones_like(t, dtype=bool)
        if math.isfinite(lo):
            inside &= t > lo + _DOMAIN_EDGE
        if math.isfinite(hi):
            inside &= t < hi - _DOMAIN_EDGE
        return inside

    def _eval(self, fn: Callable, t):
        arr = np.asarray(t, dtype=float)
        inside = self._mask(arr)
        with np.errstate(all="ignore"):
            raw = np.asarray(fn(np.where(inside, arr, 0.0)), dtype=float)
        out = np.where(inside, raw, np.inf)
        return float(out) if np.ndim(t) == 0 else out

    def value(self, t):
        return self._eval(self.fn, t)

    def curvature(self, t):
        return self._eval(self.d2, t)


def exp_centered() -> Cumulant:
    """Unit-rate exponential minus its mean: C(t) = -t - ln(1 - t)."""
    return Cumulant(
        fn=lambda t: -t - np.log1p(-t),
        d2=lambda t: (1.0 - t) ** -2.0,
        domain=(-math.inf, 1.0),
        name="exp_centered",
    )


def iid_sum(base: Cumulant, n: int) -> Cumulant:
    """Cumulant of a sum of n independent copies."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return Cumulant(
        fn=lambda t: n * base.fn(t),
        d2=lambda t: n * base.d2(t),
        domain=base.domain,
        name=f"{base.name}_sum{n}",
    )


def gaussian(sigma: float) -> Cumulant:
    if sigma <= 0.0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    return Cumulant(
        fn=lambda t: 0.5 * sigma**2 * t**2,
        d2=lambda t: sigma**2 * np.ones_like(np.asarray(t, dtype=float)),
        domain=(-math.inf, math.inf),
        name=f"gaussian_{sigma:g}",
    )


def scaled(base: Cumulant, a: float) -> Cumulant:
    """Cumulant of a*X: t -> C(a*t)."""
    if a <= 0.0:
        raise ParameterError(f"scale must be > 0, got {a}")
    lo, hi = base.domain
    return Cumulant(
        fn=lambda t: base.fn(a * t),
        d2=lambda t: a * a * base.d2(a * t),
        domain=(lo / a, hi / a),
        name=f"{base.name}_x{a:g}",
    )


def sum_of(cumulants: Sequence[Cumulant]) -> Cumulant:
    """Cumulant of a sum of independent variables with the given cumulants."""
    if not cumulants:
        raise ParameterError("need at least one cumulant")
    lo = max(c.domain[0] for c in cumulants)
    hi = min(c.domain[1] for c in cumulants)
    members = tuple(cumulants)
    return Cumulant(
        fn=lambda t: sum(c.fn(t) for c in members),
        d2=lambda t: sum(c.d2(t) for c in members),
        domain=(lo, hi),
        name="+".join(c.name for c in members),
    )


def centered_cumulant(spec: DistributionSpec) -> Cumulant:
    """Closed-form cumulant of X - EX for the families that have one."""
    if spec.family == FAMILY_EXP:
        return exp_centered()
    if spec.family == FAMILY_WEIBULL and spec.shape == 1.0:
        return scaled(exp_centered(), spec.scale)
    if spec.family == FAMILY_PNORMAL and spec.shape == 2.0:
        return gaussian(1.0)
    raise NoClosedFormError(
        f"no closed-form centered cumulant for {spec.family!r} with shape {spec.shape}"
    )


# ---------------------------------------------------------------------------
# the domination norm


@dataclass(frozen=True)
class TauNormResult:
    """Norm value plus the slack profile phi_inf(K t) - C(t) on the window."""

    value: float
    margin_profile: tuple[tuple[float, float], ...]

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "margin_profile": [[t, s] for t, s in self.margin_profile],
        }


_GRID_POINTS = 10_001
_REFINEMENTS = 3


def _window_curvature_sup(cumulant: Cumulant, K: float) -> float:
    """sup of C'' over [-1/K, 1/K] by dense grid plus local refinement."""
    w = 1.0 / K
    grid = np.linspace(-w, w, _GRID_POINTS)
    vals = cumulant.curvature(grid)
    vals = np.where(np.isnan(vals), np.inf, vals)
    idx = int(np.argmax(vals))
    best = float(vals[idx])
    if math.isinf(best):
        return best
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, grid.size - 1)]
    for _ in range(_REFINEMENTS):
        local = np.linspace(lo, hi, 21)
        lv = cumulant.curvature(local)
        lv = np.where(np.isnan(lv), np.inf, lv)
        j = int(np.argmax(lv))
        best = max(best, float(lv[j]))
        if math.isinf(best):
            return best
        lo = local[max(j - 1, 0)]
        hi = local[min(j + 1, local.size - 1)]
    return best


def tau_feasible(cumulant: Cumulant, K: float) -> bool:
    """Whether the parabola (Kt)**2/2 dominates C's Taylor envelope."""
    if K <= 0.0:
        return False
    return _window_curvature_sup(cumulant, K) <= K * K * (1.0 + 1e-12)


def tau_norm(
    cumulant: Cumulant, tol: float = 1e-6, *, k_max: float = 1e12
) -> TauNormResult:
    """Smallest K whose curvature bound certifies cumulant domination.

    Bisection on K; feasibility is monotone.  Raises ``InfeasibleError``
    when no K up to ``k_max`` works.
    """
    if tol <= 0.0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    if not cumulant.value(0.0) == 0.0:
        raise ParameterError("cumulant must vanish at 0")
    hi = 1.0
    while not tau_feasible(cumulant, hi):
        hi *= 2.0
        if hi > k_max:
            raise InfeasibleError(f"no feasible K up to {k_max:g}")
    lo = 0.5 * hi
    if hi == 1.0:
        while lo > 1e-12 and tau_feasible(cumulant, lo):
            hi = lo
            lo *= 0.5
        if lo <= 1e-12:
            return TauNormResult(0.0, ((0.0, 0.0),))
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if tau_feasible(cumulant, mid):
            hi = mid
        else:
            lo = mid
    value = hi
    profile = []
    for t in np.linspace(-1.0, 1.0, 201):
        u = float(t)  # = value * t_actual, so |u| <= 1 by construction
        t_actual = u / value
        slack = float(phi_inf(u)) - cumulant.value(t_actual)
        profile.append((t_actual, float(slack)))
    return TauNormResult(value, tuple(profile))


def rotation_invariance_check(
    specs: Sequence[DistributionSpec], tol: float = 1e-6
) -> tuple[float, float]:
    """(norm of the centered sum, sqrt of the sum of squared norms).

    For independent summands the first never exceeds the second.
    """
    if not specs:
        raise ParameterError("need at least one spec")
    cums = [centered_cumulant(s) for s in specs]
    taus = [tau_norm(c, tol).value for c in cums]
    lhs = tau_norm(sum_of(cums), tol).value
    rhs = math.sqrt(sum(k * k for k in taus))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Bernstein-type bound for averages


class BernsteinBound(NamedTuple):
    value: float  # 2 exp(-n phi1(t / (2 C1 K)))
    min_form: float  # 2 exp(-(n/2) min{u**2, u}) at the same u


def bernstein_bound(n: int, t: float, K: float, C1: float = 2.0) -> BernsteinBound:
    """Tail bound for |mean of n centered sub-exponential terms| >= t.

    K is the largest order-1 norm among the terms and C1 the conversion
    constant from that norm to the domination norm.  The companion min-form
    follows from phi1(u) >= min{u**2, u} / 2.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be an integer >= 1, got {n}")
    if t < 0.0 or K <= 0.0 or C1 < 1.0:
        raise ParameterError(f"need t >= 0, K > 0, C1 >= 1; got t={t}, K={K}, C1={C1}")
    u = t / (2.0 * C1 * K)
    value = 2.0 * math.exp(-n * float(phi1(u)))
    min_form = 2.0 * math.exp(-0.5 * n * min(u * u, u))
    return BernsteinBound(value=value, min_form=min_form)
