"""Distribution families with stretched-exponential tail decay.

Four scalar families are supported, each with an exact density, closed-form
moments, a partial closed-form table of moment generating functions, exact
upper tails, and an inverse-transform sampler driven by a counter-based
:class:`~subweibull.streams.RandomStream`:

- ``exp``            unit-rate exponential
- ``weibull``        ``scale * E**(1/shape)`` for ``E ~ exp``
- ``pnormal``        symmetric law whose absolute value is ``|g|**(2/p)``
                     for a standard normal ``g``; normalized so that
                     ``E|X|**p = 1``
- ``halfgauss_pow``  ``scale * |g|**(2/p)``, the one-sided relative of
                     ``pnormal``

Every family can be written as ``|X| = c * B**e`` for a base variable ``B``
that is either a unit exponential or ``|g|``.  That representation
(:class:`CanonicalLaw`) is what the quadrature routines integrate against:
the change of variables absorbs the ``|x|**(p/2-1)`` endpoint singularity of
the ``pnormal`` density into a smooth integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import NoClosedFormError, ParameterError
from .quadrature import improper_integral
from .streams import RandomStream

FAMILY_EXP = "exp"
FAMILY_WEIBULL = "weibull"
FAMILY_PNORMAL = "pnormal"
FAMILY_HALFGAUSS = "halfgauss_pow"

_FAMILIES = (FAMILY_EXP, FAMILY_WEIBULL, FAMILY_PNORMAL, FAMILY_HALFGAUSS)

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_PI = math.sqrt(math.pi)

BASE_EXP = "exp1"
BASE_ABSGAUSS = "absgauss"

_LOG_SQRT_2_OVER_PI = 0.5 * math.log(2.0 / math.pi)


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"{name} must be finite and > 0, got {value}")
    return value


@dataclass(frozen=True)
class DistributionSpec:
    """Parametric description of one scalar law.

    ``shape`` is the tail-order parameter (``p`` for ``pnormal`` and
    ``halfgauss_pow``, the Weibull shape otherwise); ``scale`` is the
    multiplicative scale where the family has one.  Parameters are validated
    here, at construction time, not per call.
    """

    family: str
    shape: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        object.__setattr__(self, "shape", _require_positive("shape", self.shape))
        object.__setattr__(self, "scale", _require_positive("scale", self.scale))
        if self.family in (FAMILY_EXP, FAMILY_PNORMAL) and self.scale != 1.0:
            raise ParameterError(f"family {self.family!r} has no scale parameter")
        if self.family == FAMILY_EXP and self.shape != 1.0:
            raise ParameterError("family 'exp' has no shape parameter")

    @classmethod
    def exponential(cls) -> "DistributionSpec":
        return cls(FAMILY_EXP)

    @classmethod
    def weibull(cls, shape: float, scale: float = 1.0) -> "DistributionSpec":
        return cls(FAMILY_WEIBULL, shape, scale)

    @classmethod
    def pnormal(cls, p: float) -> "DistributionSpec":
        return cls(FAMILY_PNORMAL, p)

    @classmethod
    def halfgauss_pow(cls, p: float, scale: float = 1.0) -> "DistributionSpec":
        return cls(FAMILY_HALFGAUSS, p, scale)

    @property
    def order(self) -> float:
        """Tail-decay order: the exponent q with tails exp(-(t/C)**q)."""
        return 1.0 if self.family == FAMILY_EXP else self.shape

    @property
    def symmetric(self) -> bool:
        return self.family == FAMILY_PNORMAL


@dataclass(frozen=True)
class CanonicalLaw:
    """``|X| = scale * B**e`` with ``e = 1/order`` (exp base) or ``2/order``.

    ``order`` is kept instead of ``e`` so that exponent ratios such as
    ``p/order`` stay exact in floating point when ``p == order``.
    """

    base: str
    scale: float
    order: float

    def exponent(self, p: float) -> float:
        """r such that |X|**p = scale**p * B**r."""
        if self.base == BASE_EXP:
            return p / self.order
        return 2.0 * p / self.order

    @property
    def e(self) -> float:
        return self.exponent(1.0)

    def abs_power(self, p: float) -> "CanonicalLaw":
        """Canonical form of the pushforward |X|**p."""
        return CanonicalLaw(self.base, self.scale**p, self.order / p)

    def log_base_pdf(self, x: float) -> float:
        if self.base == BASE_EXP:
            return -x
        return _LOG_SQRT_2_OVER_PI - 0.5 * x * x

    def moment_abs(self, alpha: float) -> float:
        """E|X|**alpha in closed form."""
        k = alpha / self.order
        if self.base == BASE_EXP:
            return self.scale**alpha * math.gamma(k + 1.0)
        return self.scale**alpha * 2.0**k * math.gamma(k + 0.5) / _SQRT_PI

    def exp_moment_converges(self, a: float, r: float) -> bool:
        """Whether E exp(a * B**r) is finite, decided in closed form.

        The boundary cases r == 1 (exp base) and r == 2 (gauss base) are
        recognized within 1e-9 to absorb float rounding of exponent ratios.
        """
        if a == 0.0:
            return True
        boundary = 1.0 if self.base == BASE_EXP else 2.0
        crit = 1.0 if self.base == BASE_EXP else 0.5
        if r < boundary - 1e-9:
            return True
        if r > boundary + 1e-9:
            return False
        return a < crit


def canonical(spec: DistributionSpec) -> CanonicalLaw:
    if spec.family == FAMILY_EXP:
        return CanonicalLaw(BASE_EXP, 1.0, 1.0)
    if spec.family == FAMILY_WEIBULL:
        return CanonicalLaw(BASE_EXP, spec.scale, spec.shape)
    if spec.family == FAMILY_PNORMAL:
        return CanonicalLaw(BASE_ABSGAUSS, 1.0, spec.shape)
    return CanonicalLaw(BASE_ABSGAUSS, spec.scale, spec.shape)


# ---------------------------------------------------------------------------
# densities, moments, tails


def density(spec: DistributionSpec, x: float) -> float:
    """Density at ``x``.

    For ``pnormal``/``halfgauss_pow`` with shape < 2 the density has an
    integrable singularity at 0 and ``density(spec, 0.0)`` returns
    ``math.inf``; quadrature never evaluates it there because it integrates
    in the canonical base variable.
    """
    x = float(x)
    if spec.family == FAMILY_EXP:
        return math.exp(-x) if x >= 0.0 else 0.0
    q, theta = spec.shape, spec.scale
    if spec.family == FAMILY_WEIBULL:
        if x < 0.0:
            return 0.0
        if x == 0.0:
            return math.inf if q < 1.0 else (1.0 / theta if q == 1.0 else 0.0)
        z = x / theta
        return (q / theta) * z ** (q - 1.0) * math.exp(-(z**q))
    if spec.family == FAMILY_PNORMAL:
        z = abs(x)
        if z == 0.0:
            return math.inf if q < 2.0 else (1.0 / _SQRT_2PI if q == 2.0 else 0.0)
        return (q / (2.0 * _SQRT_2PI)) * z ** (0.5 * q - 1.0) * math.exp(-0.5 * z**q)
    # halfgauss_pow
    if x < 0.0:
        return 0.0
    if x == 0.0:
        if q < 2.0:
            return math.inf
        return math.sqrt(2.0 / math.pi) / theta if q == 2.0 else 0.0
    z = x / theta
    return (q / (theta * _SQRT_2PI)) * z ** (0.5 * q - 1.0) * math.exp(-0.5 * z**q)


def moment_abs(spec: DistributionSpec, alpha: float) -> float:
    """E|X|**alpha, closed form."""
    if alpha <= 0.0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    return canonical(spec).moment_abs(alpha)


def moment_abs_quadrature(spec: DistributionSpec, alpha: float) -> float:
    """E|X|**alpha by quadrature in the canonical base variable."""
    if alpha <= 0.0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    law = canonical(spec)
    r = law.exponent(alpha)
    log_c = alpha * math.log(law.scale)

    def integrand(x: float) -> float:
        if x <= 0.0:
            return 0.0
        val = log_c + r * math.log(x) + law.log_base_pdf(x)
        return math.exp(val) if val < 708.0 else math.inf

    return improper_integral(integrand)


def mean(spec: DistributionSpec) -> float:
    """E X (0 for the symmetric family)."""
    if spec.symmetric:
        return 0.0
    return moment_abs(spec, 1.0)


def exact_upper_tail(spec: DistributionSpec, t: float) -> float:
    """P(|X| >= t), exact."""
    t = float(t)
    if t <= 0.0:
        return 1.0
    q, theta = spec.order, spec.scale
    if spec.family in (FAMILY_EXP, FAMILY_WEIBULL):
        return math.exp(-((t / theta) ** q))
    # |X| >= t  <=>  |g| >= (t/theta)**(q/2)
    return math.erfc((t / theta) ** (0.5 * q) / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# moment generating functions


def mgf(spec: DistributionSpec, t: float, power: float | None = None) -> float | None:
    """Closed-form moment generating function, or None when not tabulated.

    ``power=None`` is E exp(tX); ``power=p`` is E exp(t |X|**p).  ``math.inf``
    is a valid return on the divergent branch.  Callers that need values
    outside the table fall back to :func:`mgf_quadrature`.
    """
    t = float(t)
    fam = spec.family
    if fam == FAMILY_EXP and (power is None or power == 1.0):
        return 1.0 / (1.0 - t) if t < 1.0 else math.inf
    if fam == FAMILY_WEIBULL:
        if power == spec.shape or (spec.shape == 1.0 and power is None):
            u = spec.scale**spec.shape * t if power == spec.shape else spec.scale * t
            return 1.0 / (1.0 - u) if u < 1.0 else math.inf
    if fam == FAMILY_PNORMAL:
        if power == spec.shape:
            return (1.0 - 2.0 * t) ** -0.5 if t < 0.5 else math.inf
        if power is None and spec.shape == 2.0:
            return math.exp(0.5 * t * t)
    if fam == FAMILY_HALFGAUSS and power == spec.shape:
        u = spec.scale**spec.shape * t
        return (1.0 - 2.0 * u) ** -0.5 if u < 0.5 else math.inf
    return None


def mgf_quadrature(spec: DistributionSpec, t: float, power: float | None = None) -> float:
    """E exp(tX) or E exp(t|X|**p) by quadrature; ``math.inf`` on divergence."""
    t = float(t)
    law = canonical(spec)
    e = law.e
    if power is None and spec.symmetric:
        # E exp(tX) = E cosh(t |X|) by symmetry
        r = law.exponent(1.0)
        a = abs(t) * law.scale
        divergent = not law.exp_moment_converges(a, r)

        def integrand(x: float) -> float:
            y = abs(t) * law.scale * x**e
            # log cosh(y), overflow-safe
            log_cosh = y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0)
            val = log_cosh + law.log_base_pdf(x)
            return math.exp(val) if val < 708.0 else math.inf

        return improper_integral(integrand, known_divergent=divergent)

    p_eff = 1.0 if power is None else float(power)
    r = law.exponent(p_eff)
    a = t * law.scale**p_eff
    divergent = a > 0.0 and not law.exp_moment_converges(a, r)

    def integrand(x: float) -> float:
        val = a * x**r + law.log_base_pdf(x)
        return math.exp(val) if val < 708.0 else math.inf

    return improper_integral(integrand, known_divergent=divergent)


# ---------------------------------------------------------------------------
# sampling

# uniforms are consumed interleaved: draw j of a call uses positions
# k*j .. k*j + (k-1) of the stream, where k is the family's draws-per-sample


def uniforms_per_draw(spec: DistributionSpec) -> int:
    if spec.family in (FAMILY_EXP, FAMILY_WEIBULL):
        return 1
    return 3 if spec.family == FAMILY_PNORMAL else 2


def _abs_power(g: np.ndarray, exponent: float) -> np.ndarray:
    ag = np.abs(g)
    return ag if exponent == 1.0 else ag**exponent


def _transform_uniforms(spec: DistributionSpec, u: np.ndarray) -> np.ndarray:
    """Map uniforms of shape (..., k*count) to draws of shape (..., count)."""
    if spec.family == FAMILY_EXP:
        return -np.log1p(-u)
    if spec.family == FAMILY_WEIBULL:
        return spec.scale * (-np.log1p(-u)) ** (1.0 / spec.shape)
    if spec.family == FAMILY_PNORMAL:
        u1, u2, u3 = u[..., 0::3], u[..., 1::3], u[..., 2::3]
        g = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
        sign = np.where(u3 < 0.5, 1.0, -1.0)
        return sign * _abs_power(g, 2.0 / spec.shape)
    u1, u2 = u[..., 0::2], u[..., 1::2]
    g = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
    return spec.scale * _abs_power(g, 2.0 / spec.shape)


def sample(spec: DistributionSpec, stream: RandomStream, count: int) -> np.ndarray:
    """``count`` i.i.d. draws; a pure function of (spec, stream, count).

    Exponential draws use the inverse transform -ln(U); the Gaussian-based
    families use Box-Muller with an independent fair sign where needed.
    """
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ParameterError(f"count must be an integer >= 1, got {count}")
    count = int(count)
    u = stream.uniforms(uniforms_per_draw(spec) * count)
    return _transform_uniforms(spec, u)


def sample_streams(
    spec: DistributionSpec, seed: int, start: int, stop: int, count: int
) -> np.ndarray:
    """Row i holds sample(spec, RandomStream(seed, start + i), count).

    Batches the arithmetic of many substreams into whole-matrix operations;
    the per-row values are identical to per-stream calls because every
    transform is elementwise.
    """
    if stop <= start:
        raise ParameterError(f"need stop > start, got [{start}, {stop})")
    k = uniforms_per_draw(spec) * int(count)
    u = np.empty((stop - start, k))
    for i, j in enumerate(range(start, stop)):
        u[i] = RandomStream(seed, j).uniforms(k)
    return _transform_uniforms(spec, u)


# ---------------------------------------------------------------------------
# JSON wire format


_PARAM_KEYS = {
    FAMILY_EXP: (),
    FAMILY_WEIBULL: ("shape", "scale"),
    FAMILY_PNORMAL: ("p",),
    FAMILY_HALFGAUSS: ("p", "scale"),
}


def spec_to_json(spec: DistributionSpec) -> dict:
    params: dict[str, float] = {}
    for key in _PARAM_KEYS[spec.family]:
        params[key] = spec.shape if key in ("shape", "p") else spec.scale
    return {"family": spec.family, "params": params}


def spec_from_json(obj: Mapping) -> DistributionSpec:
    try:
        family = obj["family"]
        params = dict(obj.get("params", {}))
    except (TypeError, KeyError) as exc:
        raise ParameterError(f"malformed distribution object: {obj!r}") from exc
    if family not in _FAMILIES:
        raise ParameterError(f"unknown family {family!r}")
    expected = set(_PARAM_KEYS[family])
    if set(params) != expected:
        raise ParameterError(
            f"family {family!r} expects params {sorted(expected)}, got {sorted(params)}"
        )
    shape = params.get("shape", params.get("p", 1.0))
    scale = params.get("scale", 1.0)
    return DistributionSpec(family, float(shape), float(scale))
