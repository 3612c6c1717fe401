"""Generic cumulative-risk framework for citation tail laws.

A tail law is written as Cbar(x) = exp(-H(x)) with cumulative risk
H(x) = f(a*x + b_shift), where f is monotone increasing and f(b_shift) = 0
so that Cbar(0) = 1.  Two standard members:

    tsallis-pareto   f(u) = b*ln(u),  b_shift = 1   ->  Cbar = (1+a*x)**(-b)
    exponential      f(u) = u,        b_shift = 0   ->  Cbar = exp(-a*x)

The reduced mean kappa = a*<x> + b_shift depends only on f and b_shift:

    kappa = integral of f_inverse(H) * exp(-H) dH  from f(b_shift) to infinity

With lam = N_pub**2 / N_cit, the Hirsch index h of a researcher whose
citations follow the law solves the transcendental equation

    h/N_pub = exp(-f((kappa - b_shift) * (h/N_pub) * lam + b_shift))

and eliminating lam gives the scaling curve

    sqrt(N_cit)/N_pub = sqrt((kappa - b_shift) * r / (f_inverse(-ln r) - b_shift))

with r = h/N_pub.  Both directions are exercised against each other in the
test suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import BracketError, QuadratureError

__all__ = [
    "RiskFamily",
    "kappa",
    "lambda_of",
    "general_hirsch_solve",
    "general_scaling_curve",
    "tsallis_pareto_family",
    "exponential_family",
    "family_by_name",
    "FAMILY_NAMES",
]

# Below this weight exp(-H) contributes nothing at double precision; the
# short-circuit also keeps f_inverse from being evaluated where it could
# overflow even though the product is negligible.
_WEIGHT_FLOOR = 1e-300

_INVERSE_CHECK_OFFSETS = (0.5, 1.0, 2.0, 4.0, 8.0)
_INVERSE_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class RiskFamily:
    """Monotone risk profile f, its inverse, the shift b_shift, and rate a."""

    f: Callable[[float], float]
    f_inverse: Callable[[float], float]
    b_shift: float
    a: float
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"rate a must be positive, got {self.a!r}")
        lo = self.f(self.b_shift)
        if not math.isfinite(lo):
            raise ValueError("f(b_shift) must be finite")
        for off in _INVERSE_CHECK_OFFSETS:
            y = lo + off
            back = self.f(self.f_inverse(y))
            if abs(back - y) > _INVERSE_CHECK_TOL * max(1.0, abs(y)):
                raise ValueError(
                    f"f_inverse is not an inverse of f at H={y:g}: "
                    f"f(f_inverse(H)) = {back:g}")

    def cumulative_risk(self, x: float) -> float:
        """H(x) = f(a*x + b_shift) for x >= 0."""
        if x < 0.0:
            raise ValueError("x must be non-negative")
        return self.f(self.a * x + self.b_shift)

    def tail_cdf(self, x: float) -> float:
        """Cbar(x) = exp(-H(x))."""
        return math.exp(-self.cumulative_risk(x))

    @property
    def mean(self) -> float:
        """<x> = (kappa - b_shift)/a."""
        return (kappa(self) - self.b_shift) / self.a


def kappa(fam: RiskFamily, *, tol: float = 1e-10) -> float:
    """Reduced mean a*<x> + b_shift via quadrature of f_inverse(H)*exp(-H).

    Integrates from f(b_shift) to infinity.  Families whose inverse grows
    at least as fast as e^H have no finite mean; that surfaces here as a
    QuadratureError rather than a garbage value.
    """
    lo = fam.f(fam.b_shift)

    def integrand(h: float) -> float:
        w = math.exp(-h) if h < 700.0 else 0.0
        if w < _WEIGHT_FLOOR:
            return 0.0
        return fam.f_inverse(h) * w

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            val, err = integrate.quad(integrand, lo, np.inf,
                                      epsabs=0.1 * tol, epsrel=1e-13, limit=200)
    except (integrate.IntegrationWarning, OverflowError) as exc:
        raise QuadratureError(f"kappa integral did not converge: {exc}") from exc
    if not math.isfinite(val) or err > tol * max(1.0, abs(val)):
        raise QuadratureError("kappa integral did not converge",
                              achieved=err, required=tol)
    return val


def lambda_of(n_pub: float, n_cit: float) -> float:
    """Scaling argument lam = N_pub**2 / N_cit."""
    if n_cit < 1:
        raise ValueError(f"n_cit must be at least 1, got {n_cit!r}")
    if n_pub < 1:
        raise ValueError(f"n_pub must be at least 1, got {n_pub!r}")
    return float(n_pub) ** 2 / float(n_cit)


def general_hirsch_solve(fam: RiskFamily, n_pub: float, n_cit: float,
                         *, max_iter: int = 200, rtol: float = 1e-12) -> float:
    """Hirsch index predicted by the family for totals (N_pub, N_cit).

    Solves h/N_pub = exp(-f((kappa-b_shift)*(h/N_pub)*lam + b_shift)) for
    h in (0, N_pub] by bisection; the left side increases and the right
    side decreases in h, so a sign change brackets the unique root.
    """
    lam = lambda_of(n_pub, n_cit)
    k = kappa(fam)
    slope = (k - fam.b_shift) * lam / n_pub

    def g(h: float) -> float:
        return h / n_pub - math.exp(-fam.f(slope * h + fam.b_shift))

    lo, hi = 0.0, float(n_pub)
    if not g(lo) < 0.0:
        raise BracketError("no root bracket: tail weight vanishes at h = 0")
    g_hi = g(hi)
    if g_hi < 0.0:
        raise BracketError("no root bracket: equation has no crossing in (0, N_pub]")
    if g_hi == 0.0:
        return hi
    h = optimize.bisect(g, lo, hi, xtol=1e-12, rtol=rtol, maxiter=max_iter)
    return float(h)


def general_scaling_curve(fam: RiskFamily, r: float) -> float:
    """sqrt(N_cit)/N_pub as a function of r = h/N_pub under the family."""
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r!r}")
    denom = fam.f_inverse(-math.log(r)) - fam.b_shift
    if denom <= 0.0:
        raise ValueError(f"scaling curve undefined at r={r!r}: "
                         "f_inverse(-ln r) does not exceed b_shift")
    return math.sqrt((kappa(fam) - fam.b_shift) * r / denom)


def _power_log_risk(u: float, b: float) -> float:
    return b * math.log(u)


def _power_log_risk_inverse(h: float, b: float) -> float:
    return math.exp(h / b)


def _identity(u: float) -> float:
    return u


def tsallis_pareto_family(b: float, a: float = 1.0) -> RiskFamily:
    """Family with f(u) = b*ln(u) and b_shift = 1, i.e. Cbar = (1+a*x)**(-b)."""
    if not b > 1.0:
        raise ValueError(f"shape b must exceed 1, got {b!r}")
    return RiskFamily(f=partial(_power_log_risk, b=float(b)),
                      f_inverse=partial(_power_log_risk_inverse, b=float(b)),
                      b_shift=1.0, a=float(a),
                      name=f"tsallis-pareto(b={b:g})")


def exponential_family(a: float = 1.0) -> RiskFamily:
    """Family with f(u) = u and b_shift = 0, i.e. Cbar = exp(-a*x)."""
    return RiskFamily(f=_identity, f_inverse=_identity,
                      b_shift=0.0, a=float(a), name="exponential")


FAMILY_NAMES = ("tsallis-pareto", "exponential")


def family_by_name(name: str, *, b: float | None = None, a: float = 1.0) -> RiskFamily:
    """Instantiate a built-in family by its CLI name."""
    if name == "tsallis-pareto":
        if b is None:
            raise ValueError("family 'tsallis-pareto' needs a shape exponent b")
        return tsallis_pareto_family(b, a)
    if name == "exponential":
        return exponential_family(a)
    raise ValueError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
