"""Self-contained analytic identity checks behind the ``verify`` subcommand.

Every check recomputes a closed-form quantity through an independent
numerical route (quadrature, grid scan, bisection) and compares at a fixed
tolerance.  ``perturb`` biases one named check's computed value by 1e-3 so
the failure path itself stays testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import pareto, risk, scaling

__all__ = ["CheckResult", "run_checks", "CHECK_NAMES"]

_B_SET = (1.2, 1.4, 2.0, 3.0, 5.0, 8.0)
_PERTURBATION = 1e-3


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_error: float
    tolerance: float
    detail: str


def _check(name: str, worst: float, tol: float, detail: str,
           perturb: str | None) -> CheckResult:
    if perturb == name:
        worst += _PERTURBATION
        detail += " [perturbed]"
    return CheckResult(name=name, passed=worst <= tol, worst_error=worst,
                       tolerance=tol, detail=detail)


def _pdf_normalization(perturb):
    worst = 0.0
    for b in _B_SET:
        m = pareto.ParetoModel(b=b, a=0.7)
        t_max = min(27.7 / b, 700.0)

        def integrand(t):
            x = math.expm1(t) / m.a
            return pareto.pdf(m, x) * math.exp(t) / m.a

        val, _ = integrate.quad(integrand, 0.0, t_max, epsabs=1e-12, limit=200)
        val += pareto.tail_cdf(m, math.expm1(t_max) / m.a)
        worst = max(worst, abs(val - 1.0))
    return _check("pdf-normalization", worst, 1e-8,
                  f"density integrates to 1 over b in {_B_SET}", perturb)


def _gini_quadrature(perturb):
    worst = 0.0
    for b in _B_SET:
        for a in (0.02, 1.0):
            m = pareto.ParetoModel(b=b, a=a)
            worst = max(worst, abs(pareto.gini_numeric(m) - pareto.gini_closed_form(b)))
    return _check("gini-quadrature", worst, 1e-6,
                  "tail-cdf quadrature matches b/(2b-1)", perturb)


def _gintropy_area(perturb):
    worst = 0.0
    for b in _B_SET:
        m = pareto.ParetoModel.from_mean(b, 40.0)

        def integrand(u):
            return pareto.gintropy(m, pareto.tail_quantile(m, u))

        val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-10, limit=200)
        worst = max(worst, abs(val - pareto.gini_closed_form(b) / 2.0))
    return _check("gintropy-area", worst, 1e-6,
                  "integral of gintropy over the tail cdf equals G/2", perturb)


def _max_gintropy_location(perturb):
    worst = 0.0
    for b in _B_SET:
        m = pareto.ParetoModel.from_mean(b, 25.0)
        grid = np.geomspace(m.mean / 100.0, m.mean * 100.0, 4001)
        values = pareto.gintropy(m, grid)
        peak = grid[int(np.argmax(values))]
        cell = math.log(grid[1] / grid[0])
        worst = max(worst, abs(math.log(peak / m.mean)) / cell)
    return _check("max-gintropy-location", worst, 1.0,
                  "argmax of gintropy sits within one log-grid cell of the mean",
                  perturb)


def _max_gintropy_value(perturb):
    worst = 0.0
    for b in _B_SET:
        m = pareto.ParetoModel.from_mean(b, 25.0)
        worst = max(worst, abs(pareto.gintropy(m, m.mean) - pareto.max_gintropy(b)))
    return _check("max-gintropy-value", worst, 1e-8,
                  "gintropy at the mean equals the closed-form peak", perturb)


def _bound_factor_identity(perturb):
    worst = 0.0
    for b in _B_SET:
        lhs = pareto.hirsch_bound_factor(b)
        rhs = (1.0 - 1.0 / b) * pareto.max_gintropy(b)
        worst = max(worst, abs(lhs - rhs))
    return _check("bound-factor-identity", worst, 1e-12,
                  "bound factor equals (1-1/b) times peak gintropy", perturb)


def _kappa_families(perturb):
    worst = abs(risk.kappa(risk.exponential_family()) - 1.0)
    for b in _B_SET:
        fam = risk.tsallis_pareto_family(b)
        worst = max(worst, abs(risk.kappa(fam) - b / (b - 1.0)))
    return _check("kappa-quadrature", worst, 1e-8,
                  "reduced mean matches b/(b-1) and the exponential value 1", perturb)


def _solver_agreement(perturb):
    worst = 0.0
    n_pub = 100
    for b in (1.2, 1.4, 2.0, 3.0, 8.0):
        fam = risk.tsallis_pareto_family(b)
        for n_cit in (25, 100, 400, 2500, 10000):
            general = risk.general_hirsch_solve(fam, n_pub, n_cit)
            direct = scaling.pareto_hirsch_solve(b, n_pub, n_cit)
            worst = max(worst, abs(general - direct))
    return _check("solver-agreement", worst, 1e-6,
                  "generic and closed-form Hirsch solvers agree on a 5x5 grid",
                  perturb)


def _solver_residual(perturb):
    worst = 0.0
    for b in (1.2, 1.4, 2.0, 3.0, 8.0):
        for n_cit in (25, 100, 400, 2500, 10000):
            h = scaling.pareto_hirsch_solve(b, 100, n_cit)
            residual = abs(h / 100 - (1 + h * 100 / ((b - 1) * n_cit)) ** (-b))
            worst = max(worst, residual)
    return _check("solver-residual", worst, 1e-9,
                  "closed-form solver residual", perturb)


def _curve_round_trip(perturb):
    worst = 0.0
    for b in (1.2, 1.4, 2.0, 3.0, 8.0):
        fam = risk.tsallis_pareto_family(b)
        for n_cit in (100, 400, 2500):
            h = risk.general_hirsch_solve(fam, 100, n_cit)
            r = h / 100.0
            predicted = risk.general_scaling_curve(fam, r)
            direct = scaling.impscale_curve(b, r)
            measured = math.sqrt(n_cit) / 100.0
            worst = max(worst, abs(predicted - measured), abs(predicted - direct))
    return _check("curve-round-trip", worst, 1e-6,
                  "scaling curve inverts the solver and matches the explicit form",
                  perturb)


def _product_identity(perturb):
    worst = 0.0
    for b in (1.2, 1.4, 2.0, 3.0, 8.0):
        for n_cit in (400, 2500, 10000):
            n_pub = 100
            h = scaling.pareto_hirsch_solve(b, n_pub, n_cit)
            mean = n_cit / n_pub
            m = pareto.ParetoModel.from_mean(b, mean)
            lhs = h * h / n_cit
            rhs = (1.0 - 1.0 / b) * pareto.gintropy(m, h)
            worst = max(worst, abs(lhs - rhs))
    return _check("hirsch-product-identity", worst, 1e-8,
                  "h^2/N_cit equals (1-1/b) times gintropy at h", perturb)


_CHECKS = (
    _pdf_normalization,
    _gini_quadrature,
    _gintropy_area,
    _max_gintropy_location,
    _max_gintropy_value,
    _bound_factor_identity,
    _kappa_families,
    _solver_agreement,
    _solver_residual,
    _curve_round_trip,
    _product_identity,
)

CHECK_NAMES = (
    "pdf-normalization",
    "gini-quadrature",
    "gintropy-area",
    "max-gintropy-location",
    "max-gintropy-value",
    "bound-factor-identity",
    "kappa-quadrature",
    "solver-agreement",
    "solver-residual",
    "curve-round-trip",
    "hirsch-product-identity",
)


def run_checks(perturb: str | None = None) -> list[CheckResult]:
    """Run every identity check; ``perturb`` names one check to bias (test hook)."""
    if perturb is not None and perturb not in CHECK_NAMES:
        raise ValueError(f"unknown check {perturb!r}; known: {', '.join(CHECK_NAMES)}")
    return [check(perturb) for check in _CHECKS]
