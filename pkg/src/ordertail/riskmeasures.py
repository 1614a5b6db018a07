"""Value-at-Risk and Expected Shortfall, asymptotic and empirical.

Asymptotic VaR inverts a monotone tail approximation by bracketed root
finding.  For Fréchet scenarios the headline value is the root of the
closed-form aggregate approximation.  For Gumbel scenarios the headline
value is the sharper target: the exact quantile of the product C_1 X_1,
obtained by inverting the scale-mixture quadrature (the aggregate quantile
is asymptotically equivalent as p -> 1); the approximation root is also
reported.  ES for Gumbel scenarios equals VaR to first order and is tagged
as such; the Fréchet ES/VaR ratio does not tend to 1, so no closed form is
offered there — use the empirical estimator.

Empirical quantiles use the "higher" order-statistic convention
(conservative for tail risk); empirical ES averages the exceedances
strictly above the empirical VaR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import approx
from .dependence import Scenario
from .errors import DomainError, InsufficientSamplesError, UnsupportedOperationError
from .marginals import MdaClass
from .oracles import log_scale_mixture_tail

__all__ = [
    "VarReport",
    "EsReport",
    "var_asymptotic",
    "es_asymptotic",
    "var_empirical",
    "es_empirical",
    "ASYMPTOTIC_GUARD",
]

# Below this probability level the first-order tail regime is questionable;
# values are still returned, flagged.
ASYMPTOTIC_GUARD = 0.99

_BISECT_REL_TOL = 1e-8


@dataclass(frozen=True)
class VarReport:
    """Asymptotic Value-at-Risk with the inversion route spelled out."""

    p: float
    value: float
    rule: str                  # "frechet-approx-inverse" | "gumbel-c1x1-quantile"
    approx_root: float
    c1x1_root: float | None
    flags: tuple


@dataclass(frozen=True)
class EsReport:
    """First-order Expected Shortfall (Gumbel class: ES ~ VaR as p -> 1)."""

    p: float
    value: float
    tag: str
    var_report: VarReport


def _invert_monotone(log_target, log_fn, t_guess, domain_min=0.0):
    """Root of log_fn(t) = log_target for a decreasing log_fn, t > 0.

    ``log_fn`` may raise DomainError below its validity floor; such points
    are treated as lying above the target.  Returns None when the target is
    unreachable inside (domain_min, inf) — the function is already below the
    target at the floor.
    """
    floor = domain_min * (1.0 + 1e-9) if domain_min > 0.0 else 0.0

    def probe(t):
        try:
            return log_fn(t)
        except DomainError:
            return math.inf

    lo = hi = max(t_guess, floor, 1e-300)
    for _ in range(200):
        if probe(hi) < log_target:
            break
        hi *= 4.0
    else:
        raise DomainError("failed to bracket the quantile from above")
    for _ in range(200):
        if probe(lo) > log_target:
            break
        if floor > 0.0 and lo <= floor:
            return None
        lo = max(lo / 4.0, floor) if floor > 0.0 else lo / 4.0
    else:
        raise DomainError("failed to bracket the quantile from below")
    for _ in range(200):
        if hi - lo <= 1e-13 * lo:
            break
        mid = math.sqrt(lo * hi)
        if probe(mid) > log_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def var_asymptotic(scenario: Scenario, p, guard=ASYMPTOTIC_GUARD) -> VarReport:
    """Asymptotic p-quantile of the weighted aggregate.

    Args:
        scenario: the portfolio.
        p: probability level in (0, 1); levels below ``guard`` are flagged
            but still computed.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"VaR level must be in (0, 1), got {p}")
    flags = []
    if p < guard:
        flags.append(f"p={p} below the asymptotic-regime guard {guard}; "
                     "first-order inversion may be inaccurate")
    log_target = math.log1p(-p)
    marginal = scenario.marginals[0]
    guess = marginal.isf(min(1.0 - p, 0.5))
    c1 = scenario.weights.models[0]
    is_gumbel = scenario.mda_class is MdaClass.GUMBEL
    domain_min = marginal.aux_threshold * c1.omega if is_gumbel else 0.0

    approx_root = _invert_monotone(
        log_target,
        lambda t: approx(scenario, t, allow_bulk=True).log_value,
        guess, domain_min=domain_min)
    if approx_root is None:
        flags.append("closed-form approximation already below 1-p at its "
                     "validity threshold; approx root undefined at this level")
        approx_root = math.nan

    if is_gumbel:
        c1x1_root = _invert_monotone(
            log_target,
            lambda t: log_scale_mixture_tail(c1, marginal, t, rel_tol=1e-11),
            guess)
        return VarReport(p=p, value=float(c1x1_root),
                         rule="gumbel-c1x1-quantile",
                         approx_root=float(approx_root),
                         c1x1_root=float(c1x1_root), flags=tuple(flags))
    if math.isnan(approx_root):
        raise DomainError(
            "the Fréchet approximation cannot be inverted at this level")
    return VarReport(p=p, value=float(approx_root),
                     rule="frechet-approx-inverse",
                     approx_root=float(approx_root),
                     c1x1_root=None, flags=tuple(flags))


def es_asymptotic(scenario: Scenario, p, guard=ASYMPTOTIC_GUARD) -> EsReport:
    """First-order ES for Gumbel scenarios: equal to VaR, tagged as such.

    Raises:
        UnsupportedOperationError: Fréchet scenario (the ES/VaR limit is
            alpha/(alpha-1), not 1; use the empirical estimator).
    """
    if scenario.mda_class is not MdaClass.GUMBEL:
        raise UnsupportedOperationError(
            "first-order ES equals VaR only in the Gumbel class; use "
            "es_empirical for Fréchet scenarios")
    var = var_asymptotic(scenario, p, guard=guard)
    return EsReport(p=p, value=var.value,
                    tag="first-order ES≈VaR (Gumbel MDA)", var_report=var)


def _check_sample_size(n, p):
    needed = 10.0 / (1.0 - p)
    if n < needed * (1.0 - 1e-12):
        raise InsufficientSamplesError(
            f"need at least {math.ceil(needed)} samples for p={p}, got {n}")


def var_empirical(samples, p):
    """Empirical p-quantile, "higher" order-statistic convention."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"VaR level must be in (0, 1), got {p}")
    arr = np.asarray(samples, dtype=float)
    _check_sample_size(arr.size, p)
    return float(np.quantile(arr, p, method="higher"))


def es_empirical(samples, p):
    """Mean of the exceedances strictly above the empirical p-quantile.

    Falls back to the quantile itself when nothing exceeds it (constant
    samples), preserving ES >= VaR.
    """
    arr = np.asarray(samples, dtype=float)
    var = var_empirical(arr, p)
    exceed = arr[arr > var]
    if exceed.size == 0:
        return var
    return float(exceed.mean())
