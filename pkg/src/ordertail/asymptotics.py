"""First-order tail approximations for the weighted aggregate.

Fréchet class (regularly varying marginals, index alpha):

    P(L > t) ~ P(X_1 > t) * E[C_1^alpha] * lambda_tilde,

the product-tail step being Breiman's lemma.  Gumbel class, with the first
weight's endpoint behaviour classified as kind A (atom of mass p at omega)
or kind B (regularly varying near-endpoint tail, index gamma):

    P(C_1 X_1 > s) ~ p * P(X_1 > s/omega)                          (kind A)
    P(C_1 X_1 > s) ~ Gamma(gamma+1) * P(C_1 > omega - omega*a(t)/t)
                     * P(X_1 > t),   t = s/omega                   (kind B)

and P(L > t) ~ lambda_tilde * P(C_1 X_1 > t).  A general endpoint omega is
supported through the substitution t -> t/omega; the product C_1 X_1 then
has auxiliary function omega * a(t/omega), which is noted in the report
when omega != 1.

Approximations refuse arguments in the distribution bulk (value > 1e-2) and
attach a caveat when the value exceeds 1e-4, unless the caller explicitly
allows bulk evaluation (the comparison harness does, flagging the rows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from scipy.special import gammaln

from .dependence import Scenario
from .errors import DomainError, UnsupportedOperationError
from .marginals import Marginal, MdaClass
from .weights import EndpointClassification, EndpointKind, WeightModel

__all__ = [
    "Formula",
    "ApproxReport",
    "breiman_tail",
    "frechet_lc_approx",
    "scaled_tail_model_a",
    "scaled_tail_model_b",
    "gumbel_lc_approx",
    "approx",
    "REFUSE_ABOVE",
    "CAVEAT_ABOVE",
]

# First-order asymptotics are meaningless in the bulk: refuse above the
# first threshold, caveat above the second.
REFUSE_ABOVE = 1e-2
CAVEAT_ABOVE = 1e-4


class Formula(Enum):
    FRECHET_MAIN = "FrechetMain"
    GUMBEL_MODEL_A = "GumbelModelA"
    GUMBEL_MODEL_B = "GumbelModelB"
    BREIMAN = "Breiman"


@dataclass(frozen=True)
class ApproxReport:
    """An approximation value with the formula used and its inputs echoed."""

    value: float
    log_value: float
    formula: Formula
    inputs: dict
    caveats: tuple = field(default_factory=tuple)


def _bulk_caveats(log_value, allow_bulk):
    """Bulk-threshold caveats; returns (clamped log value, caveat list)."""
    caveats = []
    if log_value > math.log(REFUSE_ABOVE):
        if not allow_bulk:
            raise DomainError(
                f"approximation value {math.exp(log_value):.3e} lies in the "
                f"distribution bulk (> {REFUSE_ABOVE}); first-order "
                "asymptotics are not meaningful there")
        caveats.append("bulk: value > 1e-2, first-order asymptotics unreliable")
        if log_value > 0.0:
            caveats.append("formula exceeded 1; value clamped to 1")
            log_value = 0.0
    elif log_value > math.log(CAVEAT_ABOVE):
        caveats.append("value > 1e-4: approximation may carry visible bias")
    return log_value, caveats


def breiman_tail(weight: WeightModel, marginal: Marginal, t):
    """Product tail P(C X > t) ~ E[C^alpha] P(X > t) for a regularly varying X.

    Exact (not merely asymptotic) for Pareto x bounded-weight pairs once
    t/omega exceeds the Pareto scale.
    """
    if marginal.mda_class is not MdaClass.FRECHET:
        raise UnsupportedOperationError(
            "breiman_tail requires a Fréchet-class marginal; use the "
            "endpoint-classified product tails for Gumbel marginals")
    alpha = marginal.rv_index()
    return weight.moment(alpha) * marginal.tail(t)


def _log_breiman(weight, marginal, t):
    alpha = marginal.rv_index()
    return math.log(weight.moment(alpha)) + marginal.log_tail(t)


def frechet_lc_approx(scenario: Scenario, t, allow_bulk=False) -> ApproxReport:
    """P(L > t) ~ P(X_1 > t) E[C_1^alpha] lambda_tilde for Fréchet scenarios."""
    if scenario.mda_class is not MdaClass.FRECHET:
        raise UnsupportedOperationError(
            "frechet_lc_approx requires all marginals in the Fréchet class")
    marginal = scenario.marginals[0]
    c1 = scenario.weights.models[0]
    alpha = marginal.rv_index()
    moment = c1.moment(alpha)
    if moment <= 0.0:
        raise DomainError("E[C_1^alpha] must be positive")
    lam = scenario.lambdas.lambda_tilde
    log_value = marginal.log_tail(t) + math.log(moment) + math.log(lam)
    log_value, caveats = _bulk_caveats(log_value, allow_bulk)
    return ApproxReport(
        value=math.exp(log_value),
        log_value=log_value,
        formula=Formula.FRECHET_MAIN,
        inputs={"alpha": alpha, "E_C1_alpha": moment, "lambda_tilde": lam, "t": t},
        caveats=tuple(caveats),
    )


def _require_gumbel(marginal, t_eff):
    if marginal.mda_class is not MdaClass.GUMBEL:
        raise UnsupportedOperationError(
            "endpoint-classified product tails require a Gumbel-class marginal")
    if t_eff <= marginal.aux_threshold:
        raise DomainError(
            f"argument {t_eff:.6g} is below the auxiliary-function validity "
            f"threshold {marginal.aux_threshold:.6g} of {type(marginal).__name__}")


def scaled_tail_model_a(weight: WeightModel, marginal: Marginal, s,
                        classification: EndpointClassification | None = None):
    """Leading term p * P(X > s/omega) for an atom-at-endpoint weight."""
    if classification is None:
        classification = weight.classify_endpoint()
    if classification.kind is not EndpointKind.MODEL_A:
        raise UnsupportedOperationError(
            f"weight classified as {classification.kind.value}, expected an "
            "atom at the endpoint")
    t_eff = s / weight.omega
    _require_gumbel(marginal, t_eff)
    return classification.p * marginal.tail(t_eff)


def scaled_tail_model_b(weight: WeightModel, marginal: Marginal, s,
                        classification: EndpointClassification | None = None):
    """Gamma(gamma+1) P(C > omega(1 - a(t)/t)) P(X > t) with t = s/omega."""
    if classification is None:
        classification = weight.classify_endpoint()
    if classification.kind is not EndpointKind.MODEL_B:
        raise UnsupportedOperationError(
            f"weight classified as {classification.kind.value}, expected a "
            "regularly varying near-endpoint tail")
    omega = weight.omega
    t_eff = s / omega
    _require_gumbel(marginal, t_eff)
    gamma = classification.gamma
    x = omega * marginal.auxiliary(t_eff) / t_eff
    log_value = (gammaln(gamma + 1.0)
                 + math.log(weight.near_endpoint_tail(x))
                 + marginal.log_tail(t_eff))
    return math.exp(log_value)


def _log_scaled_tail(weight, marginal, s, classification):
    if classification.kind is EndpointKind.MODEL_A:
        t_eff = s / weight.omega
        _require_gumbel(marginal, t_eff)
        return math.log(classification.p) + marginal.log_tail(t_eff)
    omega = weight.omega
    t_eff = s / omega
    _require_gumbel(marginal, t_eff)
    x = omega * marginal.auxiliary(t_eff) / t_eff
    return (float(gammaln(classification.gamma + 1.0))
            + math.log(weight.near_endpoint_tail(x))
            + marginal.log_tail(t_eff))


def gumbel_lc_approx(scenario: Scenario, t, allow_bulk=False) -> ApproxReport:
    """P(L > t) ~ lambda_tilde * P(C_1 X_1 > t) for Gumbel scenarios."""
    if scenario.mda_class is not MdaClass.GUMBEL:
        raise UnsupportedOperationError(
            "gumbel_lc_approx requires all marginals in the Gumbel class")
    marginal = scenario.marginals[0]
    c1 = scenario.weights.models[0]
    classification = c1.classify_endpoint()
    if classification.kind is EndpointKind.OTHER:
        raise UnsupportedOperationError(
            "the first weight's endpoint behaviour is neither an atom nor "
            "regularly varying; no closed-form approximation applies")
    lam = scenario.lambdas.lambda_tilde
    log_value = math.log(lam) + _log_scaled_tail(c1, marginal, t, classification)
    log_value, caveats = _bulk_caveats(log_value, allow_bulk)
    inputs = {"lambda_tilde": lam, "omega": c1.omega, "t": t}
    if classification.kind is EndpointKind.MODEL_A:
        formula = Formula.GUMBEL_MODEL_A
        inputs["p"] = classification.p
    else:
        formula = Formula.GUMBEL_MODEL_B
        inputs["gamma"] = classification.gamma
        inputs["a_t"] = marginal.auxiliary(t / c1.omega)
    if c1.omega != 1.0:
        caveats.append(
            f"endpoint omega={c1.omega:g} handled by the substitution "
            "t -> t/omega; the product C_1 X_1 has auxiliary function "
            "omega * a(t/omega)")
    return ApproxReport(
        value=math.exp(log_value),
        log_value=log_value,
        formula=formula,
        inputs=inputs,
        caveats=tuple(caveats),
    )


def approx(scenario: Scenario, t, allow_bulk=False) -> ApproxReport:
    """Dispatch to the Fréchet or Gumbel approximation by max-domain class."""
    if scenario.mda_class is MdaClass.FRECHET:
        return frechet_lc_approx(scenario, t, allow_bulk=allow_bulk)
    return gumbel_lc_approx(scenario, t, allow_bulk=allow_bulk)
