"""Random deflator laws on a bounded interval [0, omega].

Every weight model exposes its moments E[C^beta], its survival function,
the near-endpoint tail P(C > omega - x), a sampler, and a classification of
its upper-endpoint behaviour:

* kind A — an atom at the endpoint: P(C = omega) = p and the rest of the
  mass confined to [0, eta] with eta < omega;
* kind B — a regularly varying near-endpoint tail:
  P(C > omega - x/t) / P(C > omega - 1/t) -> x^gamma.

The classification drives which closed-form tail approximation applies to
the product C * X for Gumbel-class risks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import betainc, betaincinv, betaln

from .errors import (
    DomainError,
    ModelConsistencyError,
    UnsupportedOperationError,
    ValidationError,
)

__all__ = [
    "EndpointKind",
    "EndpointClassification",
    "WeightModel",
    "Degenerate",
    "Uniform",
    "Beta",
    "ModelA",
    "WeightVectorSpec",
    "sample_weights",
]

# Relative mismatch between the analytic endpoint index and its numeric
# verification above which classification refuses the model.
_GAMMA_MISMATCH_TOL = 0.05


class EndpointKind(Enum):
    MODEL_A = "A"
    MODEL_B = "B"
    OTHER = "other"


@dataclass(frozen=True)
class EndpointClassification:
    """Upper-endpoint behaviour of a weight law."""

    kind: EndpointKind
    p: float | None = None       # atom mass (kind A)
    eta: float | None = None     # sub-endpoint support bound (kind A)
    gamma: float | None = None   # regular-variation index at the endpoint (kind B)


def _scalar_or_array(x, out):
    if np.ndim(x) == 0:
        return float(out[0] if np.ndim(out) else out)
    return out


class WeightModel:
    """Common interface of the shipped weight laws.

    Concrete models expose ``omega`` (the upper endpoint of the support)
    either as a field or a derived property.
    """

    @property
    def has_atom_at_zero(self) -> bool:
        return False

    def moment(self, beta):
        """E[C^beta] for beta >= 0 (always finite: bounded support)."""
        if beta < 0:
            raise DomainError(f"moment requires beta >= 0, got {beta}")
        return self._moment(float(beta))

    def _moment(self, beta):
        raise NotImplementedError

    def survival(self, x):
        """P(C > x), vectorized; 1 below the support, 0 at or above omega."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        return _scalar_or_array(x, self._survival(arr))

    def _survival(self, x):
        raise NotImplementedError

    def near_endpoint_tail(self, x):
        """P(C > omega - x) for 0 < x <= omega."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(arr <= 0) or np.any(arr > self.omega):
            raise DomainError(
                f"near_endpoint_tail requires 0 < x <= omega = {self.omega}")
        return _scalar_or_array(x, self._survival(self.omega - arr))

    def survival_inverse(self, q):
        """Inverse survival for continuous laws: the c with P(C > c) = q."""
        raise UnsupportedOperationError(
            f"{type(self).__name__} has no continuous inverse survival")

    def sample(self, gen, size):
        """Draw ``size`` i.i.d. copies using the supplied Generator."""
        raise NotImplementedError

    def classify_endpoint(self) -> EndpointClassification:
        raise NotImplementedError

    def _verify_gamma(self, gamma):
        """Numeric check of the endpoint index via the tail-ratio limit."""
        x = 2.0
        t = 1e6
        lo = self.near_endpoint_tail(1.0 / t)
        hi = self.near_endpoint_tail(x / t)
        if lo <= 0 or hi <= 0:
            raise ModelConsistencyError(
                f"{type(self).__name__}: vanishing near-endpoint tail at t={t}")
        est = math.log(hi / lo) / math.log(x)
        if abs(est - gamma) > _GAMMA_MISMATCH_TOL * max(gamma, 1.0):
            raise ModelConsistencyError(
                f"{type(self).__name__}: endpoint index mismatch "
                f"(analytic {gamma}, numeric {est:.4f})")


@dataclass(frozen=True)
class Degenerate(WeightModel):
    """Point mass at c >= 0."""

    c: float

    def __post_init__(self):
        if self.c < 0:
            raise DomainError(f"Degenerate weight must be >= 0, got {self.c}")

    @property
    def omega(self):
        return self.c

    @property
    def has_atom_at_zero(self):
        return self.c == 0.0

    def _moment(self, beta):
        if beta == 0.0:
            return 1.0
        return self.c ** beta

    def _survival(self, x):
        return np.where(x < self.c, 1.0, 0.0)

    def near_endpoint_tail(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(arr <= 0) or np.any(arr > self.c):
            raise DomainError(
                f"near_endpoint_tail requires 0 < x <= omega = {self.c}")
        return _scalar_or_array(x, np.ones_like(arr))

    def sample(self, gen, size):
        return np.full(size, self.c)

    def classify_endpoint(self):
        return EndpointClassification(kind=EndpointKind.MODEL_A, p=1.0)


@dataclass(frozen=True)
class Uniform(WeightModel):
    """Uniform law on [0, omega]."""

    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"Uniform omega must be > 0, got {self.omega}")

    def _moment(self, beta):
        return self.omega ** beta / (1.0 + beta)

    def _survival(self, x):
        return np.clip(1.0 - x / self.omega, 0.0, 1.0)

    def survival_inverse(self, q):
        return self.omega * (1.0 - np.asarray(q, dtype=float))

    def sample(self, gen, size):
        return self.omega * gen.random(size)

    def classify_endpoint(self):
        self._verify_gamma(1.0)
        return EndpointClassification(kind=EndpointKind.MODEL_B, gamma=1.0)


@dataclass(frozen=True)
class Beta(WeightModel):
    """Beta(a, b) law on [0, 1], rescaled to [0, omega]."""

    a: float
    b: float
    omega: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(
                f"Beta parameters must be > 0, got a={self.a}, b={self.b}")
        if not self.omega > 0:
            raise DomainError(f"Beta omega must be > 0, got {self.omega}")

    def _moment(self, beta):
        log_ratio = betaln(self.a + beta, self.b) - betaln(self.a, self.b)
        return self.omega ** beta * math.exp(log_ratio)

    def _survival(self, x):
        q = x / self.omega
        out = np.empty_like(q)
        below = q <= 0.0
        above = q >= 1.0
        mid = ~(below | above)
        out[below] = 1.0
        out[above] = 0.0
        # P(B > q) = I_{1-q}(b, a), the regularized incomplete beta function.
        out[mid] = betainc(self.b, self.a, 1.0 - q[mid])
        return out

    def survival_inverse(self, q):
        y = betaincinv(self.b, self.a, np.asarray(q, dtype=float))
        return self.omega * (1.0 - y)

    def sample(self, gen, size):
        return self.omega * gen.beta(self.a, self.b, size)

    def classify_endpoint(self):
        self._verify_gamma(self.b)
        return EndpointClassification(kind=EndpointKind.MODEL_B, gamma=self.b)


@dataclass(frozen=True)
class ModelA(WeightModel):
    """Atom at the endpoint plus a sub-law bounded away from it.

    P(C = omega) = p; with probability 1 - p, C is drawn from ``sub`` whose
    support is [0, eta] with eta < omega.  The sub-law defaults to
    Uniform(0, eta); the endpoint classification is insensitive to it.
    """

    omega: float
    p: float
    eta: float
    sub: WeightModel | None = field(default=None)

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"ModelA omega must be > 0, got {self.omega}")
        if not 0 < self.p <= 1:
            raise DomainError(f"ModelA p must be in (0, 1], got {self.p}")
        if not 0 < self.eta < self.omega:
            raise DomainError(
                f"ModelA eta must be in (0, omega), got {self.eta}")
        if self.sub is None:
            object.__setattr__(self, "sub", Uniform(self.eta))
        elif self.sub.omega > self.eta:
            raise ValidationError(
                f"ModelA sub-law endpoint {self.sub.omega} exceeds eta={self.eta}")

    def _moment(self, beta):
        return (self.p * self.omega ** beta
                + (1.0 - self.p) * self.sub.moment(beta))

    def _survival(self, x):
        atom = np.where(x < self.omega, self.p, 0.0)
        return atom + (1.0 - self.p) * self.sub._survival(x)

    def sample(self, gen, size):
        # The sub-law draw happens unconditionally so the stream layout is
        # independent of the atom hits.
        hit = gen.random(size) < self.p
        sub = self.sub.sample(gen, size)
        return np.where(hit, self.omega, sub)

    def classify_endpoint(self):
        return EndpointClassification(kind=EndpointKind.MODEL_A,
                                      p=self.p, eta=self.eta)


# ---------------------------------------------------------------------------
# Weight vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightVectorSpec:
    """Per-index weight laws for (C_1, ..., C_k).

    The first component multiplies the largest order statistic and must be
    strictly positive almost surely: models with an atom at 0 are rejected
    for index 1.  Only mutually independent components (independent of the
    risks) are sampled.
    """

    models: tuple
    independent: bool = True

    def __post_init__(self):
        models = tuple(self.models)
        object.__setattr__(self, "models", models)
        if not models:
            raise ValidationError("WeightVectorSpec requires at least one model")
        if models[0].has_atom_at_zero:
            raise ValidationError(
                "the first weight component must be positive almost surely; "
                f"got {models[0]!r}")

    @property
    def k(self):
        return len(self.models)


def sample_weights(spec: WeightVectorSpec, gen, size):
    """One (size, k) batch of independent weight draws, column by column."""
    if not spec.independent:
        raise UnsupportedOperationError(
            "only mutually independent weight vectors are sampled")
    out = np.empty((size, spec.k))
    for j, model in enumerate(spec.models):
        out[:, j] = model.sample(gen, size)
    return out
