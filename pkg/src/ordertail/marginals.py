"""Parametric marginal risk laws with exact survival functions.

Four families are shipped: Pareto (Fréchet max-domain of attraction with
regular-variation index alpha) and LogNormal, Weibullian (stretched
exponential with shape in (0, 1]) and Exponential, all in the Gumbel
max-domain.  Survival probabilities are carried in log-space internally so
tails far below 1e-300 stay meaningful; plain probabilities are exposed at
the API boundary.

Gumbel-class families expose the auxiliary (scaling) function a(t) of the
tail expansion P(X > t + a(t) x) / P(X > t) -> exp(-x):

    LogNormal(mu, sigma):      a(t) = sigma^2 t / (log t - mu)
    Exponential(rate):         a(t) = 1 / rate
    Weibullian(rate, shape):   a(t) = t^(1-shape) / (rate * shape)

``lambda_weights`` computes the tail-equivalence constants
lambda_i = lim_t P(X_i > t) / P(X_1 > t); the first component must be the
heaviest-tailed risk or the limit is infinite and the portfolio is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import log_ndtr, ndtri

from .errors import DomainError, InvalidOrderingError, UnsupportedOperationError

__all__ = [
    "MdaClass",
    "Marginal",
    "Pareto",
    "LogNormal",
    "Exponential",
    "Weibullian",
    "LambdaWeights",
    "lambda_weights",
]


class MdaClass(Enum):
    """Max-domain-of-attraction class of a marginal law."""

    FRECHET = "frechet"
    GUMBEL = "gumbel"


def _dispatch(t, log_tail_arr):
    """Evaluate an array-valued log-tail on scalar or array input."""
    arr = np.asarray(t, dtype=float)
    out = log_tail_arr(np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


@dataclass(frozen=True)
class Marginal:
    """Common interface of the shipped marginal families."""

    # -- survival ---------------------------------------------------------

    def log_tail(self, t):
        """log P(X > t); 0.0 at or below the lower endpoint."""
        return _dispatch(t, self._log_tail)

    def tail(self, t):
        """P(X > t), exact survival function."""
        out = np.exp(self.log_tail(t))
        return out

    def _log_tail(self, t):
        raise NotImplementedError

    # -- quantiles --------------------------------------------------------

    def quantile(self, p):
        """p-th quantile: the t with P(X <= t) = p, for p in (0, 1)."""
        p = np.asarray(p, dtype=float)
        if np.any(p <= 0.0) or np.any(p >= 1.0):
            raise DomainError(f"quantile requires p in (0, 1), got {p}")
        return self.isf(1.0 - p)

    def isf(self, q):
        """Inverse survival: the t with P(X > t) = q, for q in (0, 1)."""
        q = np.asarray(q, dtype=float)
        if np.any(q <= 0.0) or np.any(q >= 1.0):
            raise DomainError(f"isf requires q in (0, 1), got {q}")
        out = self._isf(np.atleast_1d(q))
        if q.ndim == 0:
            return float(out[0])
        return out.reshape(q.shape)

    def _isf(self, q):
        raise NotImplementedError

    # -- classification ---------------------------------------------------

    @property
    def mda_class(self) -> MdaClass:
        raise NotImplementedError

    @property
    def lower_endpoint(self) -> float:
        return 0.0

    def rv_index(self):
        """Regular-variation index alpha for Fréchet families, else None."""
        return None

    # -- Gumbel auxiliary function ----------------------------------------

    def auxiliary(self, t):
        """Auxiliary function a(t) of the Gumbel tail expansion.

        Raises:
            UnsupportedOperationError: for Fréchet-class families.
            DomainError: below the family-specific validity threshold.
        """
        raise UnsupportedOperationError(
            f"{type(self).__name__} is in the Fréchet MDA; no auxiliary function")

    @property
    def aux_threshold(self) -> float:
        """Smallest t from which a(t) is defined and a(t) <= t.

        Asymptotic approximations refuse arguments below this point.
        """
        raise UnsupportedOperationError(
            f"{type(self).__name__} is in the Fréchet MDA; no auxiliary function")


@dataclass(frozen=True)
class Pareto(Marginal):
    """Pareto law: P(X > t) = (scale / t)^alpha for t >= scale."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"Pareto alpha must be > 0, got {self.alpha}")
        if not self.scale > 0:
            raise DomainError(f"Pareto scale must be > 0, got {self.scale}")

    def _log_tail(self, t):
        safe = np.where(t > self.scale, t, self.scale)
        return np.where(t <= self.scale, 0.0,
                        self.alpha * (math.log(self.scale) - np.log(safe)))

    def _isf(self, q):
        return self.scale * q ** (-1.0 / self.alpha)

    @property
    def mda_class(self):
        return MdaClass.FRECHET

    @property
    def lower_endpoint(self):
        return self.scale

    def rv_index(self):
        return self.alpha


@dataclass(frozen=True)
class LogNormal(Marginal):
    """Log-normal law: X = exp(mu + sigma Z) with Z standard normal."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"LogNormal sigma must be > 0, got {self.sigma}")

    def _log_tail(self, t):
        safe = np.where(t > 0.0, t, 1.0)
        z = (np.log(safe) - self.mu) / self.sigma
        return np.where(t <= 0.0, 0.0, log_ndtr(-z))

    def _isf(self, q):
        return np.exp(self.mu - self.sigma * ndtri(q))

    @property
    def mda_class(self):
        return MdaClass.GUMBEL

    def auxiliary(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(np.log(np.where(t > 0, t, np.nan)) <= self.mu) or np.any(t <= 0):
            raise DomainError(
                f"LogNormal auxiliary requires log t > mu = {self.mu}")
        out = self.sigma ** 2 * t / (np.log(t) - self.mu)
        return float(out) if t.ndim == 0 else out

    @property
    def aux_threshold(self):
        # a(t) <= t  <=>  log t >= mu + sigma^2
        return math.exp(self.mu + self.sigma ** 2)


@dataclass(frozen=True)
class Exponential(Marginal):
    """Exponential law: P(X > t) = exp(-rate t)."""

    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError(f"Exponential rate must be > 0, got {self.rate}")

    def _log_tail(self, t):
        return np.where(t <= 0.0, 0.0, -self.rate * t)

    def _isf(self, q):
        return -np.log(q) / self.rate

    @property
    def mda_class(self):
        return MdaClass.GUMBEL

    def auxiliary(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("Exponential auxiliary requires t > 0")
        out = np.full_like(t, 1.0 / self.rate)
        return float(out) if t.ndim == 0 else out

    @property
    def aux_threshold(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class Weibullian(Marginal):
    """Stretched exponential: P(X > t) = exp(-rate t^shape), shape in (0, 1].

    The shape restriction keeps the family in the Gumbel max-domain with the
    closed-form auxiliary function t^(1-shape) / (rate shape); shape = 1
    coincides with Exponential(rate).
    """

    rate: float
    shape: float

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError(f"Weibullian rate must be > 0, got {self.rate}")
        if not 0 < self.shape <= 1:
            raise DomainError(
                f"Weibullian shape must be in (0, 1], got {self.shape}")

    def _log_tail(self, t):
        safe = np.where(t > 0.0, t, 1.0)
        return np.where(t <= 0.0, 0.0, -self.rate * safe ** self.shape)

    def _isf(self, q):
        return (-np.log(q) / self.rate) ** (1.0 / self.shape)

    @property
    def mda_class(self):
        return MdaClass.GUMBEL

    def auxiliary(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("Weibullian auxiliary requires t > 0")
        out = t ** (1.0 - self.shape) / (self.rate * self.shape)
        return float(out) if t.ndim == 0 else out

    @property
    def aux_threshold(self):
        return (1.0 / (self.rate * self.shape)) ** (1.0 / self.shape)


# ---------------------------------------------------------------------------
# Tail-equivalence weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaWeights:
    """Tail-equivalence constants of a portfolio relative to its first risk.

    Attributes:
        lam: vector of lambda_i = lim_t P(X_i > t) / P(X_1 > t); lam[0] == 1.
        lambda_tilde: sum of the lambda_i (always >= 1).
    """

    lam: np.ndarray
    lambda_tilde: float


# Heaviness rank of each family class; a lower rank dominates (heavier tail)
# any higher rank regardless of parameters.  Weibullian/Exponential share a
# rank and compare through (shape, rate).
_FAMILY_RANK = {Pareto: 0, LogNormal: 1, Weibullian: 2, Exponential: 2}


def _weibull_params(model):
    if isinstance(model, Exponential):
        return (1.0, model.rate)
    return (model.shape, model.rate)


def _tail_ratio_limit(model, ref):
    """lim_t P(model > t) / P(ref > t), or inf when model is strictly heavier."""
    rank_m, rank_r = _FAMILY_RANK[type(model)], _FAMILY_RANK[type(ref)]
    if rank_m != rank_r:
        return 0.0 if rank_m > rank_r else math.inf
    if isinstance(ref, Pareto):
        if model.alpha > ref.alpha:
            return 0.0
        if model.alpha < ref.alpha:
            return math.inf
        return (model.scale / ref.scale) ** ref.alpha
    if isinstance(ref, LogNormal):
        if (model.sigma, model.mu) == (ref.sigma, ref.mu):
            return 1.0
        if model.sigma < ref.sigma or (model.sigma == ref.sigma
                                       and model.mu < ref.mu):
            return 0.0
        return math.inf
    # Weibullian / Exponential: smaller shape is heavier, then smaller rate.
    shape_m, rate_m = _weibull_params(model)
    shape_r, rate_r = _weibull_params(ref)
    if shape_m > shape_r:
        return 0.0
    if shape_m < shape_r:
        return math.inf
    if rate_m > rate_r:
        return 0.0
    if rate_m < rate_r:
        return math.inf
    return 1.0


def lambda_weights(models) -> LambdaWeights:
    """Tail-equivalence constants lambda_i for a list of marginals.

    The first entry is the reference risk and must be at least as heavy as
    every other component.

    Raises:
        InvalidOrderingError: some component is strictly heavier than the
            first, so the limit is infinite.
    """
    models = list(models)
    if not models:
        raise DomainError("lambda_weights requires at least one marginal")
    ref = models[0]
    lam = np.empty(len(models))
    for i, model in enumerate(models):
        value = _tail_ratio_limit(model, ref)
        if math.isinf(value):
            raise InvalidOrderingError(
                f"marginal {i} ({model!r}) has a strictly heavier tail than "
                "the first component; reorder the portfolio")
        lam[i] = value
    return LambdaWeights(lam=lam, lambda_tilde=float(lam.sum()))
