"""Joint risk sampling through a Gaussian copula, and the scenario object.

Risks are coupled by correlating their latent standard normals; log-normal
marginals use the exact exponential transform, every other family goes
through the inverse survival function evaluated at the normal survival
probability (which keeps deep-tail draws accurate).

``eta`` is the bivariate constant governing the log-scale joint-tail decay
of a correlated log-normal pair: the maximum over the angle of the smaller
of the two unit sinusoids with phase gap arccos(rho).  That maximum is
attained where the sinusoids cross, giving cos(arccos(rho)/2) =
sqrt((1+rho)/2); the closed form is pinned against the grid oracle in the
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, ValidationError
from .marginals import LogNormal, MdaClass, lambda_weights
from .weights import WeightVectorSpec

__all__ = ["validate_correlation", "eta", "Scenario", "sample_risks"]


def validate_correlation(matrix) -> np.ndarray:
    """Validate a correlation matrix and return its lower Cholesky factor.

    Raises:
        ValidationError: naming the first failing property (shape, symmetry,
            unit diagonal, off-diagonal range, positive definiteness).
    """
    corr = np.asarray(matrix, dtype=float)
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
        raise ValidationError(f"correlation matrix must be square, got shape {corr.shape}")
    if not np.allclose(corr, corr.T, rtol=0.0, atol=1e-12):
        raise ValidationError("correlation matrix is not symmetric")
    if not np.allclose(np.diag(corr), 1.0, rtol=0.0, atol=1e-12):
        raise ValidationError("correlation matrix diagonal is not 1")
    off = corr[~np.eye(corr.shape[0], dtype=bool)]
    if off.size and np.max(np.abs(off)) >= 1.0:
        raise ValidationError("off-diagonal correlations must lie in (-1, 1)")
    try:
        return np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        raise ValidationError("correlation matrix is not positive definite") from None


def eta(rho):
    """Joint-tail decay constant of a correlated log-normal pair, in (0, 1).

    Equals max over theta of min(sin theta,
    rho sin theta + sqrt(1-rho^2) cos theta) = sqrt((1+rho)/2).
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"eta requires rho in (-1, 1), got {rho}")
    return math.sqrt((1.0 + rho) / 2.0)


@dataclass(frozen=True, eq=False)
class Scenario:
    """A full experiment: n risks, k retained order statistics, weights.

    Invariants enforced at construction: the first marginal is the heaviest
    (the tail-equivalence limits exist), all marginals share one max-domain
    class (mixed Fréchet/Gumbel portfolios are rejected), and the weight
    vector has length k <= n.
    """

    n: int
    k: int
    marginals: tuple
    corr: np.ndarray | None
    weights: WeightVectorSpec

    def __post_init__(self):
        marginals = tuple(self.marginals)
        object.__setattr__(self, "marginals", marginals)
        if len(marginals) != self.n:
            raise ValidationError(
                f"expected {self.n} marginals, got {len(marginals)}")
        if not 1 <= self.k <= self.n:
            raise ValidationError(f"k must satisfy 1 <= k <= n, got k={self.k}")
        if self.weights.k != self.k:
            raise ValidationError(
                f"weight vector has length {self.weights.k}, expected k={self.k}")
        classes = {m.mda_class for m in marginals}
        if len(classes) > 1:
            raise ValidationError(
                "mixed Fréchet/Gumbel portfolios are not supported; "
                "all marginals must share one max-domain class")
        lw = lambda_weights(marginals)  # raises if ordering invalid
        object.__setattr__(self, "_lambda", lw)
        if self.corr is not None:
            chol = validate_correlation(self.corr)
            if chol.shape[0] != self.n:
                raise ValidationError(
                    f"correlation matrix is {chol.shape[0]}x{chol.shape[0]}, "
                    f"expected {self.n}x{self.n}")
            corr = np.array(self.corr, dtype=float)
            corr.setflags(write=False)
            object.__setattr__(self, "corr", corr)
            object.__setattr__(self, "_chol", chol)
        else:
            object.__setattr__(self, "_chol", None)

    @property
    def mda_class(self) -> MdaClass:
        return self.marginals[0].mda_class

    @property
    def lambdas(self):
        return self._lambda

    @property
    def cholesky(self):
        return self._chol


def sample_risks(scenario: Scenario, gen, size):
    """One (size, n) joint draw of the risk vector.

    The latent normals are drawn in a single block, correlated through the
    Cholesky factor when a correlation matrix is present, and pushed through
    each marginal (exact transform for log-normals, inverse survival for the
    rest).
    """
    z = gen.standard_normal((size, scenario.n))
    if scenario.cholesky is not None:
        z = z @ scenario.cholesky.T
    out = np.empty_like(z)
    for j, marginal in enumerate(scenario.marginals):
        if isinstance(marginal, LogNormal):
            out[:, j] = np.exp(marginal.mu + marginal.sigma * z[:, j])
        else:
            # ndtr rounds to exactly 0/1 beyond |z| ~ 8.3 and ~ 38; clip into
            # the open unit interval so the inverse survival stays defined.
            q = np.clip(ndtr(-z[:, j]), 5e-324, 1.0 - 1e-16)
            out[:, j] = marginal.isf(q)
    return out
