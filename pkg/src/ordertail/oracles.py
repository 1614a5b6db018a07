"""Independent numeric oracles backing every asymptotic formula.

``scale_mixture_tail`` evaluates the exact product tail
P(C X > t) = ∫ P(X > t/c) dF_C(c) for an independent bounded weight C.  The
integral is taken in the variable u = -log P(C > c): the weight's mass maps
to a unit-exponential density, which stretches the thin boundary layer near
c = omega (where the integrand of a Gumbel-class marginal concentrates)
over an O(1) region of u.  Each refinement level applies Gauss-Legendre
panels to the log-integrand and accumulates in log-space, so results stay
meaningful far below the smallest positive double.

``ratio_limit`` and ``grid_max_min`` back the limit statements and the
bivariate max-min constant; ``gaussian_joint_survival`` is the exact joint
exceedance probability of a correlated standard normal pair used by the
condition checker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import log_ndtr, logsumexp

from .errors import DomainError, NumericError
from .marginals import Marginal, MdaClass
from .weights import Degenerate, ModelA, WeightModel

__all__ = [
    "scale_mixture_tail",
    "log_scale_mixture_tail",
    "RatioTrend",
    "ratio_limit",
    "grid_max_min",
    "gaussian_joint_survival",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@lru_cache(maxsize=None)
def _leggauss(m):
    nodes, weights = np.polynomial.legendre.leggauss(m)
    return nodes, weights


def _panel_nodes(edges, m):
    """Gauss-Legendre nodes/log-weights for a sequence of panels."""
    nodes, weights = _leggauss(m)
    lo = edges[:-1]
    hi = edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    u = mid[:, None] + half[:, None] * nodes[None, :]
    logw = np.log(weights)[None, :] + np.log(half)[:, None]
    return u.ravel(), logw.ravel()


def _log_mixture_continuous(weight, marginal, t, rel_tol):
    """log ∫_0^∞ P(X > t / c(u)) e^{-u} du with c(u) = S_C^{-1}(e^{-u})."""
    # Cap the u-range: beyond it the integrand is dominated by
    # P(X > t/omega) e^{-u}, which the cap makes negligible relative to the
    # integral's own scale.
    omega = weight.omega
    u_star = 0.0
    if marginal.mda_class is MdaClass.GUMBEL:
        t_eff = t / omega
        if t_eff > marginal.aux_threshold:
            layer = omega * marginal.auxiliary(t_eff) / t_eff
            s_layer = weight.survival(omega - layer)
            if s_layer <= 0.0:
                raise NumericError(
                    "near-endpoint weight mass at the boundary layer "
                    "underflows double precision; the mixture tail cannot "
                    "be resolved at this depth")
            u_star = -math.log(s_layer)
    u_cap = max(50.0, u_star + 45.0)
    if u_cap > 700.0:
        raise NumericError(
            f"boundary layer too deep for double precision (u-cap {u_cap:.0f})")
    # Geometric refinement toward u = 0: the inverse survival behaves like
    # u^(1/a) there for Beta-type laws, so uniform panels would see an
    # algebraic endpoint singularity and converge slowly.
    step = u_cap / max(32, int(u_cap / 1.5))
    geo = step * 2.0 ** (-np.arange(14, 0, -1))
    edges = np.concatenate([[0.0], geo, np.arange(step, u_cap, step), [u_cap]])

    prev = None
    achieved = math.inf
    for m in (16, 32, 64, 128):
        u, logw = _panel_nodes(edges, m)
        c = weight.survival_inverse(np.exp(-u))
        g = np.full_like(u, -np.inf)
        pos = c > 0.0
        g[pos] = marginal.log_tail(t / c[pos]) - u[pos]
        log_i = float(logsumexp(g + logw))
        if prev is not None:
            achieved = abs(log_i - prev)
            if achieved <= rel_tol or (log_i == -math.inf and prev == -math.inf):
                return log_i
        prev = log_i
    raise NumericError(
        f"scale-mixture quadrature did not reach rel_tol={rel_tol}",
        achieved_tol=achieved)


def log_scale_mixture_tail(weight: WeightModel, marginal: Marginal, t,
                           rel_tol=1e-9):
    """log P(C X > t) for independent C and X, exact up to ``rel_tol``.

    Atoms are handled exactly; the continuous part uses the adaptive
    log-space quadrature described in the module docstring.

    Raises:
        NumericError: the refinement budget was exhausted before reaching
            ``rel_tol`` (the achieved tolerance is attached).
    """
    t = float(t)
    if t <= 0.0:
        return 0.0  # positive risks: P(C X > t) = 1
    if isinstance(weight, Degenerate):
        if weight.c == 0.0:
            return -math.inf
        return marginal.log_tail(t / weight.c)
    if isinstance(weight, ModelA):
        atom = math.log(weight.p) + marginal.log_tail(t / weight.omega)
        if weight.p == 1.0:
            return atom
        rest = (math.log1p(-weight.p)
                + log_scale_mixture_tail(weight.sub, marginal, t, rel_tol))
        return float(np.logaddexp(atom, rest))
    return _log_mixture_continuous(weight, marginal, t, rel_tol)


def scale_mixture_tail(weight: WeightModel, marginal: Marginal, t,
                       rel_tol=1e-9):
    """P(C X > t) for independent C and X; see ``log_scale_mixture_tail``."""
    return math.exp(log_scale_mixture_tail(weight, marginal, t, rel_tol))


# ---------------------------------------------------------------------------
# Limit diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioTrend:
    """Ratios f/g along a grid with a monotone-trend verdict."""

    ts: np.ndarray
    ratios: np.ndarray
    final: float
    trending_to_one: bool   # |final - 1| < |first - 1|
    monotone: bool          # |ratio - 1| nonincreasing along the grid


def ratio_limit(f, g, t_grid) -> RatioTrend:
    """Evaluate f/g along a grid and report how the ratio trends toward 1.

    Args:
        f, g: callables mapping t to a positive real.
        t_grid: increasing evaluation grid.

    Raises:
        DomainError: f or g is nonpositive somewhere on the grid.
    """
    ts = np.asarray(t_grid, dtype=float)
    fv = np.array([float(f(t)) for t in ts])
    gv = np.array([float(g(t)) for t in ts])
    if np.any(fv <= 0.0) or np.any(gv <= 0.0):
        raise DomainError("ratio_limit requires positive f and g on the grid")
    ratios = fv / gv
    gaps = np.abs(ratios - 1.0)
    improved = gaps[-1] < gaps[0] - 1e-9 * (1.0 + gaps[0])
    return RatioTrend(
        ts=ts,
        ratios=ratios,
        final=float(ratios[-1]),
        trending_to_one=bool(improved) or bool(np.all(gaps < 1e-12)),
        monotone=bool(np.all(np.diff(gaps) <= 1e-12)),
    )


# ---------------------------------------------------------------------------
# Bivariate max-min constant
# ---------------------------------------------------------------------------

def _min_of_sinusoids(theta, rho):
    s = np.sin(theta)
    return np.minimum(s, rho * s + math.sqrt(1.0 - rho * rho) * np.cos(theta))


def grid_max_min(rho, grid_points=10_000, tol=1e-9):
    """max over theta of min(sin theta, rho sin theta + sqrt(1-rho^2) cos theta).

    A dense grid locates the maximizer; golden-section refinement sharpens
    it to absolute tolerance ``tol``.  This is the independent oracle the
    closed-form constant in ``dependence.eta`` is checked against.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"grid_max_min requires |rho| < 1, got {rho}")
    theta = np.linspace(0.0, 2.0 * math.pi, grid_points)
    values = _min_of_sinusoids(theta, rho)
    best = int(np.argmax(values))
    step = theta[1] - theta[0]
    lo = theta[best] - step
    hi = theta[best] + step

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = _min_of_sinusoids(c, rho)
    fd = _min_of_sinusoids(d, rho)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = _min_of_sinusoids(c, rho)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = _min_of_sinusoids(d, rho)
    return float(_min_of_sinusoids(0.5 * (a + b), rho))


# ---------------------------------------------------------------------------
# Joint Gaussian exceedance
# ---------------------------------------------------------------------------

def gaussian_joint_survival(z1, z2, rho):
    """P(Z1 > z1, Z2 > z2) for standard normals with correlation rho.

    Computed as a one-dimensional integral over the second coordinate with
    the first smoothed out conditionally, which stays accurate deep in the
    joint tail.  Vectorized over ``z1``/``z2``.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"gaussian_joint_survival requires |rho| < 1, got {rho}")
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    scalar = z1.ndim == 0 and z2.ndim == 0
    z1, z2 = np.broadcast_arrays(np.atleast_1d(z1), np.atleast_1d(z2))
    if rho == 0.0:
        out = np.exp(log_ndtr(-z1) + log_ndtr(-z2))
        return float(out[0]) if scalar else out

    s = math.sqrt(1.0 - rho * rho)
    offsets = np.array([0.0, 2.0, 6.0, 14.0, 30.0])
    m = 64
    nodes, weights = _leggauss(m)
    # panels [z2 + offsets] per evaluation point
    lo = z2[..., None] + offsets[:-1]
    hi = z2[..., None] + offsets[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    z = mid[..., None] + half[..., None] * nodes          # (..., P, m)
    logw = np.log(weights) + np.log(half)[..., None]
    log_phi = -0.5 * z * z - _LOG_SQRT_2PI
    log_cond = log_ndtr(-(z1[..., None, None] - rho * z) / s)
    out = np.exp(logsumexp(log_phi + log_cond + logw, axis=(-2, -1)))
    return float(out[0]) if scalar else out
