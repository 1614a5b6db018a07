"""Monte Carlo estimators of the aggregate tail with reproducible streams.

Streams: worker w of a run seeded with ``seed`` draws from a counter-mode
generator (Philox) keyed by a 64-bit avalanche mix of (seed, w).  Replicates
are consumed in fixed-size blocks whose layout depends only on the scenario,
so a (seed, workers, n_samples, scenario) quadruple is bit-reproducible and
changing ``workers`` changes only the partitioning.

Estimators:

* ``crude``            — mean of exceedance indicators.
* ``conditional_c1``   — smooths the first weight out analytically: given the
  order statistics and the remaining weights, the exceedance probability is
  the first weight's survival function at (t - rest) / x_(1).  Unbiased, and
  never noisier than crude on matched replicates.
* ``importance_pareto`` — for independent all-Pareto portfolios, samples each
  risk from a heavier Pareto proposal and reweights by the exact likelihood
  ratio.

Confidence intervals switch from the central-limit form to exact binomial
(Clopper-Pearson) bounds when fewer than 10 exceedances are observed.

``check_conditions`` quantifies the asymptotic-independence requirements of
the closed-form approximations as joint-exceedance ratios on a t-grid; the
joint probabilities combine exact conditional-Gaussian quadrature with Monte
Carlo smoothing over the weight maxima.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import beta as _beta_dist

from . import kernels
from .aggregation import _batch_size, iter_lc_batches
from .asymptotics import ApproxReport, approx
from .dependence import Scenario, sample_risks
from .errors import DomainError, UnsupportedOperationError, ValidationError
from .marginals import MdaClass, Pareto
from .oracles import gaussian_joint_survival, log_scale_mixture_tail
from .weights import sample_weights

__all__ = [
    "TailEstimate",
    "DiagnosticsConfig",
    "substream",
    "clopper_pearson",
    "crude",
    "conditional_c1",
    "importance_pareto",
    "TailCurveRow",
    "tail_curve",
    "SumFormReport",
    "sum_form_check",
    "ConditionSeries",
    "ConditionReport",
    "check_conditions",
]

_MASK64 = (1 << 64) - 1


def _mix64(z):
    """SplitMix64 avalanche step: maps a 64-bit value to a well-mixed one."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def substream(seed, worker):
    """Independent counter-mode stream for one worker of a seeded run."""
    key = _mix64(_mix64(int(seed) & _MASK64) ^ _mix64(worker + 1))
    return np.random.Generator(np.random.Philox(key=key))


def _split_count(n_samples, workers):
    base, extra = divmod(n_samples, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _run_workers(worker_fn, workers):
    """Run worker_fn(w) for each worker; results merged in index order."""
    if workers <= 1:
        return [worker_fn(0)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(worker_fn, w) for w in range(workers)]
        return [f.result() for f in futures]


def clopper_pearson(successes, trials, confidence=0.95):
    """Exact equal-tailed binomial confidence interval."""
    if not 0 <= successes <= trials:
        raise DomainError("successes must lie in [0, trials]")
    alpha = 1.0 - confidence
    lo = 0.0 if successes == 0 else float(
        _beta_dist.ppf(alpha / 2.0, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(
        _beta_dist.ppf(1.0 - alpha / 2.0, successes + 1, trials - successes))
    return lo, hi


@dataclass(frozen=True)
class TailEstimate:
    """A Monte Carlo tail probability with its uncertainty and provenance."""

    point: float
    stderr: float
    ci95: tuple
    n_samples: int
    method: str
    seed: int
    workers: int
    ess: float | None = None


def _indicator_estimate(count, n_samples, method, seed, workers):
    point = count / n_samples
    stderr = math.sqrt(max(point * (1.0 - point), 0.0) / n_samples)
    if count < 10:
        ci = clopper_pearson(count, n_samples)
    else:
        half = 1.959963984540054 * stderr
        ci = (max(point - half, 0.0), min(point + half, 1.0))
    return TailEstimate(point=point, stderr=stderr, ci95=ci,
                        n_samples=n_samples, method=method,
                        seed=seed, workers=workers)


def _mean_estimate(total, total_sq, n_samples, method, seed, workers,
                   nonzero, ess=None, scale_cap=1.0):
    point = total / n_samples
    var = max(total_sq - n_samples * point * point, 0.0) / max(n_samples - 1, 1)
    stderr = math.sqrt(var / n_samples)
    if nonzero == 0:
        # Conservative fallback: every contribution was zero, bound the mean
        # by the binomial bound on the nonzero fraction times its cap.
        hi = clopper_pearson(0, n_samples)[1] * scale_cap
        ci = (0.0, hi)
        stderr = 0.0
    else:
        half = 1.959963984540054 * stderr
        ci = (max(point - half, 0.0), point + half)
    return TailEstimate(point=point, stderr=stderr, ci95=ci,
                        n_samples=n_samples, method=method,
                        seed=seed, workers=workers, ess=ess)


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

def crude(scenario: Scenario, t, n_samples=1_000_000, seed=0, workers=1):
    """Mean of exceedance indicators 1{L > t} over ``n_samples`` replicates."""
    if n_samples < 1_000:
        raise DomainError("crude requires at least 1000 samples")
    counts = _split_count(n_samples, workers)

    def worker(w):
        gen = substream(seed, w)
        hits = 0
        for batch in iter_lc_batches(scenario, gen, counts[w]):
            hits += int(np.count_nonzero(batch > t))
        return hits

    total = sum(_run_workers(worker, workers))
    return _indicator_estimate(total, n_samples, "Crude", seed, workers)


def conditional_c1(scenario: Scenario, t, n_samples=100_000, seed=0, workers=1):
    """Rao-Blackwellized estimator smoothing over the first weight.

    Per replicate, draws the risk vector and the weights C_2..C_k, then
    returns Z = P(C_1 > (t - sum_{i>=2} C_i x_(i)) / x_(1)) clamped to [0, 1].
    E[Z] = P(L > t) by independence of C_1 from everything else.
    """
    if not scenario.weights.independent:
        raise UnsupportedOperationError(
            "conditional_c1 requires mutually independent weights")
    c1 = scenario.weights.models[0]
    k = scenario.k
    rest_models = scenario.weights.models[1:]
    counts = _split_count(n_samples, workers)
    block = _batch_size(scenario.n)

    def worker(w):
        gen = substream(seed, w)
        total = 0.0
        total_sq = 0.0
        nonzero = 0
        done = 0
        while done < counts[w]:
            m = min(block, counts[w] - done)
            x = sample_risks(scenario, gen, m)
            xs = kernels.topk_desc(x, k)
            if k > 1:
                c_rest = np.empty((m, k - 1))
                for j, model in enumerate(rest_models):
                    c_rest[:, j] = model.sample(gen, m)
                rest = kernels.weighted_sums(xs[:, 1:], c_rest)
            else:
                rest = np.zeros(m)
            ratio = (t - rest) / xs[:, 0]
            z = np.clip(c1.survival(ratio), 0.0, 1.0)
            total += float(z.sum())
            total_sq += float((z * z).sum())
            nonzero += int(np.count_nonzero(z))
            done += m
        return total, total_sq, nonzero

    results = _run_workers(worker, workers)
    total = sum(r[0] for r in results)
    total_sq = sum(r[1] for r in results)
    nonzero = sum(r[2] for r in results)
    return _mean_estimate(total, total_sq, n_samples, "ConditionalC1",
                          seed, workers, nonzero)


def importance_pareto(scenario: Scenario, t, n_samples=100_000, seed=0,
                      workers=1, proposal_index=None):
    """Importance sampling from a heavier Pareto proposal, exact reweighting.

    Requires independent risks (no copula) and all-Pareto marginals.  Each
    risk i is sampled from Pareto(proposal_index, scale_i); the default
    proposal index is half the smallest tail index.

    Raises:
        UnsupportedOperationError: copula present or non-Pareto marginal.
        DomainError: proposal index not in (0, min alpha).
    """
    if scenario.corr is not None:
        raise UnsupportedOperationError(
            "importance_pareto requires independent risks (no copula)")
    if not all(isinstance(m, Pareto) for m in scenario.marginals):
        raise UnsupportedOperationError(
            "importance_pareto requires all-Pareto marginals")
    alphas = np.array([m.alpha for m in scenario.marginals])
    scales = np.array([m.scale for m in scenario.marginals])
    alpha_min = float(alphas.min())
    if proposal_index is None:
        proposal_index = alpha_min / 2.0
    if not 0.0 < proposal_index < alpha_min:
        raise DomainError(
            f"proposal index must lie in (0, {alpha_min}), got {proposal_index}")
    counts = _split_count(n_samples, workers)
    block = _batch_size(scenario.n)
    # exp of sum of log(alpha_i / alpha') bounds every likelihood ratio
    w_cap = float(np.exp(np.sum(np.log(alphas / proposal_index))))

    def worker(w):
        gen = substream(seed, w)
        t_y = t_y2 = t_w = t_w2 = 0.0
        nonzero = 0
        done = 0
        while done < counts[w]:
            m = min(block, counts[w] - done)
            u = gen.random((m, scenario.n))
            x = scales[None, :] * u ** (-1.0 / proposal_index)
            log_w = (np.log(alphas / proposal_index)[None, :]
                     + ((alphas - proposal_index) / proposal_index)[None, :]
                     * np.log(u)).sum(axis=1)
            lr = np.exp(log_w)
            c = sample_weights(scenario.weights, gen, m)
            agg = kernels.weighted_topk_sums(x, c)
            y = lr * (agg > t)
            t_y += float(y.sum())
            t_y2 += float((y * y).sum())
            t_w += float(lr.sum())
            t_w2 += float((lr * lr).sum())
            nonzero += int(np.count_nonzero(y))
            done += m
        return t_y, t_y2, t_w, t_w2, nonzero

    results = _run_workers(worker, workers)
    t_y = sum(r[0] for r in results)
    t_y2 = sum(r[1] for r in results)
    t_w = sum(r[2] for r in results)
    t_w2 = sum(r[3] for r in results)
    nonzero = sum(r[4] for r in results)
    ess = t_w * t_w / t_w2 if t_w2 > 0 else 0.0
    return _mean_estimate(t_y, t_y2, n_samples, "ImportancePareto",
                          seed, workers, nonzero, ess=ess, scale_cap=w_cap)


_ESTIMATORS = {
    "crude": crude,
    "conditional": conditional_c1,
    "is": importance_pareto,
}


# ---------------------------------------------------------------------------
# Comparison harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticsConfig:
    """Grid and constants for the comparison and condition-check harnesses.

    Attributes:
        t_grid: increasing evaluation grid (None derives one from the first
            marginal, spanning survival levels 1e-1 down to 1e-4).
        l_default / l_pairs: the positive pair constants of the joint-tail
            condition at the auxiliary scale.
        x_values: levels for the mixed-scale joint-tail condition.
        n_draws: Monte Carlo draws used to smooth over the weight maxima.
        decreasing_slack: multiplicative tolerance when checking that a ratio
            sequence decreases.
        final_over_first: verdict threshold, final ratio <= this times first.
    """

    t_grid: np.ndarray | None = None
    l_default: float = 1.0
    l_pairs: dict = field(default_factory=dict)
    x_values: tuple = (1.0,)
    n_draws: int = 5_000
    decreasing_slack: float = 1.05
    final_over_first: float = 0.1

    def __post_init__(self):
        if self.t_grid is not None:
            grid = np.asarray(self.t_grid, dtype=float)
            if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
                raise ValidationError("t_grid must be increasing with >= 2 points")
            object.__setattr__(self, "t_grid", grid)
        if self.l_default <= 0 or any(v <= 0 for v in self.l_pairs.values()):
            raise ValidationError("pair constants must be positive")

    def l_for(self, i, j):
        return self.l_pairs.get((i, j), self.l_pairs.get((j, i), self.l_default))


def _default_grid(scenario, points=6):
    m1 = scenario.marginals[0]
    lo = m1.isf(1e-1)
    hi = m1.isf(1e-4)
    if scenario.mda_class is MdaClass.GUMBEL:
        lo = max(lo, 1.2 * m1.aux_threshold * scenario.weights.models[0].omega)
    return np.geomspace(lo, hi, points)


@dataclass(frozen=True)
class TailCurveRow:
    t: float
    estimate: TailEstimate
    approx: ApproxReport
    ratio: float
    ratio_ci: tuple
    caveats: tuple


def tail_curve(scenario: Scenario, cfg: DiagnosticsConfig, method="crude",
               n_samples=1_000_000, seed=0, workers=1):
    """Estimate-vs-approximation table along a t-grid.

    Returns one ``TailCurveRow`` per grid point; rows in the distribution
    bulk are flagged through the approximation caveats rather than rejected.
    """
    if method not in _ESTIMATORS:
        raise DomainError(f"unknown method {method!r}; use crude|conditional|is")
    estimator = _ESTIMATORS[method]
    grid = cfg.t_grid if cfg.t_grid is not None else _default_grid(scenario)
    rows = []
    for t in grid:
        est = estimator(scenario, float(t), n_samples, seed, workers)
        ap = approx(scenario, float(t), allow_bulk=True)
        ratio = est.point / ap.value
        ratio_ci = (est.ci95[0] / ap.value, est.ci95[1] / ap.value)
        caveats = list(ap.caveats)
        if est.point == 0.0:
            caveats.append("no exceedances observed at this level")
        rows.append(TailCurveRow(t=float(t), estimate=est, approx=ap,
                                 ratio=ratio, ratio_ci=ratio_ci,
                                 caveats=tuple(caveats)))
    return rows


# ---------------------------------------------------------------------------
# Sum-form cross-check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumFormReport:
    """Per-index weighted order-statistic tails against the aggregate tail."""

    t: float
    per_index: tuple          # per-index (point, stderr)
    sum_point: float
    l_estimate: TailEstimate
    ratio: float              # sum / aggregate
    ratio_ci: tuple
    first_term_share: float


def sum_form_check(scenario: Scenario, t, n_samples=1_000_000, seed=0,
                   workers=1) -> SumFormReport:
    """Estimate each P(C_i x_(i) > t), their sum, and the aggregate tail.

    All quantities come from the same replicates, so the sum/aggregate ratio
    is far more stable than its components; its confidence interval uses the
    delta method with the empirically estimated covariance.
    """
    if not scenario.weights.independent:
        raise UnsupportedOperationError(
            "sum_form_check requires mutually independent weights")
    k = scenario.k
    counts = _split_count(n_samples, workers)
    block = _batch_size(scenario.n)

    def worker(w):
        gen = substream(seed, w)
        idx_hits = np.zeros(k, dtype=np.int64)
        l_hits = 0
        s_sum = 0.0
        s_sq = 0.0
        sd_sum = 0.0
        done = 0
        while done < counts[w]:
            m = min(block, counts[w] - done)
            x = sample_risks(scenario, gen, m)
            c = sample_weights(scenario.weights, gen, m)
            xs = kernels.topk_desc(x, k)
            terms = xs * c
            hits = terms > t
            idx_hits += hits.sum(axis=0)
            s = hits.sum(axis=1).astype(float)
            agg = kernels.weighted_sums(xs, c)
            d = (agg > t).astype(float)
            l_hits += int(d.sum())
            s_sum += float(s.sum())
            s_sq += float((s * s).sum())
            sd_sum += float((s * d).sum())
            done += m
        return idx_hits, l_hits, s_sum, s_sq, sd_sum

    results = _run_workers(worker, workers)
    idx_hits = sum(r[0] for r in results)
    l_hits = sum(r[1] for r in results)
    s_sum = sum(r[2] for r in results)
    s_sq = sum(r[3] for r in results)
    sd_sum = sum(r[4] for r in results)

    n = n_samples
    per_index = tuple(
        (h / n, math.sqrt(max(h / n * (1 - h / n), 0.0) / n)) for h in idx_hits)
    l_est = _indicator_estimate(l_hits, n, "Crude", seed, workers)
    mean_s = s_sum / n
    mean_d = l_hits / n
    if mean_d == 0.0:
        raise DomainError(
            "no aggregate exceedances observed; raise n_samples or lower t")
    var_s = max(s_sq - n * mean_s * mean_s, 0.0) / max(n - 1, 1)
    var_d = mean_d * (1.0 - mean_d)
    cov_sd = (sd_sum - n * mean_s * mean_d) / max(n - 1, 1)
    ratio = mean_s / mean_d
    var_ratio = (var_s / mean_d ** 2
                 + mean_s ** 2 * var_d / mean_d ** 4
                 - 2.0 * mean_s * cov_sd / mean_d ** 3) / n
    half = 1.959963984540054 * math.sqrt(max(var_ratio, 0.0))
    share = (idx_hits[0] / n) / mean_s if mean_s > 0 else float("nan")
    return SumFormReport(
        t=float(t),
        per_index=per_index,
        sum_point=mean_s,
        l_estimate=l_est,
        ratio=ratio,
        ratio_ci=(ratio - half, ratio + half),
        first_term_share=share,
    )


# ---------------------------------------------------------------------------
# Condition checker
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionSeries:
    """One joint-exceedance ratio sequence with its limit verdict."""

    condition: str            # "joint-tail" | "level-a" | "level-L"
    i: int
    j: int
    param: float | None
    ts: np.ndarray
    ratios: np.ndarray
    verdict: str              # "consistent-with-to-0" | "flagged" | "vacuous"


@dataclass(frozen=True)
class ConditionReport:
    series: tuple
    notes: tuple

    @property
    def overall(self):
        verdicts = {s.verdict for s in self.series if s.verdict != "vacuous"}
        if not verdicts:
            return "vacuous"
        return "flagged" if "flagged" in verdicts else "consistent-with-to-0"


def _latent_threshold(marginal, y):
    """Copula coordinate of the event {X > y}: Phi^{-1}(F(y)), clipped."""
    q = np.clip(marginal.tail(y), 1e-300, 1.0 - 1e-16)
    return -ndtri(q)


def _joint_survival(scenario, i, j, y_i, y_j):
    """P(X_i > y_i, X_j > y_j) under the scenario's copula, vectorized."""
    rho = 0.0 if scenario.corr is None else float(scenario.corr[i, j])
    m_i, m_j = scenario.marginals[i], scenario.marginals[j]
    if rho == 0.0:
        return m_i.tail(y_i) * m_j.tail(y_j)
    return gaussian_joint_survival(
        _latent_threshold(m_i, y_i), _latent_threshold(m_j, y_j), rho)


def _smoothed_joint(scenario, i, j, level_i, level_j, c_draws):
    """E over weight-max draws of P(X_i > level_i / c, X_j > level_j / c)."""
    pos = c_draws > 0.0
    if not np.any(pos):
        return 0.0
    c = c_draws[pos]
    val = _joint_survival(scenario, i, j, level_i / c, level_j / c)
    return float(val.sum()) / c_draws.size


def _ratio_verdict(ratios, cfg):
    r = np.asarray(ratios)
    if r[0] <= 0.0:
        return "vacuous"
    decreasing = bool(np.all(r[1:] <= cfg.decreasing_slack * r[:-1]))
    final_ok = r[-1] <= cfg.final_over_first * r[0]
    return "consistent-with-to-0" if decreasing and final_ok else "flagged"


def check_conditions(scenario: Scenario, cfg: DiagnosticsConfig | None = None,
                     seed=0) -> ConditionReport:
    """Evaluate the asymptotic-independence condition ratios on a t-grid.

    Fréchet scenarios check, for each pair with positive tail-equivalence
    weights, P(Cmax X_i > t, Cmax X_j > t) / P(X_1 > t) with Cmax the
    maximum of the weights beyond the first.  Gumbel scenarios check the two
    auxiliary-scale conditions against P(C_1 X_1 > t).  Ratios that decrease
    and end below the configured fraction of their first value earn the
    verdict "consistent-with-to-0"; whole-report notes record when the
    pairwise joint-scaling lower-bound requirement holds structurally.
    """
    cfg = cfg or DiagnosticsConfig()
    grid = cfg.t_grid if cfg.t_grid is not None else _default_grid(scenario)
    gen = substream(seed, 0)
    draws = sample_weights(scenario.weights, gen, cfg.n_draws)

    notes = []
    if scenario.weights.independent:
        notes.append("weights mutually independent: the pairwise joint-"
                     "scaling lower-bound requirement holds automatically")

    lam = scenario.lambdas.lam
    series = []

    if scenario.mda_class is MdaClass.FRECHET:
        c_tilde = (np.abs(draws[:, 1:]).max(axis=1)
                   if scenario.k > 1 else np.zeros(cfg.n_draws))
        m1 = scenario.marginals[0]
        positive = [i for i in range(scenario.n) if lam[i] > 0.0]
        for a in range(len(positive)):
            for b in range(a + 1, len(positive)):
                i, j = positive[a], positive[b]
                ratios = np.array([
                    _smoothed_joint(scenario, i, j, t, t, c_tilde)
                    / m1.tail(t) for t in grid])
                series.append(ConditionSeries(
                    condition="joint-tail", i=i, j=j, param=None,
                    ts=grid, ratios=ratios,
                    verdict=_ratio_verdict(ratios, cfg)))
    else:
        c_star = np.abs(draws).max(axis=1)
        m1 = scenario.marginals[0]
        c1 = scenario.weights.models[0]
        denom = np.array([
            math.exp(log_scale_mixture_tail(c1, m1, t)) for t in grid])
        a_t = np.array([m1.auxiliary(float(t)) for t in grid])
        for i in range(scenario.n):
            for j in range(scenario.n):
                if i == j:
                    continue
                for x in cfg.x_values:
                    ratios = np.array([
                        _smoothed_joint(scenario, i, j, t, a * x, c_star)
                        for t, a in zip(grid, a_t)]) / denom
                    series.append(ConditionSeries(
                        condition="level-a", i=i, j=j, param=float(x),
                        ts=grid, ratios=ratios,
                        verdict=_ratio_verdict(ratios, cfg)))
        for i in range(scenario.n):
            for j in range(i + 1, scenario.n):
                l_ij = cfg.l_for(i, j)
                ratios = np.array([
                    _smoothed_joint(scenario, i, j, l_ij * a, l_ij * a, c_star)
                    for t, a in zip(grid, a_t)]) / denom
                series.append(ConditionSeries(
                    condition="level-L", i=i, j=j, param=float(l_ij),
                    ts=grid, ratios=ratios,
                    verdict=_ratio_verdict(ratios, cfg)))

    return ConditionReport(series=tuple(series), notes=tuple(notes))
