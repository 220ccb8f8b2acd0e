"""Posterior predictive simulation and aggregate forecasting.

For each retained parameter draw, one Bernoulli outcome vector is
simulated over the new portfolio; aggregates (death counts and, when
face amounts are supplied, benefit totals) are summarized per draw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import hpd_interval
from .links import LinkSpec
from .mcmc import PosteriorSamples
from .model import success_prob, unpack

__all__ = [
    "PredictiveDraws",
    "posterior_predictive",
    "PredictiveSummary",
    "summarize_predictive",
    "frequentist_classify",
    "expected_count",
    "CurveData",
    "cumulative_curves",
]


@dataclass
class PredictiveDraws:
    """Simulated outcomes: one row per parameter draw, one column per
    observation. ``benefits`` is None when no face amounts were given."""

    outcomes: np.ndarray            # (S, m) of 0/1
    counts: np.ndarray              # (S,)
    benefits: np.ndarray | None     # (S,)
    face: np.ndarray | None

    @property
    def n_draws(self) -> int:
        return self.outcomes.shape[0]

    @property
    def n_obs(self) -> int:
        return self.outcomes.shape[1]


def posterior_predictive(
    samples: PosteriorSamples,
    link: LinkSpec,
    new_X,
    face=None,
    rng=None,
) -> PredictiveDraws:
    """Simulate outcomes for ``new_X`` under every retained draw."""
    new_X = np.asarray(new_X, dtype=float)
    if samples.size == 0:
        raise ValueError("no retained draws to predict from")
    k = new_X.shape[1]
    expect_dim = k + (1 if link.is_skewed else 0)
    if samples.dim != expect_dim:
        raise ValueError(
            f"samples have {samples.dim} parameters but the design implies {expect_dim}"
        )
    if rng is None:
        rng = np.random.default_rng(samples.config.seed)
    face_arr = None
    if face is not None:
        face_arr = np.asarray(face, dtype=float)
        if face_arr.shape != (new_X.shape[0],):
            raise ValueError("face amounts must align with the new design rows")
    m = new_X.shape[0]
    outcomes = np.empty((samples.size, m), dtype=np.int8)
    for s, th in enumerate(samples.draws):
        coef = unpack(link, th, k)
        eff = link.with_shape(coef.shape) if link.is_skewed else link
        q = success_prob(eff, new_X @ coef.beta)
        outcomes[s] = rng.random(m) < q
    counts = outcomes.sum(axis=1).astype(np.int64)
    benefits = outcomes.astype(float) @ face_arr if face_arr is not None else None
    return PredictiveDraws(outcomes=outcomes, counts=counts, benefits=benefits, face=face_arr)


@dataclass(frozen=True)
class PredictiveSummary:
    mean_count: float
    count_interval: tuple[float, float]
    mean_benefit: float | None
    benefit_interval: tuple[float, float] | None
    prob: float


def summarize_predictive(draws: PredictiveDraws, prob: float = 0.95) -> PredictiveSummary:
    """Mean and HPD interval of the aggregate count (and benefit) draws."""
    mean_benefit = None
    benefit_interval = None
    if draws.benefits is not None:
        mean_benefit = float(np.mean(draws.benefits))
        benefit_interval = hpd_interval(draws.benefits, prob)
    return PredictiveSummary(
        mean_count=float(np.mean(draws.counts)),
        count_interval=hpd_interval(draws.counts, prob),
        mean_benefit=mean_benefit,
        benefit_interval=benefit_interval,
        prob=prob,
    )


def frequentist_classify(q_hat, threshold: float = 0.5):
    """Hard 0/1 classification of fitted probabilities; returns (labels, count)."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    q_hat = np.asarray(q_hat, dtype=float)
    labels = (q_hat > threshold).astype(np.int8)
    return labels, int(labels.sum())


def expected_count(q_hat) -> float:
    """Sum of fitted probabilities: the expected-count alternative to
    thresholding, which collapses to ~0 on rare-event portfolios."""
    return float(np.sum(np.asarray(q_hat, dtype=float)))


@dataclass
class CurveData:
    """Cumulative aggregates along an observation ordering, per draw,
    with pointwise mean and HPD band."""

    order: np.ndarray
    count_mean: np.ndarray
    count_lower: np.ndarray
    count_upper: np.ndarray
    benefit_mean: np.ndarray | None
    benefit_lower: np.ndarray | None
    benefit_upper: np.ndarray | None
    prob: float


def _pointwise_band(cum: np.ndarray, prob: float):
    """Columnwise shortest-window interval over draws (rows)."""
    s, m = cum.shape
    srt = np.sort(cum, axis=0)
    w = int(np.floor(prob * s))
    if w >= s:
        return srt[0], srt[-1]
    widths = srt[w:, :] - srt[: s - w, :]
    j = np.argmin(widths, axis=0)
    cols = np.arange(m)
    return srt[j, cols], srt[j + w, cols]


def cumulative_curves(draws: PredictiveDraws, order=None, prob: float = 0.95) -> CurveData:
    """Cumulative count/benefit paths along ``order`` with summary bands.

    ``order`` must be a permutation of the observation indices; defaults
    to the given row order. The final curve point reproduces the
    aggregate summaries.
    """
    m = draws.n_obs
    if order is None:
        order = np.arange(m)
    order = np.asarray(order)
    if sorted(order.tolist()) != list(range(m)):
        raise ValueError("order must be a permutation of range(n_obs)")
    cum_counts = np.cumsum(draws.outcomes[:, order], axis=1, dtype=np.int64)
    c_lo, c_hi = _pointwise_band(cum_counts, prob)
    benefit_mean = benefit_lo = benefit_hi = None
    if draws.face is not None:
        per_obs = draws.outcomes[:, order] * draws.face[order]
        cum_benefit = np.cumsum(per_obs, axis=1)
        benefit_mean = cum_benefit.mean(axis=0)
        benefit_lo, benefit_hi = _pointwise_band(cum_benefit, prob)
    return CurveData(
        order=order,
        count_mean=cum_counts.mean(axis=0),
        count_lower=c_lo,
        count_upper=c_hi,
        benefit_mean=benefit_mean,
        benefit_lower=benefit_lo,
        benefit_upper=benefit_hi,
        prob=prob,
    )
