"""Model assessment: deviance, DIC, HPD intervals, error statistics, reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .links import LinkSpec
from .mcmc import PosteriorSamples, posterior_mean, posterior_variance, posterior_sample_variance
from .model import Coefficients, Dataset, log_likelihood, success_prob, unpack

__all__ = [
    "deviance",
    "DicResult",
    "dic",
    "hpd_interval",
    "max_abs_error",
    "ks_stat",
    "mae",
    "posterior_mean_probs",
    "FitReport",
    "build_fit_report",
]


def deviance(link: LinkSpec, coef: Coefficients, data: Dataset) -> float:
    """-2 times the log-likelihood; +inf for impossible configurations."""
    return -2.0 * log_likelihood(link, coef, data)


@dataclass(frozen=True)
class DicResult:
    """DIC decomposition; ``at_mean_fallback`` is set when the posterior
    mean violated a support constraint and the highest-posterior retained
    draw was used for the plug-in deviance instead."""

    dic: float
    p_d: float
    mean_deviance: float
    deviance_at_mean: float
    at_mean_fallback: bool = False

    def __iter__(self):
        return iter((self.dic, self.p_d))


def _draw_deviances(samples: PosteriorSamples, link: LinkSpec, data: Dataset) -> np.ndarray:
    k = data.X.shape[1]
    return np.array(
        [deviance(link, unpack(link, th, k), data) for th in samples.draws], dtype=float
    )


def dic(samples: PosteriorSamples, link: LinkSpec, data: Dataset) -> DicResult:
    """Deviance information criterion from retained draws.

    dic = 2 * mean(deviance) - deviance(posterior mean);
    p_d = mean(deviance) - deviance(posterior mean).
    """
    devs = _draw_deviances(samples, link, data)
    if not np.all(np.isfinite(devs)):
        raise ValueError("retained draws include an infinite deviance")
    mean_dev = float(np.mean(devs))
    k = data.X.shape[1]
    theta_bar = posterior_mean(samples)
    at_mean = deviance(link, unpack(link, theta_bar, k), data)
    fallback = False
    if not math.isfinite(at_mean):
        best = int(np.argmax(samples.log_posteriors))
        at_mean = deviance(link, unpack(link, samples.draws[best], k), data)
        fallback = True
    return DicResult(
        dic=2.0 * mean_dev - at_mean,
        p_d=mean_dev - at_mean,
        mean_deviance=mean_dev,
        deviance_at_mean=at_mean,
        at_mean_fallback=fallback,
    )


def hpd_interval(draws, prob: float) -> tuple[float, float]:
    """Shortest empirical interval holding ``prob`` of the draws.

    Sorts the draws and scans every window [x_(j), x_(j+m)] with
    m = floor(prob * S), returning the narrowest (lowest start on ties).
    """
    x = np.sort(np.asarray(draws, dtype=float))
    s = x.shape[0]
    if s < 20:
        raise ValueError(f"need at least 20 draws for an HPD interval, got {s}")
    if not 0.0 < prob < 1.0:
        raise ValueError("prob must be in (0, 1)")
    m = int(math.floor(prob * s))
    if m < 1:
        raise ValueError("prob too small for the number of draws")
    if m >= s:
        return float(x[0]), float(x[-1])
    widths = x[m:] - x[: s - m]
    j = int(np.argmin(widths))  # argmin takes the first minimum: lowest start
    return float(x[j]), float(x[j + m])


def max_abs_error(y, q_hat) -> float:
    """max_i |y_i - qhat_i| over observations."""
    y = np.asarray(y, dtype=float)
    q_hat = np.asarray(q_hat, dtype=float)
    if y.shape != q_hat.shape:
        raise ValueError("y and q_hat must have equal length")
    return float(np.max(np.abs(y - q_hat)))


# the study calls this statistic "KS"; it is not the classical
# Kolmogorov-Smirnov distance, so the primary name says what it computes
ks_stat = max_abs_error


def mae(y, q_hat) -> float:
    """Mean absolute error between outcomes and fitted probabilities."""
    y = np.asarray(y, dtype=float)
    q_hat = np.asarray(q_hat, dtype=float)
    if y.shape != q_hat.shape:
        raise ValueError("y and q_hat must have equal length")
    return float(np.mean(np.abs(y - q_hat)))


def posterior_mean_probs(samples: PosteriorSamples, link: LinkSpec, X) -> np.ndarray:
    """Per-observation success probability averaged over retained draws."""
    X = np.asarray(X, dtype=float)
    k = X.shape[1]
    acc = np.zeros(X.shape[0])
    for th in samples.draws:
        coef = unpack(link, th, k)
        eff = link.with_shape(coef.shape) if link.is_skewed else link
        acc += success_prob(eff, X @ coef.beta)
    return acc / samples.size


@dataclass
class FitReport:
    """Posterior summary table plus fit statistics for one Bayesian model."""

    link: LinkSpec
    parameter_names: list[str]
    means: np.ndarray
    mean_variances: np.ndarray        # sum of squared deviations / N^2
    sample_variances: np.ndarray      # conventional, ddof=1
    hpd_lower: np.ndarray
    hpd_upper: np.ndarray
    hpd_prob: float
    dic: float
    p_d: float
    neg_log_lik_at_mean: float
    ks: float
    mae: float
    acceptance_rates: np.ndarray
    flags: list[str] = field(default_factory=list)

    def stat_items(self):
        return [
            ("dic", self.dic),
            ("p_d", self.p_d),
            ("neg_log_lik", self.neg_log_lik_at_mean),
            ("ks", self.ks),
            ("mae", self.mae),
        ]

    def to_text(self) -> str:
        label = self.link.family + (f"({self.link.shape_name})" if self.link.is_skewed else "")
        lines = [f"model: {label}"]
        width = max(len(n) for n in self.parameter_names)
        lines.append(
            f"{'parameter':<{width}}  {'estimate':>12}  {'mc_var':>10}  "
            f"{'variance':>10}  {int(self.hpd_prob * 100)}% HPD"
        )
        for j, nm in enumerate(self.parameter_names):
            lines.append(
                f"{nm:<{width}}  {self.means[j]:>12.4f}  {self.mean_variances[j]:>10.3e}  "
                f"{self.sample_variances[j]:>10.3e}  ({self.hpd_lower[j]:.4f}, {self.hpd_upper[j]:.4f})"
            )
        for name, value in self.stat_items():
            lines.append(f"{name} = {value:.4f}")
        lines.append(f"acceptance rates: {', '.join(f'{r:.3f}' for r in self.acceptance_rates)}")
        for flagged in self.flags:
            lines.append(f"note: {flagged}")
        return "\n".join(lines) + "\n"


def build_fit_report(
    samples: PosteriorSamples,
    link: LinkSpec,
    data: Dataset,
    hpd_prob: float = 0.95,
) -> FitReport:
    """Summarize a sampled fit: estimates, intervals, DIC, KS and MAE.

    KS/MAE use the posterior-predictive mean probability per observation
    (average of q_i over draws), not q at the mean parameters.
    """
    d = dic(samples, link, data)
    k = data.X.shape[1]
    theta_bar = posterior_mean(samples)
    nll_at_mean = -log_likelihood(link, unpack(link, theta_bar, k), data)
    flags = list(samples.warnings)
    if d.at_mean_fallback:
        best = int(np.argmax(samples.log_posteriors))
        nll_at_mean = -log_likelihood(link, unpack(link, samples.draws[best], k), data)
        flags.append(
            "posterior mean violates the link support; plug-in deviance uses "
            "the highest-posterior retained draw"
        )
    if d.p_d < 0:
        flags.append(f"negative effective model size p_d = {d.p_d:.3f}")
    q_hat = posterior_mean_probs(samples, link, data.X)
    lows = []
    highs = []
    for j in range(samples.dim):
        lo, hi = hpd_interval(samples.draws[:, j], hpd_prob)
        lows.append(lo)
        highs.append(hi)
    return FitReport(
        link=link,
        parameter_names=list(samples.parameter_names),
        means=theta_bar,
        mean_variances=posterior_variance(samples),
        sample_variances=posterior_sample_variance(samples),
        hpd_lower=np.array(lows),
        hpd_upper=np.array(highs),
        hpd_prob=hpd_prob,
        dic=d.dic,
        p_d=d.p_d,
        neg_log_lik_at_mean=nll_at_mean,
        ks=max_abs_error(data.y, q_hat),
        mae=mae(data.y, q_hat),
        acceptance_rates=samples.acceptance_rates,
        flags=flags,
    )
