"""Maximum-likelihood fitting of the standard-link models by IRLS.

Fisher scoring on the Bernoulli likelihood with q(eta) = 1 - F(-eta).
Standard errors come from the observed information at the optimum.
Separation is reported through ``converged=False`` rather than patched
over with penalties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .links import LinkSpec, SYMMETRIC_FAMILIES
from .model import Coefficients, Dataset, log_likelihood, success_prob

__all__ = ["MLEFit", "fit_glm_mle", "bic", "wald_pvalues", "ReducedFit", "reduce_model"]

_SCORE_TOL = 1e-8
_MAX_ITER = 100
_Q_FLOOR = 1e-12


@dataclass
class MLEFit:
    """IRLS result; ``covariance`` is the inverse observed information."""

    estimates: np.ndarray
    standard_errors: np.ndarray
    log_likelihood_at_mle: float
    converged: bool
    iterations_used: int
    covariance: np.ndarray
    link: LinkSpec
    column_names: tuple[str, ...]


def _pdf_prime(link: LinkSpec, u: np.ndarray) -> np.ndarray:
    """Derivative of the error density, for the three standard families."""
    if link.family == "logit":
        s = special.expit(u)
        return s * (1.0 - s) * (1.0 - 2.0 * s)
    if link.family == "probit":
        return -u * np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    if link.family == "cloglog":
        with np.errstate(over="ignore"):
            return np.exp(u - np.exp(u)) * (1.0 - np.exp(u))
    raise ValueError(f"no closed-form density derivative for {link.family}")


def _curvature(link: LinkSpec, X: np.ndarray, y: np.ndarray, beta: np.ndarray):
    """Per-observation score and second-derivative pieces in eta."""
    eta = X @ beta
    q = success_prob(link, eta)
    qc = np.clip(q, _Q_FLOOR, 1.0 - _Q_FLOOR)
    qp = link.pdf(-eta)          # dq/deta
    qpp = -_pdf_prime(link, -eta)  # d2q/deta2
    score_eta = np.where(y == 1, qp / qc, -qp / (1.0 - qc))
    hess_eta = np.where(
        y == 1,
        (qpp * qc - qp * qp) / (qc * qc),
        -(qpp * (1.0 - qc) + qp * qp) / ((1.0 - qc) * (1.0 - qc)),
    )
    fisher_w = qp * qp / (qc * (1.0 - qc))
    return q, score_eta, hess_eta, fisher_w


def fit_glm_mle(
    link: LinkSpec,
    data: Dataset,
    max_iter: int = _MAX_ITER,
    tol: float = _SCORE_TOL,
) -> MLEFit:
    """Fit a standard-link model by iteratively reweighted least squares.

    Convergence means max|score| < tol. On separation or other divergence
    the last iterate is returned with ``converged=False``.
    """
    if link.family not in SYMMETRIC_FAMILIES:
        raise ValueError(f"maximum likelihood fitting supports {SYMMETRIC_FAMILIES} only")
    X = data.X
    y = data.y
    k = X.shape[1]
    beta = np.zeros(k)
    # start the intercept at the observed positive rate
    ybar = min(max(float(np.mean(y)), 1.0 / (data.n + 1.0)), data.n / (data.n + 1.0))
    beta[0] = -link.quantile(1.0 - ybar)

    converged = False
    used = 0
    for it in range(1, max_iter + 1):
        used = it
        _, score_eta, _, fisher_w = _curvature(link, X, y, beta)
        score = X.T @ score_eta
        if np.max(np.abs(score)) < tol:
            converged = True
            break
        info = (X * fisher_w[:, None]).T @ X
        try:
            step = np.linalg.solve(info, score)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        # halve the step while it degrades the likelihood
        ll_cur = log_likelihood(link, Coefficients(beta), data)
        scale = 1.0
        for _ in range(30):
            cand = beta + scale * step
            if log_likelihood(link, Coefficients(cand), data) >= ll_cur - 1e-12:
                break
            scale *= 0.5
        beta = beta + scale * step

    ll = log_likelihood(link, Coefficients(beta), data)
    # separation: the score only vanished through saturation. Signature:
    # the fitted rule classifies every observation correctly while some
    # linear predictor has run off to the flat region of the likelihood.
    eta = X @ beta
    q_fit = success_prob(link, eta)
    if np.all((q_fit > 0.5).astype(np.int8) == y) and np.max(np.abs(eta)) > 15.0:
        converged = False
    _, _, hess_eta, _ = _curvature(link, X, y, beta)
    observed_info = -(X * hess_eta[:, None]).T @ X
    try:
        cov = np.linalg.inv(observed_info)
        se = np.sqrt(np.diag(cov))
        if not np.all(np.isfinite(se)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        cov = np.full((k, k), np.nan)
        se = np.full(k, np.nan)
        converged = False
    return MLEFit(
        estimates=beta,
        standard_errors=se,
        log_likelihood_at_mle=ll,
        converged=converged,
        iterations_used=used,
        covariance=cov,
        link=link,
        column_names=data.names(),
    )


def bic(fit: MLEFit, data: Dataset) -> float:
    """-2 log L + d log n, d counting every fitted coefficient."""
    d = len(fit.estimates)
    return -2.0 * fit.log_likelihood_at_mle + d * math.log(data.n)


def wald_pvalues(fit: MLEFit) -> np.ndarray:
    """Two-sided normal p-values for estimate / s.e., per column."""
    z = fit.estimates / fit.standard_errors
    return 2.0 * stats.norm.sf(np.abs(z))


def _group_pvalue(fit: MLEFit, cols: list[int]) -> float:
    """Wald chi-square p-value that all coefficients in ``cols`` are zero."""
    b = fit.estimates[cols]
    sub = fit.covariance[np.ix_(cols, cols)]
    try:
        w = float(b @ np.linalg.solve(sub, b))
    except np.linalg.LinAlgError:
        return 1.0
    return float(stats.chi2.sf(w, len(cols)))


@dataclass
class ReducedFit:
    """Backward-elimination outcome on the original design."""

    fit: MLEFit
    data: Dataset
    retained_columns: list[int]
    retained_groups: list[str]
    dropped_groups: list[str]


def reduce_model(
    link: LinkSpec,
    data: Dataset,
    alpha_level: float = 0.05,
    groups: list[tuple[str, list[int]]] | None = None,
) -> ReducedFit:
    """Backward elimination of insignificant predictor groups.

    Repeatedly drops the group (all columns of a categorical together)
    with the largest Wald p-value above ``alpha_level`` and refits until
    every retained group is significant. The intercept is never dropped.
    ``groups`` maps group names to design-column indices; by default each
    non-intercept column is its own group.
    """
    names = data.names()
    if groups is None:
        groups = [(names[j], [j]) for j in range(1, data.X.shape[1])]
    for gname, cols in groups:
        if 0 in cols:
            raise ValueError(f"group {gname!r} may not include the intercept column")

    active = list(groups)
    dropped: list[str] = []
    while True:
        cols = [0] + sorted(c for _, cs in active for c in cs)
        sub = Dataset(
            y=data.y,
            X=data.X[:, cols],
            column_names=tuple(names[c] for c in cols),
        )
        remap = {orig: j for j, orig in enumerate(cols)}
        fit = fit_glm_mle(link, sub)
        if not fit.converged:
            raise RuntimeError(f"{link.family} fit failed to converge during reduction")
        if not active:
            break
        pvals = [(_group_pvalue(fit, [remap[c] for c in cs]), gname) for gname, cs in active]
        worst_p, worst_name = max(pvals)
        if worst_p <= alpha_level:
            break
        active = [(g, cs) for g, cs in active if g != worst_name]
        dropped.append(worst_name)
    return ReducedFit(
        fit=fit,
        data=sub,
        retained_columns=cols,
        retained_groups=[g for g, _ in active],
        dropped_groups=dropped,
    )
