"""Link distributions for binary regression.

Six error distributions are supported. Three are the standard ones
(logistic, normal, Gumbel-for-minima, i.e. logit / probit / cloglog)
and three are skewed families with a shape parameter:

* ``gev``      -- standardized generalized extreme value,
  F(u) = exp(-(1 + xi*u)^(-1/xi)) for any real shape ``xi``;
  the Gumbel form exp(-exp(-u)) at xi = 0.
* ``weibull``  -- skewed Weibull, F(u) = 1 - exp(-u^gamma) on u > 0,
  shape gamma > 0.
* ``frechet``  -- Frechet (Type II extreme value), F(u) = exp(-u^(-alpha))
  on u > 0, shape alpha > 0.

All tail work is done through ``log_cdf`` / ``log_sf`` with log1p/expm1
algebra so probabilities far below machine epsilon stay meaningful.
Arguments outside a family's support map to the CDF endpoint values
(0 below, 1 above) rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

__all__ = [
    "LinkSpec",
    "Support",
    "FAMILIES",
    "SYMMETRIC_FAMILIES",
    "SKEWED_FAMILIES",
    "logit",
    "probit",
    "cloglog",
    "gev",
    "skewed_weibull",
    "frechet",
]

FAMILIES = ("logit", "probit", "cloglog", "gev", "weibull", "frechet")
SYMMETRIC_FAMILIES = ("logit", "probit", "cloglog")
SKEWED_FAMILIES = ("gev", "weibull", "frechet")

# Below this magnitude the GEV shape is treated as exactly zero (Gumbel
# branch); the -1/xi exponent is numerically explosive near zero.
_GUMBEL_SHAPE_EPS = 1e-10

_LN2 = math.log(2.0)


class Support(NamedTuple):
    """Open interval on which the CDF is strictly between 0 and 1."""

    lower: float
    upper: float


def _log1mexp(t):
    """log(1 - exp(-t)) for t >= 0, switching forms at t = log 2."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(
            t < _LN2,
            np.log(-np.expm1(-np.minimum(t, _LN2))),
            np.log1p(-np.exp(-np.maximum(t, _LN2))),
        )


def _log1mexp_from_log(log_t):
    """log(1 - exp(-t)) given log t; keeps precision when t underflows."""
    log_t = np.asarray(log_t, dtype=float)
    with np.errstate(over="ignore"):
        t = np.exp(log_t)
    return np.where(t > 0.0, _log1mexp(np.where(t > 0.0, t, 1.0)), log_t)


# ---------------------------------------------------------------------------
# Per-family implementations. Each works on float ndarrays; the LinkSpec
# front end handles scalars, validation and the exp() wrappers. The log of
# the exponent t in F = exp(-t) (or 1 - exp(-t)) is the primitive wherever
# that form exists, so both tails stay accurate.
# ---------------------------------------------------------------------------


class _Logit:
    def support(self, shape):
        return Support(-math.inf, math.inf)

    def log_cdf(self, u, shape):
        return special.log_expit(u)

    def log_sf(self, u, shape):
        return special.log_expit(-u)

    def quantile(self, p, shape):
        return special.logit(p)

    def pdf(self, u, shape):
        return special.expit(u) * special.expit(-u)

    def mode(self, shape):
        return 0.0


class _Probit:
    def support(self, shape):
        return Support(-math.inf, math.inf)

    def log_cdf(self, u, shape):
        return special.log_ndtr(u)

    def log_sf(self, u, shape):
        return special.log_ndtr(-u)

    def quantile(self, p, shape):
        return special.ndtri(p)

    def pdf(self, u, shape):
        return np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)

    def mode(self, shape):
        return 0.0


class _Cloglog:
    # Gumbel-for-minima: F(u) = 1 - exp(-exp(u)); the large-gamma limit of
    # the shifted/scaled Weibull family.

    def support(self, shape):
        return Support(-math.inf, math.inf)

    def log_cdf(self, u, shape):
        return _log1mexp_from_log(u)

    def log_sf(self, u, shape):
        with np.errstate(over="ignore"):
            return -np.exp(u)

    def quantile(self, p, shape):
        return np.log(-np.log1p(-p))

    def pdf(self, u, shape):
        with np.errstate(over="ignore"):
            return np.exp(u - np.exp(u))

    def mode(self, shape):
        return 0.0


class _GEV:
    def support(self, shape):
        if abs(shape) < _GUMBEL_SHAPE_EPS:
            return Support(-math.inf, math.inf)
        if shape > 0:
            return Support(-1.0 / shape, math.inf)
        return Support(-math.inf, -1.0 / shape)

    def _log_t(self, u, xi):
        """log t with t = (1 + xi*u)^(-1/xi); +inf below the support
        (F = 0), -inf above it (F = 1)."""
        if abs(xi) < _GUMBEL_SHAPE_EPS:
            return -u
        z = 1.0 + xi * u
        inside = z > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            body = -np.log1p(xi * np.where(inside, u, 0.0)) / xi
        edge = np.inf if xi > 0 else -np.inf
        return np.where(inside, body, edge)

    def log_cdf(self, u, shape):
        log_t = self._log_t(u, shape)
        with np.errstate(over="ignore"):
            return -np.exp(log_t)

    def log_sf(self, u, shape):
        log_t = self._log_t(u, shape)
        return np.where(log_t == -np.inf, -np.inf, _log1mexp_from_log(log_t))

    def quantile(self, p, shape):
        nlp = -np.log(p)
        if abs(shape) < _GUMBEL_SHAPE_EPS:
            return -np.log(nlp)
        return np.expm1(-shape * np.log(nlp)) / shape

    def pdf(self, u, shape):
        # f = t^(1+xi) * exp(-t) inside the support
        if abs(shape) < _GUMBEL_SHAPE_EPS:
            with np.errstate(over="ignore"):
                return np.exp(-u - np.exp(-u))
        log_t = self._log_t(u, shape)
        finite = np.isfinite(log_t)
        lt = np.where(finite, log_t, 0.0)
        with np.errstate(over="ignore"):
            body = np.exp((1.0 + shape) * lt - np.exp(lt))
        return np.where(finite, body, 0.0)

    def mode(self, shape):
        if abs(shape) < _GUMBEL_SHAPE_EPS:
            return 0.0
        if shape <= -1.0:
            # density supremum sits at the upper endpoint
            return -1.0 / shape
        return ((1.0 + shape) ** -shape - 1.0) / shape


class _SkewedWeibull:
    def support(self, shape):
        return Support(0.0, math.inf)

    def _t(self, u, gamma):
        """t = u^gamma by direct power (exact for exact inputs); -inf-flagged
        below the support via the companion mask."""
        pos = u > 0.0
        with np.errstate(over="ignore", divide="ignore"):
            t = np.where(pos, u, 1.0) ** gamma
        return t, pos

    def log_cdf(self, u, shape):
        t, pos = self._t(u, shape)
        # when u^gamma underflows, log(1 - exp(-t)) ~ log t = gamma*log(u)
        with np.errstate(divide="ignore"):
            gamma_log = shape * np.log(np.where(pos, u, 1.0))
        body = np.where(t > 0.0, _log1mexp(np.where(t > 0.0, t, 1.0)), gamma_log)
        return np.where(pos, body, -np.inf)

    def log_sf(self, u, shape):
        t, pos = self._t(u, shape)
        return np.where(pos, -t, 0.0)

    def quantile(self, p, shape):
        return (-np.log1p(-p)) ** (1.0 / shape)

    def pdf(self, u, shape):
        pos = u > 0.0
        up = np.where(pos, u, 1.0)
        with np.errstate(over="ignore", divide="ignore"):
            body = shape * up ** (shape - 1.0) * np.exp(-(up**shape))
        return np.where(pos, body, 0.0)

    def mode(self, shape):
        # interior mode only for gamma > 1; boundary supremum at 0 otherwise
        if shape <= 1.0:
            return 0.0
        return ((shape - 1.0) / shape) ** (1.0 / shape)


class _Frechet:
    def support(self, shape):
        return Support(0.0, math.inf)

    def _t(self, u, alpha):
        """t = u^(-alpha) by direct power; companion mask flags u <= 0."""
        pos = u > 0.0
        with np.errstate(over="ignore", divide="ignore"):
            t = np.where(pos, u, 1.0) ** -alpha
        return t, pos

    def log_cdf(self, u, shape):
        t, pos = self._t(u, shape)
        return np.where(pos, -t, -np.inf)

    def log_sf(self, u, shape):
        t, pos = self._t(u, shape)
        # when u^(-alpha) underflows, log(1 - exp(-t)) ~ log t = -alpha*log(u)
        with np.errstate(divide="ignore"):
            log_t = -shape * np.log(np.where(pos, u, 1.0))
        body = np.where(t > 0.0, _log1mexp(np.where(t > 0.0, t, 1.0)), log_t)
        return np.where(pos, body, 0.0)

    def quantile(self, p, shape):
        return (-np.log(p)) ** (-1.0 / shape)

    def pdf(self, u, shape):
        pos = u > 0.0
        up = np.where(pos, u, 1.0)
        with np.errstate(over="ignore", divide="ignore"):
            body = shape * up ** (-shape - 1.0) * np.exp(-(up ** (-shape)))
        return np.where(pos, body, 0.0)

    def mode(self, shape):
        return (shape / (1.0 + shape)) ** (1.0 / shape)


_IMPL = {
    "logit": _Logit(),
    "probit": _Probit(),
    "cloglog": _Cloglog(),
    "gev": _GEV(),
    "weibull": _SkewedWeibull(),
    "frechet": _Frechet(),
}

_ALIASES = {
    "logit": "logit",
    "logistic": "logit",
    "probit": "probit",
    "cloglog": "cloglog",
    "gev": "gev",
    "standard-gev": "gev",
    "standard_gev": "gev",
    "sgev": "gev",
    "weibull": "weibull",
    "skewed-weibull": "weibull",
    "skewed_weibull": "weibull",
    "sw": "weibull",
    "frechet": "frechet",
    "fr": "frechet",
}


@dataclass(frozen=True)
class LinkSpec:
    """A link family plus its shape parameter, if the family has one.

    ``shape`` must be present exactly for the skewed families, and must be
    strictly positive for ``weibull`` and ``frechet``.
    """

    family: str
    shape: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown link family {self.family!r}")
        if self.family in SYMMETRIC_FAMILIES:
            if self.shape is not None:
                raise ValueError(f"{self.family} takes no shape parameter")
        else:
            if self.shape is None:
                raise ValueError(f"{self.family} requires a shape parameter")
            object.__setattr__(self, "shape", float(self.shape))
            if not math.isfinite(self.shape):
                raise ValueError(f"{self.family} shape must be finite")
            if self.family in ("weibull", "frechet") and self.shape <= 0.0:
                raise ValueError(f"{self.family} shape must be > 0, got {self.shape}")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_name(name, shape=None):
        """Resolve a link by (alias) name, e.g. ``"skewed-weibull"``."""
        key = name.strip().lower()
        if key not in _ALIASES:
            raise ValueError(f"unknown link name {name!r}")
        family = _ALIASES[key]
        if family in SYMMETRIC_FAMILIES:
            return LinkSpec(family)
        return LinkSpec(family, shape)

    @property
    def is_skewed(self):
        return self.family in SKEWED_FAMILIES

    @property
    def shape_name(self):
        """Conventional name of the shape parameter, or None."""
        return {"gev": "xi", "weibull": "gamma", "frechet": "alpha"}.get(self.family)

    def with_shape(self, shape):
        """Same family with a different shape value."""
        return LinkSpec(self.family, shape)

    # -- distribution functions ----------------------------------------------

    def support(self) -> Support:
        return _IMPL[self.family].support(self.shape)

    def log_cdf(self, u):
        """log F(u); -inf at and below the lower support endpoint."""
        return self._eval("log_cdf", u)

    def log_sf(self, u):
        """log(1 - F(u)); -inf at and above the upper support endpoint."""
        return self._eval("log_sf", u)

    def cdf(self, u):
        """F(u), computed as exp(log_cdf) so the two always agree."""
        out = np.exp(np.asarray(self._eval("log_cdf", u), dtype=float))
        return float(out) if out.ndim == 0 else out

    def sf(self, u):
        """1 - F(u), computed as exp(log_sf)."""
        out = np.exp(np.asarray(self._eval("log_sf", u), dtype=float))
        return float(out) if out.ndim == 0 else out

    def pdf(self, u):
        """Density f(u); 0 outside the support."""
        return self._eval("pdf", u)

    def quantile(self, p):
        """Inverse CDF at p, for 0 < p < 1."""
        p_arr = np.asarray(p, dtype=float)
        if np.any((p_arr <= 0.0) | (p_arr >= 1.0)):
            raise ValueError("quantile requires 0 < p < 1")
        out = np.asarray(_IMPL[self.family].quantile(p_arr, self.shape), dtype=float)
        return float(out) if out.ndim == 0 else out

    def mode(self):
        """Density maximizer (boundary supremum where no interior mode)."""
        return float(_IMPL[self.family].mode(self.shape))

    def ag_skewness(self):
        """Mode-based skewness 1 - 2 F(mode); 0 for symmetric families."""
        return 1.0 - 2.0 * self.cdf(self.mode())

    def sample(self, rng, size=None):
        """Inverse-transform draws; ``rng`` is a numpy Generator."""
        p = rng.random(size)
        p = np.maximum(p, np.finfo(float).tiny)
        out = np.asarray(_IMPL[self.family].quantile(p, self.shape), dtype=float)
        return float(out) if out.ndim == 0 else out

    def _eval(self, op, u):
        u_arr = np.asarray(u, dtype=float)
        out = np.asarray(getattr(_IMPL[self.family], op)(u_arr, self.shape), dtype=float)
        return float(out) if out.ndim == 0 else out


def logit() -> LinkSpec:
    return LinkSpec("logit")


def probit() -> LinkSpec:
    return LinkSpec("probit")


def cloglog() -> LinkSpec:
    return LinkSpec("cloglog")


def gev(xi: float) -> LinkSpec:
    return LinkSpec("gev", xi)


def skewed_weibull(gamma: float) -> LinkSpec:
    return LinkSpec("weibull", gamma)


def frechet(alpha: float) -> LinkSpec:
    return LinkSpec("frechet", alpha)
