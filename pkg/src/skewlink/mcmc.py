"""Random-walk Metropolis-Hastings over an arbitrary log-posterior.

The proposal is a joint per-coordinate normal step centred at the current
state (symmetric, so acceptance reduces to min{1, exp(delta log-post)}).
Runs are bit-reproducible for a fixed (seed, config, init, target): each
chain c draws from ``numpy.random.default_rng(seed + c)``, consuming first
the whole block of proposal noise, then the block of acceptance uniforms.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MHConfig",
    "PosteriorSamples",
    "run_mh",
    "tune_steps",
    "posterior_mean",
    "posterior_variance",
    "posterior_sample_variance",
    "save_samples_csv",
    "load_samples_csv",
]

# acceptance-rate band the pilot tuner drives step sizes into
_TUNE_BAND = (0.2, 0.5)
_TUNE_FACTOR = 1.5


@dataclass(frozen=True)
class MHConfig:
    """Sampler settings; ``iterations`` counts post-burn-in steps."""

    iterations: int = 20000
    burn_in: int = 1000
    thin: int = 50
    step_sizes: np.ndarray | None = None
    seed: int = 0
    chains: int = 3
    tune: bool = True
    tune_rounds: int = 10
    tune_iterations: int = 500

    def __post_init__(self):
        for name in ("iterations", "burn_in", "thin", "chains", "tune_rounds", "tune_iterations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.step_sizes is not None:
            steps = np.atleast_1d(np.asarray(self.step_sizes, dtype=float))
            if np.any(steps <= 0.0):
                raise ValueError("step_sizes must all be > 0")
            object.__setattr__(self, "step_sizes", steps)


@dataclass
class PosteriorSamples:
    """Pooled post-burn-in, thinned draws from every chain."""

    draws: np.ndarray               # (S, d)
    chain_ids: np.ndarray           # (S,)
    log_posteriors: np.ndarray      # (S,)
    acceptance_rates: np.ndarray    # (chains,)
    parameter_names: list[str]
    config: MHConfig
    step_sizes: np.ndarray
    warnings: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.draws.shape[0]

    @property
    def dim(self) -> int:
        return self.draws.shape[1]


def _resolve_steps(init, config):
    d = len(init)
    if config.step_sizes is None:
        return np.full(d, 0.1)
    steps = config.step_sizes
    if steps.shape == (1,) and d > 1:
        return np.full(d, steps[0])
    if steps.shape != (d,):
        raise ValueError(f"step_sizes has {steps.shape[0]} entries for {d} parameters")
    return steps.copy()


def _chain(target, start, lp_start, steps, n_iter, rng, keep_from=0, thin=None):
    """Advance one chain; returns (kept draws, kept log-posts, accept count, last state, last lp).

    Draws all proposal noise first, then all uniforms, so a replay from the
    same generator state can reproduce every decision.
    """
    d = len(start)
    noise = rng.standard_normal((n_iter, d))
    unif = rng.random(n_iter)
    cur = start.copy()
    lp = lp_start
    kept = []
    kept_lp = []
    accepted = 0
    for i in range(n_iter):
        cand = cur + steps * noise[i]
        lpc = target(cand)
        dlp = lpc - lp
        if lpc > -math.inf and (dlp >= 0.0 or unif[i] <= math.exp(dlp)):
            cur = cand
            lp = lpc
            if i >= keep_from:
                accepted += 1
        if thin is not None and i >= keep_from and (i - keep_from + 1) % thin == 0:
            kept.append(cur.copy())
            kept_lp.append(lp)
    return kept, kept_lp, accepted, cur, lp


def _tune(target, init, lp0, steps, config):
    """Pilot runs scaling all step sizes together into the acceptance band."""
    steps = steps.copy()
    warnings = []
    rng = np.random.default_rng([config.seed, 0])
    cur, lp = init.copy(), lp0
    rate = None
    for _ in range(config.tune_rounds):
        _, _, accepted, cur, lp = _chain(
            target, cur, lp, steps, config.tune_iterations, rng
        )
        rate = accepted / config.tune_iterations
        if rate < _TUNE_BAND[0]:
            steps /= _TUNE_FACTOR
        elif rate > _TUNE_BAND[1]:
            steps *= _TUNE_FACTOR
        else:
            break
    else:
        warnings.append(
            f"step tuning ended outside target acceptance band "
            f"[{_TUNE_BAND[0]}, {_TUNE_BAND[1]}] (last rate {rate:.3f})"
        )
    return steps, warnings


def tune_steps(target, init, config: MHConfig) -> np.ndarray:
    """Pilot-tuned step sizes for ``target`` starting from ``init``."""
    init = np.atleast_1d(np.asarray(init, dtype=float))
    lp0 = target(init)
    if not np.isfinite(lp0):
        raise ValueError("tuning requires a starting point with finite log-posterior")
    steps, _ = _tune(target, init, lp0, _resolve_steps(init, config), config)
    return steps


def run_mh(target, init, config: MHConfig, parameter_names=None) -> PosteriorSamples:
    """Sample ``target`` by random-walk Metropolis-Hastings.

    Parameters
    ----------
    target : callable
        Maps a parameter vector to a (possibly -inf) log-posterior value.
    init : array_like
        Starting point; ``target(init)`` must be finite.
    config : MHConfig
        Iteration counts, thinning, seeding, chain count and tuning flags.
    parameter_names : sequence of str, optional
        Coordinate labels carried into reports and CSV output.

    Returns
    -------
    PosteriorSamples
        ``chains * floor(iterations / thin)`` pooled draws; within a chain
        the retained states are those at post-burn-in steps thin, 2*thin, ...
    """
    init = np.atleast_1d(np.asarray(init, dtype=float))
    d = len(init)
    lp0 = target(init)
    if not np.isfinite(lp0):
        raise ValueError(f"log-posterior at the starting point is {lp0}")
    if parameter_names is None:
        parameter_names = [f"theta{j}" for j in range(d)]
    elif len(parameter_names) != d:
        raise ValueError("parameter_names length must match init")

    steps = _resolve_steps(init, config)
    warnings = []
    if config.tune:
        steps, warnings = _tune(target, init, lp0, steps, config)

    total = config.burn_in + config.iterations
    all_draws = []
    all_lp = []
    chain_ids = []
    rates = []
    for c in range(config.chains):
        rng = np.random.default_rng(config.seed + c)
        kept, kept_lp, accepted, _, _ = _chain(
            target, init, lp0, steps, total, rng,
            keep_from=config.burn_in, thin=config.thin,
        )
        all_draws.extend(kept)
        all_lp.extend(kept_lp)
        chain_ids.extend([c] * len(kept))
        rates.append(accepted / config.iterations)

    return PosteriorSamples(
        draws=np.asarray(all_draws, dtype=float).reshape(len(all_draws), d),
        chain_ids=np.asarray(chain_ids, dtype=int),
        log_posteriors=np.asarray(all_lp, dtype=float),
        acceptance_rates=np.asarray(rates, dtype=float),
        parameter_names=list(parameter_names),
        config=config,
        step_sizes=steps,
        warnings=warnings,
    )


def posterior_mean(samples: PosteriorSamples) -> np.ndarray:
    """Coordinate-wise mean of the pooled draws."""
    return samples.draws.mean(axis=0)


def posterior_variance(samples: PosteriorSamples) -> np.ndarray:
    """Variance of the posterior-mean estimate: sum of squared deviations
    over N^2. This is the Monte Carlo error of the mean, not the spread of
    the posterior; see ``posterior_sample_variance`` for the latter."""
    dev = samples.draws - samples.draws.mean(axis=0)
    n = samples.draws.shape[0]
    return np.sum(dev * dev, axis=0) / (n * n)


def posterior_sample_variance(samples: PosteriorSamples) -> np.ndarray:
    """Conventional unbiased sample variance of the draws."""
    return samples.draws.var(axis=0, ddof=1)


def save_samples_csv(samples: PosteriorSamples, path, header_comments=()):
    """Write draws as columns (chain id first), one row per retained draw."""
    with open(path, "w", newline="") as fh:
        for line in header_comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["chain"] + samples.parameter_names)
        for cid, row in zip(samples.chain_ids, samples.draws):
            writer.writerow([int(cid)] + [repr(float(v)) for v in row])


def load_samples_csv(path):
    """Read a samples CSV back as (draws, chain_ids, parameter_names)."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows:
        raise ValueError(f"{path}: empty samples file")
    header = rows[0]
    if not header or header[0] != "chain":
        raise ValueError(f"{path}: expected a 'chain' column first")
    names = header[1:]
    body = rows[1:]
    chain_ids = np.array([int(r[0]) for r in body], dtype=int)
    draws = np.array([[float(v) for v in r[1:]] for r in body], dtype=float)
    return draws, chain_ids, names
