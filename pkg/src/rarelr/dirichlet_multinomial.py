"""Likelihood ratios under symmetric Dirichlet frequencies with random K.

The population holds an unknown number K of distinct types out of m possible
ones; which types exist is uniform given K, and their frequencies follow a
symmetric Dirichlet with unit concentration.  For a match on a type absent
from a database of size N with k_obs distinct observed types, the proper
Bayesian ratio is

    LR = 1/2 * S1 / S2,
    Sj = sum_{k=k_obs+1}^{m} C(k, k_obs+1) * Gamma(k) / Gamma(k+N+j) * p(k),

where p(k) is the (unnormalised) prior on K.  The data enter only through
k_obs: per-type counts are validated but provably cannot move the result, a
consequence of the symmetric prior.  The unit concentration is a hard
restriction, the series above does not hold for other values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .kpriors import KPrior, NegBinomialTrunc, PoissonTrunc
from .numerics import (
    DECREASE_WINDOW,
    DEFAULT_MAX_TERMS,
    DEFAULT_REL_TOL,
    NonConvergenceError,
    SeriesDiagnostics,
    log_binomial,
    log_gamma,
    series_ratio,
)
from .results import LRResult

__all__ = [
    "RareMatchData",
    "DirichletModel",
    "EmptySupportError",
    "lr_series",
    "lr_poisson",
    "lr_negbinomial",
    "lr_plugin_dirichlet",
]

_NEG_INF = float("-inf")

# Block length for the vectorised specialisations below.
_BLOCK = 4096


class EmptySupportError(Exception):
    """The prior puts no mass on any k compatible with the observed data."""


@dataclass(frozen=True)
class RareMatchData:
    """Database summary for a match on a type with zero database occurrences.

    ``counts`` optionally lists the database count of each observed type; it
    is validated against n_db and k_obs but never used numerically (the
    ratio is a function of k_obs alone under this model).
    """

    n_db: int
    k_obs: int
    counts: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_db < 0:
            raise ValueError(f"database size must be >= 0, got {self.n_db}")
        if self.k_obs < 0:
            raise ValueError(f"k_obs must be >= 0, got {self.k_obs}")
        if self.k_obs > self.n_db:
            raise ValueError(
                f"k_obs={self.k_obs} cannot exceed database size {self.n_db}"
            )
        if self.counts is not None:
            counts = tuple(int(c) for c in self.counts)
            object.__setattr__(self, "counts", counts)
            if len(counts) != self.k_obs:
                raise ValueError(
                    f"counts has {len(counts)} entries, expected k_obs={self.k_obs}"
                )
            if any(c < 1 for c in counts):
                raise ValueError("every observed type needs a count >= 1")
            if sum(counts) != self.n_db:
                raise ValueError(
                    f"counts sum to {sum(counts)}, expected n_db={self.n_db}"
                )


@dataclass(frozen=True)
class DirichletModel:
    """Prior on K plus the frequency model's fixed unit concentration.

    ``m`` bounds the number of theoretically possible types; None means the
    bound is computationally irrelevant and the series is truncated
    adaptively.  ``alpha`` is carried as data to make the restriction to 1
    visible; any other value is rejected.
    """

    k_prior: KPrior
    alpha: float = 1.0
    m: int | None = None

    def __post_init__(self) -> None:
        if self.alpha != 1.0:
            raise ValueError(
                "the series form of the likelihood ratio holds only for a "
                f"unit Dirichlet concentration, got alpha={self.alpha}"
            )
        if self.m is not None and self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")


def _series_bounds(
    prior: KPrior, m: int | None, k_obs: int
) -> tuple[int, int | None]:
    """Summation range over k, or EmptySupportError when it is empty."""
    lo, hi = prior.support_bounds()
    k_start = max(k_obs + 1, lo)
    k_max = hi
    if m is not None:
        k_max = m if k_max is None else min(k_max, m)
    if k_max is not None and k_start > k_max:
        raise EmptySupportError(
            f"prior support ends at k={k_max} but the data require "
            f"k >= {k_obs + 1} (k_obs={k_obs})"
        )
    return k_start, k_max


def lr_series(
    model: DirichletModel,
    data: RareMatchData,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> LRResult:
    """Proper Bayesian ratio for an arbitrary prior on K.

    Both sums are accumulated jointly in log space with a shared anchor
    (see numerics.series_ratio), so the ratio keeps near-full precision; in
    particular a point prior at k reproduces (1 + N + k)/2 to rounding error.
    """
    n = data.n_db
    k_obs = data.k_obs
    prior = model.k_prior
    k_start, k_max = _series_bounds(prior, model.m, k_obs)

    def term(k: int) -> float:
        lp = prior.log_pmf(k)
        if lp == _NEG_INF:
            return _NEG_INF
        return lp + log_binomial(k, k_obs + 1) + log_gamma(k) - log_gamma(k + n + 1)

    def divisor(k: int) -> float:
        # Gamma(k+N+2) / Gamma(k+N+1)
        return float(k + n + 1)

    ratio, diag = series_ratio(
        term, divisor, k_start, k_max, rel_tol, max_terms=max_terms
    )
    return LRResult.from_lr(
        0.5 * ratio, method="full_bayes", model="dirichlet", diagnostics=diag
    )


def _blocked_series_ratio(
    log_term_block,
    n: int,
    k_start: int,
    k_max: int | None,
    rel_tol: float,
    max_terms: int,
) -> tuple[float, SeriesDiagnostics]:
    """Vectorised analogue of numerics.series_ratio for contiguous supports.

    ``log_term_block`` maps an integer ndarray of k values to their log
    terms (all finite).  The stopping rule is checked at block boundaries:
    the last DECREASE_WINDOW+1 terms must be strictly decreasing and the
    geometric tail bound must hold for both sums.
    """
    anchor = _NEG_INF
    acc_top = 0.0
    acc_bot = 0.0
    peak = _NEG_INF
    count = 0
    truncated = False
    k = k_start
    while True:
        stop = k + _BLOCK - 1 if k_max is None else min(k + _BLOCK - 1, k_max)
        ks = np.arange(k, stop + 1, dtype=np.float64)
        lt = log_term_block(ks)
        count += lt.size
        bm = float(lt.max())
        if bm > anchor:
            if anchor != _NEG_INF:
                scale = math.exp(anchor - bm)
                acc_top *= scale
                acc_bot *= scale
            anchor = bm
        w = np.exp(lt - anchor)
        acc_top += float(np.sum(w))
        acc_bot += float(np.sum(w / (ks + (n + 1))))
        if bm > peak:
            peak = bm
        if k_max is not None and stop >= k_max:
            break
        tail = lt[-(DECREASE_WINDOW + 1):]
        if tail.size > DECREASE_WINDOW and bool(np.all(np.diff(tail) < 0)):
            rho = math.exp(float(lt[-1] - lt[-2]))
            if rho < 1.0 and acc_top > 0.0:
                margin = math.log(rel_tol) + math.log1p(-rho)
                last = float(lt[-1])
                d_last = float(ks[-1]) + (n + 1)
                top_ok = last <= anchor + math.log(acc_top) + margin
                bot_ok = last - math.log(d_last) <= anchor + math.log(acc_bot) + margin
                if top_ok and bot_ok:
                    truncated = True
                    break
        if k_max is None and count >= max_terms:
            raise NonConvergenceError(
                f"series ratio did not converge within {max_terms} terms "
                f"(k_start={k_start})"
            )
        k = stop + 1
    diag = SeriesDiagnostics(
        terms_evaluated=count, k_stop=stop, truncated=truncated, peak_log_term=peak
    )
    if acc_bot <= 0.0:
        raise ValueError("series has no positive terms, ratio undefined")
    return acc_top / acc_bot, diag


def lr_poisson(
    lam: float,
    m: int | None,
    data: RareMatchData,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> LRResult:
    """Series ratio specialised to a truncated Poisson prior on K.

    The binomial coefficient and the Poisson pmf share a (k_obs+1)! factor
    that cancels between numerator and denominator, leaving terms
    lam**k / (k - k_obs - 1)! * Gamma(k) / Gamma(k+N+j).  Evaluated in
    blocks; agrees with lr_series(PoissonTrunc(lam, m), ...) to ~1e-13.
    """
    prior = PoissonTrunc(lam, m)
    k_start, k_max = _series_bounds(prior, m, data.k_obs)
    n = data.n_db
    k_obs = data.k_obs
    log_lam = math.log(lam)

    def block(ks: np.ndarray) -> np.ndarray:
        return ks * log_lam - gammaln(ks - k_obs) + gammaln(ks) - gammaln(ks + (n + 1))

    ratio, diag = _blocked_series_ratio(block, n, k_start, k_max, rel_tol, max_terms)
    return LRResult.from_lr(
        0.5 * ratio, method="full_bayes", model="dirichlet", diagnostics=diag
    )


def lr_negbinomial(
    r: float,
    q: float,
    m: int | None,
    data: RareMatchData,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> LRResult:
    """Series ratio specialised to a truncated negative binomial prior on K.

    Terms reduce to (1-q)**k * Gamma(k) * Gamma(k+r) / (Gamma(k-k_obs) *
    Gamma(k+N+j)); constants in k cancel in the ratio.
    """
    prior = NegBinomialTrunc(r, q, m)
    k_start, k_max = _series_bounds(prior, m, data.k_obs)
    n = data.n_db
    k_obs = data.k_obs
    log_1mq = math.log1p(-q)

    def block(ks: np.ndarray) -> np.ndarray:
        return (
            ks * log_1mq
            + gammaln(ks + r)
            - gammaln(ks - k_obs)
            + gammaln(ks)
            - gammaln(ks + (n + 1))
        )

    ratio, diag = _blocked_series_ratio(block, n, k_start, k_max, rel_tol, max_terms)
    return LRResult.from_lr(
        0.5 * ratio, method="full_bayes", model="dirichlet", diagnostics=diag
    )


def lr_plugin_dirichlet(k_bar: float, data: RareMatchData, alpha: float = 1.0) -> LRResult:
    """Plug-in ratio with the number of types fixed at k_bar.

    With the matching type unseen in the database the plug-in posterior mean
    frequency is alpha / (k_bar * alpha + N), so the ratio is
    (k_bar * alpha + N) / alpha, i.e. k_bar + N at unit concentration.
    """
    if not (math.isfinite(k_bar) and k_bar > 0):
        raise ValueError(f"k_bar must be finite and > 0, got {k_bar}")
    if not (math.isfinite(alpha) and alpha > 0):
        raise ValueError(f"alpha must be finite and > 0, got {alpha}")
    lr = (k_bar * alpha + data.n_db) / alpha
    return LRResult.from_lr(lr, method="plugin", model="dirichlet")
