"""Likelihood ratios under a beta prior on a single type's frequency.

The reference database of size N is treated as N Bernoulli draws where a
"success" is an observation of the matching type; b is the number of
successes.  A Beta(alpha, beta) prior on the frequency is conjugate, so every
quantity below has a closed form.  The proper Bayesian ratio conditions on
the full data including the suspect's own type; the widespread "plug-in"
recipe instead divides by the posterior mean frequency given only the
database, and is always larger, never favouring the defence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .results import LRResult

__all__ = [
    "BetaParams",
    "BinomialData",
    "posterior",
    "lr_full",
    "lr_plugin",
    "lr_joint",
    "lr_two_step",
]


@dataclass(frozen=True)
class BetaParams:
    """Beta distribution hyperparameters, both strictly positive.

    Zero is rejected rather than clamped: the closed forms degenerate there,
    and small-alpha behaviour is best studied as an explicit limit.
    """

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")

    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


@dataclass(frozen=True)
class BinomialData:
    """Database summary: size and count of the matching type.

    The module never sees raw profile lists; reducing them to the count is
    the caller's job.  The rare match case is b = 0.
    """

    n_db: int
    b: int

    def __post_init__(self) -> None:
        if self.n_db < 0:
            raise ValueError(f"database size must be >= 0, got {self.n_db}")
        if not 0 <= self.b <= self.n_db:
            raise ValueError(f"count must satisfy 0 <= b <= {self.n_db}, got {self.b}")


def posterior(prior: BetaParams, data: BinomialData, include_suspect: bool) -> BetaParams:
    """Conjugate update of the beta prior by the database (and the suspect).

    With the suspect included his type counts as one extra success in a
    sample of size N + 1, giving Beta(alpha + b + 1, beta + N - b); without
    him the update is Beta(alpha + b, beta + N - b).
    """
    extra = 1 if include_suspect else 0
    return BetaParams(
        alpha=prior.alpha + data.b + extra,
        beta=prior.beta + data.n_db - data.b,
    )


def lr_full(prior: BetaParams, data: BinomialData) -> LRResult:
    """Proper Bayesian likelihood ratio (alpha+beta+N+1)/(alpha+b+1)."""
    lr = (prior.alpha + prior.beta + data.n_db + 1) / (prior.alpha + data.b + 1)
    return LRResult.from_lr(lr, method="full_bayes", model="beta")


def lr_plugin(prior: BetaParams, data: BinomialData) -> LRResult:
    """Plug-in ratio (alpha+beta+N)/(alpha+b).

    This is 1 over the posterior mean frequency given the database alone,
    i.e. the suspect's type is not added before taking the point estimate.
    Exceeds lr_full for every valid input since beta + N > b always holds.
    """
    lr = (prior.alpha + prior.beta + data.n_db) / (prior.alpha + data.b)
    return LRResult.from_lr(lr, method="plugin", model="beta")


def lr_joint(prior: BetaParams, data: BinomialData) -> LRResult:
    """Full ratio via the posterior moment identity E(T|b) / E(T^2|b).

    Evaluated literally from the moments of Beta(alpha+b, beta+N-b); equal to
    lr_full by algebra, which the tests pin down numerically.
    """
    post = posterior(prior, data, include_suspect=False)
    a, c = post.alpha, post.beta
    m1 = a / (a + c)
    m2 = a * (a + 1) / ((a + c) * (a + c + 1))
    return LRResult.from_lr(m1 / m2, method="full_bayes", model="beta")


def lr_two_step(prior: BetaParams, data: BinomialData) -> LRResult:
    """Full ratio via sequential updating.

    First the database and the suspect's type update the prior, then the
    ratio for observing one more copy of the type is 1 over the updated mean.
    """
    post = posterior(prior, data, include_suspect=True)
    return LRResult.from_lr(1.0 / post.mean(), method="full_bayes", model="beta")
