"""Independent verification engines for the likelihood ratio formulas.

Three routes that share no evaluation machinery with the model modules:

* adaptive quadrature of the beta posterior moments,
* exact small-instance enumeration of the hierarchical model (number of
  types -> which types -> frequencies -> database and suspect draws) in
  rational arithmetic,
* seeded self-normalised importance sampling of the same hierarchy.

The exact enumerator exists precisely to validate the combinatorial collapse
behind the series formula, so its default "collapsed" mode (closed-form
assignment counts) can itself be cross-checked against an "explicit" mode
that iterates every type assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy import integrate

from .beta_binomial import BetaParams, BinomialData
from .dirichlet_multinomial import DirichletModel, EmptySupportError, RareMatchData
from .kpriors import CustomTable, Degenerate, KPrior, NegBinomialTrunc, PoissonTrunc

__all__ = [
    "TypeAssignment",
    "OracleConfig",
    "ScaleExceededError",
    "DegenerateWeightsError",
    "QuadratureError",
    "beta_lr_quadrature",
    "dirichlet_posterior_mean_exact",
    "dirichlet_posterior_mean_mc",
]

_NEG_INF = float("-inf")

# Desk-scale bounds for the exact enumerator.
_MAX_EXACT_M = 12
_MAX_EXACT_N = 6

_BOOTSTRAP_REPS = 200
_MIN_EFFECTIVE_SAMPLES = 100.0


class ScaleExceededError(ValueError):
    """Instance too large for exact enumeration."""


class DegenerateWeightsError(RuntimeError):
    """Importance weights collapsed; increase samples or use another route."""


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested accuracy."""


@dataclass(frozen=True)
class TypeAssignment:
    """Which of the m possible types exist: k strictly increasing positions."""

    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        pos = tuple(int(p) for p in self.positions)
        object.__setattr__(self, "positions", pos)
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("positions must be strictly increasing")
        if pos and pos[0] < 1:
            raise ValueError("positions are 1-based, the smallest must be >= 1")

    @staticmethod
    def enumerate_all(m: int, k: int):
        """All C(m, k) assignments of k existing types among m possible."""
        for combo in combinations(range(1, m + 1), k):
            yield TypeAssignment(combo)


@dataclass(frozen=True)
class OracleConfig:
    quadrature_points: int = 100_000
    mc_samples: int = 1_000_000
    rng_seed: int = 0
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.quadrature_points < 1 or self.mc_samples < 1:
            raise ValueError("quadrature_points and mc_samples must be >= 1")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")


def _beta_moment(a: float, c: float, power: int, limit: int) -> float:
    """E[T^power] for T ~ Beta(a, c) by adaptive quadrature.

    The unit interval is split at 1/2 and each half is mapped exponentially
    (t = e^x on the left, 1 - t = e^y on the right), which removes the
    endpoint singularities of the density for a < 1 or c < 1 and stretches
    narrow interior peaks.  Break points at the transformed mode guide the
    adaptive rule; integration ranges reach far enough below the mode that
    the discarded tails are negligible at the 1e-9 level.
    """
    log_norm = math.lgamma(a + c) - math.lgamma(a) - math.lgamma(c)
    half = math.log(0.5)

    def piece(slope: float, other: float) -> tuple[float, float]:
        # integral of exp(slope * x + other * log1p(-e^x)) over x <= ln(1/2)
        def f(x: float) -> float:
            return math.exp(slope * x + other * math.log1p(-math.exp(x)) + log_norm)

        if other > 0:
            mode = math.log(slope / (slope + other))
        else:
            mode = half
        mode = min(mode, half)
        lo = mode - (800.0 / slope + 50.0)
        points = sorted({x for x in (mode - 100, mode - 20, mode - 5, mode) if lo < x < half})
        value, abserr = integrate.quad(
            f, lo, half, points=points or None, limit=limit, epsabs=0.0, epsrel=1e-11
        )
        return value, abserr

    left, err_left = piece(a + power, c - 1)
    right, err_right = piece(c, a + power - 1)
    total = left + right
    if total <= 0.0 or (err_left + err_right) > 1e-8 * total:
        raise QuadratureError(
            f"moment {power} integration achieved {err_left + err_right:.3g} "
            f"absolute error on a value of {total:.3g}"
        )
    return total


def beta_lr_quadrature(
    prior: BetaParams, data: BinomialData, cfg: OracleConfig | None = None
) -> float:
    """Likelihood ratio by numerical integration of beta posterior moments.

    Integrates t * p(t | b) and t^2 * p(t | b) over (0, 1) and returns the
    ratio; the posterior density is the beta pdf with parameters
    (alpha + b, beta + N - b), evaluated in log space.
    """
    cfg = cfg or OracleConfig()
    a = prior.alpha + data.b
    c = prior.beta + data.n_db - data.b
    limit = max(50, min(1000, cfg.quadrature_points // 42))
    return _beta_moment(a, c, 1, limit) / _beta_moment(a, c, 2, limit)


def _required_cells(data: RareMatchData, m: int) -> tuple[tuple[int, ...], int]:
    """Canonical 1-based placement: observed types first, suspect next."""
    observed = tuple(range(1, data.k_obs + 1))
    return observed, data.k_obs + 1


def _exact_prior_weight(prior: KPrior, k: int) -> Fraction:
    """Prior weight at k as an exact rational, up to a constant factor.

    Constant factors across k cancel in the posterior-mean ratio, so the
    Poisson drops e**-lam and the negative binomial drops q**r.  Non-integer
    dispersion falls back to the float pmf (exactly converted), which keeps
    the enumeration itself exact and only rounds the prior weight.
    """
    if isinstance(prior, Degenerate):
        return Fraction(1) if k == prior.k_bar else Fraction(0)
    if isinstance(prior, PoissonTrunc):
        if k < 1 or (prior.m is not None and k > prior.m):
            return Fraction(0)
        return Fraction(prior.lam) ** k / math.factorial(k)
    if isinstance(prior, NegBinomialTrunc):
        if k < 1 or (prior.m is not None and k > prior.m):
            return Fraction(0)
        if float(prior.r).is_integer():
            r = int(prior.r)
            return math.comb(k + r - 1, k) * (1 - Fraction(prior.q)) ** k
        lp = prior.log_pmf(k)
        return Fraction(math.exp(lp)) if lp != _NEG_INF else Fraction(0)
    if isinstance(prior, CustomTable):
        lw = prior.log_pmf(k)
        return Fraction(math.exp(lw)) if lw != _NEG_INF else Fraction(0)
    raise TypeError(f"unsupported prior type {type(prior).__name__}")


def dirichlet_posterior_mean_exact(
    model: DirichletModel,
    data: RareMatchData,
    cfg: OracleConfig | None = None,
    *,
    mode: str = "collapsed",
    observed_cells: tuple[int, ...] | None = None,
    suspect_cell: int | None = None,
) -> float:
    """Exact posterior mean frequency of the suspect's type, small instances.

    Sums over every number of types k and (in "explicit" mode) every
    assignment of which k of the m possible types exist, accumulating the
    marginal weight of the observed database plus suspect type and the
    corresponding frequency-mean contribution, all in rational arithmetic.
    "collapsed" mode replaces the assignment loop by the count of admissible
    assignments.  The reciprocal of the returned mean is the reference value
    for the full Bayesian likelihood ratio.

    ``observed_cells``/``suspect_cell`` override the canonical placement of
    the observed types among the m cells; by symmetry the result cannot
    depend on it, and the relabeling tests exercise exactly that.
    """
    if mode not in ("collapsed", "explicit"):
        raise ValueError(f"mode must be 'collapsed' or 'explicit', got {mode!r}")
    m = model.m
    if m is None:
        raise ScaleExceededError("exact enumeration needs a finite m")
    if m > _MAX_EXACT_M or data.n_db > _MAX_EXACT_N:
        raise ScaleExceededError(
            f"exact enumeration is limited to m <= {_MAX_EXACT_M} and "
            f"N <= {_MAX_EXACT_N}, got m={m}, N={data.n_db}"
        )
    if data.counts is None:
        raise ValueError("exact enumeration needs per-type counts")
    prior = model.k_prior
    lo, hi = prior.support_bounds()
    if hi is None or hi > m:
        raise ScaleExceededError(
            f"prior support must lie within [1, {m}] for exact enumeration"
        )
    if data.k_obs + 1 > m:
        raise EmptySupportError(
            f"the data involve {data.k_obs + 1} distinct types but only "
            f"m={m} are possible"
        )

    if observed_cells is None and suspect_cell is None:
        observed_cells, suspect_cell = _required_cells(data, m)
    if observed_cells is None or suspect_cell is None:
        raise ValueError("give both observed_cells and suspect_cell or neither")
    required = set(observed_cells) | {suspect_cell}
    if len(observed_cells) != data.k_obs or len(required) != data.k_obs + 1:
        raise ValueError("cell placement must name k_obs + 1 distinct cells")
    if any(not 1 <= cell <= m for cell in required):
        raise ValueError(f"cell placements must lie in [1, {m}]")

    n = data.n_db
    count_factorial = math.prod(math.factorial(c) for c in data.counts)
    num = Fraction(0)
    den = Fraction(0)
    for k in range(max(lo, data.k_obs + 1), hi + 1):
        w = _exact_prior_weight(prior, k)
        if w == 0:
            continue
        # Dirichlet moment for one admissible assignment:
        #   E[prod T_i^{b_i} * T_es^{1 or 2}] = Gamma(k) * prod b_i! * j! / Gamma(k+N+j)
        den_term = w * Fraction(
            math.factorial(k - 1) * count_factorial, math.factorial(k + n)
        )
        num_term = w * Fraction(
            2 * math.factorial(k - 1) * count_factorial, math.factorial(k + n + 1)
        )
        if mode == "collapsed":
            admissible = math.comb(m - data.k_obs - 1, k - data.k_obs - 1)
        else:
            admissible = sum(
                1
                for t in TypeAssignment.enumerate_all(m, k)
                if required.issubset(t.positions)
            )
        # Uniform assignment prior: each of the C(m, k) assignments has the
        # same weight, only the admissible ones contribute.
        share = Fraction(admissible, math.comb(m, k))
        num += num_term * share
        den += den_term * share
    if den == 0:
        raise EmptySupportError(
            "prior support excludes every k compatible with the observed data"
        )
    return float(num / den)


def _enumerate_prior_pmf(prior: KPrior, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Support points within [1, m] and their normalised probabilities."""
    lo, hi = prior.support_bounds()
    hi = m if hi is None else min(hi, m)
    if lo > hi:
        raise EmptySupportError(f"prior support is empty on [1, {m}]")
    ks = np.arange(lo, hi + 1)
    lp = prior.log_pmf_array(ks.astype(np.float64))
    finite = lp > _NEG_INF
    ks, lp = ks[finite], lp[finite]
    if ks.size == 0:
        raise EmptySupportError(f"prior support is empty on [1, {m}]")
    w = np.exp(lp - np.max(lp))
    return ks, w / np.sum(w)


def dirichlet_posterior_mean_mc(
    model: DirichletModel,
    data: RareMatchData,
    cfg: OracleConfig | None = None,
) -> tuple[float, float]:
    """Importance-sampling posterior mean of the suspect type's frequency.

    Samples the hierarchy forward (k from the prior, an assignment of k
    types uniformly at random, frequencies from the symmetric Dirichlet) and
    weights each draw by the likelihood of the observed database counts and
    suspect type.  Returns the self-normalised estimate and a bootstrap
    standard error; fully deterministic for a fixed seed.
    """
    cfg = cfg or OracleConfig()
    m = model.m
    if m is None:
        raise ValueError("importance sampling needs a finite m")
    if data.counts is None:
        raise ValueError("importance sampling needs per-type counts")
    observed_cells, suspect_cell = _required_cells(data, m)
    if data.k_obs + 1 > m:
        raise EmptySupportError(
            f"the data involve {data.k_obs + 1} distinct types but only "
            f"m={m} are possible"
        )
    ks, probs = _enumerate_prior_pmf(model.k_prior, m)
    if ks.max() < data.k_obs + 1:
        raise EmptySupportError(
            "prior support excludes every k compatible with the observed data"
        )

    rng = np.random.default_rng(cfg.rng_seed)
    n_samples = cfg.mc_samples
    # 1-based cells -> 0-based columns; required cells in a fixed order with
    # the suspect's last.
    req = np.array([c - 1 for c in observed_cells] + [suspect_cell - 1])
    counts = np.array(data.counts, dtype=np.float64)

    chunk = max(1024, min(65536, (1 << 22) // max(m, 1)))
    weights = np.empty(n_samples)
    values = np.empty(n_samples)
    done = 0
    while done < n_samples:
        size = min(chunk, n_samples - done)
        k_draw = rng.choice(ks, size=size, p=probs)
        w_chunk = np.zeros(size)
        v_chunk = np.zeros(size)
        for k_val in np.unique(k_draw):
            rows = np.flatnonzero(k_draw == k_val)
            u = rng.random((rows.size, m))
            gam = rng.standard_exponential((rows.size, int(k_val)))
            total = gam.sum(axis=1)
            # Rank of each required cell among all m; the cell exists in the
            # population iff its rank falls inside the k smallest.
            ranks = np.array(
                [(u < u[:, [c]]).sum(axis=1) for c in req]
            )  # shape (k_obs+1, rows)
            included = np.all(ranks < k_val, axis=0)
            theta = np.zeros((req.size, rows.size))
            if included.any():
                idx = np.flatnonzero(included)
                for j in range(req.size):
                    theta[j, idx] = gam[idx, ranks[j, idx]] / total[idx]
            like = np.where(included, 1.0, 0.0)
            for j in range(data.k_obs):
                like = like * theta[j] ** counts[j]
            like = like * theta[-1]  # suspect's own type observation
            w_chunk[rows] = like
            v_chunk[rows] = theta[-1]
        weights[done : done + size] = w_chunk
        values[done : done + size] = v_chunk
        done += size

    w_sum = float(weights.sum())
    if w_sum <= 0.0:
        raise DegenerateWeightsError(
            "all importance weights are zero; increase mc_samples"
        )
    ess = w_sum * w_sum / float(np.sum(weights * weights))
    if ess < _MIN_EFFECTIVE_SAMPLES:
        raise DegenerateWeightsError(
            f"effective sample size {ess:.1f} < {_MIN_EFFECTIVE_SAMPLES:.0f}; "
            "increase mc_samples or use the exact/series route"
        )
    estimate = float(np.sum(weights * values)) / w_sum

    boot = np.empty(_BOOTSTRAP_REPS)
    for i in range(_BOOTSTRAP_REPS):
        idx = rng.integers(0, n_samples, n_samples)
        w = weights[idx]
        boot[i] = float(np.sum(w * values[idx])) / float(np.sum(w))
    std_error = float(np.std(boot, ddof=1))
    return estimate, std_error
