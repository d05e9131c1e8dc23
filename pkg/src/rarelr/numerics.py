"""Log-space primitives: gamma/binomial logs and adaptive series summation.

Everything downstream works with natural-log magnitudes (plain floats, with
-inf encoding an exact zero) so that gamma-function ratios whose arguments run
into the tens of thousands never leave the representable float range.  All
functions here are pure, hold no state, and are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "LogValue",
    "NonConvergenceError",
    "SeriesDiagnostics",
    "log_gamma",
    "log_binomial",
    "log_sum_series",
    "series_ratio",
    "DEFAULT_REL_TOL",
    "DECREASE_WINDOW",
    "DEFAULT_MAX_TERMS",
]

# Natural log of a positive magnitude; -inf encodes an exact zero.
LogValue = float

DEFAULT_REL_TOL = 1e-12
# Consecutive strict decreases required before the geometric tail bound is
# trusted.  The series summed here are unimodal, so a short window suffices.
DECREASE_WINDOW = 10
DEFAULT_MAX_TERMS = 10_000_000

_NEG_INF = float("-inf")


class NonConvergenceError(RuntimeError):
    """An unbounded series did not satisfy the tail bound within the term cap."""


@dataclass(frozen=True)
class SeriesDiagnostics:
    """How a series summation terminated.

    ``truncated`` is True when the adaptive tail bound fired before the stated
    upper summation limit was reached (always True for unbounded sums that
    terminate).
    """

    terms_evaluated: int
    k_stop: int
    truncated: bool
    peak_log_term: float


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k), computed through log_gamma.

    The three-term log_gamma form loses roughly one ulp of ln Gamma(n+1)
    absolutely, which misses 1e-12 relative accuracy whenever the result is
    small against that magnitude (k near 0 or n with n large); those cases
    fall back to an exact O(min(k, n-k)) product of logs.
    """
    if k < 0 or k > n:
        raise ValueError(f"log_binomial requires 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return 0.0
    top = log_gamma(n + 1)
    direct = top - log_gamma(k + 1) - log_gamma(n - k + 1)
    if direct * 1e-12 >= 2e-15 * top:
        return direct
    k_min = min(k, n - k)
    return math.fsum(math.log(n - i) for i in range(k_min)) - log_gamma(k_min + 1)


def _validate_series_args(k_start: int, k_max: int | None, rel_tol: float) -> None:
    if not 0.0 < rel_tol <= 1e-6:
        raise ValueError(f"rel_tol must lie in (0, 1e-6], got {rel_tol}")
    if k_max is not None and k_max < k_start:
        raise ValueError(f"k_max={k_max} is below k_start={k_start}")


def log_sum_series(
    term: Callable[[int], float],
    k_start: int,
    k_max: int | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> tuple[float, SeriesDiagnostics]:
    """Log of sum(exp(term(k)) for k = k_start, k_start+1, ...).

    Accumulation is a streaming log-sum-exp anchored at the running maximum.
    Summation stops at ``k_max`` when given, or as soon as the last
    ``DECREASE_WINDOW`` terms were strictly decreasing and the geometric tail
    bound t_k / (1 - rho) drops below ``rel_tol`` times the running sum (rho
    being the last observed term ratio).  Terms equal to -inf contribute
    nothing and count as decreasing, so series with bounded support terminate.

    Raises NonConvergenceError if ``k_max`` is None and the bound has not
    fired after ``max_terms`` evaluations.
    """
    _validate_series_args(k_start, k_max, rel_tol)

    anchor = _NEG_INF  # running maximum of the log terms
    acc = 0.0  # sum of exp(term - anchor)
    peak = _NEG_INF
    prev: float | None = None
    streak = 0
    rho = None
    count = 0
    truncated = False
    k = k_start
    while True:
        lt = term(k)
        if math.isnan(lt) or lt == math.inf:
            raise ValueError(f"log term at k={k} must be finite or -inf, got {lt}")
        count += 1
        if lt != _NEG_INF:
            if lt > anchor:
                if acc:
                    acc *= math.exp(anchor - lt)
                acc += 1.0
                anchor = lt
            else:
                acc += math.exp(lt - anchor)
            if lt > peak:
                peak = lt
        # Track the decrease streak and the last term ratio.
        if prev is None:
            streak = 1 if lt == _NEG_INF else 0
            rho = 0.0 if lt == _NEG_INF else None
        elif lt == _NEG_INF:
            streak += 1
            rho = 0.0
        elif lt < prev:
            streak += 1
            rho = math.exp(lt - prev)
        else:
            streak = 0
            rho = None

        if k_max is not None and k >= k_max:
            break
        if streak >= DECREASE_WINDOW and rho is not None and rho < 1.0 and acc > 0.0:
            log_sum = anchor + math.log(acc)
            if lt <= log_sum + math.log(rel_tol) + math.log1p(-rho):
                truncated = True
                break
        if k_max is None and count >= max_terms:
            raise NonConvergenceError(
                f"series did not converge within {max_terms} terms "
                f"(k_start={k_start}, last log term {lt:.6g})"
            )
        prev = lt
        k += 1

    log_sum = anchor + math.log(acc) if acc > 0.0 else _NEG_INF
    diag = SeriesDiagnostics(
        terms_evaluated=count, k_stop=k, truncated=truncated, peak_log_term=peak
    )
    return log_sum, diag


def series_ratio(
    term: Callable[[int], float],
    divisor: Callable[[int], float],
    k_start: int,
    k_max: int | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> tuple[float, SeriesDiagnostics]:
    """Ratio sum(exp(term(k))) / sum(exp(term(k)) / divisor(k)).

    Numerically equivalent to exponentiating the difference of two
    log_sum_series calls, but both series share one running anchor so the
    ratio retains close to full double precision even when the individual
    log sums are large.  Stopping rule and error behaviour match
    log_sum_series, with the tail bound required to hold for both series.
    """
    _validate_series_args(k_start, k_max, rel_tol)

    anchor = _NEG_INF
    acc_top = 0.0  # sum of exp(term - anchor)
    acc_bot = 0.0  # sum of exp(term - anchor) / divisor
    peak = _NEG_INF
    prev: float | None = None
    streak = 0
    rho = None
    count = 0
    truncated = False
    k = k_start
    while True:
        lt = term(k)
        if math.isnan(lt) or lt == math.inf:
            raise ValueError(f"log term at k={k} must be finite or -inf, got {lt}")
        count += 1
        d = 0.0
        if lt != _NEG_INF:
            d = divisor(k)
            if not d > 0:
                raise ValueError(f"divisor at k={k} must be positive, got {d}")
            if lt > anchor:
                scale = math.exp(anchor - lt)
                acc_top = acc_top * scale + 1.0
                acc_bot = acc_bot * scale + 1.0 / d
                anchor = lt
            else:
                e = math.exp(lt - anchor)
                acc_top += e
                acc_bot += e / d
            if lt > peak:
                peak = lt
        if prev is None:
            streak = 1 if lt == _NEG_INF else 0
            rho = 0.0 if lt == _NEG_INF else None
        elif lt == _NEG_INF:
            streak += 1
            rho = 0.0
        elif lt < prev:
            streak += 1
            rho = math.exp(lt - prev)
        else:
            streak = 0
            rho = None

        if k_max is not None and k >= k_max:
            break
        if streak >= DECREASE_WINDOW and rho is not None and rho < 1.0 and acc_top > 0.0:
            margin = math.log(rel_tol) + math.log1p(-rho)
            top_ok = lt <= anchor + math.log(acc_top) + margin
            bot_ok = lt - math.log(d) <= anchor + math.log(acc_bot) + margin if d > 0 else True
            if top_ok and bot_ok:
                truncated = True
                break
        if k_max is None and count >= max_terms:
            raise NonConvergenceError(
                f"series ratio did not converge within {max_terms} terms "
                f"(k_start={k_start}, last log term {lt:.6g})"
            )
        prev = lt
        k += 1

    diag = SeriesDiagnostics(
        terms_evaluated=count, k_stop=k, truncated=truncated, peak_log_term=peak
    )
    if acc_bot <= 0.0:
        raise ValueError("series has no positive terms, ratio undefined")
    return acc_top / acc_bot, diag
