"""Priors over the number of distinct types present in a population.

Each prior exposes an unnormalised log pmf on a support contained in
{1, 2, ..., m}; the normalising constant is irrelevant to the likelihood
ratios built on top (it cancels in their numerator/denominator sums), so it
is only resolved lazily when moments are requested.  All priors are immutable
value objects and safe to share across threads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

__all__ = [
    "KPrior",
    "Degenerate",
    "PoissonTrunc",
    "NegBinomialTrunc",
    "CustomTable",
    "nb_from_mean",
    "parse_prior_spec",
]

_NEG_INF = float("-inf")

# Chunk length for summed moments over a finite support.
_SUM_CHUNK = 1_000_000


class KPrior:
    """Common interface for priors on the number of types."""

    def log_pmf(self, k: int) -> float:
        """Unnormalised log pmf; -inf outside the support."""
        raise NotImplementedError

    def log_pmf_array(self, ks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def support_bounds(self) -> tuple[int, int | None]:
        """Smallest and largest supported k (None when unbounded above)."""
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def _summed_moments(self, hi: int) -> tuple[float, float]:
        """Mean and variance of the prior normalised over {1, ..., hi}."""
        lo, _ = self.support_bounds()
        anchor = _NEG_INF
        tot = 0.0
        s1 = 0.0
        s2 = 0.0
        for start in range(lo, hi + 1, _SUM_CHUNK):
            ks = np.arange(start, min(start + _SUM_CHUNK, hi + 1), dtype=np.float64)
            lp = self.log_pmf_array(ks)
            m = float(np.max(lp, initial=_NEG_INF))
            if m == _NEG_INF:
                continue
            if m > anchor:
                if anchor != _NEG_INF:
                    scale = math.exp(anchor - m)
                    tot *= scale
                    s1 *= scale
                    s2 *= scale
                anchor = m
            w = np.exp(lp - anchor)
            tot += float(np.sum(w))
            s1 += float(np.sum(w * ks))
            s2 += float(np.sum(w * ks * ks))
        if tot <= 0.0:
            raise ValueError("prior has no mass on its support, cannot normalise")
        mean = s1 / tot
        var = s2 / tot - mean * mean
        return mean, max(var, 0.0)


def _check_m(m: int | None) -> None:
    if m is not None and m < 1:
        raise ValueError(f"support bound m must be >= 1, got {m}")


@dataclass(frozen=True)
class Degenerate(KPrior):
    """All mass on a single number of types."""

    k_bar: int

    def __post_init__(self) -> None:
        if self.k_bar < 1:
            raise ValueError(f"k_bar must be >= 1, got {self.k_bar}")

    def log_pmf(self, k: int) -> float:
        return 0.0 if k == self.k_bar else _NEG_INF

    def log_pmf_array(self, ks: np.ndarray) -> np.ndarray:
        return np.where(ks == self.k_bar, 0.0, _NEG_INF)

    def support_bounds(self) -> tuple[int, int | None]:
        return self.k_bar, self.k_bar

    def mean(self) -> float:
        return float(self.k_bar)

    def variance(self) -> float:
        return 0.0


@dataclass(frozen=True)
class PoissonTrunc(KPrior):
    """Poisson(lam) restricted to {1, ..., m} (m=None leaves it unbounded).

    The pmf is the standard Poisson formula; the truncation is a support mask,
    not a renormalisation, because downstream ratios do not depend on the
    normalising constant.
    """

    lam: float
    m: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lambda must be finite and > 0, got {self.lam}")
        _check_m(self.m)

    def log_pmf(self, k: int) -> float:
        if k < 1 or (self.m is not None and k > self.m):
            return _NEG_INF
        return -self.lam + k * math.log(self.lam) - math.lgamma(k + 1)

    def log_pmf_array(self, ks: np.ndarray) -> np.ndarray:
        lp = -self.lam + ks * math.log(self.lam) - gammaln(ks + 1)
        mask = ks < 1
        if self.m is not None:
            mask |= ks > self.m
        return np.where(mask, _NEG_INF, lp)

    def support_bounds(self) -> tuple[int, int | None]:
        return 1, self.m

    def _safe_horizon(self) -> int:
        # Beyond this k the remaining Poisson mass is far below 1e-12.
        return int(math.ceil(self.lam + 12.0 * math.sqrt(self.lam) + 60.0))

    def mean(self) -> float:
        if self.m is None or self.m >= self._safe_horizon():
            return self.lam
        return self._summed_moments(self.m)[0]

    def variance(self) -> float:
        if self.m is None or self.m >= self._safe_horizon():
            return self.lam
        return self._summed_moments(self.m)[1]


@dataclass(frozen=True)
class NegBinomialTrunc(KPrior):
    """Negative binomial(r, q) restricted to {1, ..., m}.

    Mean and variance of the untruncated law are (1-q)r/q and (1-q)r/q**2,
    so the two can be tuned separately, unlike the Poisson case.
    """

    r: float
    q: float
    m: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"r must be finite and > 0, got {self.r}")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        _check_m(self.m)

    def log_pmf(self, k: int) -> float:
        if k < 1 or (self.m is not None and k > self.m):
            return _NEG_INF
        return (
            math.lgamma(k + self.r)
            - math.lgamma(self.r)
            - math.lgamma(k + 1)
            + k * math.log1p(-self.q)
            + self.r * math.log(self.q)
        )

    def log_pmf_array(self, ks: np.ndarray) -> np.ndarray:
        lp = (
            gammaln(ks + self.r)
            - math.lgamma(self.r)
            - gammaln(ks + 1)
            + ks * math.log1p(-self.q)
            + self.r * math.log(self.q)
        )
        mask = ks < 1
        if self.m is not None:
            mask |= ks > self.m
        return np.where(mask, _NEG_INF, lp)

    def support_bounds(self) -> tuple[int, int | None]:
        return 1, self.m

    def _untruncated_mean(self) -> float:
        return (1.0 - self.q) * self.r / self.q

    def _safe_horizon(self) -> int:
        mean = self._untruncated_mean()
        sd = math.sqrt((1.0 - self.q) * self.r) / self.q
        # The geometric factor (1-q)**k drives the tail, hence the 1/q term.
        return int(math.ceil(mean + 16.0 * sd + 40.0 / self.q + 50.0))

    def mean(self) -> float:
        if self.m is None or self.m >= self._safe_horizon():
            return self._untruncated_mean()
        return self._summed_moments(self.m)[0]

    def variance(self) -> float:
        if self.m is None or self.m >= self._safe_horizon():
            return (1.0 - self.q) * self.r / (self.q * self.q)
        return self._summed_moments(self.m)[1]


@dataclass(frozen=True)
class CustomTable(KPrior):
    """Arbitrary tabulated prior given as log weights per supported k."""

    log_weights: dict[int, float] = field(compare=False)

    def __post_init__(self) -> None:
        finite = {}
        for k, w in self.log_weights.items():
            if int(k) != k or k < 1:
                raise ValueError(f"table keys must be integers >= 1, got {k}")
            if math.isnan(w) or w == math.inf:
                raise ValueError(f"log weight for k={k} must be finite or -inf")
            if w != _NEG_INF:
                finite[int(k)] = float(w)
        if not finite:
            raise ValueError("custom prior needs at least one finite log weight")
        object.__setattr__(self, "log_weights", finite)

    def log_pmf(self, k: int) -> float:
        return self.log_weights.get(k, _NEG_INF)

    def log_pmf_array(self, ks: np.ndarray) -> np.ndarray:
        return np.array([self.log_weights.get(int(k), _NEG_INF) for k in ks])

    def support_bounds(self) -> tuple[int, int | None]:
        keys = self.log_weights.keys()
        return min(keys), max(keys)

    def shifted(self, constant: float) -> "CustomTable":
        """Same prior with every log weight moved by an additive constant."""
        return CustomTable({k: w + constant for k, w in self.log_weights.items()})

    def _moments(self) -> tuple[float, float]:
        ks = np.array(sorted(self.log_weights), dtype=np.float64)
        lw = np.array([self.log_weights[int(k)] for k in ks])
        w = np.exp(lw - np.max(lw))
        tot = float(np.sum(w))
        mean = float(np.sum(w * ks)) / tot
        var = float(np.sum(w * ks * ks)) / tot - mean * mean
        return mean, max(var, 0.0)

    def mean(self) -> float:
        return self._moments()[0]

    def variance(self) -> float:
        return self._moments()[1]


def nb_from_mean(lam: float, r: float, m: int | None = None) -> NegBinomialTrunc:
    """Negative binomial prior with dispersion r and untruncated mean lam.

    Inverts (1-q)r/q = lam, giving q = r/(r + lam).
    """
    if not (math.isfinite(lam) and lam > 0):
        raise ValueError(f"mean must be finite and > 0, got {lam}")
    if not (math.isfinite(r) and r > 0):
        raise ValueError(f"r must be finite and > 0, got {r}")
    return NegBinomialTrunc(r=r, q=r / (r + lam), m=m)


def _parse_kv(parts: list[str], spec: str) -> dict[str, str]:
    kv = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep or not key or not value:
            raise ValueError(f"malformed prior option {part!r} in {spec!r}")
        if key in kv:
            raise ValueError(f"duplicate prior option {key!r} in {spec!r}")
        kv[key] = value
    return kv


def _pop_float(kv: dict[str, str], key: str, spec: str) -> float:
    try:
        return float(kv.pop(key))
    except KeyError:
        raise ValueError(f"prior spec {spec!r} is missing {key!r}") from None
    except ValueError:
        raise ValueError(f"prior option {key!r} in {spec!r} is not a number") from None


def _pop_int(kv: dict[str, str], key: str, spec: str) -> int:
    value = _pop_float(kv, key, spec)
    if value != int(value):
        raise ValueError(f"prior option {key!r} in {spec!r} must be an integer")
    return int(value)


def _pop_optional_m(kv: dict[str, str], spec: str) -> int | None:
    if "m" not in kv:
        return None
    return _pop_int(kv, "m", spec)


def load_weight_table(path: str) -> CustomTable:
    """Read a two column CSV (k, weight) into a CustomTable prior.

    Weights are linear and nonnegative; zero weight rows are skipped.  Header
    lines and lines starting with '#' are ignored.
    """
    table: dict[int, float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) < 2:
                raise ValueError(f"expected two columns (k, weight) in {path}, got {row!r}")
            try:
                k = float(row[0])
                w = float(row[1])
            except ValueError:
                continue  # header
            if k != int(k) or k < 1:
                raise ValueError(f"k values in {path} must be integers >= 1, got {row[0]!r}")
            if w < 0 or not math.isfinite(w):
                raise ValueError(f"weights in {path} must be finite and >= 0, got {row[1]!r}")
            if int(k) in table:
                raise ValueError(f"duplicate k={int(k)} in {path}")
            if w > 0:
                table[int(k)] = math.log(w)
    if not table:
        raise ValueError(f"no positive weights found in {path}")
    return CustomTable(table)


def parse_prior_spec(spec: str) -> KPrior:
    """Build a KPrior from a compact text spec.

    Grammar::

        degenerate:k=150
        poisson:lambda=1000[,m=...]
        negbinomial:r=10,q=0.2[,m=...]
        negbinomial:r=10,mean=40[,m=...]
        custom:@weights.csv
    """
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"prior spec {spec!r} must look like 'kind:key=value,...'")
    kind = kind.strip().lower()
    if kind == "custom":
        if not rest.startswith("@"):
            raise ValueError(f"custom prior expects 'custom:@file.csv', got {spec!r}")
        return load_weight_table(rest[1:])
    kv = _parse_kv([p for p in rest.split(",") if p], spec)
    if kind == "degenerate":
        k_bar = _pop_int(kv, "k", spec)
        prior: KPrior = Degenerate(k_bar)
    elif kind == "poisson":
        lam = _pop_float(kv, "lambda", spec)
        prior = PoissonTrunc(lam, _pop_optional_m(kv, spec))
    elif kind == "negbinomial":
        r = _pop_float(kv, "r", spec)
        m = _pop_optional_m(kv, spec)
        if "q" in kv and "mean" in kv:
            raise ValueError(f"give either q or mean in {spec!r}, not both")
        if "q" in kv:
            prior = NegBinomialTrunc(r, _pop_float(kv, "q", spec), m)
        elif "mean" in kv:
            prior = nb_from_mean(_pop_float(kv, "mean", spec), r, m)
        else:
            raise ValueError(f"negbinomial prior needs q or mean in {spec!r}")
    else:
        raise ValueError(f"unknown prior kind {kind!r} in {spec!r}")
    if kv:
        raise ValueError(f"unrecognised prior options {sorted(kv)} in {spec!r}")
    return prior
