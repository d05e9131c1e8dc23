"""Shared result record for likelihood ratio computations."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import SeriesDiagnostics

__all__ = ["LRResult"]


@dataclass(frozen=True)
class LRResult:
    """A likelihood ratio with its log10 value and provenance tags.

    ``method`` is "full_bayes" or "plugin"; ``model`` names the sampling model
    ("beta" or "dirichlet").  ``diagnostics`` carries series truncation info
    when the value came from an infinite-sum evaluation.
    """

    lr: float
    log10_lr: float
    method: str
    model: str
    diagnostics: SeriesDiagnostics | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lr) and self.lr > 0):
            raise ValueError(f"likelihood ratio must be finite and > 0, got {self.lr}")
        if abs(self.log10_lr - math.log10(self.lr)) > 1e-12 * max(1.0, abs(self.log10_lr)):
            raise ValueError("log10_lr is inconsistent with lr")

    @classmethod
    def from_lr(
        cls,
        lr: float,
        method: str,
        model: str,
        diagnostics: SeriesDiagnostics | None = None,
    ) -> "LRResult":
        return cls(
            lr=lr,
            log10_lr=math.log10(lr),
            method=method,
            model=model,
            diagnostics=diagnostics,
        )
