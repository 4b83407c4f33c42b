"""Numerical tolerances shared by the whole package."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Central place for numeric thresholds.

    Every function that depends on one of these accepts an optional override;
    ``None`` means "use :data:`DEFAULT_TOLERANCES`".
    """

    projection: float = 1e-12
    invariant: float = 1e-9
    root_max_iter: int = 200
    rank_cutoff: float = 1e-10
    nonexpansive_norm: float = 1e-10
    monotone_eig: float = 1e-10

    def with_(self, **changes) -> "ToleranceConfig":
        return replace(self, **changes)


DEFAULT_TOLERANCES = ToleranceConfig()
