from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputError


@dataclass(frozen=True)
class FeatureRanking:
    """Importance scores (higher is better) and the top-``k`` feature names."""

    algorithm: str
    scores: dict[str, float]
    selected: tuple[str, ...]

    @classmethod
    def from_scores(cls, algorithm: str, scores: dict[str, float], k: int) -> "FeatureRanking":
        if not 1 <= k <= len(scores):
            raise InputError(f"k must lie in [1, {len(scores)}], got {k}")
        ranked = sorted(scores, key=lambda v: (-scores[v], v))
        return cls(algorithm, dict(scores), tuple(ranked[:k]))
