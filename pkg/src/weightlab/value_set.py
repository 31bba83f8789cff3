from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ValueSet:
    """Замкнутое множество уровней: конечное объединение отрезков и точек.

    Точка хранится как вырожденный отрезок (c, c).
    """
    intervals: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        cleaned = []
        for lo, hi in self.intervals:
            lo, hi = float(lo), float(hi)
            if lo > hi:
                raise ValueError(f"Некорректный отрезок уровней [{lo}, {hi}]")
            cleaned.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(sorted(cleaned)))

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "ValueSet":
        return cls(tuple((float(p), float(p)) for p in points))

    @classmethod
    def parse(cls, text: str) -> "ValueSet":
        """`0.5,0.7:0.9` - точка 0.5 и отрезок [0.7, 0.9]."""
        intervals = []
        for item in filter(None, (s.strip() for s in text.split(","))):
            lo, _, hi = item.partition(":")
            intervals.append((float(lo), float(hi or lo)))
        return cls(tuple(intervals))

    @property
    def empty(self) -> bool:
        return not self.intervals

    def distance(self, v: ArrayLike) -> np.ndarray:
        """Точное расстояние dist(v, W); для пустого W - бесконечность."""
        v = np.asarray(v, dtype=np.float64)
        out = np.full(v.shape, np.inf)
        for lo, hi in self.intervals:
            out = np.minimum(out, np.maximum(np.maximum(lo - v, v - hi), 0.0))
        return out

    def to_dict(self) -> dict:
        return {'intervals': [list(iv) for iv in self.intervals]}
