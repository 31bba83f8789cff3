from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.weightlab.base_weight import ArrayLike, IWeight


class CombineMode(str, Enum):
    MAX = "max"
    SUM = "sum"


class CombinedWeight(IWeight):
    """Поточечный максимум или сумма двух весов."""

    def __init__(self, first: IWeight, second: IWeight, mode: Union[CombineMode, str]):
        self.first = first
        self.second = second
        self.mode = CombineMode(mode)
        lo = max(first.v_range[0], second.v_range[0])
        hi = min(first.v_range[1], second.v_range[1])
        if lo > hi:
            raise ValueError(f"Интервалы уровней не пересекаются: {first.v_range} и {second.v_range}")
        self._v_range = (lo, hi)

    @classmethod
    def create_weight(cls, first: IWeight, second: IWeight, mode: Union[CombineMode, str] = CombineMode.MAX,
                      **_) -> IWeight:
        return cls(first, second, mode)

    def __call__(self, x: ArrayLike, v: ArrayLike) -> np.ndarray:
        a1 = self.first(x, v)
        a2 = self.second(x, v)
        if self.mode is CombineMode.MAX:
            return np.maximum(a1, a2)
        return a1 + a2

    @property
    def v_range(self) -> Tuple[float, float]:
        return self._v_range

    @property
    def x_nodes(self) -> Optional[np.ndarray]:
        nodes = [n for n in (self.first.x_nodes, self.second.x_nodes) if n is not None]
        if not nodes:
            return None
        return np.unique(np.concatenate(nodes))

    @property
    def v_nodes(self) -> Optional[np.ndarray]:
        if self.first.v_nodes is None or self.second.v_nodes is None:
            return None
        return np.unique(np.concatenate((self.first.v_nodes, self.second.v_nodes)))

    @property
    def grid_exact(self) -> bool:
        # сумма сохраняет кусочную линейность на общей сетке, максимум - нет
        return (self.mode is CombineMode.SUM
                and self.first.grid_exact and self.second.grid_exact
                and np.array_equal(self.first.x_nodes, self.second.x_nodes)
                and np.array_equal(self.first.v_nodes, self.second.v_nodes))

    def get_weight_info(self) -> Dict[str, Any]:
        return {
            'type': 'combined',
            'mode': self.mode.value,
            'first': self.first.get_weight_info(),
            'second': self.second.get_weight_info(),
        }
