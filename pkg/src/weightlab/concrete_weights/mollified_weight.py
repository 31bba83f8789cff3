from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.weightlab.base_weight import ArrayLike, IWeight
from src.weightlab.value_set import ValueSet


def rho(d: ArrayLike) -> np.ndarray:
    """rho(d) = min(1, max(0, d))."""
    return np.clip(d, 0.0, 1.0)


class MollifiedWeight(IWeight):
    """b_l(x, v) = a(x, v) * rho(l * dist(v, W) - 1).

    Равен нулю в (1/l)-окрестности W и совпадает с a вне (2/l)-окрестности.
    """

    def __init__(self, base: IWeight, zero_set: ValueSet, ell: int):
        if ell < 1:
            raise ValueError(f"Параметр l должен быть не меньше 1, получено {ell}")
        self.base = base
        self.zero_set = zero_set
        self.ell = int(ell)

    @classmethod
    def create_weight(cls, base: IWeight, zero_set: ValueSet, ell: int, **_) -> IWeight:
        return cls(base, zero_set, ell)

    def factor(self, v: ArrayLike) -> np.ndarray:
        return rho(self.ell * self.zero_set.distance(v) - 1.0)

    def __call__(self, x: ArrayLike, v: ArrayLike) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        return self.base(x, v) * self.factor(v)

    @property
    def v_range(self) -> Tuple[float, float]:
        return self.base.v_range

    @property
    def x_nodes(self) -> Optional[np.ndarray]:
        return self.base.x_nodes

    def get_weight_info(self) -> Dict[str, Any]:
        return {
            'type': 'mollified',
            'ell': self.ell,
            'zero_set': self.zero_set.to_dict(),
            'base': self.base.get_weight_info(),
        }
