from typing import Any, Dict

import numpy as np

from src.functional.base_integrand import ArrayLike, IIntegrand


class PowerAlpha(IIntegrand):
    """F(v, p) = p^alpha, alpha >= 1."""

    def __init__(self, alpha: float):
        alpha = float(alpha)
        if not alpha >= 1.0:
            raise ValueError(f"Показатель alpha должен быть >= 1, получено {alpha}")
        self.alpha = alpha

    @classmethod
    def create_integrand(cls, alpha: float, **_) -> IIntegrand:
        return cls(alpha)

    def __call__(self, v: ArrayLike, p: ArrayLike) -> np.ndarray:
        v, p = np.broadcast_arrays(np.asarray(v, dtype=np.float64), np.asarray(p, dtype=np.float64))
        return np.power(p, self.alpha)

    @property
    def vanishes_at_zero(self) -> bool:
        return True

    def to_text(self) -> str:
        return f"p^{self.alpha!r}"

    def get_integrand_info(self) -> Dict[str, Any]:
        return {'type': 'power', 'alpha': self.alpha}


class QuadraticGamma(IIntegrand):
    """F(v, p) = p + gamma p^2, gamma >= 0."""

    def __init__(self, gamma: float):
        gamma = float(gamma)
        if not gamma >= 0.0:
            raise ValueError(f"Коэффициент gamma должен быть >= 0, получено {gamma}")
        self.gamma = gamma

    @classmethod
    def create_integrand(cls, gamma: float, **_) -> IIntegrand:
        return cls(gamma)

    def __call__(self, v: ArrayLike, p: ArrayLike) -> np.ndarray:
        v, p = np.broadcast_arrays(np.asarray(v, dtype=np.float64), np.asarray(p, dtype=np.float64))
        return p + self.gamma * p * p

    @property
    def vanishes_at_zero(self) -> bool:
        return True

    def to_text(self) -> str:
        return f"p + {self.gamma!r}*p^2"

    def get_integrand_info(self) -> Dict[str, Any]:
        return {'type': 'quadratic', 'gamma': self.gamma}
