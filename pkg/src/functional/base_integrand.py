from abc import ABC, abstractmethod
from typing import Any, Dict, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


class IIntegrand(ABC):
    """
    Базовый интерфейс интегранта F(v, p): непрерывен, выпуклый и
    неубывающий по p при каждом v >= 0.
    """

    @abstractmethod
    def __call__(self, v: ArrayLike, p: ArrayLike) -> np.ndarray:
        """
        Значения F в точках (v, p), векторизовано.

        Args:
            v: Значение функции u(x)
            p: Взвешенный модуль производной a(x, u(x)) |u'(x)|
        """
        pass

    @property
    def vanishes_at_zero(self) -> bool:
        """True, если заранее известно, что F(v, 0) = 0 при всех v."""
        return False

    @abstractmethod
    def to_text(self) -> str:
        """Запись интегранта в виде выражения от v и p."""
        pass

    @abstractmethod
    def get_integrand_info(self) -> Dict[str, Any]:
        pass
