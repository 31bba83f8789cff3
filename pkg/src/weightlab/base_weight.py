from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


class IWeight(ABC):
    """
    Базовый интерфейс весовой функции a(x, v) >= 0 на [-1, 1] x vRange.
    Вычисление векторизовано: x и v транслируются по правилам numpy.
    """

    @abstractmethod
    def __call__(self, x: ArrayLike, v: ArrayLike) -> np.ndarray:
        """
        Значения веса в точках (x, v).

        Args:
            x: Абсциссы из [-1, 1]
            v: Уровни значений

        Returns:
            Массив значений формы broadcast(x, v)
        """
        pass

    @property
    @abstractmethod
    def v_range(self) -> Tuple[float, float]:
        """Интервал уровней [v_min, v_max], на котором вес исследуется."""
        pass

    @property
    def x_nodes(self) -> Optional[np.ndarray]:
        """
        Абсциссы изломов по x (для сеточных весов), иначе None.
        Квадратура разбивает отрезки интегрирования в этих точках.
        """
        return None

    @property
    def v_nodes(self) -> Optional[np.ndarray]:
        return None

    @property
    def grid_exact(self) -> bool:
        """
        True, если вес кусочно-линеен по x на равномерной сетке с чётным k
        и кусочно-линеен по v между v_nodes; тогда проверка условий в узлах точна.
        """
        return False

    @abstractmethod
    def get_weight_info(self) -> Dict[str, Any]:
        """
        Возвращает описание веса для отчётов.

        Returns:
            Словарь с типом веса и его параметрами
        """
        pass
