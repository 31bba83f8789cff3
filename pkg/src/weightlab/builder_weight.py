import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Tuple, Type, Union

from src.weightlab.base_weight import IWeight
from src.weightlab.concrete_weights.combined_weight import CombinedWeight
from src.weightlab.concrete_weights.expr_weight import ExprWeight
from src.weightlab.concrete_weights.grid_weight import GridWeight
from src.weightlab.concrete_weights.mollified_weight import MollifiedWeight

logger = logging.getLogger(__name__)

GRID_PREFIX = "grid:@"


class WeightType(Enum):
    """Типы поддерживаемых весов"""
    EXPR = "expr"
    GRID = "grid"
    COMBINED = "combined"
    MOLLIFIED = "mollified"


class WeightFactory:
    """
    Фабричный класс для создания весов.
    """

    # Реестр доступных весов
    _weight_registry: Dict[WeightType, Type[IWeight]] = {
        WeightType.EXPR: ExprWeight,
        WeightType.GRID: GridWeight,
        WeightType.COMBINED: CombinedWeight,
        WeightType.MOLLIFIED: MollifiedWeight,
    }

    # Сопоставление строковых имен с типами весов
    _name_to_type: Dict[str, WeightType] = {
        "expr": WeightType.EXPR,
        "expression": WeightType.EXPR,
        "grid": WeightType.GRID,
        "combined": WeightType.COMBINED,
        "max": WeightType.COMBINED,
        "sum": WeightType.COMBINED,
        "mollified": WeightType.MOLLIFIED,
    }

    @classmethod
    def register_weight(cls, weight_type: WeightType, weight_class: Type[IWeight]) -> None:
        """
        Регистрирует новый тип веса в фабрике.

        Args:
            weight_type: Тип веса
            weight_class: Класс веса, реализующий IWeight
        """
        if not issubclass(weight_class, IWeight):
            raise ValueError(f"Класс {weight_class} должен реализовывать интерфейс IWeight")

        cls._weight_registry[weight_type] = weight_class
        logger.debug(f"weight type {weight_type.value} registered")

    @classmethod
    def unregister_weight(cls, weight_type: WeightType) -> None:
        if weight_type in cls._weight_registry:
            del cls._weight_registry[weight_type]
            logger.debug(f"weight type {weight_type.value} unregistered")

    @classmethod
    def get_available_weights(cls) -> list:
        return list(cls._weight_registry.keys())

    @classmethod
    def create_weight(cls, weight_type: Union[WeightType, str], **params: Any) -> IWeight:
        """
        Создает вес указанного типа.

        Args:
            weight_type: Тип веса (WeightType или строковое имя)
            **params: Параметры конструктора конкретного веса

        Returns:
            Экземпляр веса, реализующий IWeight

        Raises:
            ValueError: Если тип веса не поддерживается
        """
        if isinstance(weight_type, str):
            name = weight_type.lower()
            if name not in cls._name_to_type:
                raise ValueError(f"Неизвестный тип веса: {name}. "
                                 f"Доступные: {list(cls._name_to_type.keys())}")
            if name in ("max", "sum"):
                params.setdefault("mode", name)
            weight_type = cls._name_to_type[name]

        if weight_type not in cls._weight_registry:
            raise ValueError(f"Вес типа {weight_type} не зарегистрирован в фабрике")

        weight_class = cls._weight_registry[weight_type]
        return weight_class.create_weight(**params)

    @classmethod
    def create_weight_from_config(cls, config: Dict[str, Any]) -> IWeight:
        """
        Создает вес по конфигурационному словарю.

        Args:
            config: Словарь вида {
                'type': 'expr' | 'grid' | 'max' | 'sum' | 'mollified',
                'expr': '1 - abs(x)',          (для expr)
                'path': 'weight.csv',          (для grid)
                'v_range': [0.0, 1.0]          (опционально)
            }

        Returns:
            Экземпляр веса
        """
        params = {k: val for k, val in config.items() if k != 'type'}
        if 'v_range' in params:
            params['v_range'] = tuple(params['v_range'])
        if config['type'] == 'grid' and 'path' in params:
            return GridWeight.from_csv(params['path'])
        return cls.create_weight(config['type'], **params)

    @classmethod
    def from_text(cls, text: str, v_range: Tuple[float, float] = (0.0, 1.0)) -> IWeight:
        """Строка командной строки: выражение от (x, v) или `grid:@file.csv`."""
        text = text.strip()
        if text.startswith(GRID_PREFIX):
            return GridWeight.from_csv(Path(text[len(GRID_PREFIX):]))
        return cls.create_weight(WeightType.EXPR, expr=text, v_range=v_range)
