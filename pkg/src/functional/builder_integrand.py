import logging
import re
from enum import Enum
from typing import Any, Dict, Type, Union

from src.functional.base_integrand import IIntegrand
from src.functional.concrete_integrands.builtin_integrands import PowerAlpha, QuadraticGamma
from src.functional.concrete_integrands.expr_integrand import ExprIntegrand

logger = logging.getLogger(__name__)

_FAMILY_RE = re.compile(r"^(power|quadratic):(.+)$")


class IntegrandType(Enum):
    """Типы поддерживаемых интегрантов"""
    POWER = "power"
    QUADRATIC = "quadratic"
    EXPR = "expr"


class IntegrandFactory:
    """
    Фабричный класс для создания интегрантов.
    """

    _integrand_registry: Dict[IntegrandType, Type[IIntegrand]] = {
        IntegrandType.POWER: PowerAlpha,
        IntegrandType.QUADRATIC: QuadraticGamma,
        IntegrandType.EXPR: ExprIntegrand,
    }

    _name_to_type: Dict[str, IntegrandType] = {
        "power": IntegrandType.POWER,
        "power_alpha": IntegrandType.POWER,
        "quadratic": IntegrandType.QUADRATIC,
        "quadratic_gamma": IntegrandType.QUADRATIC,
        "expr": IntegrandType.EXPR,
        "expression": IntegrandType.EXPR,
    }

    @classmethod
    def register_integrand(cls, integrand_type: IntegrandType, integrand_class: Type[IIntegrand]) -> None:
        if not issubclass(integrand_class, IIntegrand):
            raise ValueError(f"Класс {integrand_class} должен реализовывать интерфейс IIntegrand")

        cls._integrand_registry[integrand_type] = integrand_class
        logger.debug(f"integrand type {integrand_type.value} registered")

    @classmethod
    def unregister_integrand(cls, integrand_type: IntegrandType) -> None:
        if integrand_type in cls._integrand_registry:
            del cls._integrand_registry[integrand_type]
            logger.debug(f"integrand type {integrand_type.value} unregistered")

    @classmethod
    def get_available_integrands(cls) -> list:
        return list(cls._integrand_registry.keys())

    @classmethod
    def create_integrand(cls, integrand_type: Union[IntegrandType, str], **params: Any) -> IIntegrand:
        """
        Создает интегрант указанного типа.

        Raises:
            ValueError: Если тип интегранта не поддерживается
        """
        if isinstance(integrand_type, str):
            name = integrand_type.lower()
            if name not in cls._name_to_type:
                raise ValueError(f"Неизвестный тип интегранта: {name}. "
                                 f"Доступные: {list(cls._name_to_type.keys())}")
            integrand_type = cls._name_to_type[name]

        if integrand_type not in cls._integrand_registry:
            raise ValueError(f"Интегрант типа {integrand_type} не зарегистрирован в фабрике")

        return cls._integrand_registry[integrand_type].create_integrand(**params)

    @classmethod
    def create_integrand_from_config(cls, config: Dict[str, Any]) -> IIntegrand:
        """
        Args:
            config: Словарь вида {'type': 'power', 'alpha': 1.5},
                {'type': 'quadratic', 'gamma': 0.005} или {'type': 'expr', 'expr': '(1+v)*p^2'}
        """
        params = {k: v for k, v in config.items() if k != 'type'}
        return cls.create_integrand(config['type'], **params)

    @classmethod
    def from_text(cls, text: str) -> IIntegrand:
        """`power:1.5`, `quadratic:0.005` или выражение от v и p."""
        text = text.strip()
        m = _FAMILY_RE.match(text)
        if m is None:
            return cls.create_integrand(IntegrandType.EXPR, expr=text)
        family, arg = m.group(1), float(m.group(2))
        if family == "power":
            return cls.create_integrand(IntegrandType.POWER, alpha=arg)
        return cls.create_integrand(IntegrandType.QUADRATIC, gamma=arg)
