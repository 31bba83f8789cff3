from typing import Any, Optional


class RearrangementLabError(Exception):
    """Базовое исключение библиотеки."""


class NegativeFunctionError(RearrangementLabError, ValueError):
    """Функция принимает отрицательные значения там, где требуется u >= 0."""


class IrregularLevel(RearrangementLabError, ValueError):
    """Уровень совпадает с образом узла или с уровнем площадки."""


class ExprSyntaxError(RearrangementLabError, ValueError):
    """Синтаксическая ошибка в выражении.

    Attributes:
        offset (int): Байтовое смещение ошибки во входной строке.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifier(RearrangementLabError, ValueError):
    pass


class ArityError(RearrangementLabError, ValueError):
    pass


class UnboundVariable(RearrangementLabError, ValueError):
    pass


class DomainError(RearrangementLabError, ValueError):
    """Выражение вычисляется вне области определения (log(0), 0^-1 и т.п.)."""


class NegativeWeight(RearrangementLabError, ValueError):
    pass


class EmptyU(RearrangementLabError, ValueError):
    """Вес тождественно равен нулю на всех просмотренных уровнях."""


class NonConvergent(RearrangementLabError, RuntimeError):
    pass


class PreconditionFailed(RearrangementLabError, ValueError):
    """Условие построения контрпримера нарушено.

    Attributes:
        witness (dict): Конкретная точка, в которой строгое неравенство не выполнено.
    """

    def __init__(self, message: str, witness: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}


class InfeasibleSpec(RearrangementLabError, ValueError):
    pass


class AlphaOutOfRange(RearrangementLabError, ValueError):
    pass


class DegenerateBound(RearrangementLabError, ValueError):
    pass


class ThresholdTooSmall(RearrangementLabError, ValueError):
    pass


class GeneratorStall(RearrangementLabError, RuntimeError):
    pass


class ConditionNotPreserved(RearrangementLabError, RuntimeError):
    """Интерполянт допустимого веса не прошёл точную проверку по узлам.

    Attributes:
        witness (dict): Узловая точка нарушения у интерполянта.
    """

    def __init__(self, message: str, witness: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}
