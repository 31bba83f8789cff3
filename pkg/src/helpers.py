import logging
from typing import Iterable, Tuple

import numpy as np

logger = logging.getLogger(__name__)

DEDUP_TOL = 1e-12


def readonly(values: Iterable[float]) -> np.ndarray:
    """Копия в виде float64-массива, защищённая от записи."""
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def uniform_nodes(k: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Узлы lo + (hi - lo) * i / k, i = 0..k. Концы выставляются точно."""
    nodes = lo + (hi - lo) * np.arange(k + 1, dtype=np.float64) / k
    nodes[0], nodes[-1] = lo, hi
    return nodes


def dedup_breakpoints(xs: np.ndarray, ys: np.ndarray, tol: float = DEDUP_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Сливает узлы, отстоящие друг от друга меньше чем на tol.

    Из каждой группы близких узлов остаётся первый, а из последней группы -
    последний, так что оба конца отрезка сохраняются.

    Args:
        xs (np.ndarray): Неубывающие абсциссы.
        ys (np.ndarray): Значения в узлах.
        tol (float): Порог слияния.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Строго возрастающие абсциссы и значения.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size <= 2:
        return xs.copy(), ys.copy()

    keep = np.ones(xs.size, dtype=bool)
    last = 0
    for i in range(1, xs.size):
        if xs[i] - xs[last] < tol:
            keep[i] = False
        else:
            last = i

    if not keep[-1]:
        # последний узел обязан остаться: он заменяет представителя своей группы
        keep[last] = False
        keep[-1] = True

    merged = int(xs.size - keep.sum())
    if merged:
        logger.debug(f"dedup merged {merged} breakpoint(s) closer than {tol:g}")
    return xs[keep], ys[keep]
