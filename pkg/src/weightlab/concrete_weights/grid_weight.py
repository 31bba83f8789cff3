import csv
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.errors import NegativeWeight
from src.helpers import readonly, uniform_nodes
from src.weightlab.base_weight import ArrayLike, IWeight

logger = logging.getLogger(__name__)

NODE_TOL = 1e-12


class GridWeight(IWeight):
    """Сеточный вес: кусочно-линеен по x на узлах -1 + 2i/k (k чётное)
    и линеен по v между соседними строками v_samples (билинейные ячейки).

    Вне [v_samples[0], v_samples[-1]] значение продолжается постоянным.
    """

    def __init__(self, values: np.ndarray, v_samples: Optional[np.ndarray] = None,
                 v_range: Optional[Tuple[float, float]] = None):
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        if values.shape[1] < 3 or (values.shape[1] - 1) % 2:
            raise ValueError(f"Нужно k+1 узлов по x с чётным k >= 2, получено {values.shape[1]}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Значения сеточного веса должны быть конечными")
        if np.any(values < 0.0):
            r, c = np.argwhere(values < 0.0)[0]
            raise NegativeWeight(f"Сеточный вес отрицателен в узле ({r}, {c}): {values[r, c]!r}")

        if v_samples is None:
            v_samples = np.zeros(1) if values.shape[0] == 1 else np.linspace(0.0, 1.0, values.shape[0])
        v_samples = np.asarray(v_samples, dtype=np.float64)
        if v_samples.size != values.shape[0]:
            raise ValueError(f"Число строк ({values.shape[0]}) не совпадает с числом уровней ({v_samples.size})")
        if np.any(np.diff(v_samples) <= 0.0):
            raise ValueError("Уровни сеточного веса должны строго возрастать")

        self.k = values.shape[1] - 1
        self.values = readonly(values)
        self._x_nodes = readonly(uniform_nodes(self.k))
        self._v_nodes = readonly(v_samples)
        if v_range is None:
            v_range = (float(v_samples[0]), float(v_samples[-1]))
        self._v_range = (float(v_range[0]), float(v_range[1]))

    @classmethod
    def create_weight(cls, values: np.ndarray, v_samples: Optional[np.ndarray] = None,
                      v_range: Optional[Tuple[float, float]] = None, **_) -> IWeight:
        return cls(values, v_samples, v_range)

    @classmethod
    def from_nodes(cls, x_nodes: np.ndarray, values: np.ndarray, v_samples: Optional[np.ndarray] = None,
                   v_range: Optional[Tuple[float, float]] = None) -> "GridWeight":
        """Проверяет, что x_nodes - равномерная сетка -1 + 2i/k с чётным k."""
        x_nodes = np.asarray(x_nodes, dtype=np.float64)
        k = x_nodes.size - 1
        if k < 2 or k % 2:
            raise ValueError(f"Число отрезков сетки по x должно быть чётным и не меньше 2, получено {k}")
        if np.max(np.abs(x_nodes - uniform_nodes(k))) > NODE_TOL:
            raise ValueError("Узлы по x должны быть равномерными: -1 + 2i/k")
        return cls(values, v_samples, v_range)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "GridWeight":
        """CSV: первая строка - узлы по x (первая ячейка - подпись), первый столбец - уровни v."""
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Файл сеточного веса не найден: {path}")
        with path.open(newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
        if len(rows) < 2:
            raise ValueError(f"В {path} нужна строка узлов и хотя бы одна строка значений")

        x_nodes = np.array([float(c) for c in rows[0][1:]])
        v_samples = np.array([float(r[0]) for r in rows[1:]])
        values = np.array([[float(c) for c in r[1:]] for r in rows[1:]])
        logger.debug(f"grid weight {path}: {values.shape[0]} v-samples x {values.shape[1]} x-nodes")
        return cls.from_nodes(x_nodes, values, v_samples)

    def __call__(self, x: ArrayLike, v: ArrayLike) -> np.ndarray:
        x, v = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(v, dtype=np.float64))
        shape = x.shape
        x, v = x.ravel(), v.ravel()

        i = np.clip(np.searchsorted(self._x_nodes, x, side="right") - 1, 0, self.k - 1)
        wx = np.clip((x - self._x_nodes[i]) / (self._x_nodes[i + 1] - self._x_nodes[i]), 0.0, 1.0)

        def row(j):
            return self.values[j, i] * (1.0 - wx) + self.values[j, i + 1] * wx

        if self._v_nodes.size == 1:
            return row(np.zeros_like(i)).reshape(shape)

        j = np.clip(np.searchsorted(self._v_nodes, v, side="right") - 1, 0, self._v_nodes.size - 2)
        wv = np.clip((v - self._v_nodes[j]) / (self._v_nodes[j + 1] - self._v_nodes[j]), 0.0, 1.0)
        return (row(j) * (1.0 - wv) + row(j + 1) * wv).reshape(shape)

    @property
    def v_range(self) -> Tuple[float, float]:
        return self._v_range

    @property
    def x_nodes(self) -> np.ndarray:
        return self._x_nodes

    @property
    def v_nodes(self) -> np.ndarray:
        return self._v_nodes

    @property
    def grid_exact(self) -> bool:
        return True

    def get_weight_info(self) -> Dict[str, Any]:
        return {
            'type': 'grid',
            'k': self.k,
            'v_samples': self._v_nodes.tolist(),
            'v_range': list(self._v_range),
        }
