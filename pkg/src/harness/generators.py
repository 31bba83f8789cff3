"""Воспроизводимая генерация экземпляров (u, a, F) для пакетных проверок.

Генератор случайных чисел - PCG64; каждый экземпляр получает собственный
поток из SeedSequence(seed).spawn(count), поэтому экземпляр i не зависит
от порядка вычисления остальных и от числа потоков.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from src.constructs.counterexamples import (
    Counterexample,
    CounterexampleKind,
    CounterexampleSpec,
    build_asymmetry_counterexample,
    build_nonconcavity_counterexample,
    build_symmetric_counterexample,
)
from src.errors import GeneratorStall
from src.functional.base_integrand import IIntegrand
from src.functional.concrete_integrands.builtin_integrands import PowerAlpha, QuadraticGamma
from src.functional.concrete_integrands.expr_integrand import ExprIntegrand
from src.plcore.piecewise import PiecewiseLinear
from src.plcore.rearrangement import RearrangementMode
from src.weightlab.base_weight import IWeight
from src.weightlab.concrete_weights.combined_weight import CombineMode
from src.weightlab.concrete_weights.expr_weight import ExprWeight
from src.weightlab.concrete_weights.grid_weight import GridWeight
from src.weightlab.conditions import check_admissible, check_symmetric_condition
from src.weightlab.lemmas import combine_weights

logger = logging.getLogger(__name__)

MAX_STALL = 1000
EXPR_INTEGRANDS = ("(1+v)*p^2", "sqrt(1 + p^2) + v*p")


class Family(str, Enum):
    ADMISSIBLE = "admissible"
    VIOLATING = "violating"
    CONSTRUCTED = "constructed"
    MIXED = "mixed"


class Expect(str, Enum):
    HOLDS = "holds"
    VIOLATION = "violation"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SweepConfig:
    """Параметры пакетной проверки.

    Одинаковая конфигурация даёт одинаковый поток экземпляров.
    """
    seed: int = 42
    count: int = 100
    mode: RearrangementMode = RearrangementMode.MONOTONE
    family: Family = Family.ADMISSIBLE
    breakpoints: Tuple[int, int] = (2, 64)
    values: Tuple[float, float] = (0.0, 1.0)
    plateau_prob: float = 0.3
    tolerance: float = 1e-8
    quad_tol: float = 1e-10
    threads: Optional[int] = None
    resolution: Tuple[int, int] = (65, 17)

    def __post_init__(self):
        object.__setattr__(self, "mode", RearrangementMode(self.mode))
        object.__setattr__(self, "family", Family(self.family))
        if self.count < 1:
            raise ValueError(f"Число экземпляров должно быть не меньше 1, получено {self.count}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"Зерно должно быть 64-битным неотрицательным целым, получено {self.seed}")
        lo, hi = self.breakpoints
        if not 2 <= lo <= hi:
            raise ValueError(f"Некорректный диапазон числа узлов: {self.breakpoints}")
        v_lo, v_hi = self.values
        if not 0.0 <= v_lo < v_hi:
            raise ValueError(f"Некорректный диапазон значений: {self.values}")
        if not 0.0 <= self.plateau_prob <= 1.0:
            raise ValueError(f"Вероятность площадки должна лежать в [0, 1], получено {self.plateau_prob}")
        if not self.tolerance > 0.0 or not self.quad_tol > 0.0:
            raise ValueError("Допуски должны быть положительными")
        if self.threads is not None and self.threads < 1:
            raise ValueError(f"Число потоков должно быть не меньше 1, получено {self.threads}")

    def to_dict(self) -> dict:
        return {
            'seed': self.seed,
            'count': self.count,
            'mode': self.mode.value,
            'family': self.family.value,
            'breakpoints': list(self.breakpoints),
            'values': list(self.values),
            'plateau_prob': self.plateau_prob,
            'tolerance': self.tolerance,
            'quad_tol': self.quad_tol,
            'resolution': list(self.resolution),
        }


@dataclass(frozen=True, eq=False)
class Instance:
    index: int
    u: PiecewiseLinear
    weight: IWeight
    integrand: IIntegrand
    family: str
    expect: Expect
    mode: RearrangementMode
    label: str

    def to_dict(self) -> dict:
        return {
            'index': self.index,
            'family': self.family,
            'expect': self.expect.value,
            'mode': self.mode.value,
            'weight': self.label,
            'integrand': self.integrand.to_text(),
            'u': self.u.to_literal(),
        }


def instance_rngs(seed: int, count: int):
    """Независимые генераторы PCG64 для каждого экземпляра."""
    return [np.random.Generator(np.random.PCG64(child)) for child in np.random.SeedSequence(seed).spawn(count)]


def random_pl(rng: np.random.Generator, cfg: SweepConfig, pinned_ends: bool = False) -> PiecewiseLinear:
    """Случайная неотрицательная PL-функция на [-1, 1]; каждый отрезок с вероятностью
    plateau_prob делается площадкой. pinned_ends даёт u(-1) = u(1)."""
    n = int(rng.integers(cfg.breakpoints[0], cfg.breakpoints[1] + 1))
    inner = np.unique(rng.uniform(-1.0, 1.0, size=n - 2))
    inner = inner[(inner > -1.0) & (inner < 1.0)]
    xs = np.concatenate(([-1.0], inner, [1.0]))
    ys = rng.uniform(cfg.values[0], cfg.values[1], size=xs.size)
    flat = rng.random(xs.size - 1) < cfg.plateau_prob
    for i in np.flatnonzero(flat).tolist():
        ys[i + 1] = ys[i]
    if pinned_ends:
        ys[-1] = ys[0]
    return PiecewiseLinear(xs, ys)


def _v_samples(cfg: SweepConfig, rows: int) -> np.ndarray:
    return np.array([cfg.values[0]]) if rows == 1 else np.linspace(cfg.values[0], cfg.values[1], rows)


def _even_profile(rng: np.random.Generator, half: int, concave: bool) -> np.ndarray:
    """Чётный профиль по узлам -1 + 2i/k, k = 2 half.

    concave: на [-1, 0] возрастает с убывающими наклонами,
    иначе на [0, 1] возрастает с возрастающими наклонами.
    """
    slopes = np.sort(rng.uniform(0.0, 2.0, size=half))
    base = rng.uniform(0.0, 0.5)
    step = 1.0 / half
    if concave:
        left = base + np.concatenate(([0.0], np.cumsum(slopes[::-1] * step)))
        return np.concatenate((left, left[-2::-1]))
    right = base + np.concatenate(([0.0], np.cumsum(slopes * step)))
    return np.concatenate((right[:0:-1], right))


def random_even_grid(rng: np.random.Generator, cfg: SweepConfig, concave: bool = True) -> GridWeight:
    half = int(rng.choice([1, 2, 4, 8]))
    rows = int(rng.integers(1, 4))
    values = np.stack([_even_profile(rng, half, concave) for _ in range(rows)])
    return GridWeight(values, _v_samples(cfg, rows), cfg.values)


def _admissible_candidate(rng: np.random.Generator, cfg: SweepConfig) -> Tuple[IWeight, str]:
    pick = int(rng.integers(4))
    if pick == 0:
        a = random_even_grid(rng, cfg)
        return a, f"grid(k={a.k}, rows={a.values.shape[0]})"
    if pick == 1:
        mode = CombineMode.MAX if rng.random() < 0.5 else CombineMode.SUM
        return combine_weights(random_even_grid(rng, cfg), random_even_grid(rng, cfg), mode), f"{mode.value}(grid, grid)"
    if pick == 2:
        c, d = rng.uniform(0.1, 2.0), rng.uniform(0.0, 1.0)
        text = f"{c!r}*(1 - abs(x)) + {d!r}"
        return ExprWeight(text, cfg.values), text
    text = repr(float(rng.uniform(0.1, 2.0)))
    return ExprWeight(text, cfg.values), text


def _symmetric_candidate(rng: np.random.Generator, cfg: SweepConfig) -> Tuple[IWeight, str]:
    pick = int(rng.integers(4))
    if pick == 0:
        return ExprWeight("x^2", cfg.values), "x^2"
    if pick == 1:
        text = repr(float(rng.uniform(0.1, 2.0)))
        return ExprWeight(text, cfg.values), text
    if pick == 2:
        return ExprWeight("1 + x^2", cfg.values), "1 + x^2"
    a = random_even_grid(rng, cfg, concave=False)
    return a, f"convex grid(k={a.k}, rows={a.values.shape[0]})"


def _violating_candidate(rng: np.random.Generator, cfg: SweepConfig) -> Tuple[IWeight, str]:
    pick = int(rng.integers(4))
    if pick < 3:
        text = ("x^2", "abs(x)", "1 + x/2")[pick]
        return ExprWeight(text, cfg.values), text
    k = int(rng.choice([2, 4, 8]))
    values = rng.uniform(0.0, 2.0, size=(1, k + 1))
    return GridWeight(values, v_range=cfg.values), f"random grid(k={k})"


def random_admissible_weight(rng: np.random.Generator, cfg: SweepConfig,
                             mode: RearrangementMode) -> Tuple[IWeight, str]:
    """Случайный допустимый вес, перепроверенный на сетке cfg.resolution.

    Raises:
        GeneratorStall: Если MAX_STALL кандидатов подряд не прошли проверку.
    """
    nx, nv = cfg.resolution
    for attempt in range(MAX_STALL):
        if mode is RearrangementMode.SYMMETRIC:
            a, label = _symmetric_candidate(rng, cfg)
            ok = check_symmetric_condition(a, nx, nv).symmetric_admissible
        else:
            a, label = _admissible_candidate(rng, cfg)
            ok = check_admissible(a, nx, nv).admissible
        if ok:
            return a, label
        logger.debug(f"rejected candidate weight {label} (attempt {attempt + 1})")
    raise GeneratorStall(f"{MAX_STALL} кандидатов подряд не прошли проверку допустимости")


def random_integrand(rng: np.random.Generator) -> IIntegrand:
    pick = int(rng.integers(4))
    if pick == 0:
        return PowerAlpha(float(rng.uniform(1.0, 3.0)))
    if pick == 1:
        return QuadraticGamma(float(rng.uniform(0.0, 1.0)))
    return ExprIntegrand(EXPR_INTEGRANDS[pick - 2])


@lru_cache(maxsize=None)
def constructed_counterexample(kind: CounterexampleKind) -> Tuple[Counterexample, IWeight, str]:
    """Три эталонных контрпримера; строятся один раз на процесс."""
    kind = CounterexampleKind(kind)
    if kind is CounterexampleKind.ASYMMETRY:
        a = ExprWeight("1 + x/2", (0.0, 1.0))
        return build_asymmetry_counterexample(a, x_bar=-0.5, v_bar=0.0, eps=0.1), a, "1 + x/2"
    if kind is CounterexampleKind.NONCONCAVITY:
        a = ExprWeight("x^2", (0.0, 1.0))
        spec = CounterexampleSpec(kind, eps=0.1, s=0.4, t=0.6, delta=0.1)
        return build_nonconcavity_counterexample(a, spec, 1.15), a, "x^2"
    a = ExprWeight("1 - abs(x)", (0.0, 1.0))
    spec = CounterexampleSpec(kind, eps=0.05, s=0.8, t=1.0, delta=0.1, A=1.0)
    return build_symmetric_counterexample(a, spec), a, "1 - abs(x)"


def make_instance(index: int, rng: np.random.Generator, cfg: SweepConfig) -> Instance:
    family = cfg.family
    if family is Family.MIXED:
        family = (Family.ADMISSIBLE, Family.VIOLATING, Family.CONSTRUCTED)[int(rng.integers(3))]

    if family is Family.CONSTRUCTED:
        kind = list(CounterexampleKind)[int(rng.integers(len(CounterexampleKind)))]
        ce, a, label = constructed_counterexample(kind)
        return Instance(index, ce.u, a, ce.F, family.value, Expect.VIOLATION,
                        RearrangementMode(ce.mode), f"{kind.value}: {label}")

    symmetric = cfg.mode is RearrangementMode.SYMMETRIC
    if family is Family.ADMISSIBLE:
        a, label = random_admissible_weight(rng, cfg, cfg.mode)
        expect = Expect.HOLDS
    else:
        a, label = _violating_candidate(rng, cfg)
        expect = Expect.UNKNOWN
    u = random_pl(rng, cfg, pinned_ends=symmetric)
    return Instance(index, u, a, random_integrand(rng), family.value, expect, cfg.mode, label)


def generate_instances(cfg: SweepConfig) -> Iterator[Instance]:
    """Поток экземпляров в порядке индексов."""
    for index, rng in enumerate(instance_rngs(cfg.seed, cfg.count)):
        yield make_instance(index, rng, cfg)
