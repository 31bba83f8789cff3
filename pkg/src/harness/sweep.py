import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from src.functional.functional import verify_rearrangement
from src.harness.generators import Expect, SweepConfig, instance_rngs, make_instance

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_DEFAULT_THREADS = 8
RESULT_COLUMNS = (
    "index", "status", "family", "expect", "mode", "weight", "integrand",
    "I_u", "I_rearranged", "gap", "quad_err", "failure", "confirmation", "error",
)


def default_threads() -> int:
    return min(os.cpu_count() or 1, MAX_DEFAULT_THREADS)


@dataclass(frozen=True)
class InstanceResult:
    index: int
    status: str
    family: str
    expect: str
    mode: str
    weight: Optional[str] = None
    integrand: Optional[str] = None
    I_u: Optional[float] = None
    I_rearranged: Optional[float] = None
    gap: Optional[float] = None
    quad_err: Optional[float] = None
    failure: bool = False
    confirmation: bool = False
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            'index': self.index,
            'status': self.status,
            'family': self.family,
            'expect': self.expect,
            'mode': self.mode,
            'weight': self.weight,
            'integrand': self.integrand,
            'I_u': self.I_u,
            'I_rearranged': self.I_rearranged,
            'gap': self.gap,
            'quad_err': self.quad_err,
            'failure': self.failure,
            'confirmation': self.confirmation,
            'error': self.error,
        }


@dataclass(frozen=True)
class SweepReport:
    """Итог пакетной проверки; результаты упорядочены по индексу экземпляра."""
    config: SweepConfig
    results: List[InstanceResult]

    @property
    def failures(self) -> int:
        return sum(r.failure for r in self.results)

    @property
    def confirmations(self) -> int:
        return sum(r.confirmation for r in self.results)

    @property
    def expected_confirmations(self) -> int:
        return sum(r.expect == Expect.VIOLATION.value for r in self.results)

    @property
    def errors(self) -> int:
        return sum(r.status == "error" for r in self.results)

    @property
    def min_gap(self) -> float:
        gaps = [r.gap for r in self.results if r.gap is not None]
        return min(gaps) if gaps else math.nan

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.errors == 0 and self.confirmations == self.expected_confirmations

    def to_dict(self) -> dict:
        return {
            'schema': SCHEMA_VERSION,
            'config': self.config.to_dict(),
            'instances': len(self.results),
            'failures': self.failures,
            'confirmations': self.confirmations,
            'expected_confirmations': self.expected_confirmations,
            'errors': self.errors,
            'min_gap': self.min_gap,
            'passed': self.passed,
            'results': [r.to_dict() for r in self.results],
        }


def run_instance(index: int, rng: np.random.Generator, cfg: SweepConfig) -> InstanceResult:
    """Строит экземпляр index и сравнивает обе стороны неравенства.

    Ошибка в экземпляре не прерывает проверку: она записывается в результат.
    """
    try:
        inst = make_instance(index, rng, cfg)
    except Exception as e:
        logger.exception(f"instance {index}: generation failed: {e}")
        return InstanceResult(index, "error", cfg.family.value, Expect.UNKNOWN.value, cfg.mode.value,
                              error=f"{type(e).__name__}: {e}")

    base = dict(index=index, family=inst.family, expect=inst.expect.value, mode=inst.mode.value,
                weight=inst.label, integrand=inst.integrand.to_text())
    try:
        nx, nv = cfg.resolution
        report = verify_rearrangement(inst.integrand, inst.weight, inst.u, inst.mode, tol=cfg.quad_tol,
                                      check_conditions=False, nx=nx, nv=nv)
    except Exception as e:
        logger.exception(f"instance {index}: verification failed: {e}")
        return InstanceResult(status="error", error=f"{type(e).__name__}: {e}", **base)

    failure = inst.expect is Expect.HOLDS and report.gap < -(report.quad_err + cfg.tolerance)
    confirmation = inst.expect is Expect.VIOLATION and report.gap < -report.quad_err
    if failure:
        logger.warning(f"instance {index}: gap {report.gap!r} below -(quad_err + tol) for {inst.label}")
    return InstanceResult(
        status="ok",
        I_u=report.I_u,
        I_rearranged=report.I_rearranged,
        gap=report.gap,
        quad_err=report.quad_err,
        failure=failure,
        confirmation=confirmation,
        **base,
    )


def sweep(cfg: SweepConfig, progress: bool = True) -> SweepReport:
    """Параллельная проверка cfg.count экземпляров.

    Потоки разделяют только неизменяемые данные; порядок результатов
    определяется индексом, а не временем завершения.
    """
    threads = cfg.threads or default_threads()
    logger.info(f"sweep: {cfg.count} {cfg.family.value} instances, mode={cfg.mode.value}, "
                f"seed={cfg.seed}, threads={threads}")
    rngs = instance_rngs(cfg.seed, cfg.count)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(tqdm(
            pool.map(lambda pair: run_instance(pair[0], pair[1], cfg), enumerate(rngs)),
            total=cfg.count,
            desc="sweep",
            disable=not progress,
        ))

    report = SweepReport(cfg, results)
    logger.info(f"sweep done: failures={report.failures} confirmations={report.confirmations}/"
                f"{report.expected_confirmations} errors={report.errors} min_gap={report.min_gap!r}")
    return report
