"""Сквозные проверки на случайных и эталонных экземплярах в полном объёме."""
import numpy as np
import pytest

from src.approx.lipschitz import convergence_report, lipschitz_approximate
from src.functional.concrete_integrands.builtin_integrands import PowerAlpha
from src.functional.functional import verify_rearrangement
from src.harness.generators import SweepConfig, instance_rngs, random_admissible_weight, random_pl
from src.harness.sweep import sweep
from src.plcore.level_sets import slope_identity
from src.plcore.piecewise import PiecewiseLinear, functions_close, pl_metrics
from src.plcore.rearrangement import RearrangementMode, distribution, monotone_rearrange, symmetric_rearrange
from src.reporting import render_json
from src.weightlab.concrete_weights.combined_weight import CombineMode
from src.weightlab.concrete_weights.expr_weight import ExprWeight
from src.weightlab.conditions import check_admissible
from src.weightlab.lemmas import chain_bound_check, combine_weights, interpolate_weight

CFG = SweepConfig(seed=42, count=1, breakpoints=(2, 64))


def _regular_levels(rng, u: PiecewiseLinear, count: int) -> np.ndarray:
    lo, hi = float(np.min(u.ys)), float(np.max(u.ys))
    ts = rng.uniform(lo, hi, 4 * count)
    ts = ts[~np.isin(ts, u.ys) & (ts > lo) & (ts < hi)]
    return ts[:count]


@pytest.mark.slow
def test_equimeasurable_random_functions():
    for rng in instance_rngs(101, 200):
        u = random_pl(rng, CFG)
        star = monotone_rearrange(u)
        bar = symmetric_rearrange(u)
        ts = rng.uniform(float(np.min(u.ys)), float(np.max(u.ys)), 1000)
        ts = ts[~np.isin(ts, u.ys)]
        m = distribution(u)(ts)
        assert np.max(np.abs(distribution(star)(ts) - m), initial=0.0) <= 1e-12
        assert np.max(np.abs(distribution(bar)(ts) - m), initial=0.0) <= 1e-12
        total = pl_metrics(u).integral
        assert pl_metrics(star).integral == pytest.approx(total, abs=1e-12)
        assert pl_metrics(bar).integral == pytest.approx(total, abs=1e-12)
        assert functions_close(monotone_rearrange(star), star, 1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("F", [PowerAlpha(1.0), PowerAlpha(2.0), PowerAlpha(1.5)], ids=["p", "p2", "p1.5"])
def test_constant_weight_never_gains(F):
    a = ExprWeight("1")
    for rng in instance_rngs(202, 500):
        u = random_pl(rng, CFG)
        report = verify_rearrangement(F, a, u, check_conditions=False)
        assert report.gap >= -1e-9


@pytest.mark.slow
def test_admissible_monotone_sweep():
    report = sweep(SweepConfig(seed=42, count=500, threads=4), progress=False)
    assert report.errors == 0
    assert report.failures == 0


def test_asymmetry_oracle_gap():
    report = verify_rearrangement(PowerAlpha(1.0), ExprWeight("1 + x/2"),
                                  PiecewiseLinear.from_points([(-1.0, 0.0), (-0.6, 0.0), (-0.5, 0.1), (1.0, 0.1)]),
                                  check_conditions=False)
    assert report.gap == pytest.approx(-0.055, abs=1e-6)


@pytest.mark.slow
def test_symmetric_sweep():
    report = sweep(SweepConfig(seed=42, count=200, mode="symmetric", threads=4), progress=False)
    assert report.errors == 0
    assert report.failures == 0


@pytest.mark.slow
def test_sweep_report_is_reproducible():
    cfg = SweepConfig(seed=42, threads=4)
    assert render_json(sweep(cfg, progress=False).to_dict()) == render_json(sweep(cfg, progress=False).to_dict())


@pytest.mark.slow
def test_chain_bound_on_admissible_weights():
    rngs = instance_rngs(303, 1000)
    for i, rng in enumerate(rngs):
        a, label = random_admissible_weight(rng, CFG, RearrangementMode.MONOTONE)
        v = float(rng.uniform(*CFG.values))
        # чётные и нечётные длины поровну
        n = 2 * int(rng.integers(1, 4)) - (i % 2)
        ts = np.sort(rng.uniform(-1.0, 1.0, n))
        bound = chain_bound_check(a, v, ts, tol=1e-9)
        assert bound.in_domain
        assert bound.holds and bound.mirrored_holds, (label, ts.tolist())


@pytest.mark.slow
def test_closure_under_max_and_sum():
    rngs = instance_rngs(404, 400)
    for first, second in zip(rngs[::2], rngs[1::2]):
        a1, _ = random_admissible_weight(first, CFG, RearrangementMode.MONOTONE)
        a2, _ = random_admissible_weight(second, CFG, RearrangementMode.MONOTONE)
        for mode in CombineMode:
            assert check_admissible(combine_weights(a1, a2, mode), 65, 17).admissible


@pytest.mark.slow
@pytest.mark.parametrize("k", [2, 4, 8, 16])
def test_interpolants_pass_exact_check(k):
    for rng in instance_rngs(505 + k, 100):
        a, label = random_admissible_weight(rng, CFG, RearrangementMode.MONOTONE)
        report = check_admissible(interpolate_weight(a, k, nv=5))
        assert report.admissible, label


@pytest.mark.slow
def test_slope_identity_on_random_functions():
    checked = 0
    for rng in instance_rngs(606, 100):
        u = random_pl(rng, CFG)
        if float(np.min(u.ys)) == float(np.max(u.ys)):
            continue
        for v in _regular_levels(rng, u, 20).tolist():
            lhs, rhs = slope_identity(u, v)
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
            checked += 1
    assert checked >= 1800


def _cube_root_profile(n: int) -> PiecewiseLinear:
    return PiecewiseLinear.from_function(lambda x: np.cbrt(np.abs(x)), n)


def test_lipschitz_pipeline_on_cube_root():
    u = _cube_root_profile(10001)
    ladder = [4.0, 8.0, 16.0, 32.0, 64.0]
    report = convergence_report(PowerAlpha(1.0), ExprWeight("1 - abs(x)"), u, ladder)
    assert report.hypothesis_holds
    distances = [row.derivative_l1 for row in report.rows]
    assert all(b <= a + 1e-12 for a, b in zip(distances, distances[1:]))
    errors = [row.relative_error for row in report.rows]
    assert errors[-1] < errors[0]
    # сдвиг на |u(x_h)| - x_h при h = 64 ещё около 0.07
    assert errors[-1] < 0.2
    for h in ladder:
        stage = lipschitz_approximate(u, h, "both")
        assert np.all(stage.phi_h.slopes >= 1.0 - 1e-12)
        # phi_h склеена нечётно, поэтому полный прирост на [-1, 1]
        assert stage.phi_h.ys[-1] - stage.phi_h.ys[0] <= 2.0 + stage.beta_sum + 1e-9
