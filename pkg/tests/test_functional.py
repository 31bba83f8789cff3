import numpy as np
import pytest

from src.errors import IrregularLevel, NegativeFunctionError, NegativeWeight, NonConvergent, UnboundVariable
from src.functional.builder_integrand import IntegrandFactory, IntegrandType
from src.functional.concrete_integrands.builtin_integrands import PowerAlpha, QuadraticGamma
from src.functional.concrete_integrands.expr_integrand import ExprIntegrand
from src.functional.functional import (
    certify_integrand,
    evaluate_functional,
    jensen_level_check,
    slope_bound,
    verify_rearrangement,
)
from src.functional.quadrature import integrate
from src.plcore.piecewise import PiecewiseLinear
from src.weightlab.concrete_weights.expr_weight import ExprWeight


def test_integrate_polynomial():
    res = integrate(lambda x: x * x, np.array([0.0, 1.0]))
    assert res.value == pytest.approx(1.0 / 3.0, abs=1e-14)
    assert res.error <= 1e-10
    assert res.intervals == 1


def test_integrate_kink_on_breakpoint():
    res = integrate(np.abs, np.array([-1.0, 0.0, 1.0]))
    assert res.value == pytest.approx(1.0, abs=1e-14)


def test_integrate_skips_empty_intervals():
    res = integrate(lambda x: np.ones_like(x), np.array([0.0, 0.0, 2.0]))
    assert res.value == pytest.approx(2.0)
    assert res.intervals == 1


def test_integrate_depth_limit():
    with pytest.raises(NonConvergent):
        integrate(lambda x: np.sign(x - 1.0 / 3.0), np.array([0.0, 1.0]), max_depth=3)


def test_integrate_non_finite():
    with pytest.raises(NonConvergent):
        integrate(lambda x: np.where(x > 0.5, np.inf, 1.0), np.array([0.0, 1.0]))


def test_integrate_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        integrate(np.abs, np.array([0.0, 1.0]), tol=0.0)


def test_integrate_reuses_gauss_nodes():
    sizes = []

    def fn(x):
        sizes.append(x.size)
        return x ** 12

    res = integrate(fn, np.array([0.0, 1.0]))
    # одно вычисление в 15 точках: узлы G7 входят в K15
    assert sizes == [15]
    assert res.value == pytest.approx(1.0 / 13.0, abs=1e-15)
    # G7 точна до степени 13, поэтому |K15 - G7| на уровне округления
    assert res.error <= 1e-14


@pytest.mark.parametrize("fn, breakpoints", [
    (lambda x: np.sqrt(x), [0.0, 1.0]),
    (lambda x: 1.0 / (1.0 + 25.0 * x * x), [-1.0, 1.0]),
    (lambda x: np.abs(np.sin(7.0 * x)) ** 1.5, [0.0, 2.0]),
], ids=["sqrt", "runge", "abs-sin"])
def test_integrate_halving_tolerance(fn, breakpoints):
    coarse = integrate(fn, np.array(breakpoints), tol=1e-6)
    fine = integrate(fn, np.array(breakpoints), tol=5e-7)
    assert abs(fine.value - coarse.value) <= coarse.error


def test_factory_from_text():
    power = IntegrandFactory.from_text("power:1.5")
    assert isinstance(power, PowerAlpha) and power.alpha == 1.5
    quad = IntegrandFactory.from_text(" quadratic:0.005 ")
    assert isinstance(quad, QuadraticGamma) and quad.gamma == 0.005
    expr = IntegrandFactory.from_text("(1+v)*p^2")
    assert isinstance(expr, ExprIntegrand)
    assert expr(1.0, 2.0) == pytest.approx(8.0)
    assert IntegrandType.POWER in IntegrandFactory.get_available_integrands()


def test_integrand_validation():
    with pytest.raises(ValueError):
        PowerAlpha(0.5)
    with pytest.raises(ValueError):
        QuadraticGamma(-1.0)
    with pytest.raises(UnboundVariable):
        ExprIntegrand("x + p")
    with pytest.raises(ValueError):
        IntegrandFactory.create_integrand("cubic")


def test_total_variation_functional(tent):
    value = evaluate_functional(PowerAlpha(1.0), ExprWeight("1"), tent)
    assert value.value == pytest.approx(2.0, abs=1e-12)
    assert value.baseline == 0.0
    assert value.normalized == pytest.approx(2.0, abs=1e-12)


def test_weighted_functional(tent, ramp, hat_weight):
    # int (1 - |x|)^2 dx = 2/3 и четверть этого для наклона 1/2
    assert evaluate_functional(PowerAlpha(2.0), hat_weight, tent).value == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert evaluate_functional(PowerAlpha(2.0), hat_weight, ramp).value == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_baseline_counts_plateaus():
    u = PiecewiseLinear.constant(0.5)
    value = evaluate_functional(ExprIntegrand("v + p"), ExprWeight("1"), u)
    assert value.value == pytest.approx(1.0)
    assert value.baseline == pytest.approx(1.0)
    assert value.normalized == pytest.approx(0.0, abs=1e-12)


def test_baseline_split(tent):
    value = evaluate_functional(ExprIntegrand("1 + p"), ExprWeight("1"), tent)
    assert value.value == pytest.approx(4.0)
    assert value.baseline == pytest.approx(2.0)
    assert value.normalized == pytest.approx(2.0)


def test_functional_rejects_negative_u():
    u = PiecewiseLinear.from_points([(-1.0, 0.5), (1.0, -0.5)])
    with pytest.raises(NegativeFunctionError):
        evaluate_functional(PowerAlpha(1.0), ExprWeight("1"), u)


def test_functional_rejects_negative_weight(tent):
    with pytest.raises(NegativeWeight):
        evaluate_functional(ExprIntegrand("p"), ExprWeight("x - 2"), tent)
    # отрицателен только на части отрезка
    with pytest.raises(NegativeWeight):
        evaluate_functional(PowerAlpha(1.0), ExprWeight("x"), tent)
    with pytest.raises(NegativeWeight):
        verify_rearrangement(PowerAlpha(1.0), ExprWeight("x - 2"), tent, check_conditions=False)


def test_slope_bound_samples_inside_segments():
    u = PiecewiseLinear.from_points([(-1.0, 0.0), (1.0, 2.0)])
    # на концах вес нулевой, максимум 4 в середине отрезка
    assert slope_bound(ExprWeight("4 - 4*x^2"), u) == pytest.approx(4.0)
    assert slope_bound(ExprWeight("1"), PiecewiseLinear.constant(0.3)) == 0.0


def test_certificate_uses_interior_slopes():
    u = PiecewiseLinear.from_points([(-1.0, 0.0), (1.0, 2.0)])
    F = ExprIntegrand("min(p, 2)")
    # на [0, 1] F линейна и проходит, излом в p = 2 виден только при p_max = 4
    assert certify_integrand(F, (0.0, 2.0), p_max=1.0).certified
    report = verify_rearrangement(F, ExprWeight("4 - 4*x^2"), u, check_conditions=False)
    assert not report.certificate.convex
    assert not report.guaranteed


def test_certificate():
    assert certify_integrand(ExprIntegrand("sqrt(1 + p^2) + v*p"), (0.0, 1.0)).certified
    concave = certify_integrand(ExprIntegrand("p^0.5"), (0.0, 1.0))
    assert not concave.convex and concave.monotone
    decreasing = certify_integrand(ExprIntegrand("2 - p"), (0.0, 1.0), p_max=1.5)
    assert not decreasing.monotone and not decreasing.certified


def test_verify_monotone_guaranteed(tent, hat_weight):
    report = verify_rearrangement(PowerAlpha(2.0), hat_weight, tent, nx=65, nv=9)
    assert report.I_u == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert report.I_rearranged == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert report.gap == pytest.approx(0.5, abs=1e-12)
    assert report.pinned
    assert report.holds and report.guaranteed
    assert report.to_dict()['conditions']['admissible']


def test_verify_symmetric_mode():
    # пик в -0.5, симметричная перестановка - равнобедренный шатёр
    u = PiecewiseLinear.from_points([(-1.0, 0.0), (-0.5, 1.0), (1.0, 0.0)])
    report = verify_rearrangement(PowerAlpha(2.0), ExprWeight("x^2"), u, "symmetric", nx=65, nv=9)
    assert report.mode == "symmetric"
    assert report.I_rearranged == pytest.approx(0.4, abs=1e-12)
    assert report.I_u == pytest.approx(0.775 + 132.0 / 1440.0, abs=1e-12)
    assert report.holds and report.guaranteed


def test_verify_without_conditions(tent, hat_weight):
    report = verify_rearrangement(PowerAlpha(2.0), hat_weight, tent, check_conditions=False)
    assert report.conditions is None
    assert report.holds
    assert not report.guaranteed
    assert report.to_dict()['conditions'] is None


def test_jensen_equality_on_tent(tent, hat_weight):
    level = jensen_level_check(PowerAlpha(2.0), hat_weight, tent, 0.5)
    assert level.total == pytest.approx(0.5)
    assert level.jensen_bound == pytest.approx(0.5)
    assert level.rearranged_term == pytest.approx(0.5)
    assert level.holds()


def test_jensen_strict_for_uneven_slopes(hat_weight):
    u = PiecewiseLinear.from_points([(-1.0, 0.0), (-0.5, 1.0), (1.0, 0.0)])
    level = jensen_level_check(PowerAlpha(2.0), hat_weight, u, 0.8)
    assert level.total > level.jensen_bound
    assert level.holds()


def test_jensen_irregular_level(plateau_bump, hat_weight):
    with pytest.raises(IrregularLevel):
        jensen_level_check(PowerAlpha(2.0), hat_weight, plateau_bump, 1.0)
