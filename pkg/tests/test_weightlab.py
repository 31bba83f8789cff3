import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import ConditionNotPreserved, EmptyU, NegativeWeight, UnboundVariable
from src.plcore.piecewise import PiecewiseLinear
from src.weightlab import lemmas
from src.weightlab.base_weight import IWeight
from src.weightlab.builder_weight import WeightFactory, WeightType
from src.weightlab.concrete_weights.combined_weight import CombinedWeight, CombineMode
from src.weightlab.concrete_weights.expr_weight import ExprWeight
from src.weightlab.concrete_weights.grid_weight import GridWeight
from src.weightlab.concrete_weights.mollified_weight import MollifiedWeight
from src.weightlab.conditions import EXACT_NODE, GRID_SAMPLED, check_admissible, check_symmetric_condition
from src.weightlab.diagnostics import compute_Dk, lambda_weight, lipschitz_envelope, zero_mollify
from src.weightlab.lemmas import chain_bound_check, combine_weights, interpolate_weight, zero_set_analysis
from src.weightlab.value_set import ValueSet


def test_expr_weight_rejects_p():
    with pytest.raises(UnboundVariable):
        ExprWeight("x + p")


def test_grid_weight_validation():
    with pytest.raises(ValueError):
        GridWeight(np.ones((1, 4)))
    with pytest.raises(NegativeWeight):
        GridWeight(np.array([[1.0, -0.5, 1.0]]))


def test_grid_weight_bilinear():
    a = GridWeight(np.array([[0.0, 1.0, 0.0], [2.0, 3.0, 2.0]]), np.array([0.0, 1.0]))
    assert a(0.5, 0.0) == pytest.approx(0.5)
    assert a(0.0, 0.5) == pytest.approx(2.0)
    assert a(0.5, 0.5) == pytest.approx(1.5)
    # вне диапазона уровней значение продолжается постоянным
    assert a(0.0, 7.0) == pytest.approx(3.0)


def test_grid_weight_from_csv(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("v\\x,-1,0,1\n0,0,1,0\n1,1,2,1\n")
    a = WeightFactory.from_text(f"grid:@{path}")
    assert isinstance(a, GridWeight)
    assert a.k == 2
    assert a(0.0, 1.0) == pytest.approx(2.0)


def test_grid_weight_rejects_nonuniform_nodes(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("v\\x,-1,0.2,1\n0,0,1,0\n")
    with pytest.raises(ValueError):
        GridWeight.from_csv(path)


def test_factory_registry():
    assert WeightType.EXPR in WeightFactory.get_available_weights()
    a = WeightFactory.create_weight_from_config({'type': 'expr', 'expr': '1 - abs(x)', 'v_range': [0, 2]})
    assert a.v_range == (0.0, 2.0)
    with pytest.raises(ValueError):
        WeightFactory.create_weight("tensor")


def test_value_set_distance():
    w = ValueSet.parse("0.5,0.7:0.9")
    assert w.distance(0.5) == 0.0
    assert w.distance(0.8) == 0.0
    assert w.distance(1.0) == pytest.approx(0.1)
    assert w.distance(0.0) == pytest.approx(0.5)
    assert math.isinf(float(ValueSet(()).distance(0.3)))


def test_zero_mollify():
    b = zero_mollify(ExprWeight("1 + x^2"), ValueSet.from_points([0.5]), 4)
    assert isinstance(b, MollifiedWeight)
    assert b(0.0, 0.5) == 0.0
    assert b(0.0, 0.6) == 0.0
    assert b(1.0, 1.0) == pytest.approx(2.0)
    assert b.factor(0.5 + 0.375) == pytest.approx(0.5)


def test_zero_mollify_monotone_in_ell():
    a = ExprWeight("1 + x^2", (0.0, 1.5))
    zeros = ValueSet.from_points([0.5])
    xs = np.linspace(-1.0, 1.0, 21)[None, :]
    vs = np.linspace(0.0, 1.5, 61)[:, None]
    base = np.broadcast_to(a(xs, vs), (61, 21))
    previous = np.zeros_like(base)
    for ell in range(1, 9):
        current = np.broadcast_to(zero_mollify(a, zeros, ell)(xs, vs), base.shape)
        assert np.all(current >= previous)
        assert np.all(current <= base)
        previous = current


def test_hat_weight_is_admissible(hat_weight):
    report = check_admissible(hat_weight, 65, 9)
    assert report.method == GRID_SAMPLED
    assert report.even and report.cond_c and report.admissible
    assert report.cond_c_violation is None


def test_square_weight_violates_condition():
    a = ExprWeight("x^2")
    report = check_admissible(a, 65, 9)
    assert report.even
    assert not report.cond_c and not report.admissible
    point = report.cond_c_violation.point
    s, t, v = point['s'], point['t'], point['v']
    assert a(s, v) + a(t, v) < a(1.0 - t + s, v)
    # классический свидетель
    assert a(0.5, 0.0) + a(0.5, 0.0) < a(1.0, 0.0)


def test_asymmetric_weight_is_not_even():
    report = check_admissible(ExprWeight("1 + x/2"), 65, 9)
    assert not report.even
    assert report.even_violation is not None
    assert not report.admissible


def test_pinned_admissible_without_evenness():
    # убывающий вес: a(s) + a(t) >= a(1 - t + s) при s <= t, но не чётный
    report = check_admissible(ExprWeight("2 - x"), 65, 9)
    assert not report.even
    assert report.pinned_admissible


def test_grid_weight_exact_check():
    a = GridWeight(np.array([[0.0, 1.0, 0.0]]), np.array([0.0]), v_range=(0.0, 1.0))
    report = check_admissible(a)
    assert report.method == EXACT_NODE
    assert report.admissible


def test_symmetric_condition():
    convex = check_symmetric_condition(ExprWeight("x^2"), 65, 9)
    assert convex.symmetric_admissible and convex.convex and convex.characterizations_agree
    concave = check_symmetric_condition(ExprWeight("1 - abs(x)"), 65, 9)
    assert not concave.symmetric_admissible
    assert not concave.convex
    assert concave.characterizations_agree


def test_negative_weight_rejected():
    with pytest.raises(NegativeWeight):
        check_admissible(ExprWeight("x"), 33, 5)


@pytest.mark.parametrize("k", [2, 4, 8, 16])
def test_interpolation_keeps_condition(k, hat_weight):
    g = interpolate_weight(hat_weight, k, nv=5)
    assert g.k == k
    report = check_admissible(g)
    assert report.method == EXACT_NODE
    assert report.admissible


def test_interpolation_of_cosine():
    g = interpolate_weight(ExprWeight("cos(pi*x/2)"), 4, nv=3)
    half = math.sqrt(2.0) / 2.0
    assert g.values[0] == pytest.approx([0.0, half, 1.0, half, 0.0], abs=1e-12)
    assert check_admissible(g).admissible


def test_interpolation_keeps_source_violation():
    g = interpolate_weight(ExprWeight("abs(x)"), 2, nv=3)
    report = check_admissible(g)
    assert report.method == EXACT_NODE
    assert not report.cond_c
    assert report.cond_c_violation.point['s'] == 0.0
    assert report.cond_c_violation.point['t'] == 0.0


def test_interpolation_reports_lost_condition(monkeypatch, hat_weight):
    real_check = lemmas.check_admissible
    broken = GridWeight(np.array([[1.0, 0.0, 1.0]]))

    def check(a, *args, **kwargs):
        return real_check(broken if isinstance(a, GridWeight) else a, *args, **kwargs)

    monkeypatch.setattr(lemmas, "check_admissible", check)
    with pytest.raises(ConditionNotPreserved) as err:
        interpolate_weight(hat_weight, 2, nv=3)
    assert err.value.witness['s'] == 0.0
    assert err.value.witness['magnitude'] > 0.0
    # без проверки интерполянт строится как обычно
    assert interpolate_weight(hat_weight, 2, nv=3, verify=False).k == 2


class _SampledView(IWeight):
    """Сеточный вес без признака точной проверки: условия проверяются выборочно."""

    def __init__(self, grid: GridWeight):
        self.grid = grid

    def __call__(self, x, v):
        return self.grid(x, v)

    @property
    def v_range(self):
        return self.grid.v_range

    def get_weight_info(self):
        return {'type': 'sampled-view'}


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_exact_node_check_matches_dense_sampling(data):
    k = data.draw(st.sampled_from([2, 4, 6, 8]))
    row = np.array(data.draw(st.lists(st.floats(0.0, 1.0), min_size=k + 1, max_size=k + 1)))
    if data.draw(st.booleans()):
        row = np.maximum(row, row[::-1])
    row = row + data.draw(st.floats(0.0, 2.0))
    grid = GridWeight(row[None, :])

    exact = check_admissible(grid)
    dense = check_admissible(_SampledView(grid), 10 * k + 1, 1)
    assert exact.method == EXACT_NODE and dense.method == GRID_SAMPLED
    assert dense.resolution[0] == 10 * k + 1
    assert exact.even == dense.even
    assert exact.cond_c == dense.cond_c


def test_combine_weights():
    a1 = ExprWeight("1 - abs(x)")
    a2 = ExprWeight("0.5 + 0.25*(1 - x^2)")
    for mode in CombineMode:
        c = combine_weights(a1, a2, mode)
        assert isinstance(c, CombinedWeight)
        assert check_admissible(c, 65, 5).admissible
    assert combine_weights(a1, a2, "max")(0.0, 0.0) == pytest.approx(1.0)
    assert combine_weights(a1, a2, "sum")(1.0, 0.0) == pytest.approx(0.5)


def test_combine_rejects_negative():
    with pytest.raises(NegativeWeight):
        combine_weights(ExprWeight("1"), ExprWeight("x - 2"), "sum")


@pytest.mark.parametrize("ts, point", [([0.2], 0.2), ([-0.5, 0.5], 0.0), ([-0.9, -0.1, 0.3], -0.5)])
def test_chain_bound_points(hat_weight, ts, point):
    bound = chain_bound_check(hat_weight, 0.5, ts)
    assert bound.point == pytest.approx(point)
    assert bound.in_domain
    assert bound.holds and bound.mirrored_holds


@settings(deadline=None, max_examples=200)
@given(st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1, max_size=8))
def test_chain_bound_random_tuples(ts):
    a = lambda_weight((0.0, 1.0))
    bound = chain_bound_check(a, 0.5, sorted(ts), tol=1e-12)
    assert bound.in_domain
    assert bound.holds
    assert bound.mirrored_holds


def test_chain_bound_rejects_unsorted(hat_weight):
    with pytest.raises(ValueError):
        chain_bound_check(hat_weight, 0.5, [0.3, -0.3])


def test_zero_set_periodic():
    report = zero_set_analysis(ExprWeight("abs(sin(pi*x))"), 0.0)
    assert report.verdict == "periodic"
    assert report.period == pytest.approx(1.0)
    assert report.periodicity_deviation == pytest.approx(0.0, abs=1e-9)


def test_zero_set_verdicts():
    assert zero_set_analysis(ExprWeight("1 + x^2"), 0.0).verdict == "no-zeros"
    assert zero_set_analysis(ExprWeight("0"), 0.0).verdict == "all-zero"
    assert zero_set_analysis(ExprWeight("max(x, 0)"), 0.0).verdict == "violates"
    assert zero_set_analysis(ExprWeight("max(-x, 0)"), 0.0).verdict == "all-zero"


def test_compute_dk():
    u = PiecewiseLinear.from_points([(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)])
    assert compute_Dk(ExprWeight("2"), u, 4) == 0.0
    value = compute_Dk(ExprWeight("2 - abs(x)"), u, 4, nv=9)
    assert 0.0 < value < math.inf
    with pytest.raises(EmptyU):
        compute_Dk(ExprWeight("0"), u, 4)


@pytest.mark.parametrize("k", [2, 4, 10, 16])
def test_compute_dk_linear_decay(k, tent):
    # колебание на окне 2/k равно 1/k, минимум веса 1/2
    value = compute_Dk(ExprWeight("1 - abs(x)/2"), tent, k)
    assert 0.0 < value <= 2.0 / k + 1e-12
    if k == 10:
        assert value <= 0.2 + 1e-12


def test_compute_dk_vanishes_for_interpolants(tent):
    a = ExprWeight("1 + cos(pi*x/2)")
    ks = [4, 8, 16, 32]
    values = [compute_Dk(interpolate_weight(a, k, nv=3), tent, k) for k in ks]
    for k, value in zip(ks, values):
        assert value <= math.pi / k + 1e-12
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_compute_dk_zero_denominator():
    u = PiecewiseLinear.constant(0.5)
    assert compute_Dk(ExprWeight("abs(x)"), u, 4) == math.inf


def test_lipschitz_envelope():
    grid = np.array([0.0, 1.0, 2.0, 3.0])
    t = np.array([0.0, 5.0, 5.0, 0.0])
    assert lipschitz_envelope(t, grid).tolist() == [0.0, 1.0, 1.0, 0.0]
    assert lipschitz_envelope(t, grid, 2.0).tolist() == [0.0, 2.0, 2.0, 0.0]
    shuffled = np.array([2, 0, 3, 1])
    assert lipschitz_envelope(t[shuffled], grid[shuffled]).tolist() == [1.0, 0.0, 0.0, 1.0]
