import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballistic import (
    ConvexProfile,
    CostSpec,
    GridFunction,
    Convexity,
    LagrangianSpec,
    VariantUnsupported,
    ballistic_argmin,
    ballistic_cost,
    ballistic_cost_matrix,
    dual_fixed_end_cost,
    dual_fixed_end_cost_matrix,
    fixed_end_cost,
    fixed_end_cost_matrix,
    fixed_end_gradients,
    generalized_ballistic_cost,
    hj_residual,
    hopf_lax_dual,
    hopf_lax_propagate,
    legendre_conjugate,
    optimal_path,
    verify_cost_dualities,
)
from ballistic.utils import SENTINEL, make_axis


@pytest.fixture
def oscillator():
    # L = p^2/2 + x^2/2, whose extremals solve x'' = x
    L = LagrangianSpec.separable(ConvexProfile('quadratic'), ConvexProfile('quadratic'))
    return CostSpec(L, 1.0, path_segments=64, inner_axes=make_axis(-3.0, 3.0, 0.05))


def exact_oscillator_cost(y, x, T=1.0):
    return ((y ** 2 + x ** 2) * np.cosh(T) - 2 * x * y) / (2 * np.sinh(T))


def test_cost_spec_validation(quadratic):
    with pytest.raises(ValueError):
        CostSpec(quadratic, -1.0)
    with pytest.raises(ValueError):
        CostSpec(quadratic, 1.0, path_segments=0)
    with pytest.raises(ValueError):
        axis = make_axis(-1.0, 1.0, 0.5)
        CostSpec(quadratic, 1.0, inner_axes=(axis, axis))

    spec = CostSpec(quadratic, 2.0, inner_axes=make_axis(-1.0, 1.0, 0.5))
    assert spec.window == ((-1.0, 1.0),)
    assert spec.inner_spacing == 0.5
    assert spec.with_horizon(0.5).horizon == 0.5


@pytest.mark.parametrize('mass, T', [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)])
def test_quadratic_closed_forms(mass, T):
    spec = CostSpec(LagrangianSpec.quadratic(mass), T)
    ys = np.array([-1.0, 0.0, 2.5])
    xs = np.array([0.5, 2.0])
    expected = mass * (xs[None, :] - ys[:, None]) ** 2 / (2 * T)
    assert_allclose(fixed_end_cost_matrix(spec, ys, xs), expected)
    assert_allclose(fixed_end_cost(spec, -1.0, 2.0), mass * 9 / (2 * T))

    vs = np.array([-1.0, 1.0, 3.0])
    expected = vs[:, None] * xs[None, :] - T * vs[:, None] ** 2 / (2 * mass)
    assert_allclose(ballistic_cost_matrix(spec, vs, xs), expected)
    assert_allclose(ballistic_cost(spec, -1.0, 2.0), -2.0 - T / (2 * mass))

    dy, dx = fixed_end_gradients(spec, 1.0, 2.0)
    assert_allclose(dx, [mass / T])
    assert_allclose(dy, [-mass / T])


def test_zero_horizon_is_bilinear(quadratic):
    spec = CostSpec(quadratic, 0.0)
    assert fixed_end_cost(spec, 1.0, 1.0) == 0.0
    assert fixed_end_cost(spec, 1.0, 2.0) == SENTINEL
    assert_allclose(ballistic_cost(spec, 3.0, -2.0), -6.0)
    assert_allclose(ballistic_cost_matrix(spec, [1.0, 2.0], [3.0]), [[3.0], [6.0]])
    assert dual_fixed_end_cost(spec, 1.0, 2.0) == SENTINEL
    with pytest.raises(ValueError):
        fixed_end_gradients(spec, 0.0, 1.0)


def test_dual_fixed_end_cost_pins_the_covector(spec):
    assert_allclose(dual_fixed_end_cost(spec, 2.0, 2.0), 2.0)
    assert dual_fixed_end_cost(spec, 2.0, 2.5) == SENTINEL
    matrix = dual_fixed_end_cost_matrix(spec, [1.0, -1.0], [1.0, 1.004, 0.0], tol=0.005)
    assert_allclose(matrix[0, :2], [0.5, 0.5])
    assert (matrix[0, 2] == SENTINEL) and (matrix[1] == SENTINEL).all()


def test_argmin_scan_matches_closed_form(spec):
    value, y = ballistic_argmin(spec, 1.5, 0.5)
    assert_allclose(value, 1.5 * 0.5 - 1.5 ** 2 / 2, atol=1e-10)
    assert_allclose(y, [-1.0], atol=1e-10)
    assert_allclose(ballistic_cost(spec, 1.5, 0.5, scan=True), value)

    coupled, at = generalized_ballistic_cost(spec, lambda v, ys: ys @ v, 1.5, 0.5)
    assert_allclose(coupled, value)
    assert_allclose(at, y)


def test_separable_cost_matches_oscillator_action(oscillator):
    for y, x in [(0.0, 1.0), (-1.0, 0.5), (1.5, 1.5)]:
        assert_allclose(fixed_end_cost(oscillator, y, x), exact_oscillator_cost(y, x), rtol=1e-3)

    value, nodes = optimal_path(oscillator, -1.0, 0.5)
    assert nodes.shape == (65, 1)
    assert_allclose(nodes[[0, -1], 0], [-1.0, 0.5])
    t = np.linspace(0.0, 1.0, 65)
    # x(t) = (x sinh t + y sinh(T - t)) / sinh T
    exact = (0.5 * np.sinh(t) - np.sinh(1.0 - t)) / np.sinh(1.0)
    assert_allclose(nodes[:, 0], exact, atol=1e-3)


def test_separable_ballistic_cost_uses_free_start(oscillator):
    C, S = np.cosh(1.0), np.sinh(1.0)
    for v, x in [(0.5, 1.0), (-1.0, 0.0)]:
        y = (x - v * S) / C
        expected = v * y + exact_oscillator_cost(y, x)
        assert_allclose(ballistic_cost(oscillator, v, x), expected, atol=1e-3)


def test_separable_gradients_match_finite_differences(oscillator):
    C, S = np.cosh(1.0), np.sinh(1.0)
    dy, dx = fixed_end_gradients(oscillator, 0.5, 1.0, step=1e-3)
    assert_allclose(dy, [(0.5 * C - 1.0) / S], atol=2e-3)
    assert_allclose(dx, [(1.0 * C - 0.5) / S], atol=2e-3)


@pytest.mark.parametrize('T', [0.0, 1.0])
def test_cost_dualities_hold(quadratic, T):
    spec = CostSpec(quadratic, T, inner_axes=make_axis(-6.0, 6.0, 0.01))
    report = verify_cost_dualities(spec, [-1.0, 0.5, 2.0], [0.0, 1.0, -1.0])
    assert report.passed, report.violations
    assert report.samples == 3


def test_hopf_lax_routes_agree(spec):
    axis = make_axis(-2.0, 2.0, 0.01)
    g = GridFunction.from_function(axis, lambda p: 0.5 * p[:, 0] ** 2, Convexity.CONVEX)
    primal = hopf_lax_propagate(spec, g, 1.0)
    assert primal.convexity == Convexity.CONVEX
    assert_allclose(primal.values, axis ** 2 / 4, atol=1e-4)

    dual = hopf_lax_dual(spec, legendre_conjugate(g, axis), 1.0, axis)
    assert_allclose(dual.values, primal.values, atol=1e-4)

    with pytest.raises(ValueError):
        hopf_lax_propagate(spec, g, 0.0)
    with pytest.raises(ValueError):
        hopf_lax_propagate(spec, g, 2.0)


def test_hopf_lax_dual_needs_state_independence(oscillator):
    axis = make_axis(-1.0, 1.0, 0.5)
    g_star = GridFunction(axis, np.zeros(axis.size), Convexity.CONVEX)
    with pytest.raises(VariantUnsupported):
        hopf_lax_dual(oscillator, g_star, 0.5, axis)


def test_value_function_solves_hamilton_jacobi(spec):
    axis = make_axis(-2.0, 2.0, 0.05)
    times = np.linspace(0.5, 1.0, 26)
    path = [GridFunction(axis, axis ** 2 / (2 * (1 + t))) for t in times]
    assert hj_residual(spec, times, path) < 1e-3

    wrong = [GridFunction(axis, axis ** 2 / (2 * (1 + 2 * t))) for t in times]
    assert hj_residual(spec, times, wrong) > 1e-2
    with pytest.raises(ValueError):
        hj_residual(spec, times[:2], path[:2])


def test_quadratic_closed_forms_match_the_solvers():
    rng = np.random.default_rng(31)
    spec = CostSpec(LagrangianSpec.quadratic(1.0), 1.0, inner_axes=make_axis(-8.0, 8.0, 0.01))
    for _ in range(100):
        y, x, v = rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-1.0, 1.0)
        T = rng.uniform(0.1, 4.0)
        # the minimiser x - T v of the scan stays inside the window
        assert_allclose(fixed_end_cost(spec, y, x, T, variational=True), (x - y) ** 2 / (2 * T), rtol=0.0, atol=1e-6)
        assert_allclose(ballistic_cost(spec, v, x, T, scan=True), v * x - T * v ** 2 / 2, rtol=0.0, atol=1e-6)
