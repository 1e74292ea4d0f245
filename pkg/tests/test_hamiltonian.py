import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballistic import (
    ConvexProfile,
    Convexity,
    CostSpec,
    DiscreteMeasure,
    GridFunction,
    HamiltonianSpec,
    Integrator,
    LagrangianSpec,
    MapUnavailable,
    NonConvexInput,
    StepUnderflow,
    TransportMapSample,
    VariantUnsupported,
    ballistic_under,
    check_twist,
    flow,
    hamiltonian_of,
    initial_potential,
    lp_support_map,
    map_for_ballistic_max,
    map_from_concave_potential,
    trajectory_optimality_check,
    verify_support,
)
from ballistic.utils import make_axis


@pytest.fixture
def oscillator():
    return HamiltonianSpec.separable(ConvexProfile('quadratic'), ConvexProfile('quadratic'))


def test_quadratic_flow_is_exact():
    H = hamiltonian_of(LagrangianSpec.quadratic(2.0))
    trajectory = flow(H, 1.0, 4.0, 1.0, steps=4)
    assert len(trajectory) == 5
    assert trajectory.integrator is None
    assert_allclose(trajectory.states[:, 0], [1.0, 1.5, 2.0, 2.5, 3.0])
    assert_allclose(trajectory.final_costate, [4.0])
    assert_allclose(trajectory.energies, 4.0)
    assert trajectory.energy_drift == 0.0


@pytest.mark.parametrize('integrator, atol', [(Integrator.VERLET, 1e-5), (Integrator.EULER, 1e-2)])
def test_oscillator_flow(oscillator, integrator, atol):
    T = np.pi / 2
    trajectory = flow(oscillator, 1.0, 0.0, T, steps=1000, integrator=integrator)
    t = trajectory.times
    assert_allclose(trajectory.states[:, 0], np.cos(t), atol=atol)
    assert_allclose(trajectory.costates[:, 0], -np.sin(t), atol=atol)
    assert trajectory.energy_drift < atol


def test_verlet_conserves_energy_better_than_euler(oscillator):
    verlet = flow(oscillator, 0.5, 1.0, 10.0, steps=200)
    euler = flow(oscillator, 0.5, 1.0, 10.0, steps=200, integrator=Integrator.EULER)
    assert verlet.energy_drift < euler.energy_drift


def test_verlet_drift_is_second_order(oscillator):
    drifts = np.array([flow(oscillator, 0.5, 1.0, 10.0, steps=100 * 2 ** k).energy_drift for k in range(4)])
    assert np.all(drifts > 0.0)
    assert np.all(drifts[:-1] / drifts[1:] >= 3.5)


def test_flow_arguments():
    H = hamiltonian_of(LagrangianSpec.quadratic(1.0))
    with pytest.raises(ValueError):
        flow(H, 0.0, 1.0, 1.0, steps=0)
    with pytest.raises(ValueError):
        flow(H, 0.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        flow(H, 0.0, 1.0, 1.0, integrator='rk4')


def test_flow_stops_on_non_finite_derivatives():
    H = HamiltonianSpec.separable(ConvexProfile('quadratic'), ConvexProfile('ball'))
    with pytest.raises(StepUnderflow):
        flow(H, 2.0, 0.0, 1.0, steps=10)


def test_map_from_concave_potential(spec, mu0, nuT):
    axis = make_axis(-6.0, 6.0, 0.05)
    V0 = initial_potential(spec, mu0, nuT, axis, axis)
    sample = map_from_concave_potential(spec, V0, mu0.points, axis)
    # v = -1 starts at y = 3 and v = 1 at y = -1
    assert_allclose(sample.starts[:, 0], [3.0, -1.0], atol=1e-9)
    assert_allclose(sample.outputs[:, 0], [2.0, 0.0], atol=1e-9)
    assert len(sample) == 2

    plan = ballistic_under(spec, mu0, nuT).plan
    assert verify_support(plan, sample, nuT.points, 1e-6) == 0.0

    with pytest.raises(NonConvexInput):
        map_from_concave_potential(spec, GridFunction(axis, np.zeros(axis.size)), mu0.points, axis)


def test_map_is_unavailable_at_kinks(spec):
    axis = make_axis(-2.0, 2.0, 0.01)
    tent = GridFunction(axis, -np.abs(axis), Convexity.CONCAVE)
    # the conjugate of -|y| is a well with a flat floor and kinks at +-1
    with pytest.raises(MapUnavailable):
        map_from_concave_potential(spec, tent, [1.015], make_axis(-3.0, 3.0, 0.01))


def test_map_for_ballistic_max(spec, mu0, nuT):
    axis = make_axis(-3.0, 3.0, 0.05)
    h = GridFunction(axis, axis.copy(), Convexity.CONVEX)
    sample = map_for_ballistic_max(spec, h, mu0.points)
    # the optimal max plan sends v = -1 to 0 and v = 1 to 2
    assert_allclose(sample.outputs[:, 0], [0.0, 2.0], atol=1e-9)

    bowl = GridFunction(axis, axis ** 2 / 2, Convexity.CONVEX)
    assert_allclose(map_for_ballistic_max(spec, bowl, [0.5, -1.0]).outputs[:, 0], [1.0, -2.0], atol=1e-9)


def test_max_map_needs_an_even_potential():
    axis = make_axis(0.0, 2.0, 0.5)
    skewed = ConvexProfile.from_grid(GridFunction.from_function(axis, lambda p: p[:, 0] ** 2, Convexity.CONVEX))
    L = LagrangianSpec.separable(ConvexProfile('quadratic'), skewed)
    spec = CostSpec(L, 1.0, inner_axes=make_axis(-1.0, 1.0, 0.5))
    h = GridFunction(make_axis(-1.0, 1.0, 0.5), np.zeros(5), Convexity.CONVEX)
    with pytest.raises(VariantUnsupported):
        map_for_ballistic_max(spec, h, [0.0])


def test_lp_support_map(spec, mu0, nuT):
    plan = ballistic_under(spec, mu0, nuT).plan
    sample = lp_support_map(plan, mu0.points, nuT.points)
    assert_allclose(sample.outputs[:, 0], [2.0, 0.0])
    assert verify_support(plan, sample, nuT.points, 1e-9) == 0.0

    swapped = TransportMapSample(mu0.points, sample.outputs[::-1], 'manual')
    assert verify_support(plan, swapped, nuT.points, 1e-9) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        verify_support(plan, swapped, nuT.points[:1], 1e-9)


def test_map_sample_validation():
    with pytest.raises(ValueError):
        TransportMapSample(np.zeros((2, 1)), np.zeros((3, 1)), 'manual')
    with pytest.raises(MapUnavailable):
        TransportMapSample(np.zeros((1, 1)), np.full((1, 1), np.nan), 'manual')


def test_quadratic_trajectories_are_optimal(spec):
    report = trajectory_optimality_check(spec, 0.0, 2.0)
    assert report.passed
    assert_allclose(report.start_covector, [2.0])
    assert_allclose(report.arrival, [2.0])


def test_separable_trajectories_are_optimal():
    L = LagrangianSpec.separable(ConvexProfile('quadratic'), ConvexProfile('quadratic'))
    spec = CostSpec(L, 1.0, path_segments=64, inner_axes=make_axis(-3.0, 3.0, 0.05))
    report = trajectory_optimality_check(spec, 0.5, 1.0, tol=1e-2)
    assert report.passed, report
    C, S = np.cosh(1.0), np.sinh(1.0)
    assert_allclose(report.start_covector, [(1.0 - 0.5 * C) / S], atol=2e-3)


def test_twist(spec):
    report = check_twist(spec, 0.0, [-1.0, 0.5, 2.0])
    assert report.passed
    assert report.unstable == []

    flat = CostSpec(LagrangianSpec.state_independent(ConvexProfile('abs')), 1.0)
    # |x - y| has the same slope for every x > y
    report = check_twist(flat, 0.0, [1.0, 2.0, 1.5e-4])
    assert not report.passed
    assert report.collisions == [(0, 1)]
    assert report.unstable == [2]


def test_flow_map_carries_random_plans(spec):
    rng = np.random.default_rng(77)
    axis = make_axis(-6.0, 6.0, 0.05)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        # covectors ascend and targets descend on the grid, so the antitone pairing is optimal
        shifts = rng.integers(0, 5, size=(2, n)) * 0.05
        vs = -1.5 + np.arange(n) + shifts[0]
        xs = 1.5 - np.arange(n) - shifts[1]
        weights = rng.dirichlet(np.ones(n))
        mu0, nuT = DiscreteMeasure(vs, weights), DiscreteMeasure(xs, weights)

        V0 = initial_potential(spec, mu0, nuT, axis, axis)
        sample = map_from_concave_potential(spec, V0, mu0.points, axis)
        assert_allclose(sample.outputs[:, 0], xs, atol=1e-9)
        plan = ballistic_under(spec, mu0, nuT).plan
        assert verify_support(plan, sample, nuT.points, 1e-6) <= 1e-8
