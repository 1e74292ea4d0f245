import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballistic import (
    AssumptionFlags,
    AssumptionParams,
    ConvexProfile,
    Convexity,
    DualLagrangian,
    GridFunction,
    HamiltonianSpec,
    LagrangianSpec,
    NonConvexInput,
    VariantUnsupported,
    dual_lagrangian,
    hamiltonian_of,
    profile_from_name,
    validate_assumptions,
)
from ballistic.utils import SENTINEL, make_axis


QS = np.linspace(-3.0, 3.0, 13)


def test_profile_validation():
    with pytest.raises(ValueError):
        ConvexProfile('cubic')
    with pytest.raises(ValueError):
        ConvexProfile('quadratic', scale=0.0)
    with pytest.raises(ValueError):
        ConvexProfile('power', exponent=1.0)
    with pytest.raises(ValueError):
        profile_from_name('nope')

    axis = make_axis(-1.0, 1.0, 0.25)
    bump = GridFunction.from_function(axis, lambda p: np.cos(3 * p[:, 0]), Convexity.CONVEX)
    with pytest.raises(NonConvexInput):
        ConvexProfile.from_grid(bump)


@pytest.mark.parametrize('profile, conjugate', [
    (ConvexProfile('quadratic', 2.0), lambda q: q ** 2 / 4),
    (ConvexProfile('quadratic', 1.0, 3.0), lambda q: 9 * q ** 2 / 2),
    (ConvexProfile('power', exponent=4.0), lambda q: 0.75 * np.abs(q) ** (4 / 3)),
    (ConvexProfile('abs', 2.0), lambda q: np.where(np.abs(q) <= 2.0, 0.0, SENTINEL)),
    (ConvexProfile('zero'), lambda q: np.where(q == 0, 0.0, SENTINEL)),
])
def test_closed_form_conjugates(profile, conjugate):
    assert_allclose(profile.conjugate()(QS), conjugate(QS), rtol=1e-12)


def test_conjugate_is_an_involution():
    for name in ('quadratic', 'abs', 'zero', 'quartic'):
        profile = profile_from_name(name, 1.5)
        back = profile.conjugate().conjugate()
        assert_allclose(back(QS), profile(QS), rtol=1e-12)


def test_registered_profiles_take_the_scale():
    assert_allclose(profile_from_name('harmonic', 2.0)(QS), profile_from_name('quadratic', 2.0)(QS))
    assert profile_from_name('zero', 3.0).scale == 3.0
    assert_allclose(profile_from_name('quartic', 2.0)(QS), 2.0 * QS ** 4 / 4)
    with pytest.raises(ValueError):
        profile_from_name('zero', 0.0)


def test_gradients_and_indicator_domains():
    assert_allclose(ConvexProfile('quadratic', 2.0).gradient(QS)[:, 0], 2 * QS)
    assert_allclose(ConvexProfile('abs').gradient([-2.0, 0.0, 3.0])[:, 0], [-1.0, 0.0, 1.0])
    assert np.isnan(ConvexProfile('ball').gradient([2.0])).all()


def test_sampled_profile_matches_closed_form():
    profile = ConvexProfile.from_grid(ConvexProfile('quadratic').to_grid(make_axis(-3.0, 3.0, 0.01)))
    inside = np.array([-1.0, 0.5, 2.0])
    assert_allclose(profile(inside), inside ** 2 / 2, atol=1e-4)
    assert profile([5.0])[0] == SENTINEL

    L = LagrangianSpec.state_independent(profile)
    H = hamiltonian_of(L, make_axis(-3.0, 3.0, 0.25))
    assert_allclose(H.kinetic([-1.0, 1.5]), [0.5, 1.125], atol=1e-4)


def test_lagrangian_construction():
    with pytest.raises(VariantUnsupported):
        LagrangianSpec('bogus')
    with pytest.raises(ValueError):
        LagrangianSpec.quadratic(1.0, dim=3)
    with pytest.raises(ValueError):
        LagrangianSpec.quadratic(-1.0)
    with pytest.raises(TypeError):
        LagrangianSpec('separable_convex', l0=ConvexProfile('quadratic'))

    L = LagrangianSpec.separable(ConvexProfile('quadratic'), ConvexProfile('quadratic', 3.0))
    assert not L.is_state_independent
    assert_allclose(L([1.0, 2.0], [2.0, 0.0]), [2.0 + 1.5, 6.0])
    assert LagrangianSpec.quadratic(2.0).is_quadratic


def test_quadratic_hamiltonian():
    H = hamiltonian_of(LagrangianSpec.quadratic(2.0))
    assert H.is_quadratic
    assert_allclose(H(np.zeros_like(QS), QS), QS ** 2 / 4)
    assert_allclose(H.dq(QS)[:, 0], QS / 2)
    assert_allclose(H.dx(QS), 0.0)


def test_hamiltonian_shapes():
    L = LagrangianSpec.separable(ConvexProfile('quadratic'), ConvexProfile('quadratic'))
    H = hamiltonian_of(L)
    assert H.coupling == -1.0
    assert_allclose(H([2.0], [1.0]), [0.5 - 2.0])
    assert_allclose(H.dx([2.0]), [[-2.0]])
    assert H.shape_report(make_axis(-2.0, 2.0, 0.1)) == (True, True)

    oscillator = HamiltonianSpec.separable(ConvexProfile('quadratic'), ConvexProfile('quadratic'))
    assert oscillator.shape_report(make_axis(-2.0, 2.0, 0.1)) == (True, False)


def test_dual_lagrangian_round_trip():
    L = LagrangianSpec.separable(ConvexProfile('quadratic', 2.0), ConvexProfile('abs'))
    dual = dual_lagrangian(L)
    assert isinstance(dual, DualLagrangian)
    assert not dual.constrained
    # L~(v, q) = L0*(v) + U*(q)
    assert_allclose(dual([1.0], [0.5]), [0.25])
    assert dual([1.0], [2.0])[0] == SENTINEL

    back = dual_lagrangian(dual)
    xs, ps = np.linspace(-2, 2, 9), np.linspace(-1, 3, 9)
    assert_allclose(back(xs, ps), L(xs, ps), rtol=1e-12)

    free = dual_lagrangian(LagrangianSpec.quadratic(3.0))
    assert free.constrained
    assert dual_lagrangian(free).is_quadratic


def test_assumption_params():
    with pytest.raises(ValueError):
        AssumptionParams(rho=-1.0)
    with pytest.raises(TypeError):
        AssumptionParams(theta=ConvexProfile('ball'))
    with pytest.raises(ValueError):
        AssumptionParams(theta=GridFunction([0.0, 1.0, 2.0], [0.0, 1.0, 0.5]))

    assert AssumptionParams.from_profile('quartic').superlinear
    assert not AssumptionParams.from_profile('abs').superlinear

    sampled = AssumptionParams(theta=GridFunction([0.0, 1.0, 2.0], [0.0, 1.0, 3.0]))
    assert_allclose(sampled.theta_at([0.5, 3.0]), [0.5, 5.0])


def test_quadratic_passes_every_hypothesis():
    report = validate_assumptions(LagrangianSpec.quadratic(1.0), n_samples=2000, seed=3)
    assert report.passed
    assert report.flags == AssumptionFlags(a1=True, a2=True, a3=True)
    assert report.witnesses == {}


def test_growth_failure_has_witness():
    params = AssumptionParams.from_profile('quadratic', 2.0)
    L = LagrangianSpec.quadratic(1.0, params=params)
    report = validate_assumptions(L, n_samples=2000, seed=3)
    assert report.a1 and report.a2
    assert not report.a3
    assert not report
    x, p = report.witnesses['a3']
    assert abs(p) > 0
    assert report.superlinear


def test_growth_with_slack_passes():
    params = AssumptionParams.from_profile('abs', 1.0)
    L = LagrangianSpec.state_independent(ConvexProfile('abs'), params=params)
    assert validate_assumptions(L, n_samples=2000, seed=5).passed


def test_flags():
    flags = AssumptionFlags(a1=True, a3=True)
    assert flags.a1 and flags.a3 and not flags.a2
    assert not flags.all_passed
    flags.a2 = True
    assert flags.all_passed
    assert AssumptionFlags.from_value(flags.value) == flags
    assert dict(flags) == {'a1': True, 'a2': True, 'a3': True, 'superlinear': False}
    with pytest.raises(TypeError):
        AssumptionFlags(a4=True)
