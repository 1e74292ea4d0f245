import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballistic import (
    DensityPath,
    DimensionUnsupported,
    DiscreteMeasure,
    GridMismatch,
    InfeasiblePath,
    InputError,
    OutOfDomain,
    Sense,
    VelocityPath,
    action,
    continuity_residual,
    convergence_table,
    displacement_path,
    eulerian_lower_bound_check,
    eulerian_upper_bound_check,
    static_path,
)


@pytest.fixture
def transfer():
    # all mass crosses from the left cell into the right one in unit time
    rho = DensityPath([0.0, 1.0], [0.0, 1.0, 2.0], [[1.0, 0.0], [0.0, 1.0]])
    w = VelocityPath([0.0, 1.0], [0.0, 1.0, 2.0], [[0.0, 2.0, 0.0], [0.0, 2.0, 0.0]])
    return rho, w


@pytest.mark.parametrize('times, edges, densities, exc', [
    ([0.0, 1.0], [0.0, 1.0], [[1.0, 0.0], [1.0, 0.0]], GridMismatch),
    ([0.5, 1.0], [0.0, 1.0, 2.0], [[1.0, 0.0], [1.0, 0.0]], GridMismatch),
    ([0.0, 1.0], [0.0, 1.0, 3.0], [[1.0, 0.0], [1.0, 0.0]], GridMismatch),
    ([0.0, 1.0], [0.0, 1.0, 2.0], [[1.5, -0.5], [1.0, 0.0]], InputError),
    ([0.0, 1.0], [0.0, 1.0, 2.0], [[0.5, 0.4], [1.0, 0.0]], InputError),
])
def test_density_path_validation(times, edges, densities, exc):
    with pytest.raises(exc):
        DensityPath(times, edges, densities)


def test_velocity_path_validation():
    with pytest.raises(GridMismatch):
        VelocityPath([0.0, 1.0], [0.0, 1.0, 2.0], np.zeros((2, 2)))
    with pytest.raises(InputError):
        VelocityPath([0.0, 1.0], [0.0, 1.0, 2.0], np.full((2, 3), np.inf))
    with pytest.raises(InputError):
        VelocityPath([0.0, 1.0], [0.0, 1.0, 2.0], np.full((2, 3), 3.0), v_max=2.0)

    w = VelocityPath([0.0, 1.0], [0.0, 1.0, 2.0], [[0.0, 2.0, 4.0], [0.0, 0.0, 0.0]])
    assert_allclose(w.cell_velocities, [[1.0, 3.0], [0.0, 0.0]])


def test_continuity_residual_of_a_transfer(transfer):
    rho, w = transfer
    assert_allclose(continuity_residual(rho, w), 0.0, atol=1e-12)

    still = VelocityPath(rho.times, rho.edges, np.zeros((2, 3)))
    assert_allclose(continuity_residual(rho, still), 1.0)

    with pytest.raises(GridMismatch):
        continuity_residual(rho, VelocityPath([0.0, 0.5], rho.edges, np.zeros((2, 3))))


def test_action_of_a_transfer(quadratic, transfer):
    rho, w = transfer
    # both cells move at speed one
    assert_allclose(action(rho, w, quadratic), 0.5)
    assert_allclose(action(rho, w, lambda x, p: p[:, 0] ** 2), 1.0)


def test_static_path(mu0):
    edges = np.linspace(-2.05, 2.05, 42)
    rho, w = static_path(mu0, edges, 4, 1.0)
    assert rho.horizon == 1.0
    assert continuity_residual(rho, w) == 0.0
    assert_allclose(rho.at(4).points[:, 0], [-1.0, 1.0], atol=1e-12)
    assert_allclose(rho.at(0).weights, [0.5, 0.5])

    with pytest.raises(OutOfDomain):
        static_path(DiscreteMeasure.dirac(5.0), edges, 4, 1.0)
    with pytest.raises(DimensionUnsupported):
        static_path(DiscreteMeasure.dirac([0.0, 0.0]), edges, 4, 1.0)


def test_displacement_path_translates_mass(quadratic):
    edges = np.linspace(-2.0, 3.0, 501)
    rho, w = displacement_path(DiscreteMeasure.dirac(0.0), DiscreteMeasure.dirac(1.0), 100, edges)
    assert rho.densities.shape == (101, 500)
    assert_allclose(rho.at(0).mean(), [0.0], atol=1e-9)
    assert_allclose(rho.at(50).mean(), [0.5], atol=1e-9)
    assert_allclose(rho.at(100).mean(), [1.0], atol=1e-9)
    # a lone particle never occupies more than two cells
    assert np.count_nonzero(rho.densities > 1e-14, axis=1).max() <= 2
    assert_allclose(action(rho, w, quadratic), 0.5, atol=1e-12)


def test_smoothed_displacement_path(quadratic):
    edges = np.linspace(-2.0, 3.0, 501)
    rho, w = displacement_path(DiscreteMeasure.dirac(0.0), DiscreteMeasure.dirac(1.0), 100, edges, bandwidth=0.1)
    assert_allclose(rho.at(50).mean(), [0.5], atol=1e-9)
    assert continuity_residual(rho, w) < 0.05
    assert_allclose(action(rho, w, quadratic), 0.5, rtol=2e-2)


def test_displacement_path_arguments():
    edges = np.linspace(-1.0, 1.0, 21)
    with pytest.raises(ValueError):
        displacement_path(DiscreteMeasure.dirac(0.0), DiscreteMeasure.dirac(0.5), 0, edges)
    with pytest.raises(ValueError):
        displacement_path(DiscreteMeasure.dirac(0.0), DiscreteMeasure.dirac(0.5), 4, edges, bandwidth=0.0)
    with pytest.raises(DimensionUnsupported):
        displacement_path(DiscreteMeasure.dirac([0.0, 0.0]), DiscreteMeasure.dirac([0.0, 0.0]), 4, edges)
    with pytest.raises(OutOfDomain):
        displacement_path(DiscreteMeasure.dirac(0.0), DiscreteMeasure.dirac(1.5), 4, edges)


def test_upper_bound_along_the_optimal_path(spec, mu0, nuT):
    nu0 = DiscreteMeasure([3.0, -1.0], [0.5, 0.5])
    edges = np.linspace(-2.0, 4.0, 601)
    rho, w = displacement_path(nu0, nuT, 100, edges, bandwidth=0.1)
    report = eulerian_upper_bound_check(spec, mu0, rho, w, nuT, nuT_tol=0.2)
    assert report.passed, report
    assert report.certificate.lhs == pytest.approx(-1.5)
    # the smeared path pays a little more than C_T = 0.5
    assert 0.49 < report.action < 0.52
    assert report.margin > -1e-6
    assert report.terminal_distance < 0.1


def test_rasterized_path_is_not_feasible(spec, mu0, nuT):
    nu0 = DiscreteMeasure([3.0, -1.0], [0.5, 0.5])
    rho, w = displacement_path(nu0, nuT, 100, np.linspace(-2.0, 4.0, 601))
    with pytest.raises(InfeasiblePath):
        eulerian_upper_bound_check(spec, mu0, rho, w, nuT, nuT_tol=0.2)


def test_crossing_path_is_worse(spec, mu0, nuT):
    nu0 = DiscreteMeasure([3.0, -1.0], [0.5, 0.5])
    edges = np.linspace(-2.0, 4.0, 601)
    rho, w = displacement_path(nu0, nuT, 200, edges, bandwidth=0.1, sense=Sense.ANTITONE)
    report = eulerian_upper_bound_check(spec, mu0, rho, w, nuT, nuT_tol=0.2)
    assert report.passed
    assert report.margin > 1.0


def test_upper_bound_rejects_infeasible_paths(spec, mu0, nuT, transfer):
    rho, w = static_path(mu0, np.linspace(-2.05, 2.05, 42), 4, 1.0)
    with pytest.raises(InfeasiblePath):
        eulerian_upper_bound_check(spec, mu0, rho, w, nuT, nuT_tol=0.1)

    rho, _ = transfer
    still = VelocityPath(rho.times, rho.edges, np.zeros((2, 3)))
    target = DiscreteMeasure.dirac(1.5)
    with pytest.raises(InfeasiblePath):
        eulerian_upper_bound_check(spec, mu0, rho, still, target, nuT_tol=0.1, feasibility_tol=0.1)


def test_lower_bound_of_resting_covectors(spec, mu0, nuT):
    rho, w = static_path(mu0, np.linspace(-2.05, 2.05, 42), 4, 1.0)
    report = eulerian_lower_bound_check(spec, rho, w, nuT)
    assert report.passed, report
    # W_over(nuT, mu0) = 1 and the covectors at +-1 pay 1/2
    assert_allclose(report.action, 0.5)
    assert_allclose(report.certificate.lhs, 0.5)
    assert_allclose(report.margin, 0.0, atol=1e-9)


def test_convergence_of_a_translation(spec):
    table = convergence_table(spec, DiscreteMeasure.dirac(0.0), DiscreteMeasure.dirac(1.0), -2.0, 3.0, 100, 20, levels=3)
    assert table.exact == pytest.approx(0.5)
    assert [row[0] for row in table.rows] == pytest.approx([0.05, 0.025, 0.0125])
    # a lone particle is carried exactly
    assert max(row[3] for row in table.rows) < 1e-12
    assert table.passed
    assert len(table.to_table()) == 3


@pytest.mark.parametrize('nu0, nuT', [
    (DiscreteMeasure([-0.5, 0.5], [0.5, 0.5]), DiscreteMeasure.dirac(0.0)),
    (DiscreteMeasure.dirac(0.0), DiscreteMeasure([-0.5, 0.5], [0.5, 0.5])),
], ids=['contracting', 'expanding'])
def test_convergence_when_atoms_meet(spec, nu0, nuT):
    table = convergence_table(spec, nu0, nuT, -2.0, 4.0, 100, 20, levels=3)
    assert table.exact == pytest.approx(0.125)
    errors = [row[3] for row in table.rows]
    assert errors[0] > errors[1] > errors[2] > 0
    assert min(table.rates) >= 0.9
    assert table.passed, table.rows


def test_convergence_of_spreading_atoms(spec):
    nu0 = DiscreteMeasure([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25])
    nuT = DiscreteMeasure([-2.0, 0.0, 2.0], [0.25, 0.5, 0.25])
    table = convergence_table(spec, nu0, nuT, -3.0, 3.0, 120, 20, levels=3)
    assert table.exact == pytest.approx(0.25)
    assert table.passed, table.rows
