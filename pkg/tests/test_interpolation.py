import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballistic import (
    ConvexProfile,
    CostSpec,
    DiscreteMeasure,
    LagrangianSpec,
    MapUnavailable,
    Provenance,
    composed_cost,
    duality_check,
    factorization_check,
    initial_potential,
    interpolate_max,
    interpolate_min,
    is_concave,
    refinement_table,
    reverse_interpolate,
    value_functional,
)
from ballistic.utils import make_axis


@pytest.fixture
def line():
    return DiscreteMeasure.uniform(np.linspace(0.0, 1.0, 5))


def test_composed_cost_records_argmins(spec):
    cost, argmins = composed_cost(spec, [-1.0, 1.0], make_axis(-4.0, 4.0, 1.0), [0.0, 2.0])
    assert cost.provenance == Provenance.COMPOSED
    # min_y v y + (x - y)^2 / 2 is attained at y = x - v
    assert_allclose(cost.entries, [[-0.5, -2.5], [-0.5, 1.5]])
    assert_allclose(argmins[..., 0], [[1.0, 3.0], [-1.0, 1.0]])


def test_min_interpolation_recovers_intermediate_measure(spec, mu0, nuT):
    report = interpolate_min(spec, mu0, nuT, probes=5, seed=11)
    assert report.passed
    assert_allclose(report.value, -1.5, atol=1e-9)
    assert_allclose(np.sort(report.intermediate.points[:, 0]), [-1.0, 3.0], atol=1e-9)
    assert_allclose(report.intermediate.weights, [0.5, 0.5])
    assert len(report.cells) == 2
    assert report.probes == 0.0


def test_coarse_grid_only_bounds_the_value(spec, mu0, nuT):
    report = interpolate_min(spec, mu0, nuT, (make_axis(-4.0, 4.0, 2.0),))
    assert report.certificate.passed
    assert report.bound.passed
    assert report.value > -1.5 + 1e-3


def test_random_measures_need_a_seed(spec, mu0, nuT):
    with pytest.raises(ValueError):
        interpolate_min(spec, mu0, nuT, probes=2)


def test_max_interpolation_keeps_covectors_in_place(spec, mu0, nuT):
    report = interpolate_max(spec, mu0, nuT, make_axis(-3.0, 3.0, 0.5), probes=5, seed=11)
    assert report.passed
    assert_allclose(report.value, 0.5)
    assert report.intermediate.sorted() == mu0
    lines = report.to_lines()
    assert lines[0] == 'passed: pass'
    assert lines[-1].startswith('intermediate: ')


def test_refinement_is_monotone(spec, mu0, nuT):
    table = refinement_table(spec, mu0, nuT, -4.0, 4.0, 2, levels=3)
    assert table.passed
    assert [row[0] for row in table.rows] == [4.0, 2.0, 1.0]
    assert_allclose(table.rows[-1][2], 0.0, atol=1e-12)
    assert table.rows[0][2] > 0
    assert table.exact == pytest.approx(-1.5)


def test_value_functional_starts_at_bilinear_value(spec, mu0, nuT):
    values = value_functional(spec, mu0, nuT, [0.0, 0.5, 1.0])
    assert_allclose(values, [-1.0, -1.25, -1.5])


def test_initial_potential_is_concave(spec, mu0, nuT):
    axis = make_axis(-6.0, 6.0, 0.05)
    V0 = initial_potential(spec, mu0, nuT, axis, axis)
    assert is_concave(V0, 1e-9).passed


def test_duality_with_variational_solutions(spec, mu0, nuT):
    report = duality_check(spec, mu0, nuT)
    assert report.certificate.passed, report.certificate
    assert report.mirror.passed, report.mirror
    assert report.strict
    assert len(report.perturbed) == 20
    assert report.passed


def test_duality_on_random_eight_atom_instances(spec):
    rng = np.random.default_rng(8)
    for _ in range(10):
        mu0 = DiscreteMeasure(rng.uniform(-2.0, 2.0, size=8), rng.dirichlet(np.ones(8)))
        nuT = DiscreteMeasure(rng.uniform(-2.0, 2.0, size=8), rng.dirichlet(np.ones(8)))
        report = duality_check(spec, mu0, nuT)
        objective = report.certificate.lhs
        assert report.certificate.passed, report.certificate
        assert all(value <= objective + report.tolerance for value in report.perturbed)
        # small perturbations may tie with the objective on the grid
        assert all(value < objective for value in report.perturbed[9:])
        assert report.strict


def test_reverse_translation(spec, line):
    report = reverse_interpolate(spec, line, line.translated(1.0), probe_count=10, seed=3)
    assert report.passed
    assert_allclose(report.value, 0.5)
    assert report.momenta.size == 1
    assert_allclose(report.momenta.points[:, 0], [1.0])
    assert report.certificate.passed
    assert_allclose(report.slope_range, (1.0, 1.0))
    assert report.gradient_mismatch < 1e-9


@pytest.mark.parametrize('T', [0.5, 1.0, 2.0])
@pytest.mark.parametrize('a', [0.5, 1.0, 2.0])
def test_reverse_translation_family(spec, line, a, T):
    report = reverse_interpolate(spec.with_horizon(T), line, line.translated(a), probe_count=100, seed=5)
    assert_allclose(report.value, a ** 2 / (2 * T))
    assert report.probe_count == 100
    assert report.probes <= 1e-9 * (1.0 + report.value)
    assert_allclose(report.momenta.points[:, 0], [a / T])
    assert report.passed


def test_reverse_of_identical_measures(spec, line):
    report = reverse_interpolate(spec, line, line)
    assert_allclose(report.value, 0.0)
    assert report.momenta.size == 1
    assert_allclose(report.momenta.points[:, 0], [0.0], atol=1e-9)
    assert report.passed


def test_reverse_expansion_is_not_concave(spec, line):
    stretched = DiscreteMeasure(2.0 * line.points, line.weights)
    report = reverse_interpolate(spec, line, stretched, probe_count=5, seed=3)
    assert report.extracted
    assert not report.concave.passed
    assert report.concave.witness is not None
    assert report.momenta is None
    assert report.certificate is None
    # the inequality still holds for every random measure
    assert report.passed
    assert_allclose(report.slope_range, (2.0, 2.0))


def test_reverse_drops_atoms_without_mass(spec):
    nu0 = DiscreteMeasure([0.0, 0.5, 1.0], [0.5, 0.0, 0.5])
    report = reverse_interpolate(spec, nu0, nu0.translated(1.0), probe_count=5, seed=3)
    assert report.passed
    assert report.concave.passed
    assert_allclose(report.value, 0.5)
    assert_allclose(report.momenta.points[:, 0], [1.0])
    assert_allclose(report.momenta.weights, [1.0])


def test_reverse_momenta_follow_the_potential_gradient(spec):
    # C_1({0, 1, 2} -> {0, 0.5, 1}) has the initial potential -y^2 / 4
    nu0 = DiscreteMeasure.uniform([0.0, 1.0, 2.0])
    report = reverse_interpolate(spec, nu0, DiscreteMeasure.uniform([0.0, 0.5, 1.0]))
    assert report.concave.passed
    assert_allclose(np.sort(report.momenta.points[:, 0]), [-1.0, -0.5, 0.0], atol=1e-9)
    assert report.certificate.passed
    assert report.gradient_mismatch < 1e-6


def test_reverse_in_the_plane_reports_the_value_only():
    plane = CostSpec(LagrangianSpec.quadratic(1.0, dim=2), 1.0, inner_axes=(make_axis(-4, 4, 0.5),) * 2)
    nu0 = DiscreteMeasure.uniform([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    report = reverse_interpolate(plane, nu0, nu0.translated([1.0, 1.0]), probe_count=5, seed=7)
    assert not report.extracted
    assert report.concave is None
    assert report.momenta is None
    assert report.slope_range is None
    assert_allclose(report.value, 1.0)
    assert report.probe_count == 5
    assert report.passed


def test_factorization_for_translation(line):
    report = factorization_check(ConvexProfile('quadratic'), line, line.translated(1.0), make_axis(-4.0, 4.0, 0.01))
    assert report.passed
    assert_allclose(report.value, 0.5)
    assert_allclose(report.k, 0.5)
    assert_allclose(report.minus, 0.0, atol=1e-12)
    assert not report.map_available
    assert report.map_certificate is None

    with pytest.raises(MapUnavailable):
        factorization_check(ConvexProfile('quadratic'), line, line.translated(1.0), make_axis(-4.0, 4.0, 0.01), require_map=True)


def test_factorization_composes_antitone_maps():
    nu0 = DiscreteMeasure.uniform([0.0, 1.0, 2.0])
    nu1 = DiscreteMeasure.uniform([0.0, 0.5, 1.0])
    report = factorization_check(ConvexProfile('quadratic'), nu0, nu1, make_axis(-4.0, 4.0, 0.01))
    assert report.map_available
    assert report.map_certificate.passed
    assert_allclose(report.value, 0.625 / 3)
    assert_allclose(report.k, 0.625 / 3)
    assert report.passed


def test_factorization_refuses_convex_potentials(line):
    stretched = DiscreteMeasure(2.0 * line.points, line.weights)
    with pytest.raises(MapUnavailable):
        factorization_check(ConvexProfile('quadratic'), line, stretched, make_axis(-4.0, 4.0, 0.01))
