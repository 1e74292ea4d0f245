import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballistic import DiscreteMeasure, InputError, SizeMismatch


def test_duplicates_are_merged_in_order():
    mu = DiscreteMeasure([2.0, -1.0, 2.0, 0.0], [0.25, 0.25, 0.25, 0.25])
    assert_allclose(mu.points[:, 0], [2.0, -1.0, 0.0])
    assert_allclose(mu.weights, [0.5, 0.25, 0.25])
    assert len(mu) == 3


@pytest.mark.parametrize('points, weights, exc', [
    ([0.0, 1.0], [1.0], SizeMismatch),
    ([], [], InputError),
    ([0.0, 1.0], [1.5, -0.5], InputError),
    ([0.0, 1.0], [0.5, 0.4], InputError),
    ([0.0, np.inf], [0.5, 0.5], InputError),
])
def test_rejects_invalid_input(points, weights, exc):
    with pytest.raises(exc):
        DiscreteMeasure(points, weights)


def test_constructors():
    assert DiscreteMeasure.dirac([1.0, 2.0]).points.shape == (1, 2)
    uniform = DiscreteMeasure.uniform([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert_allclose(uniform.weights, 0.25)
    assert_allclose(uniform.mean(), [0.5, 0.5])

    renormalized = DiscreteMeasure.from_unnormalized([0.0, 1.0], [0.5, 0.5 + 1e-8])
    assert_allclose(renormalized.weights.sum(), 1.0)
    with pytest.raises(InputError):
        DiscreteMeasure.from_unnormalized([0.0, 1.0], [0.5, 0.6])


def test_moments_and_maps(mu0):
    assert_allclose(mu0.integrate(lambda p: p[:, 0] ** 3 + 1), 1.0)
    assert_allclose(mu0.second_moment(), 1.0)
    assert mu0.reflected().sorted() == mu0
    shifted = mu0.translated(2.0)
    assert_allclose(shifted.points[:, 0], [1.0, 3.0])
    collapsed = mu0.pushforward(np.abs)
    assert collapsed.size == 1
    assert_allclose(collapsed.weights, [1.0])
    with pytest.raises(SizeMismatch):
        mu0.integrate([1.0, 2.0, 3.0])


def test_sorted_and_bounds():
    mu = DiscreteMeasure([3.0, -2.0, 1.0], [0.2, 0.3, 0.5])
    ordered = mu.sorted()
    assert_allclose(ordered.points[:, 0], [-2.0, 1.0, 3.0])
    assert_allclose(ordered.weights, [0.3, 0.5, 0.2])
    lo, hi = mu.bounds()
    assert lo[0] == -2.0 and hi[0] == 3.0


def test_text_round_trip(tmp_path, mu0):
    path = tmp_path / 'mu.txt'
    mu0.savetxt(str(path))
    assert DiscreteMeasure.loadtxt(str(path), 1) == mu0


def test_loadtxt_accepts_headers_comments_and_delimiters(tmp_path):
    path = tmp_path / 'mu.csv'
    path.write_text('x,y,weight\n0,1,0.5  # first\n\n1;1;0.5\n')
    mu = DiscreteMeasure.loadtxt(str(path))
    assert mu.dim == 2
    assert_allclose(mu.points, [[0.0, 1.0], [1.0, 1.0]])


def test_loadtxt_errors(tmp_path):
    bad = tmp_path / 'bad.txt'
    bad.write_text('0 0.5\nx 0.5\n')
    with pytest.raises(InputError):
        DiscreteMeasure.loadtxt(str(bad))

    ragged = tmp_path / 'ragged.txt'
    ragged.write_text('0 0.5\n1 2 0.5\n')
    with pytest.raises(InputError):
        DiscreteMeasure.loadtxt(str(ragged))

    wide = tmp_path / 'wide.txt'
    wide.write_text('0 0 1\n')
    with pytest.raises(SizeMismatch):
        DiscreteMeasure.loadtxt(str(wide), 1)

    empty = tmp_path / 'empty.txt'
    empty.write_text('# nothing\n')
    with pytest.raises(InputError):
        DiscreteMeasure.loadtxt(str(empty))
