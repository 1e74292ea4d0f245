import numpy as np
import pytest

from ballistic import CostSpec, DiscreteMeasure, LagrangianSpec
from ballistic.utils import make_axis


@pytest.fixture
def quadratic():
    return LagrangianSpec.quadratic(1.0)


@pytest.fixture
def spec(quadratic):
    return CostSpec(quadratic, 1.0, inner_axes=make_axis(-6.0, 6.0, 0.01))


@pytest.fixture
def mu0():
    return DiscreteMeasure([-1.0, 1.0], [0.5, 0.5])


@pytest.fixture
def nuT():
    return DiscreteMeasure([0.0, 2.0], [0.5, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def config(tmp_path):
    """Writes the two atom instance and a config that points at it."""
    (tmp_path / 'mu0.txt').write_text('-1 0.5\n1 0.5\n')
    (tmp_path / 'nuT.txt').write_text('# x weight\n0 0.5\n2 0.5\n')
    path = tmp_path / 'problem.ini'
    path.write_text(
        '[problem]\n'
        'dimension = 1\n'
        'horizon = 1.0\n'
        'seed = 7\n'
        '\n'
        '[lagrangian]\n'
        'variant = quadratic\n'
        'mass = 1.0\n'
        '\n'
        '[grid]\n'
        'lo = -6\n'
        'hi = 6\n'
        'spacing = 0.01\n'
        '\n'
        '[measures]\n'
        'source = mu0.txt\n'
        'target = nuT.txt\n'
    )
    return path
