from fractions import Fraction

import pytest

import maxlab as ml


@pytest.fixture
def s_232():
    """Star space tau=2, d=3/2, m=2."""
    return ml.basic_s(2, Fraction(3, 2), 2)


@pytest.fixture
def t_123():
    """Two-layer space tau=1, d=2, m=3."""
    return ml.basic_t(1, 2, 3)


@pytest.fixture
def one_point():
    return ml.single_point()
