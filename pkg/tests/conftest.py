from fractions import Fraction

import pytest

from alsq.measures import make_measure
from alsq.selftest import example_one, example_two


@pytest.fixture
def five_atom_real():
    return example_one()


@pytest.fixture
def six_atom_exact():
    return example_two()


@pytest.fixture
def three_atom_square():
    # ((1/2) at 1 + (1/2) at 2) squared
    return make_measure([(1, Fraction(1, 4)), (2, Fraction(1, 2)),
                         (4, Fraction(1, 4))])
