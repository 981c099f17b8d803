from fractions import Fraction

import pytest

from kwisebound.exact_core import BinomialSpec

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


@pytest.fixture
def spec_4_half():
    return BinomialSpec(4, HALF)


@pytest.fixture
def spec_3_half():
    return BinomialSpec(3, HALF)
