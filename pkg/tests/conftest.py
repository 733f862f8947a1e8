from __future__ import annotations

from fractions import Fraction

import pytest

from qphi import parse_angle
from qphi.exactnum import QuadraticSurd, SurdAngle
from qphi import liouville


@pytest.fixture(scope="session")
def sqrt2():
    return parse_angle("surd:sqrt2")


@pytest.fixture(scope="session")
def golden():
    return SurdAngle(QuadraticSurd(1, 1, 5, 2))


@pytest.fixture(scope="session")
def liou22():
    return parse_angle("liouville:2,2")


@pytest.fixture(scope="session")
def seq3():
    return liouville.build_denominators((2, 2), 3)


@pytest.fixture(scope="session")
def seq4():
    # one-time cost: materializes a_4 = 2 * a_3 * a_3! (~3.5M digits)
    return liouville.build_denominators((2, 2), 4)


@pytest.fixture(scope="session")
def affine_half():
    return parse_angle("affine:1/2*sqrt2+1/3")


@pytest.fixture(scope="session")
def one_third():
    return Fraction(1, 3)
