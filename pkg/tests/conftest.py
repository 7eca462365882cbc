from fractions import Fraction

import pytest

from gwtqft.gwdata import GWInput
from gwtqft.relmod import build_structure

GL11 = GWInput([[0, 1], [1, 0]], [[1], [0]])
# rank 3, two odd roots; passes every input check
RANK3 = GWInput([[0, 1, 0], [1, 0, 0], [0, 0, 2]], [[1, 2], [0, 0], [0, 0]])


@pytest.fixture(scope="session")
def gl11():
    return GL11


@pytest.fixture(scope="session")
def rank3():
    return RANK3


@pytest.fixture(scope="session")
def compact():
    return build_structure(GL11, "compact", [[0, 3], [1, Fraction(3, 2)]])


@pytest.fixture(scope="session")
def toral():
    return build_structure(GWInput([[2]]), "toral", [[1]])


@pytest.fixture(scope="session")
def kernel():
    return build_structure(GL11, "kernel", [[1, 0]])
