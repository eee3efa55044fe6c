import numpy as np
import pytest
from hypothesis import settings, strategies as st

from lpflow.algebra import BlockAlgebra

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

UNIT4 = BlockAlgebra([(4, 1.0)])
MIXED4 = BlockAlgebra([(2, 0.5), (1, 1.0), (1, 2.5)])
UNIT8 = BlockAlgebra([(8, 1.0)])
MIXED8 = BlockAlgebra([(4, 1.0), (2, 0.5), (2, 2.5)])
ALGEBRAS = [UNIT4, MIXED4, UNIT8, MIXED8]

# hypothesis draws a small layout and a seed; the elements come from numpy
layouts = st.lists(
    st.tuples(st.integers(1, 4), st.sampled_from([0.25, 0.5, 1.0, 2.0, 3.5])),
    min_size=1, max_size=3,
).map(BlockAlgebra)
seeds = st.integers(0, 2 ** 32 - 1)


@pytest.fixture(params=ALGEBRAS, ids=lambda a: a.label())
def alg(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
