import random

import pytest
from hypothesis import strategies as st

from rationalcsp.csp import BinaryConstraint, Instance


def random_instance(rng: random.Random, max_vars=6, max_dom=4, density=None, tightness=None) -> Instance:
    """Small random binary CSP; every pair constrained with probability ``density``."""
    n = rng.randint(1, max_vars)
    sizes = [rng.randint(1, max_dom) for _ in range(n)]
    density = rng.random() if density is None else density
    cons = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                t = rng.random() if tightness is None else tightness
                rows = tuple(tuple(rng.random() >= t for _ in range(sizes[j])) for _ in range(sizes[i]))
                if rng.random() < 0.5:
                    # exercise reversed scopes too
                    rows = tuple(zip(*rows))
                    cons.append(BinaryConstraint((j, i), rows))
                else:
                    cons.append(BinaryConstraint((i, j), rows))
    return Instance(sizes, cons)


@st.composite
def instances(draw, max_vars=5, max_dom=4):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_instance(random.Random(seed), max_vars, max_dom)


def neq2() -> Instance:
    return Instance([2, 2], [BinaryConstraint.from_predicate(0, 1, 2, 2, lambda a, b: a != b)])


def chain_lt(n=3, d=3) -> Instance:
    cons = [BinaryConstraint.from_predicate(i, i + 1, d, d, lambda a, b: a < b) for i in range(n - 1)]
    return Instance([d] * n, cons)


@pytest.fixture
def rng():
    return random.Random(20240601)
