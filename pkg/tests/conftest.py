import random

import pytest

from fullgroups import (
    LinearEscapeOracle,
    OrbitModel,
    OrbitPoint,
    PiecewiseElement,
    RangePlan,
    FreeBackend,
    ZdBackend,
    build_ball,
    build_range_plan,
    construct_coloring,
    dihedral_infinite,
    halfline_A,
    standard_generators,
    tight_range_plan,
)


@pytest.fixture(scope="session")
def dinf_model():
    """Infinite dihedral group acting on the orbit of a trivially stabilized point."""
    return OrbitModel(dihedral_infinite(), [])


@pytest.fixture(scope="session")
def z2_coloring():
    """Paper-mode Z^2 coloring, k=1, radius 40 (the main worked example)."""
    backend = ZdBackend(2)
    gens = standard_generators(backend)
    oracle = LinearEscapeOracle(backend, gens, probe_radius=6)
    plan = build_range_plan(backend, gens, 1, oracle)
    ball = build_ball(backend, gens, backend.identity(), 40)
    return construct_coloring(ball, plan)


@pytest.fixture(scope="session")
def f2_tight_coloring():
    """Tight-mode F_2 coloring at radius 8 with user ranges (3, 7)."""
    backend = FreeBackend(2)
    gens = standard_generators(backend)
    plan = tight_range_plan(backend, gens, [("A", backend.word("ab"))], [3], [7])
    ball = build_ball(backend, gens, backend.identity(), 8)
    return construct_coloring(ball, plan)


@pytest.fixture(scope="session")
def allf_coloring():
    """k=0 plan: every edge filled with F."""
    backend = ZdBackend(2)
    gens = standard_generators(backend)
    ball = build_ball(backend, gens, backend.identity(), 6)
    return construct_coloring(ball, RangePlan([], [], [], [], [], "paper"))


def random_piecewise(mo: OrbitModel, rng: random.Random, blocks: int = 3) -> PiecewiseElement:
    """Random product of global elements and transpositions."""
    phi = PiecewiseElement.identity(mo)
    for _ in range(rng.randint(1, blocks)):
        if rng.random() < 0.5:
            g = mo.backend.element(rng.randint(-3, 3), rng.randrange(mo.d.Q.order))
            block = PiecewiseElement.global_element(mo, g)
        else:
            p = OrbitPoint(rng.randint(-8, 8), rng.randint(1, mo.m))
            q = OrbitPoint(rng.randint(-8, 8), rng.randint(1, mo.m))
            block = PiecewiseElement.transposition(mo, p, q)
        phi = phi.compose(block)
    return phi


def random_a_preserving(mo: OrbitModel, rng: random.Random) -> PiecewiseElement:
    """Random product of transpositions whose two points lie on the same side of A."""
    A = halfline_A(mo)
    phi = PiecewiseElement.identity(mo)
    for _ in range(rng.randint(1, 3)):
        line = rng.randint(1, mo.m)
        inside = rng.random() < 0.5
        ks = []
        while len(ks) < 2:
            k = rng.randint(-10, 10)
            if (k in A[line - 1]) == inside and k not in ks:
                ks.append(k)
        block = PiecewiseElement.transposition(
            mo, OrbitPoint(ks[0], line), OrbitPoint(ks[1], line)
        )
        phi = phi.compose(block)
    return phi
