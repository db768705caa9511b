"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Tolerances are stated inline; every numeric target was frozen from an
independent oracle (brute force, convolution, or closed-form arithmetic)
before the implementation ran.
"""

import json
import math
import random
import time
from contextlib import contextmanager

import pytest

import fullgroups.errors as E
from conftest import random_a_preserving, random_piecewise
from fullgroups import (
    FreeBackend,
    LinearEscapeOracle,
    OrbitModel,
    OrbitPoint,
    PiecewiseElement,
    VirtZData,
    ZdBackend,
    build_ball,
    build_range_plan,
    cayley_graph_source,
    cocycle,
    coloring_from_dict,
    coloring_to_dict,
    construct_coloring,
    decay_classify,
    defect_bound,
    dihedral_infinite,
    escape_constant,
    free_radial_source,
    free_witness,
    halfline_A,
    integers_as_even_extension,
    involution_apply,
    klein_cross_extension,
    srw_estimate,
    stabilizer_orbit_probe,
    standard_generators,
    verify_3proper,
    verify_P1,
    verify_P2,
)
from fullgroups.coloring import audit_conditions
from fullgroups.dynamics import Configuration
from fullgroups.groups import FiniteGroupTable


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL")
        raise
    print(f"[ACCEPTANCE] {name}: PASS")


def test_algebra_laws():
    """1000 random triples per backend; 20 mutated tables rejected; < 5 s."""
    with criterion("algebra-laws"):
        start = time.time()
        from test_groups import backends, random_element

        rng = random.Random(1)
        for backend in backends():
            e = backend.identity()
            for _ in range(1000):
                g, h, k = (random_element(backend, rng) for _ in range(3))
                assert backend.mul(backend.mul(g, h), k) == backend.mul(
                    g, backend.mul(h, k)
                )
                assert backend.mul(g, e) == g and backend.mul(e, g) == g
                assert backend.mul(g, backend.inv(g)) == e
        # twenty single-entry mutations, each provably invalid
        mutations = []
        dmul = [[0, 1], [1, 0]]
        for i in range(2):
            for j in range(2):
                bad = [row[:] for row in dmul]
                bad[i][j] ^= 1
                mutations.append(("Q", bad, None, None))
        kmul = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
        cells = [(i, j) for i in range(4) for j in range(4) if (i, j) != (0, 0)][:12]
        for i, j in cells:
            bad = [row[:] for row in kmul]
            bad[i][j] = (bad[i][j] + 1) % 4
            mutations.append(("Q", bad, None, None))
        dih = dihedral_infinite()
        mutations.append(("f", None, [[1, 0], [0, 0]], dih))      # normalization
        mutations.append(("f", None, [[0, 1], [0, 0]], dih))      # normalization
        mutations.append(("alpha", None, [-1, -1], dih))          # alpha(e) = -1
        kle = klein_cross_extension()
        mutations.append(("alpha", None, [1, -1, -1, -1], kle))   # not a hom
        assert len(mutations) == 20
        for kind, q, f, base in mutations:
            with pytest.raises(E.InvalidGroupSpec):
                if kind == "Q":
                    FiniteGroupTable(q)
                elif kind == "f":
                    VirtZData(base.Q, f, base.alpha)
                else:
                    VirtZData(base.Q, base.f, f)
        assert time.time() - start < 5.0


def test_cocycle_exactness(dinf_model):
    """Dihedral worked examples; 200 random pairs satisfy the cocycle
    identity exactly; brute force over [-200, 200] agrees; < 30 s."""
    with criterion("cocycle-exactness"):
        start = time.time()
        mo = dinf_model
        b = mo.backend
        tau = PiecewiseElement.global_element(mo, b.element(1, 0))
        assert cocycle(mo, tau) == [OrbitPoint(0, 1), OrbitPoint(1, 2)]
        refl = PiecewiseElement.global_element(mo, b.element(0, 1))
        assert cocycle(mo, refl) == []
        rng = random.Random(2)
        A = halfline_A(mo)
        for i in range(200):
            phi = random_piecewise(mo, rng)
            psi = random_piecewise(mo, rng)
            lhs = set(cocycle(mo, phi.compose(psi)))
            rhs = set(cocycle(mo, phi)).symmetric_difference(
                phi.apply(q) for q in cocycle(mo, psi)
            )
            assert lhs == rhs
            if i % 10 == 0:  # window brute force on a sample
                inv = phi.inverse()
                expected = set()
                for line in (1, 2):
                    for k in range(-200, 201):
                        q = OrbitPoint(k, line)
                        pre = inv.apply(q)
                        if (q.k in A[line - 1]) != (pre.k in A[pre.line - 1]):
                            expected.add(q)
                assert set(cocycle(mo, phi)) == expected
        assert time.time() - start < 30.0


def test_defect_bound(dinf_model):
    """measuredMax <= closed-form bound for 100 random elements on the
    zero-cocycle and nonzero-cocycle extension data."""
    with criterion("defect-bound"):
        even = OrbitModel(integers_as_even_extension(), [])
        rng = random.Random(3)
        for mo in (dinf_model, even):
            for _ in range(50):
                phi = random_piecewise(mo, rng)
                d = defect_bound(mo, phi, 10)
                assert d["measuredMax"] <= d["closedFormBound"], d


def test_stabilizer_probing(dinf_model):
    """50 random A-stabilizing elements: orbit closure halts below cap 10^4."""
    with criterion("stabilizer-probing"):
        rng = random.Random(4)
        for _ in range(50):
            phi = random_a_preserving(dinf_model, rng)
            assert cocycle(dinf_model, phi) == []
            result = stabilizer_orbit_probe(
                dinf_model, [phi], OrbitPoint(rng.randint(-5, 5), rng.randint(1, 2)),
                10**4,
            )
            assert not result["capHit"]
            assert result["size"] <= 10**4


def test_construction_paper_mode(z2_coloring):
    """Z^2 paper mode: k=1 at radius 40 (< 2 min) and k=2 at R_2 + 2R_2'
    (< 15 min); 3-proper, P1, P2 and conditions (1)-(3) all pass."""
    with criterion("construction-paper-mode"):
        start = time.time()
        cb = z2_coloring
        plan = cb.plan
        assert plan.r == [36]
        assert verify_3proper(cb)["holds"]
        assert verify_P1(cb, "A", 36)["holds"]
        assert verify_P2(cb, plan.elements[0], 36)["holds"]
        audit = audit_conditions(cb)
        assert all(
            entry[c]["holds"] for entry in audit.values()
            for c in ("condition1", "condition2", "condition3")
        )
        assert time.time() - start < 120.0
        # k = 2
        start = time.time()
        backend = ZdBackend(2)
        gens = standard_generators(backend)
        plan2 = build_range_plan(backend, gens, 2,
                                 LinearEscapeOracle(backend, gens, 6))
        radius = plan2.r[-1] + 2 * plan2.r_prime[-1]
        ball = build_ball(backend, gens, backend.identity(), radius)
        cb2 = construct_coloring(ball, plan2)
        assert verify_3proper(cb2)["holds"]
        for i in (1, 2):
            assert verify_P1(cb2, plan2.words[i - 1], plan2.r[i - 1])["holds"]
            assert verify_P2(cb2, plan2.elements[i - 1], plan2.r[i - 1])["holds"]
        audit2 = audit_conditions(cb2)
        assert all(
            entry[c]["holds"] for entry in audit2.values()
            for c in ("condition1", "condition2", "condition3")
        )
        assert time.time() - start < 900.0


def test_construction_tight_mode(f2_tight_coloring):
    """F_2 tight mode at radius 8 passes; Z raises NoEscape."""
    with criterion("construction-tight-mode"):
        cb = f2_tight_coloring
        assert verify_3proper(cb)["holds"]
        assert verify_P1(cb, "A", 7)["holds"]
        assert verify_P2(cb, cb.ball.backend.word("ab"), 7)["holds"]
        z1 = ZdBackend(1)
        with pytest.raises(E.NoEscape):
            LinearEscapeOracle(z1, standard_generators(z1), 6)


def test_dynamics(z2_coloring, f2_tight_coloring):
    """Involutions are involutions on 1000 sampled configurations; every
    placed word gives a moving witness along the reversed placement path."""
    with criterion("dynamics"):
        rng = random.Random(5)
        samples = 0
        for cb in (z2_coloring, f2_tight_coloring):
            candidates = [
                v for v in range(len(cb.ball))
                if cb.ball.radius - cb.ball.dist[v] >= 2
            ]
            while samples < (500 if cb is z2_coloring else 1000):
                v = rng.choice(candidates)
                cfg = Configuration(cb, v)
                for letter in "ABC":
                    twice = involution_apply(letter, involution_apply(letter, cfg))
                    assert twice.basepoint == v
                samples += 1
        for cb in (z2_coloring, f2_tight_coloring):
            for placement in cb.placements:
                result = free_witness(cb, placement.word)
                assert result["moved"]
                assert result["reversedPathFollowed"]


def test_escape_constant():
    """K(1) = 1 on F_2 and Z^2 by exhaustive probe at probeRadius 6;
    Z yields NoEscape."""
    with criterion("escape-constant"):
        for backend in (FreeBackend(2), ZdBackend(2)):
            gens = standard_generators(backend)
            assert escape_constant(backend, gens, 1, 6)["K"] == 1
        z1 = ZdBackend(1)
        with pytest.raises(E.NoEscape):
            escape_constant(z1, standard_generators(z1), 1, 6)


def test_walks():
    """Monte Carlo within 3 sigma of exact convolution for n <= 8 on Z and
    Z^2 (10^5 trials, seed 12345); alpha = 0.5 +/- 0.15 (Z), 1.0 +/- 0.2
    (Z^2); exponential rate 0.866 +/- 0.05 (F_2 oracle); < 2 min."""
    with criterion("walks"):
        start = time.time()
        for backend, alpha, tol in ((ZdBackend(1), 0.5, 0.15),
                                    (ZdBackend(2), 1.0, 0.2)):
            graph = cayley_graph_source(backend, radius=64)
            ws = srw_estimate(graph, 64, 100000, 12345)
            for t, exact in ws.exact.items():
                sd = math.sqrt(exact * (1 - exact) / ws.trials)
                assert abs(ws.estimates[t] - exact) <= 3 * sd, f"time {t}"
            profile = decay_classify(ws)
            assert profile["profile"] == "polynomial"
            assert abs(profile["alpha"] - alpha) <= tol, profile
        wsf = srw_estimate(free_radial_source(2, 128), 128, 1000, 12345,
                           exact_limit=128)
        profile = decay_classify(wsf)
        assert profile["profile"] == "exponential"
        assert abs(profile["rate"] - math.sqrt(3) / 2) <= 0.05, profile
        assert time.time() - start < 120.0


def test_reproducibility(tmp_path, z2_coloring):
    """Equal manifests give bit-identical cmd_color outputs; emitted files
    round-trip to equal in-memory values."""
    with criterion("reproducibility"):
        from fullgroups.cli import main

        spec = tmp_path / "z2.json"
        spec.write_text(json.dumps({"backend": "zd", "d": 2}))
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["color", "--group", str(spec), "--k", "1",
                         "--radius", "40", "--out", str(out)]) == 0
        for name in ("coloring.json", "coloring.dot", "report.json", "report.txt"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
        blob = json.loads((a / "coloring.json").read_text())
        cb = coloring_from_dict(blob)
        assert coloring_to_dict(cb) == coloring_to_dict(z2_coloring)
