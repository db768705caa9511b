import json

import pytest

from fullgroups import (
    FreeBackend,
    LinearEscapeOracle,
    RangePlan,
    ZdBackend,
    build_ball,
    build_range_plan,
    coloring_from_dict,
    coloring_to_dict,
    construct_coloring,
    enumerate_delta_words,
    find_marked_copies,
    standard_generators,
    tight_range_plan,
    verify_3proper,
    verify_P1,
    verify_P2,
)
from fullgroups.coloring import audit_conditions, delta_word
from fullgroups.errors import (
    BallTooSmall,
    NoEscape,
    NoInteriorCenters,
    PreconditionFailed,
)


def test_delta_words():
    words = enumerate_delta_words(3)
    assert words[:3] == ["A", "B", "C"]
    assert sum(1 for w in words if len(w) == 2) == 6
    assert [w for w in words if len(w) == 3][0] == "ABA"
    assert all(
        all(w[i] != w[i + 1] for i in range(len(w) - 1)) for w in words
    )
    for n in (1, 2, 3):
        assert sum(1 for w in words if len(w) == n) == 3 * 2 ** (n - 1)
    assert delta_word(1) == "A" and delta_word(4) == "AB"
    with pytest.raises(PreconditionFailed):
        enumerate_delta_words(0)


def test_paper_plan_z2():
    z2 = ZdBackend(2)
    gens = standard_generators(z2)
    plan = build_range_plan(z2, gens, 1, lambda n: n)
    assert plan.k == 1
    assert plan.words == ["A"] and plan.lengths == [2]
    assert plan.r_prime == [4] and plan.r == [36]
    plan2 = build_range_plan(z2, gens, 2, lambda n: n)
    assert plan2.r_prime[1] == 17  # max(len(g_2)+2, 8 + K(9))
    assert plan2.r[1] == 6 * 17 + 35 + plan2.lengths[1] + 1
    assert plan2.k_values == {9: 9, 35: 35}


def test_plan_rejects_equal_lengths():
    z2 = ZdBackend(2)
    with pytest.raises(PreconditionFailed):
        RangePlan(["AB"], [z2.element(2, 0)], [2], [4], [36], "paper")


def test_noescape_propagates_to_plan():
    z1 = ZdBackend(1)
    gens = standard_generators(z1)
    with pytest.raises(NoEscape):
        build_range_plan(z1, gens, 1, LinearEscapeOracle(z1, gens, 6))


def test_construction_z2(z2_coloring):
    cb = z2_coloring
    assert cb.plan.mode == "paper"
    assert verify_3proper(cb)["holds"]
    assert verify_P1(cb, "A", 36)["holds"]
    assert verify_P2(cb, cb.plan.elements[0], 36)["holds"]
    audit = audit_conditions(cb)
    assert all(
        entry[c]["holds"] for entry in audit.values()
        for c in ("condition1", "condition2", "condition3")
    )
    # protective balls pairwise disjoint
    ball = cb.ball
    protect = 2 * cb.plan.r_prime[0]
    bases = [p.base for p in cb.placements]
    for i, t in enumerate(bases):
        local = ball.bfs_limited(t, 2 * protect)
        for u in bases[i + 1:]:
            assert local.get(u, 2 * protect + 1) > 2 * protect


def test_p1_monotone_in_radius(z2_coloring):
    assert verify_P1(z2_coloring, "A", 36)["holds"]
    assert verify_P1(z2_coloring, "A", 38)["holds"]


def test_verifier_negatives(allf_coloring):
    cb = allf_coloring
    assert verify_3proper(cb)["holds"]
    assert not verify_P1(cb, "A", 2)["holds"]
    g = cb.ball.backend.element(1, 0)
    assert not verify_P2(cb, g, 2)["holds"]
    with pytest.raises(NoInteriorCenters):
        verify_P1(cb, "A", 99)


def test_3proper_violation_witness(allf_coloring):
    cb = allf_coloring
    bad = dict(cb.colors)
    ball = cb.ball
    # paint two edges at the center with the same word color
    k1 = ball.edge_key(0, 0)
    k2 = ball.edge_key(0, 2)
    bad[k1] = bad[k2] = "A"
    from fullgroups.coloring import ColoredBall

    result = verify_3proper(ColoredBall(ball, bad, [], cb.plan))
    assert not result["holds"] and result["witness"]["vertex"] == 0


def test_tight_mode_f2(f2_tight_coloring):
    cb = f2_tight_coloring
    assert cb.plan.mode == "tight"
    assert verify_3proper(cb)["holds"]
    assert verify_P1(cb, "A", 7)["holds"]
    assert verify_P2(cb, cb.ball.backend.word("ab"), 7)["holds"]


def test_paper_mode_radius_guard():
    z2 = ZdBackend(2)
    gens = standard_generators(z2)
    plan = build_range_plan(z2, gens, 1, lambda n: n)
    ball = build_ball(z2, gens, z2.identity(), 20)
    with pytest.raises(BallTooSmall):
        construct_coloring(ball, plan)


def test_marked_copy_scan_matches_placements(z2_coloring):
    cb = z2_coloring
    copies = find_marked_copies(cb, "A")
    placed = {tuple(p.path) for p in cb.placements}
    assert placed <= set(copies)


def test_determinism(z2_coloring):
    z2 = ZdBackend(2)
    gens = standard_generators(z2)
    plan = build_range_plan(z2, gens, 1, LinearEscapeOracle(z2, gens, 6))
    ball = build_ball(z2, gens, z2.identity(), 40)
    again = construct_coloring(ball, plan)
    assert coloring_to_dict(again) == coloring_to_dict(z2_coloring)


def test_json_roundtrip(z2_coloring, f2_tight_coloring):
    for cb in (z2_coloring, f2_tight_coloring):
        blob = json.loads(json.dumps(coloring_to_dict(cb)))
        cb2 = coloring_from_dict(blob)
        assert coloring_to_dict(cb2) == coloring_to_dict(cb)


def test_tight_plan_flagged(f2_tight_coloring):
    report = coloring_to_dict(f2_tight_coloring)
    assert report["mode"] == "tight"
