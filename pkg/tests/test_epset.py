import random

import pytest

from fullgroups import EPSet


def random_epset(rng):
    period = rng.randint(1, 6)
    bound = rng.randint(0, 6)
    core = [k for k in range(-bound, bound) if rng.random() < 0.4]
    pos = [r for r in range(period) if rng.random() < 0.4]
    neg = [r for r in range(period) if rng.random() < 0.4]
    return EPSet(period, bound, core, pos, neg)


def brute(s, window=40):
    return {k for k in range(-window, window + 1) if k in s}


def test_membership_primitives():
    evens = EPSet.progression(2, 0, 0)
    assert 0 in evens and 2 in evens and 1 not in evens and -2 not in evens
    up = EPSet.halfline(1, 3)
    assert 3 in up and 100 in up and 2 not in up
    down = EPSet.halfline(-1, -3)
    assert -3 in down and -50 in down and -2 not in down
    fin = EPSet.finite([1, -4])
    assert fin.finite_elements() == [-4, 1]


def test_canonical_form_is_minimal():
    # same set written redundantly collapses to one normal form
    a = EPSet(4, 3, [0, 2, -2], [0, 2], [0, 2])
    b = EPSet(2, 0, [], [0], [0])
    assert a == b
    assert a.period == 2 and a.bound == 0


def test_algebra_against_brute_force():
    rng = random.Random(3)
    for _ in range(200):
        s, t = random_epset(rng), random_epset(rng)
        assert brute(s.union(t)) == brute(s) | brute(t)
        assert brute(s.intersection(t)) == brute(s) & brute(t)
        assert brute(s.symmetric_difference(t)) == brute(s) ^ brute(t)
        assert brute(s.difference(t)) == brute(s) - brute(t)
        w = 20
        assert {k for k in range(-w, w) if k in s.complement()} == {
            k for k in range(-w, w) if k not in s
        }
        shift = rng.randint(-5, 5)
        assert {k for k in range(-20, 20) if k in s.translate(shift)} == {
            k + shift for k in range(-25, 25) if k in s and -20 <= k + shift < 20
        }
        assert {k for k in range(-20, 21) if k in s.negate()} == {
            -k for k in range(-20, 21) if k in s
        }


def test_de_morgan():
    rng = random.Random(5)
    for _ in range(50):
        s, t = random_epset(rng), random_epset(rng)
        assert s.union(t).complement() == s.complement().intersection(t.complement())
        assert s.intersection(t).complement() == s.complement().union(t.complement())


def test_equality_window_bound():
    # two EPSets are equal iff memberships agree on [-(2MB+M), 2MB+M]
    rng = random.Random(11)
    for _ in range(200):
        s, t = random_epset(rng), random_epset(rng)
        M = s.period * t.period
        B = max(s.bound, t.bound)
        W = 2 * M * B + M
        agree = all((k in s) == (k in t) for k in range(-W, W + 1))
        assert agree == (s == t)


def test_affine():
    s = EPSet.progression(3, 1, 0)
    img = s.affine(-1, 2)
    assert all((2 - k in img) == (k in s) for k in range(-30, 30))


def test_descriptor_roundtrip():
    rng = random.Random(13)
    for _ in range(100):
        s = random_epset(rng)
        assert EPSet.from_descriptors(s.to_descriptors()) == s


def test_descriptor_kinds():
    assert EPSet.from_descriptors(
        [{"kind": "halfline", "sign": 1, "from": 0}]
    ) == EPSet.halfline(1, 0)
    with pytest.raises(ValueError):
        EPSet.from_descriptors([{"kind": "nope"}])


def test_empty_and_all():
    assert EPSet.empty().is_empty()
    assert not EPSet.all().is_finite()
    assert EPSet.all().complement() == EPSet.empty()
