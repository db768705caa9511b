"""Eventually periodic subsets of Z.

A set is stored as a period M >= 1, a bound B >= 0, an explicit core on
[-B, B), and residue classes mod M governing membership for k >= B
(positive side) and k < -B (negative side).  Instances are canonicalized
on construction (minimal period, minimal bound), so extensional equality
is structural equality.  The algebra (union, intersection, complement,
translation, negation) is exact and closed.
"""

from __future__ import annotations


class EPSet:
    __slots__ = ("period", "bound", "core", "pos", "neg")

    def __init__(self, period: int, bound: int, core, pos, neg):
        if period < 1:
            raise ValueError("period must be >= 1")
        if bound < 0:
            raise ValueError("bound must be >= 0")
        core = frozenset(int(k) for k in core)
        if any(not (-bound <= k < bound) for k in core):
            raise ValueError("core points must lie in [-bound, bound)")
        pos = frozenset(r % period for r in pos)
        neg = frozenset(r % period for r in neg)
        period, pos, neg = _reduce_period(period, pos, neg)
        bound, core = _reduce_bound(period, bound, core, pos, neg)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)

    def __setattr__(self, name, value):
        raise AttributeError("EPSet is immutable")

    # -- membership and structure ------------------------------------------

    def __contains__(self, k: int) -> bool:
        if k >= self.bound:
            return k % self.period in self.pos
        if k < -self.bound:
            return k % self.period in self.neg
        return k in self.core

    def is_finite(self) -> bool:
        return not self.pos and not self.neg

    def is_empty(self) -> bool:
        return self.is_finite() and not self.core

    def finite_elements(self) -> list[int]:
        """Sorted elements; only valid for finite sets."""
        if not self.is_finite():
            raise ValueError("set is infinite")
        return sorted(self.core)

    def __eq__(self, other):
        return (
            isinstance(other, EPSet)
            and self.period == other.period
            and self.bound == other.bound
            and self.core == other.core
            and self.pos == other.pos
            and self.neg == other.neg
        )

    def __hash__(self):
        return hash((self.period, self.bound, self.core, self.pos, self.neg))

    def __repr__(self):
        return (
            f"EPSet(M={self.period}, B={self.bound}, core={sorted(self.core)}, "
            f"pos={sorted(self.pos)}, neg={sorted(self.neg)})"
        )

    # -- algebra -----------------------------------------------------------

    def _binary(self, other: "EPSet", op) -> "EPSet":
        M = _lcm(self.period, other.period)
        B = max(self.bound, other.bound)
        core = {k for k in range(-B, B) if op(k in self, k in other)}
        pos = {
            r
            for r in range(M)
            if op(r % self.period in self.pos, r % other.period in other.pos)
        }
        neg = {
            r
            for r in range(M)
            if op(r % self.period in self.neg, r % other.period in other.neg)
        }
        return EPSet(M, B, core, pos, neg)

    def union(self, other: "EPSet") -> "EPSet":
        return self._binary(other, lambda a, b: a or b)

    def intersection(self, other: "EPSet") -> "EPSet":
        return self._binary(other, lambda a, b: a and b)

    def difference(self, other: "EPSet") -> "EPSet":
        return self._binary(other, lambda a, b: a and not b)

    def symmetric_difference(self, other: "EPSet") -> "EPSet":
        return self._binary(other, lambda a, b: a != b)

    def complement(self) -> "EPSet":
        pos = frozenset(r for r in range(self.period) if r not in self.pos)
        neg = frozenset(r for r in range(self.period) if r not in self.neg)
        core = {k for k in range(-self.bound, self.bound) if k not in self.core}
        return EPSet(self.period, self.bound, core, pos, neg)

    def translate(self, t: int) -> "EPSet":
        """The set {k + t : k in self}."""
        M = self.period
        B = self.bound + abs(t)
        core = {k for k in range(-B, B) if (k - t) in self}
        pos = {r for r in range(M) if (r - t) % M in self.pos}
        neg = {r for r in range(M) if (r - t) % M in self.neg}
        return EPSet(M, B, core, pos, neg)

    def negate(self) -> "EPSet":
        """The set {-k : k in self}."""
        M = self.period
        B = self.bound + 1
        core = {k for k in range(-B, B) if (-k) in self}
        pos = {r for r in range(M) if (-r) % M in self.neg}
        neg = {r for r in range(M) if (-r) % M in self.pos}
        return EPSet(M, B, core, pos, neg)

    def affine(self, sign: int, offset: int) -> "EPSet":
        """The image {sign*k + offset : k in self} for sign in {+1,-1}."""
        if sign == 1:
            return self.translate(offset)
        if sign == -1:
            return self.negate().translate(offset)
        raise ValueError(f"sign must be +1 or -1, got {sign}")

    # -- serialization -----------------------------------------------------

    def to_descriptors(self) -> list[dict]:
        """Decompose into finite/progression descriptors (JSON-ready)."""
        out = []
        points = sorted(k for k in self.core)
        if points:
            out.append({"kind": "finite", "points": points})
        for r in sorted(self.pos):
            out.append({"kind": "progression", "mod": self.period,
                        "residue": r, "from": self.bound, "sign": 1})
        for r in sorted(self.neg):
            out.append({"kind": "progression", "mod": self.period,
                        "residue": r, "from": -self.bound - 1, "sign": -1})
        return out

    @staticmethod
    def from_descriptors(descriptors) -> "EPSet":
        """Union of primitive descriptors; inverse of to_descriptors."""
        out = EPSet.empty()
        for d in descriptors:
            kind = d["kind"]
            if kind == "finite":
                piece = EPSet.finite(d["points"])
            elif kind == "halfline":
                piece = EPSet.halfline(d["sign"], d["from"])
            elif kind == "progression":
                sign = d.get("sign", 1)
                if sign == 1:
                    piece = EPSet.progression(d["mod"], d["residue"], d["from"])
                else:
                    # downward progression: negate the upward one
                    piece = EPSet.progression(
                        d["mod"], -d["residue"], -d["from"]
                    ).negate()
            else:
                raise ValueError(f"unknown descriptor kind {kind!r}")
            out = out.union(piece)
        return out

    # -- constructors ------------------------------------------------------

    @staticmethod
    def empty() -> "EPSet":
        return EPSet(1, 0, (), (), ())

    @staticmethod
    def all() -> "EPSet":
        return EPSet(1, 0, (), (0,), (0,))

    @staticmethod
    def finite(points) -> "EPSet":
        points = [int(k) for k in points]
        B = max((abs(k) for k in points), default=0) + 1
        return EPSet(1, B, points, (), ())

    @staticmethod
    def halfline(sign: int, start: int = 0) -> "EPSet":
        """{k : k >= start} for sign +1, {k : k <= start} for sign -1."""
        B = abs(start) + 1
        if sign == 1:
            return EPSet(1, B, range(start, B), (0,), ())
        if sign == -1:
            return EPSet(1, B, range(-B, start + 1), (), (0,))
        raise ValueError(f"sign must be +1 or -1, got {sign}")

    @staticmethod
    def progression(mod: int, residue: int, start: int) -> "EPSet":
        """{k : k = residue (mod mod), k >= start}."""
        if mod < 1:
            raise ValueError("mod must be >= 1")
        B = abs(start) + 1
        core = (k for k in range(start, B) if k % mod == residue % mod)
        return EPSet(mod, B, core, (residue,), ())


def _lcm(a: int, b: int) -> int:
    import math

    return a * b // math.gcd(a, b)


def _reduce_period(M, pos, neg):
    def min_period(res):
        for m in range(1, M + 1):
            if M % m:
                continue
            if all(((r + m) % M in res) == (r in res) for r in range(M)):
                return m
        return M

    m = _lcm(min_period(pos), min_period(neg))
    return m, frozenset(r % m for r in pos), frozenset(r % m for r in neg)


def _reduce_bound(M, B, core, pos, neg):
    core = set(core)
    while B > 0:
        top, bottom = B - 1, -B
        top_ok = (top in core) == (top % M in pos)
        bottom_ok = (bottom in core) == (bottom % M in neg)
        if not (top_ok and bottom_ok):
            break
        core.discard(top)
        core.discard(bottom)
        B -= 1
    return B, frozenset(core)
