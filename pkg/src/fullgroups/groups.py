"""Exact group arithmetic for the three supported backends.

Backends: Z^d (integer vectors), free groups F_k (reduced words) and
virtually-Z extensions of a finite group Q by Z, encoded by a cocycle
f: Q x Q -> Z and a sign homomorphism alpha: Q -> {+1,-1}.  Elements are
canonical payloads and equality is structural.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BackendMismatch,
    Inconclusive,
    InvalidGroupSpec,
    PreconditionFailed,
)

ZD = "zd"
FREE = "free"
VIRTZ = "virtz"


@dataclass(frozen=True)
class GroupElement:
    """Canonical element of one backend.

    payload conventions:
      zd:    tuple of d integers
      free:  tuple of nonzero signed generator indices (1-based), freely reduced
      virtz: pair (a, x) with a an integer and x an index into Q
    """

    backend: str
    payload: tuple

    def __repr__(self):
        return f"GroupElement({self.backend!r}, {self.payload!r})"


class FiniteGroupTable:
    """Multiplication table of a finite group on indices [0, order)."""

    def __init__(self, mul: Sequence[Sequence[int]], identity: int | None = None):
        self.order = len(mul)
        self.mul = tuple(tuple(row) for row in mul)
        if self.order == 0:
            raise InvalidGroupSpec("empty multiplication table")
        for i, row in enumerate(self.mul):
            if len(row) != self.order:
                raise InvalidGroupSpec(f"row {i} has length {len(row)}, expected {self.order}")
            for j, v in enumerate(row):
                if not (0 <= v < self.order):
                    raise InvalidGroupSpec(f"mul[{i}][{j}] = {v} out of range")
        self.identity = self._find_identity() if identity is None else identity
        e = self.identity
        for x in range(self.order):
            if self.mul[e][x] != x or self.mul[x][e] != x:
                raise InvalidGroupSpec(f"identity law fails at index {x}")
        for x in range(self.order):
            for y in range(self.order):
                for z in range(self.order):
                    if self.mul[self.mul[x][y]][z] != self.mul[x][self.mul[y][z]]:
                        raise InvalidGroupSpec(
                            f"associativity fails at indices ({x},{y},{z})"
                        )
        self.inverse = tuple(self._find_inverse(x) for x in range(self.order))

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.mul[e][x] == x and self.mul[x][e] == x for x in range(self.order)):
                return e
        raise InvalidGroupSpec("no identity element in table")

    def _find_inverse(self, x: int) -> int:
        for y in range(self.order):
            if self.mul[x][y] == self.identity and self.mul[y][x] == self.identity:
                return y
        raise InvalidGroupSpec(f"no inverse for index {x}")


class VirtZData:
    """Extension data (Q, f, alpha) of a virtually-Z group Z x Q."""

    def __init__(self, Q: FiniteGroupTable, f: Sequence[Sequence[int]], alpha: Sequence[int]):
        self.Q = Q
        n = Q.order
        self.f = tuple(tuple(int(v) for v in row) for row in f)
        self.alpha = tuple(int(a) for a in alpha)
        if len(self.f) != n or any(len(row) != n for row in self.f):
            raise InvalidGroupSpec("cocycle table shape does not match Q")
        if len(self.alpha) != n:
            raise InvalidGroupSpec("alpha table length does not match Q")
        for x, a in enumerate(self.alpha):
            if a not in (1, -1):
                raise InvalidGroupSpec(f"alpha[{x}] = {a} is not a sign")
        for x in range(n):
            for y in range(n):
                if self.alpha[Q.mul[x][y]] != self.alpha[x] * self.alpha[y]:
                    raise InvalidGroupSpec(f"alpha is not a homomorphism at ({x},{y})")
        e = Q.identity
        for x in range(n):
            if self.f[e][x] != 0 or self.f[x][e] != 0:
                raise InvalidGroupSpec(f"cocycle normalization fails at index {x}")
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    lhs = self.f[x][y] + self.f[Q.mul[x][y]][z]
                    rhs = self.alpha[x] * self.f[y][z] + self.f[x][Q.mul[y][z]]
                    if lhs != rhs:
                        raise InvalidGroupSpec(f"cocycle law fails at ({x},{y},{z})")

    @property
    def f0(self) -> int:
        """Largest absolute cocycle value."""
        return max(abs(v) for row in self.f for v in row)


def vz_mul(d: VirtZData, g: GroupElement, h: GroupElement) -> GroupElement:
    _check_backend(g, VIRTZ)
    _check_backend(h, VIRTZ)
    a, x = g.payload
    b, y = h.payload
    return GroupElement(VIRTZ, (d.f[x][y] + a + d.alpha[x] * b, d.Q.mul[x][y]))


def vz_inv(d: VirtZData, g: GroupElement) -> GroupElement:
    _check_backend(g, VIRTZ)
    a, x = g.payload
    y = d.Q.inverse[x]
    b = -d.alpha[x] * (a + d.f[x][y])
    inv = GroupElement(VIRTZ, (b, y))
    assert vz_mul(d, g, inv).payload == (0, d.Q.identity)
    return inv


def _check_backend(g: GroupElement, tag: str):
    if g.backend != tag:
        raise BackendMismatch(f"expected {tag} element, got {g.backend}")


def _free_reduce(word: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


class Backend:
    """Uniform multiply / inverse / identity over one backend."""

    tag: str

    def identity(self) -> GroupElement:
        raise NotImplementedError

    def mul(self, g: GroupElement, h: GroupElement) -> GroupElement:
        raise NotImplementedError

    def inv(self, g: GroupElement) -> GroupElement:
        raise NotImplementedError

    def label(self, g: GroupElement) -> str:
        return str(g.payload)


class ZdBackend(Backend):
    tag = ZD

    def __init__(self, d: int):
        if d < 1:
            raise InvalidGroupSpec("dimension must be positive")
        self.d = d

    def element(self, *coords: int) -> GroupElement:
        if len(coords) != self.d:
            raise InvalidGroupSpec(f"expected {self.d} coordinates")
        return GroupElement(ZD, tuple(int(c) for c in coords))

    def identity(self) -> GroupElement:
        return GroupElement(ZD, (0,) * self.d)

    def mul(self, g, h):
        _check_backend(g, ZD)
        _check_backend(h, ZD)
        return GroupElement(ZD, tuple(a + b for a, b in zip(g.payload, h.payload)))

    def inv(self, g):
        _check_backend(g, ZD)
        return GroupElement(ZD, tuple(-a for a in g.payload))

    def label(self, g):
        return "(" + ",".join(str(c) for c in g.payload) + ")"


class FreeBackend(Backend):
    tag = FREE

    LETTERS = "abcdefghijklmnopqrstuvwxyz"

    def __init__(self, rank: int):
        if rank < 1:
            raise InvalidGroupSpec("rank must be positive")
        self.rank = rank

    def word(self, text: str) -> GroupElement:
        """Parse a word like 'abA' (uppercase = inverse letter)."""
        letters = []
        for ch in text:
            low = ch.lower()
            idx = self.LETTERS.index(low) + 1
            if idx > self.rank:
                raise InvalidGroupSpec(f"letter {ch!r} outside rank {self.rank}")
            letters.append(idx if ch.islower() else -idx)
        return GroupElement(FREE, _free_reduce(letters))

    def identity(self) -> GroupElement:
        return GroupElement(FREE, ())

    def mul(self, g, h):
        _check_backend(g, FREE)
        _check_backend(h, FREE)
        return GroupElement(FREE, _free_reduce(g.payload + h.payload))

    def inv(self, g):
        _check_backend(g, FREE)
        return GroupElement(FREE, tuple(-x for x in reversed(g.payload)))

    def label(self, g):
        if not g.payload:
            return "e"
        return "".join(
            self.LETTERS[x - 1] if x > 0 else self.LETTERS[-x - 1].upper()
            for x in g.payload
        )


class VirtZBackend(Backend):
    tag = VIRTZ

    def __init__(self, data: VirtZData):
        self.data = data

    def element(self, a: int, x: int) -> GroupElement:
        if not (0 <= x < self.data.Q.order):
            raise InvalidGroupSpec(f"Q index {x} out of range")
        return GroupElement(VIRTZ, (int(a), x))

    def identity(self) -> GroupElement:
        return GroupElement(VIRTZ, (0, self.data.Q.identity))

    def mul(self, g, h):
        return vz_mul(self.data, g, h)

    def inv(self, g):
        return vz_inv(self.data, g)

    def label(self, g):
        a, x = g.payload
        return f"({a},q{x})"


class GeneratingSet:
    """Ordered symmetric generating set, the tie-breaker for everything downstream."""

    def __init__(self, backend: Backend, elements: Sequence[GroupElement],
                 names: Sequence[str] | None = None):
        self.backend = backend
        self.elements = list(elements)
        if names is None:
            names = [backend.label(g) for g in self.elements]
        self.names = list(names)
        ident = backend.identity()
        seen = set()
        for g in self.elements:
            if g == ident:
                raise InvalidGroupSpec("generating set contains the identity")
            if g in seen:
                raise InvalidGroupSpec(f"duplicate generator {g}")
            seen.add(g)
        for g in self.elements:
            if backend.inv(g) not in seen:
                raise InvalidGroupSpec(f"generating set not symmetric: missing inverse of {g}")
        # Pair each generator with its inverse; the pair id is the canonical
        # undirected edge label.
        index = {g: i for i, g in enumerate(self.elements)}
        self.inverse_index = [index[backend.inv(g)] for g in self.elements]
        self.pair_id = [min(i, self.inverse_index[i]) for i in range(len(self.elements))]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def standard_generators(backend: Backend) -> GeneratingSet:
    """Default symmetric generating set per backend.

    zd: +/- unit vectors; free: letters and their inverses; virtz: tau^{+/-1}
    and the nonidentity (0, x) for every x in Q.
    """
    if isinstance(backend, ZdBackend):
        gens, names = [], []
        for i in range(backend.d):
            for sign, suffix in ((1, "+"), (-1, "-")):
                coords = [0] * backend.d
                coords[i] = sign
                gens.append(GroupElement(ZD, tuple(coords)))
                names.append(f"x{i + 1}{suffix}")
        return GeneratingSet(backend, gens, names)
    if isinstance(backend, FreeBackend):
        gens, names = [], []
        for i in range(1, backend.rank + 1):
            gens.append(GroupElement(FREE, (i,)))
            names.append(FreeBackend.LETTERS[i - 1])
            gens.append(GroupElement(FREE, (-i,)))
            names.append(FreeBackend.LETTERS[i - 1].upper())
        return GeneratingSet(backend, gens, names)
    if isinstance(backend, VirtZBackend):
        d = backend.data
        gens = [GroupElement(VIRTZ, (1, d.Q.identity)), GroupElement(VIRTZ, (-1, d.Q.identity))]
        names = ["tau", "tau-"]
        seen = set(gens)
        for x in range(d.Q.order):
            if x == d.Q.identity:
                continue
            g = GroupElement(VIRTZ, (0, x))
            if g in seen:
                continue
            gens.append(g)
            names.append(f"s{x}")
            seen.add(g)
            ginv = backend.inv(g)
            if ginv not in seen:
                gens.append(ginv)
                names.append(f"s{x}-")
                seen.add(ginv)
        return GeneratingSet(backend, gens, names)
    raise InvalidGroupSpec(f"unknown backend {backend!r}")


class Finite:
    """Classification result: finite subgroup of the given order."""

    def __init__(self, order: int):
        self.order = order

    def __eq__(self, other):
        return isinstance(other, Finite) and other.order == self.order

    def __repr__(self):
        return f"Finite({self.order})"


class FiniteIndex:
    """Classification result: the subgroup meets Z x {e} in kZ."""

    def __init__(self, k: int):
        self.k = k

    def __eq__(self, other):
        return isinstance(other, FiniteIndex) and other.k == self.k

    def __repr__(self):
        return f"FiniteIndex(k={self.k})"


def subgroup_classify(d: VirtZData, gens: Iterable[GroupElement], search_bound: int):
    """Classify the subgroup generated by `gens` per the virtually-Z dichotomy.

    Closes the generators (and their inverses) under products of length up to
    `search_bound`.  Reports Finite with the exact order when the closure
    stabilizes, otherwise the minimal k > 0 with (k, e_Q) in the closure.
    Raises Inconclusive when neither certificate appears within the bound.
    """
    backend = VirtZBackend(d)
    gens = list(gens)
    for g in gens:
        _check_backend(g, VIRTZ)
    if search_bound < d.Q.order + 1:
        raise PreconditionFailed(f"searchBound {search_bound} below |Q|+1 = {d.Q.order + 1}")
    step = set(gens) | {backend.inv(g) for g in gens} | {backend.identity()}
    closure = set(step)
    frontier = set(step)
    for _ in range(search_bound):
        new = set()
        for g in frontier:
            for s in step:
                prod = backend.mul(g, s)
                if prod not in closure:
                    new.add(prod)
        if not new:
            return Finite(len(closure))
        closure |= new
        frontier = new
    e = d.Q.identity
    ks = sorted(a for a, x in (g.payload for g in closure) if x == e and a > 0)
    if ks:
        return FiniteIndex(ks[0])
    raise Inconclusive(
        f"closure neither stabilized nor met Z x {{e}} within bound {search_bound}"
    )


def load_group_spec(spec) -> Backend:
    """Build a backend from a group specification dict or JSON file path."""
    if isinstance(spec, str):
        with open(spec) as fh:
            spec = json.load(fh)
    if not isinstance(spec, dict) or "backend" not in spec:
        raise InvalidGroupSpec("group spec must be a dict with a 'backend' key")
    tag = spec["backend"]
    if tag == ZD:
        return ZdBackend(int(spec["d"]))
    if tag == FREE:
        return FreeBackend(int(spec["rank"]))
    if tag == VIRTZ:
        table = FiniteGroupTable(spec["Q"], identity=spec.get("identity"))
        return VirtZBackend(VirtZData(table, spec["f"], spec["alpha"]))
    raise InvalidGroupSpec(f"unknown backend tag {tag!r}")


def group_spec_dict(backend: Backend) -> dict:
    """Inverse of load_group_spec, for embedding in emitted files."""
    if isinstance(backend, ZdBackend):
        return {"backend": ZD, "d": backend.d}
    if isinstance(backend, FreeBackend):
        return {"backend": FREE, "rank": backend.rank}
    if isinstance(backend, VirtZBackend):
        d = backend.data
        return {
            "backend": VIRTZ,
            "Q": [list(row) for row in d.Q.mul],
            "f": [list(row) for row in d.f],
            "alpha": list(d.alpha),
            "identity": d.Q.identity,
        }
    raise InvalidGroupSpec(f"unknown backend {backend!r}")


def dihedral_infinite() -> VirtZData:
    """The infinite dihedral group: Q = Z/2, f = 0, alpha(q) = -1."""
    table = FiniteGroupTable([[0, 1], [1, 0]])
    return VirtZData(table, [[0, 0], [0, 0]], [1, -1])


def integers_as_even_extension() -> VirtZData:
    """Z presented as an extension of Z/2 by 2Z; the cocycle is nonzero."""
    table = FiniteGroupTable([[0, 1], [1, 0]])
    return VirtZData(table, [[0, 0], [0, 1]], [1, 1])


def klein_cross_extension() -> VirtZData:
    """Extension with Q = Z/2 x Z/2, f = 0, alpha twisted by the first factor.

    Index order: 0 = (0,0), 1 = (1,0), 2 = (0,1), 3 = (1,1).
    """
    mul = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
    table = FiniteGroupTable(mul)
    zero = [[0] * 4 for _ in range(4)]
    return VirtZData(table, zero, [1, -1, 1, -1])
