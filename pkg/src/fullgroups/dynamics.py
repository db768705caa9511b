"""Involution dynamics on based colorings and pattern diagnostics.

The letters A,B,C act on a based configuration by moving the basepoint
across its unique incident edge of that color, if any.  Configurations are
finite windows, so every operation reports InsufficientWindow instead of
guessing at unseen edges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coloring import WORD_COLORS, ColoredBall, find_marked_copies
from .errors import (
    BoundaryClipped,
    InsufficientWindow,
    InternalInconsistency,
    NoInteriorCenters,
    NoMarkedCopy,
    PreconditionFailed,
)
from .groups import GroupElement


@dataclass(frozen=True)
class Configuration:
    """A colored ball with a distinguished basepoint."""

    cb: ColoredBall
    basepoint: int

    @property
    def window(self) -> int:
        """Distance from the basepoint to the ball boundary."""
        return self.cb.ball.radius - self.cb.ball.dist[self.basepoint]

    def rebase(self, vertex: int) -> "Configuration":
        return Configuration(self.cb, vertex)


def involution_apply(letter: str, cfg: Configuration) -> Configuration:
    """Move the basepoint across its incident `letter` edge, if one exists."""
    if letter not in WORD_COLORS:
        raise PreconditionFailed(f"letter must be one of {WORD_COLORS}, got {letter!r}")
    if cfg.window < 1:
        raise InsufficientWindow(
            "basepoint on the boundary; incident edges are not all visible"
        )
    targets = []
    ball = cfg.cb.ball
    for si, color in cfg.cb.incident_colors(cfg.basepoint):
        if color == letter:
            targets.append(ball.adj[cfg.basepoint][si])
    if len(targets) > 1:
        raise InternalInconsistency(
            f"vertex {cfg.basepoint} has {len(targets)} incident {letter}-edges; "
            "coloring is not 3-proper"
        )
    if not targets:
        return cfg
    return cfg.rebase(targets[0])


def parse_delta_word(text: str) -> str:
    """Validate a word over {A,B,C} with no two equal consecutive letters."""
    for i, ch in enumerate(text):
        if ch not in WORD_COLORS:
            raise PreconditionFailed(f"letter {ch!r} is not in {WORD_COLORS}")
        if i and text[i - 1] == ch:
            raise PreconditionFailed(f"consecutive repeated letter at position {i}")
    return text


def word_apply(word: str, cfg: Configuration, trace: list | None = None) -> Configuration:
    """Apply a delta word, rightmost letter first."""
    word = parse_delta_word(word)
    if cfg.window < len(word):
        raise InsufficientWindow(
            f"window {cfg.window} below word length {len(word)}"
        )
    for letter in reversed(word):
        before = cfg.basepoint
        cfg = involution_apply(letter, cfg)
        if trace is not None:
            trace.append((letter, before, cfg.basepoint))
    return cfg


def free_witness(cb: ColoredBall, word: str) -> dict:
    """Re-base at the endpoint of a marked copy of `word` and apply the word.

    On P1-verified colorings the traversal walks the reversed marked path, so
    moved is always true; this is the per-word finite shadow of the free
    subgroup in the full group.
    """
    word = parse_delta_word(word)
    copies = [
        tuple(p.path) for p in cb.placements if p.word == word
    ] or find_marked_copies(cb, word)
    usable = [
        c for c in copies
        if cb.ball.radius - cb.ball.dist[c[-1]] >= len(word)
    ]
    if not usable:
        raise NoMarkedCopy(
            f"no marked copy of {word!r} with enough window around its endpoint"
        )
    path = usable[0]
    start = path[-1]
    trace: list = []
    result = word_apply(word, Configuration(cb, start), trace)
    visited = [start] + [step[2] for step in trace]
    return {
        "witness": result,
        "moved": result.basepoint != start,
        "trace": trace,
        "path": path,
        "reversedPathFollowed": tuple(visited) == tuple(reversed(path)),
    }


class Pattern:
    """Root-normalized colored r-ball: edges in left-translation coordinates."""

    def __init__(self, radius: int, edges: frozenset):
        self.radius = radius
        self.edges = edges

    def __eq__(self, other):
        return (
            isinstance(other, Pattern)
            and self.radius == other.radius
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.radius, self.edges))

    def canonical_string(self) -> str:
        return f"r={self.radius};" + "|".join(
            f"{payload}:{si}:{color}" for payload, si, color in sorted(self.edges)
        )


def pattern_at(cb: ColoredBall, vertex: int, r: int) -> Pattern:
    """The colored r-ball around `vertex`, normalized by left translation."""
    ball = cb.ball
    if ball.dist[vertex] + r > ball.radius:
        raise BoundaryClipped(
            f"B_{r}({vertex}) reaches outside the radius-{ball.radius} ball"
        )
    backend = ball.backend
    center_inv = backend.inv(ball.vertices[vertex])
    local = ball.bfs_limited(vertex, r)
    edges = set()
    for u, du in local.items():
        rel = backend.mul(center_inv, ball.vertices[u])
        for si, v in enumerate(ball.adj[u]):
            if v < 0 or local.get(v, r + 1) > r:
                continue
            key = (u, v) if u < v else (v, u)
            edges.add((rel.payload, si, cb.colors[key]))
    return Pattern(r, frozenset(edges))


def pattern_language(cb: ColoredBall, r: int) -> dict:
    """Deduplicated interior patterns with multiplicity counts."""
    ball = cb.ball
    counts: dict[Pattern, int] = {}
    found = False
    for v in range(len(ball)):
        if ball.dist[v] + r > ball.radius:
            continue
        found = True
        p = pattern_at(cb, v, r)
        counts[p] = counts.get(p, 0) + 1
    if not found:
        raise NoInteriorCenters(f"no vertex fits an interior {r}-ball")
    return counts


def shift_period_scan(cb: ColoredBall, g: GroupElement, r: int) -> list[int]:
    """Interior vertices u whose r-pattern equals the r-pattern at u*g.

    An empty list certifies that no observed vertex is r-locally g-periodic;
    non-empty lists are reported, not judged.
    """
    ball = cb.ball
    out = []
    swept = False
    cache: dict[int, Pattern] = {}

    def pat(v):
        if v not in cache:
            cache[v] = pattern_at(cb, v, r)
        return cache[v]

    for u in range(len(ball)):
        if ball.dist[u] + r > ball.radius:
            continue
        shifted = ball.backend.mul(ball.vertices[u], g)
        w = ball.index.get(shifted)
        if w is None or ball.dist[w] + r > ball.radius:
            continue
        swept = True
        if pat(u) == pat(w):
            out.append(u)
    if not swept:
        raise NoInteriorCenters(
            f"no vertex pair (u, u*g) fits interior {r}-balls"
        )
    return out
