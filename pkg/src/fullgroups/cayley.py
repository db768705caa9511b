"""Finite Cayley balls: BFS construction, geodesics, growth and escape constants.

All vertex orders are deterministic (BFS layer, then generator order), which
every downstream tie-break relies on.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .errors import BoundaryRisk, CapExceeded, NoEscape, PreconditionFailed, Unreachable
from .groups import Backend, FreeBackend, GeneratingSet, GroupElement

DEFAULT_VERTEX_CAP = 5_000_000


class GeodesicSegment:
    """Vertex sequence (ball indices) with the generator word along it."""

    def __init__(self, vertices: Sequence[int], gens: Sequence[int]):
        self.vertices = tuple(vertices)
        self.gens = tuple(gens)

    def __len__(self):
        return len(self.gens)

    def __eq__(self, other):
        return isinstance(other, GeodesicSegment) and self.vertices == other.vertices

    def __repr__(self):
        return f"GeodesicSegment({list(self.vertices)})"


class Ball:
    """BFS-complete ball of the Cayley graph around a center element."""

    def __init__(self, backend: Backend, gens: GeneratingSet, center: GroupElement,
                 radius: int, cap: int = DEFAULT_VERTEX_CAP):
        if radius < 0:
            raise PreconditionFailed("radius must be >= 0")
        if isinstance(backend, FreeBackend):
            est = _free_ball_size(2 * backend.rank, radius)
            if est > cap:
                raise CapExceeded(f"estimated {est} vertices exceeds cap {cap}")
        self.backend = backend
        self.gens = gens
        self.center = center
        self.radius = radius
        self.vertices: list[GroupElement] = [center]
        self.index = {center: 0}
        self.dist = [0]
        self.adj: list[list[int]] = []  # per vertex: target index per generator, -1 outside
        frontier = [0]
        for layer in range(1, radius + 1):
            nxt = []
            for u in frontier:
                gu = self.vertices[u]
                for s in gens:
                    v = backend.mul(gu, s)
                    if v not in self.index:
                        if len(self.vertices) >= cap:
                            raise CapExceeded(f"vertex cap {cap} exceeded at radius {layer}")
                        self.index[v] = len(self.vertices)
                        self.vertices.append(v)
                        self.dist.append(layer)
                        nxt.append(self.index[v])
            frontier = nxt
        # adjacency and the canonical undirected edge list
        self.edges: list[tuple[int, int, int]] = []  # (src, genIndex, tgt), src < tgt or discovery order
        seen_pairs = set()
        for u, gu in enumerate(self.vertices):
            row = []
            for si, s in enumerate(gens):
                v = backend.mul(gu, s)
                vi = self.index.get(v, -1)
                row.append(vi)
                if vi >= 0:
                    key = (u, vi) if u < vi else (vi, u)
                    if key not in seen_pairs:
                        seen_pairs.add(key)
                        self.edges.append((u, si, vi))
            self.adj.append(row)
        self._bfs_cache: dict[int, list[int]] = {}

    def __len__(self):
        return len(self.vertices)

    def element_index(self, g: GroupElement) -> int:
        if g not in self.index:
            raise Unreachable(f"element {g} not in ball")
        return self.index[g]

    def neighbors(self, u: int):
        return [v for v in self.adj[u] if v >= 0]

    def bfs_from(self, u: int) -> list[int]:
        """Distances from u inside the ball graph (-1 for unreachable)."""
        cached = self._bfs_cache.get(u)
        if cached is not None:
            return cached
        dist = [-1] * len(self.vertices)
        dist[u] = 0
        dq = deque([u])
        while dq:
            w = dq.popleft()
            dw = dist[w]
            for v in self.adj[w]:
                if v >= 0 and dist[v] < 0:
                    dist[v] = dw + 1
                    dq.append(v)
        self._bfs_cache[u] = dist
        return dist

    def bfs_limited(self, u: int, limit: int) -> dict[int, int]:
        """Distances from u, exploring only up to the given graph distance."""
        dist = {u: 0}
        dq = deque([u])
        while dq:
            w = dq.popleft()
            dw = dist[w]
            if dw == limit:
                continue
            for v in self.adj[w]:
                if v >= 0 and v not in dist:
                    dist[v] = dw + 1
                    dq.append(v)
        return dist

    def edge_key(self, u: int, gen_index: int) -> tuple[int, int]:
        """Canonical key of the undirected edge at u along the given generator."""
        v = self.adj[u][gen_index]
        if v < 0:
            raise Unreachable(f"edge {u} --gen{gen_index}--> leaves the ball")
        return (u, v) if u < v else (v, u)

    def to_dot(self, colors: dict | None = None) -> str:
        lines = ["graph ball {"]
        for i, g in enumerate(self.vertices):
            lines.append(f'  v{i} [label="{self.backend.label(g)}"];')
        for u, si, v in self.edges:
            attrs = [f'label="{self.gens.names[si]}"']
            if colors is not None:
                key = (u, v) if u < v else (v, u)
                if key in colors:
                    attrs.append(f'color="{colors[key]}"')
            lines.append(f"  v{u} -- v{v} [{', '.join(attrs)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _free_ball_size(degree: int, radius: int) -> int:
    if radius == 0:
        return 1
    if degree <= 1:
        return 1 + degree * radius
    return 1 + degree * ((degree - 1) ** radius - 1) // (degree - 2)


def build_ball(backend: Backend, gens: GeneratingSet, center: GroupElement,
               radius: int, cap: int = DEFAULT_VERTEX_CAP) -> Ball:
    return Ball(backend, gens, center, radius, cap)


def geodesics_between(ball: Ball, u, v) -> list[GeodesicSegment]:
    """All geodesics from u to v, in lexicographic generator order."""
    ui = u if isinstance(u, int) else ball.element_index(u)
    vi = v if isinstance(v, int) else ball.element_index(v)
    du = ball.bfs_from(ui)
    dv = ball.bfs_from(vi)
    if du[vi] < 0:
        raise Unreachable("no path inside the ball")
    d = du[vi]
    if d + max(ball.dist[ui], ball.dist[vi]) > ball.radius:
        raise BoundaryRisk(
            f"d(u,v)={d} plus max center distance exceeds radius {ball.radius}"
        )
    out: list[GeodesicSegment] = []
    path = [ui]
    word: list[int] = []

    def extend(w: int):
        if w == vi and len(word) == d:
            out.append(GeodesicSegment(path.copy(), word.copy()))
            return
        for si in range(len(ball.gens)):
            x = ball.adj[w][si]
            if x >= 0 and du[x] == du[w] + 1 and dv[x] == dv[w] - 1:
                path.append(x)
                word.append(si)
                extend(x)
                path.pop()
                word.pop()

    extend(ui)
    return out


def growth_sequence(backend: Backend, gens: GeneratingSet, max_radius: int,
                    cap: int = DEFAULT_VERTEX_CAP) -> dict:
    """Exact ball sizes |B_0|..|B_maxR| plus a linear-growth flag."""
    ball = build_ball(backend, gens, backend.identity(), max_radius, cap)
    sizes = [0] * (max_radius + 1)
    for d in ball.dist:
        sizes[d] += 1
    cumulative = []
    total = 0
    for c in sizes:
        total += c
        cumulative.append(total)
    diffs = [cumulative[i + 1] - cumulative[i] for i in range(max_radius)]
    tail = diffs[len(diffs) // 2:]
    linear = len(tail) >= 2 and len(set(tail)) == 1
    return {"sizes": cumulative, "linear": linear}


def _maximal_rays(ball: Ball, limit: int) -> list[tuple[int, ...]]:
    """Maximal geodesic rays from the center within distance `limit`."""
    rays: list[tuple[int, ...]] = []
    seen = set()
    path = [0]

    def extend(u: int):
        extended = False
        if ball.dist[u] < limit:
            for v in ball.adj[u]:
                if v >= 0 and ball.dist[v] == ball.dist[u] + 1:
                    extended = True
                    path.append(v)
                    extend(v)
                    path.pop()
        if not extended:
            key = tuple(path)
            if key not in seen:
                seen.add(key)
                rays.append(key)

    extend(0)
    return rays


def escape_constant(backend: Backend, gens: GeneratingSet, n: int, probe_radius: int,
                    cap: int = DEFAULT_VERTEX_CAP) -> dict:
    """Smallest K so every maximal geodesic through the center can be escaped.

    Escape means: some vertex h with d(center, h) <= K sits at distance
    exactly n from the geodesic.  Geodesics through the center are probed as
    pairs of maximal rays within the (n+K)-ball; parts of a geodesic farther
    than n+K from the center cannot affect the predicate for h in the K-ball.
    Raises NoEscape when no K fits inside the probe radius, which is the
    expected outcome on virtually cyclic groups.
    """
    if n < 1:
        raise PreconditionFailed("n must be >= 1")
    ball = build_ball(backend, gens, backend.identity(), probe_radius, cap)
    cap_value = n + 1
    for K in range(0, probe_radius - n + 1):
        W = n + K
        rays = _maximal_rays(ball, W)
        hs = sorted(
            (i for i in range(len(ball)) if ball.dist[i] <= K),
            key=lambda i: ball.dist[i],
        )
        hdists = {h: ball.bfs_from(h) for h in hs}
        vectors = []
        for ray in rays:
            vec = tuple(
                min(cap_value, min(hdists[h][v] for v in ray)) for h in hs
            )
            vectors.append(vec)
        end_dist = {}
        geodesics = []  # (needed K or None, representative pair)
        paired = [False] * len(rays)
        for a in range(len(rays)):
            ra = rays[a]
            if ra[-1] not in end_dist:
                end_dist[ra[-1]] = ball.bfs_from(ra[-1])
            for b in range(a + 1, len(rays)):
                rb = rays[b]
                if end_dist[ra[-1]][rb[-1]] != (len(ra) - 1) + (len(rb) - 1):
                    continue
                paired[a] = paired[b] = True
                geodesics.append((a, b))
        for a in range(len(rays)):
            if not paired[a]:
                geodesics.append((a, None))
        worst = None  # (needed, geodesic description)
        ok = True
        for a, b in geodesics:
            va = vectors[a]
            vb = vectors[b] if b is not None else (cap_value,) * len(hs)
            needed = None
            for idx, h in enumerate(hs):
                if min(va[idx], vb[idx]) == n:
                    needed = ball.dist[h]
                    break
            if needed is None:
                ok = False
                worst = (None, (a, b))
                break
            if worst is None or needed > worst[0]:
                worst = (needed, (a, b))
        if ok and geodesics:
            a, b = worst[1]
            cert_vertices = list(rays[a][::-1])
            if b is not None:
                cert_vertices += list(rays[b][1:])
            certificate = {
                "probeRadius": probe_radius,
                "window": W,
                "neededK": worst[0],
                "geodesic": [backend.label(ball.vertices[i]) for i in cert_vertices],
            }
            return {"K": K, "certificate": certificate}
    raise NoEscape(
        f"no escape constant for n={n} within probe radius {probe_radius}"
    )


class ExhaustiveEscapeOracle:
    """K(n) via the exhaustive probe; feasible only for small n."""

    def __init__(self, backend: Backend, gens: GeneratingSet, probe_radius: int):
        self.backend = backend
        self.gens = gens
        self.probe_radius = probe_radius
        self._cache: dict[int, int] = {}

    def __call__(self, n: int) -> int:
        if n not in self._cache:
            self._cache[n] = escape_constant(self.backend, self.gens, n, self.probe_radius)["K"]
        return self._cache[n]


class LinearEscapeOracle:
    """K(n) = n * K(1), with K(1) probed exhaustively.

    The exhaustive probe explodes combinatorially for large n, while range
    formulas need K at arguments like 2R'+1.  This oracle extrapolates
    linearly from the certified K(1); d(geodesic, h) <= d(center, h) forces
    K(n) >= n, so the extrapolation is tight whenever K(1) = 1.
    """

    def __init__(self, backend: Backend, gens: GeneratingSet, probe_radius: int = 6):
        self.slope = ExhaustiveEscapeOracle(backend, gens, probe_radius)(1)

    def __call__(self, n: int) -> int:
        return n * self.slope
