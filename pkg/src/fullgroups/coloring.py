"""Marked-word edge colorings on Cayley balls.

Colors {A,B,C} carry word letters, D marks word starting points, E marks the
other word vertices and companion edges, F fills the rest.  The construction
places words from the last index down to the first on a greedily maximal set
of centers whose protective balls stay disjoint, then the verifiers sweep
interior centers for the density properties the coloring is built to have.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Sequence

from .cayley import Ball, GeodesicSegment, build_ball
from .errors import (
    BallTooSmall,
    NoInteriorCenters,
    PlacementConflict,
    PreconditionFailed,
)
from .groups import (
    Backend,
    GeneratingSet,
    GroupElement,
    group_spec_dict,
    load_group_spec,
)

COLORS = ("A", "B", "C", "D", "E", "F")
WORD_COLORS = ("A", "B", "C")


def enumerate_delta_words(max_len: int) -> list[str]:
    """Words over {A,B,C} with no letter repeated consecutively, length-lex order."""
    if max_len < 1:
        raise PreconditionFailed("maxLen must be >= 1")
    words = []
    level = [""]
    for _ in range(max_len):
        nxt = []
        for w in level:
            for c in WORD_COLORS:
                if w and w[-1] == c:
                    continue
                nxt.append(w + c)
        words.extend(nxt)
        level = nxt
    return words


def delta_word(index: int) -> str:
    """The index-th word (1-based) of the enumeration."""
    length = 1
    count = 3
    remaining = index - 1
    while remaining >= count:
        remaining -= count
        length += 1
        count *= 2
    words = [w for w in enumerate_delta_words(length) if len(w) == length]
    return words[remaining]


class RangePlan:
    """Word/element pairing together with the R_i' and R_i schedules."""

    def __init__(self, words: Sequence[str], elements: Sequence[GroupElement],
                 lengths: Sequence[int], r_prime: Sequence[int], r: Sequence[int],
                 mode: str, k_values: dict | None = None):
        if not (len(words) == len(elements) == len(lengths) == len(r_prime) == len(r)):
            raise PreconditionFailed("plan fields must have equal length")
        for w, L in zip(words, lengths):
            if not (len(w) < L):
                raise PreconditionFailed(f"length(w)={len(w)} must be < length(g)={L}")
        self.words = list(words)
        self.elements = list(elements)
        self.lengths = list(lengths)
        self.r_prime = list(r_prime)
        self.r = list(r)
        self.mode = mode
        self.k_values = dict(k_values or {})

    @property
    def k(self) -> int:
        return len(self.words)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "pairs": [
                {"word": w, "g": list(g.payload), "length": L}
                for w, g, L in zip(self.words, self.elements, self.lengths)
            ],
            "rPrime": self.r_prime,
            "r": self.r,
            "kValues": {str(k): v for k, v in sorted(self.k_values.items())},
        }


def build_range_plan(backend: Backend, gens: GeneratingSet, k: int,
                     escape_oracle: Callable[[int], int]) -> RangePlan:
    """Paper-mode plan: shortest unused g_i longer than w_i, exact range formulas."""
    if k < 1:
        raise PreconditionFailed("k must be >= 1")
    words = enumerate_delta_words_count(k)
    pool_radius = len(words[-1]) + 2
    ball = build_ball(backend, gens, backend.identity(), pool_radius)
    used = set()
    elements, lengths = [], []
    for w in words:
        pick = None
        for idx in range(1, len(ball)):
            if idx in used:
                continue
            if ball.dist[idx] > len(w):
                pick = idx
                break
        if pick is None:
            raise BallTooSmall("element pool exhausted; raise the pool radius")
        used.add(pick)
        elements.append(ball.vertices[pick])
        lengths.append(ball.dist[pick])
    k_values: dict[int, int] = {}

    def K(n: int) -> int:
        if n not in k_values:
            k_values[n] = escape_oracle(n)
        return k_values[n]

    r_prime, r = [], []
    for i, L in enumerate(lengths):
        if i == 0:
            rp = L + 2
        else:
            rp = max(L + 2, 2 * r_prime[-1] + K(2 * r_prime[-1] + 1))
        r_prime.append(rp)
        r.append(6 * rp + K(2 * rp + 1) + L + 1)
    return RangePlan(words, elements, lengths, r_prime, r, "paper", k_values)


def enumerate_delta_words_count(k: int) -> list[str]:
    """First k words of the enumeration."""
    max_len = 1
    while 3 * (2 ** max_len - 1) < k:
        max_len += 1
    return enumerate_delta_words(max_len)[:k]


def tight_range_plan(backend: Backend, gens: GeneratingSet, pairs, r_prime, r) -> RangePlan:
    """User-supplied ranges and explicit pairs; flagged as non-paper."""
    words = [w for w, _ in pairs]
    elements = [g for _, g in pairs]
    ball = build_ball(backend, gens, backend.identity(),
                      max(4, max(len(w) for w in words) + 4))
    lengths = [ball.dist[ball.element_index(g)] for g in elements]
    return RangePlan(words, elements, lengths, r_prime, r, "tight")


class Placement:
    def __init__(self, word_index: int, word: str, base: int, target: int,
                 geodesic: GeodesicSegment, path: Sequence[int],
                 d_edge: tuple[int, int], companion_edge: tuple[int, int]):
        self.word_index = word_index
        self.word = word
        self.base = base
        self.target = target
        self.geodesic = geodesic
        self.path = tuple(path)
        self.d_edge = d_edge
        self.companion_edge = companion_edge

    def material_vertices(self) -> set[int]:
        return set(self.path) | set(self.d_edge) | set(self.companion_edge) | {self.target}


class ColoredBall:
    def __init__(self, ball: Ball, colors: dict[tuple[int, int], str],
                 placements: Sequence[Placement], plan: RangePlan):
        self.ball = ball
        self.colors = dict(colors)
        self.placements = list(placements)
        self.plan = plan

    def edge_color(self, u: int, gen_index: int) -> str:
        return self.colors[self.ball.edge_key(u, gen_index)]

    def incident_colors(self, u: int) -> list[tuple[int, str]]:
        """(generator index, color) for every edge at u that lies in the ball."""
        out = []
        for si, v in enumerate(self.ball.adj[u]):
            if v >= 0:
                out.append((si, self.colors[(u, v) if u < v else (v, u)]))
        return out


def multi_source_distances(ball: Ball, sources, limit: int | None = None) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    dq = deque(dist)
    while dq:
        u = dq.popleft()
        du = dist[u]
        if limit is not None and du == limit:
            continue
        for v in ball.adj[u]:
            if v >= 0 and v not in dist:
                dist[v] = du + 1
                dq.append(v)
    return dist


def _canonical_geodesic(ball: Ball, t: int, target: int, glen: int) -> GeodesicSegment:
    """Lex-first geodesic from t to target, found by a local backward BFS.

    Matches the first result of geodesics_between but only explores
    B_glen(target), which keeps deep placements cheap on big balls.
    """
    back = ball.bfs_limited(target, glen)
    if back.get(t) != glen:
        raise BallTooSmall(
            f"no length-{glen} path from {t} to {target} inside the ball"
        )
    path, word = [t], []
    u = t
    for step in range(glen, 0, -1):
        for si in range(len(ball.gens)):
            v = ball.adj[u][si]
            if v >= 0 and back.get(v) == step - 1:
                path.append(v)
                word.append(si)
                u = v
                break
        else:
            raise BallTooSmall(f"geodesic from {t} to {target} leaves the ball")
    return GeodesicSegment(path, word)


def construct_coloring(ball: Ball, plan: RangePlan) -> ColoredBall:
    """Greedy marked-word placement, last word first, then an F-fill."""
    k = plan.k
    if k and plan.mode == "paper":
        # radius >= R_k keeps interior centers available; the density
        # argument then finds an admissible placement near every center
        if ball.radius < plan.r[-1]:
            raise BallTooSmall(
                f"paper mode needs radius >= R_k = {plan.r[-1]}, got {ball.radius}"
            )
    colors: dict[tuple[int, int], str] = {}

    def write(key: tuple[int, int], color: str):
        old = colors.get(key)
        if old is not None and old != color:
            raise PlacementConflict(f"edge {key} already {old}, wanted {color}")
        colors[key] = color

    placements: list[Placement] = []
    material: set[int] = set()
    for i in range(k, 0, -1):
        word = plan.words[i - 1]
        g = plan.elements[i - 1]
        glen = plan.lengths[i - 1]
        protect = 2 * plan.r_prime[i - 1]
        occupied = multi_source_distances(ball, material, limit=protect) if material else {}
        blocked: set[int] = set()
        chosen: list[int] = []
        for t in range(len(ball)):
            if ball.dist[t] + protect > ball.radius:
                continue
            if t in occupied or t in blocked:
                continue
            chosen.append(t)
            for v in ball.bfs_limited(t, 2 * protect):
                blocked.add(v)
        if not chosen and i == k:
            raise BallTooSmall(f"no admissible placement center for step {i}")
        for t in chosen:
            target_elem = ball.backend.mul(ball.vertices[t], g)
            target = ball.element_index(target_elem)
            geo = _canonical_geodesic(ball, t, target, glen)
            path = geo.vertices[: len(word) + 1]
            for idx, letter in enumerate(word):
                u, v = path[idx], path[idx + 1]
                write((u, v) if u < v else (v, u), letter)
            path_set = set(geo.vertices[: len(word) + 1])
            # D at the start, E at the other word vertices
            d_edge = None
            for j, vj in enumerate(path):
                mark = "D" if j == 0 else "E"
                skip = set()
                if j > 0:
                    skip.add(path[j - 1])
                if j < len(word):
                    skip.add(path[j + 1])
                for si, nb in enumerate(ball.adj[vj]):
                    if nb < 0 or nb in skip:
                        continue
                    key = (vj, nb) if vj < nb else (nb, vj)
                    write(key, mark)
                    if j == 0 and d_edge is None:
                        d_edge = (key, si)
            if d_edge is None:
                raise PlacementConflict(f"no free edge for the D choice at vertex {t}")
            companion_key = ball.edge_key(target, d_edge[1])
            write(companion_key, "E")
            placement = Placement(i, word, t, target, geo, path, d_edge[0], companion_key)
            placements.append(placement)
            material |= placement.material_vertices()
    for u, si, v in ball.edges:
        key = (u, v) if u < v else (v, u)
        if key not in colors:
            colors[key] = "F"
    placements.sort(key=lambda p: (p.word_index, p.base))
    return ColoredBall(ball, colors, placements, plan)


def _payload(g: GroupElement) -> list:
    return list(g.payload)


def _element_from_payload(backend: Backend, payload) -> GroupElement:
    return GroupElement(backend.tag, tuple(payload))


def coloring_to_dict(cb: ColoredBall) -> dict:
    """JSON-ready form; loading rebuilds the same ball deterministically."""
    ball = cb.ball
    return {
        "group": group_spec_dict(ball.backend),
        "generators": [
            {"name": name, "payload": _payload(g)}
            for name, g in zip(ball.gens.names, ball.gens.elements)
        ],
        "radius": ball.radius,
        "mode": cb.plan.mode,
        "plan": cb.plan.to_dict(),
        "edges": [
            {
                "src": _payload(ball.vertices[u]),
                "gen": ball.gens.names[si],
                "color": cb.colors[(u, v) if u < v else (v, u)],
            }
            for u, si, v in ball.edges
        ],
        "placements": [
            {
                "wordIndex": p.word_index,
                "word": p.word,
                "base": _payload(ball.vertices[p.base]),
                "target": _payload(ball.vertices[p.target]),
                "geodesicGens": list(p.geodesic.gens),
                "dEdge": list(p.d_edge),
                "companionEdge": list(p.companion_edge),
            }
            for p in cb.placements
        ],
    }


def coloring_from_dict(data: dict) -> ColoredBall:
    backend = load_group_spec(data["group"])
    gens = GeneratingSet(
        backend,
        [_element_from_payload(backend, e["payload"]) for e in data["generators"]],
        [e["name"] for e in data["generators"]],
    )
    ball = build_ball(backend, gens, backend.identity(), data["radius"])
    plan_data = data["plan"]
    plan = RangePlan(
        [p["word"] for p in plan_data["pairs"]],
        [_element_from_payload(backend, p["g"]) for p in plan_data["pairs"]],
        [p["length"] for p in plan_data["pairs"]],
        plan_data["rPrime"],
        plan_data["r"],
        plan_data["mode"],
        {int(k): v for k, v in plan_data["kValues"].items()},
    )
    name_index = {name: i for i, name in enumerate(gens.names)}
    colors = {}
    for e in data["edges"]:
        u = ball.element_index(_element_from_payload(backend, e["src"]))
        key = ball.edge_key(u, name_index[e["gen"]])
        colors[key] = e["color"]
    placements = []
    for p in data["placements"]:
        base = ball.element_index(_element_from_payload(backend, p["base"]))
        target = ball.element_index(_element_from_payload(backend, p["target"]))
        path = [base]
        for si in p["geodesicGens"]:
            path.append(ball.adj[path[-1]][si])
        geo = GeodesicSegment(path, p["geodesicGens"])
        placements.append(
            Placement(
                p["wordIndex"], p["word"], base, target, geo,
                path[: len(p["word"]) + 1],
                tuple(p["dEdge"]), tuple(p["companionEdge"]),
            )
        )
    return ColoredBall(ball, colors, placements, plan)


def verify_3proper(cb: ColoredBall) -> dict:
    """No vertex may have two incident edges of the same word color."""
    for u in range(len(cb.ball)):
        seen = {}
        for si, color in cb.incident_colors(u):
            if color in WORD_COLORS:
                if color in seen:
                    return {"holds": False, "witness": {"vertex": u, "color": color}}
                seen[color] = si
    return {"holds": True, "witness": None}


def find_marked_copies(cb: ColoredBall, word: str) -> list[tuple[int, ...]]:
    """Locate marked copies of `word` directly from the colors.

    A copy starts at a vertex whose edges are one `word[0]` edge plus D
    everywhere else, then follows the unique letter edges with E marks on
    every later vertex.  Vertices on the boundary cannot certify their
    marking and are skipped.
    """
    ball = cb.ball
    copies = []
    for v0 in range(len(ball)):
        if ball.dist[v0] >= ball.radius:
            continue
        start_edge = None
        ok = True
        for si, color in cb.incident_colors(v0):
            if color == word[0]:
                if start_edge is not None:
                    ok = False
                    break
                start_edge = si
            elif color != "D":
                ok = False
                break
        if not ok or start_edge is None:
            continue
        path = [v0, ball.adj[v0][start_edge]]
        for j in range(1, len(word) + 1):
            vj = path[j]
            if ball.dist[vj] >= ball.radius:
                ok = False
                break
            nxt = None
            for si, color in cb.incident_colors(vj):
                nb = ball.adj[vj][si]
                if nb == path[j - 1]:
                    continue
                if j < len(word) and color == word[j]:
                    if nxt is not None:
                        ok = False
                        break
                    nxt = nb
                elif color != "E":
                    ok = False
                    break
            if not ok:
                break
            if j < len(word):
                if nxt is None:
                    ok = False
                    break
                path.append(nxt)
        if ok:
            copies.append(tuple(path))
    return copies


def interior_centers(ball: Ball, radius: int) -> list[int]:
    centers = [v for v in range(len(ball)) if ball.dist[v] + radius <= ball.radius]
    if not centers:
        raise NoInteriorCenters(f"no center fits a {radius}-ball inside radius {ball.radius}")
    return centers


def _sweep(ball: Ball, centers, anchors, span: int, radius: int, exact_check):
    """Shared sweep: anchor fast path with an exact local-BFS fallback.

    anchors maps anchor vertex -> list of witness objects whose material lies
    within `span` of the anchor.  exact_check(local_dist, witness) decides a
    witness given exact distances from the center.
    """
    failures = []
    near = multi_source_distances(ball, anchors.keys()) if anchors else {}
    for v in centers:
        d = near.get(v)
        if d is not None and d + span <= radius:
            continue
        if d is None or d > radius:
            failures.append(v)
            continue
        local = ball.bfs_limited(v, radius)
        if not any(
            exact_check(local, w)
            for a, ws in anchors.items()
            if local.get(a, radius + 1) <= radius
            for w in ws
        ):
            failures.append(v)
    return failures


def verify_P1(cb: ColoredBall, word: str, radius: int) -> dict:
    """Every interior center must see a fully marked copy of `word`."""
    centers = interior_centers(cb.ball, radius)
    copies = find_marked_copies(cb, word)
    anchors: dict[int, list] = {}
    for c in copies:
        anchors.setdefault(c[0], []).append(c)

    def exact(local, copy):
        return all(local.get(u, radius + 1) + 1 <= radius for u in copy)

    failures = _sweep(cb.ball, centers, anchors, len(word) + 1, radius, exact)
    return {
        "holds": not failures,
        "centers": len(centers),
        "copies": len(copies),
        "failures": failures[:10],
    }


def _element_length(ball: Ball, g: GroupElement) -> int:
    """Word length of g with respect to the ball's generating set."""
    if g in ball.index:
        return ball.dist[ball.index[g]]
    probe = build_ball(ball.backend, ball.gens, ball.backend.identity(), ball.radius)
    return probe.dist[probe.element_index(g)]


def p2_witnesses(cb: ColoredBall, g: GroupElement) -> list[tuple]:
    """Edges whose g-companion carries a different color.

    The g-companion of the s-labeled edge at x is the s-labeled edge at x*g.
    """
    ball = cb.ball
    out = []
    for u, si, v in ball.edges:
        key = (u, v) if u < v else (v, u)
        shifted = ball.backend.mul(ball.vertices[u], g)
        w = ball.index.get(shifted)
        if w is None:
            continue
        cv = ball.adj[w][si]
        if cv < 0:
            continue
        ckey = (w, cv) if w < cv else (cv, w)
        if cb.colors[key] != cb.colors[ckey]:
            out.append((key, ckey))
    return out


def verify_P2(cb: ColoredBall, g: GroupElement, radius: int) -> dict:
    """Every interior center must see a differently colored companion pair."""
    centers = interior_centers(cb.ball, radius)
    witnesses = p2_witnesses(cb, g)
    # every witness vertex is within length(g) + 1 of the anchor endpoint
    span = _element_length(cb.ball, g) + 1
    anchors: dict[int, list] = {}
    for key, ckey in witnesses:
        anchors.setdefault(key[0], []).append((key, ckey))

    def exact(local, witness):
        key, ckey = witness
        return all(local.get(u, radius + 1) <= radius for u in (*key, *ckey))

    failures = _sweep(cb.ball, centers, anchors, span, radius, exact)
    return {
        "holds": not failures,
        "centers": len(centers),
        "witnesses": len(witnesses),
        "failures": failures[:10],
    }


def audit_conditions(cb: ColoredBall) -> dict:
    """Per-step report for the construction conditions (1)-(3)."""
    plan = cb.plan
    report = {}
    for i in range(1, plan.k + 1):
        word = plan.words[i - 1]
        g = plan.elements[i - 1]
        Ri = plan.r[i - 1]
        Rpi = plan.r_prime[i - 1]
        try:
            p1 = verify_P1(cb, word, Ri)
        except NoInteriorCenters:
            p1 = {"holds": None, "note": "no interior centers"}
        own = [p for p in cb.placements if p.word_index == i]
        pair_anchors: dict[int, list] = {}
        for p in own:
            pair_anchors.setdefault(p.base, []).append(
                (p.d_edge, p.companion_edge)
            )
        try:
            centers = interior_centers(cb.ball, Ri)
            span = max(
                (plan.lengths[i - 1] + 1 for p in own), default=0
            )

            def exact(local, witness):
                key, ckey = witness
                return all(local.get(u, Ri + 1) <= Ri for u in (*key, *ckey))

            fails2 = _sweep(cb.ball, centers, pair_anchors, span, Ri, exact)
            c2 = {"holds": not fails2, "failures": fails2[:10]}
        except NoInteriorCenters:
            c2 = {"holds": None, "note": "no interior centers"}
        # condition (3): protective balls around word vertices avoid material
        # of the same or later steps
        c3_ok = True
        for p in own:
            others = set()
            for q in cb.placements:
                if q is p or q.word_index < i:
                    continue
                others |= set(q.path)
                if q.word_index > i:
                    others |= set(q.d_edge) | set(q.companion_edge)
            if not others:
                continue
            for u in p.path:
                local = cb.ball.bfs_limited(u, Rpi)
                if any(o in local for o in others):
                    c3_ok = False
        report[i] = {"condition1": p1, "condition2": c2, "condition3": {"holds": c3_ok}}
    return report
