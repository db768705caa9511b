"""Random-walk diagnostics on Schreier and Cayley graphs.

Return probabilities are computed two ways and reported separately: exact
values by distribution convolution (the oracle) and Monte Carlo estimates
(the probe).  decay_classify fits a decay profile to the series; it never
claims recurrence, only a profile.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cayley import build_ball
from .errors import Inconclusive, PreconditionFailed, Unreachable, WindowTooSmall
from .groups import Backend, GeneratingSet, standard_generators
from .orbits import OrbitModel, OrbitPoint, line_action


class ActionGraph:
    """Vertices with one outgoing step per generator; None marks a clipped step.

    A simple random walk picks a generator uniformly, so parallel steps count
    with multiplicity.  Distances use the underlying undirected graph.
    """

    def __init__(self, nodes: Sequence, steps: Sequence[Sequence], origin: int,
                 labels: Sequence[str] | None = None):
        self.nodes = list(nodes)
        self.steps = [tuple(row) for row in steps]
        self.origin = origin
        self.labels = list(labels) if labels is not None else None
        self.index = {node: i for i, node in enumerate(self.nodes)}
        self.adj = []
        undirected = [set() for _ in self.nodes]
        for u, row in enumerate(self.steps):
            for v in row:
                if v is not None:
                    undirected[u].add(v)
                    undirected[v].add(u)
        self.adj = [sorted(s) for s in undirected]
        self._bfs_cache: dict[int, list[int]] = {}

    def __len__(self):
        return len(self.nodes)

    @property
    def degree(self) -> int:
        return len(self.steps[0]) if self.steps else 0

    def clipped(self, u: int) -> bool:
        return any(v is None for v in self.steps[u])

    def bfs_from(self, u: int) -> list[int]:
        cached = self._bfs_cache.get(u)
        if cached is not None:
            return cached
        dist = [-1] * len(self.nodes)
        dist[u] = 0
        dq = deque([u])
        while dq:
            w = dq.popleft()
            for v in self.adj[w]:
                if dist[v] < 0:
                    dist[v] = dist[w] + 1
                    dq.append(v)
        self._bfs_cache[u] = dist
        return dist

    def distance(self, p, q) -> int:
        u = p if isinstance(p, int) else self.index[p]
        v = q if isinstance(q, int) else self.index[q]
        d = self.bfs_from(u)[v]
        if d < 0:
            raise Unreachable(f"{p} and {q} are not connected in the window")
        return d

    def safe_horizon(self) -> int:
        """Largest T so no walk of length T from the origin meets a clipped step."""
        dist = self.bfs_from(self.origin)
        horizon = None
        for u in range(len(self.nodes)):
            if self.clipped(u) and dist[u] >= 0:
                horizon = dist[u] if horizon is None else min(horizon, dist[u])
        return len(self.nodes) if horizon is None else horizon


def schreier_graph(mo: OrbitModel, S: Sequence | None = None,
                   window: int = 1) -> ActionGraph:
    """Orbit points with |k| <= window, edges by generator action."""
    if window < 0:
        raise PreconditionFailed("window must be >= 0")
    if S is None:
        S = list(standard_generators(mo.backend))
    nodes = [
        OrbitPoint(k, i)
        for i in range(1, mo.m + 1)
        for k in range(-window, window + 1)
    ]
    index = {p: n for n, p in enumerate(nodes)}
    actions = [line_action(mo, s) for s in S]
    steps = []
    for p in nodes:
        row = []
        for act in actions:
            q = act.apply(p)
            row.append(index.get(q))  # None when the image leaves the window
        steps.append(row)
    labels = [mo.backend.label(s) for s in S]
    return ActionGraph(nodes, steps, index[OrbitPoint(0, 1)], labels)


def cayley_graph_source(backend: Backend, gens: GeneratingSet | None = None,
                        radius: int = 16) -> ActionGraph:
    """Cayley ball as a walk source; boundary steps are clipped."""
    if gens is None:
        gens = standard_generators(backend)
    ball = build_ball(backend, gens, backend.identity(), radius)
    steps = [
        [v if v >= 0 else None for v in row]
        for row in ball.adj
    ]
    return ActionGraph(ball.vertices, steps, 0, list(gens.names))


def free_radial_source(rank: int, max_dist: int) -> ActionGraph:
    """Distance-from-origin chain of the free-group walk.

    The walk on F_rank projects to a birth-death chain on word length: away
    with probability (2*rank-1)/(2*rank), back with 1/(2*rank), and always
    away at the origin.  Return probabilities to the origin are preserved
    exactly, which makes this the path-count oracle for exponential decay.
    """
    deg = 2 * rank
    steps = []
    for k in range(max_dist + 1):
        if k == 0:
            row = [1 if 1 <= max_dist else None] * deg
        else:
            nxt = k + 1 if k + 1 <= max_dist else None
            row = [k - 1] + [nxt] * (deg - 1)
        steps.append(row)
    return ActionGraph(list(range(max_dist + 1)), steps, 0)


@dataclass
class WalkStats:
    step_count: int
    trials: int
    seed: int
    return_counts: dict = field(default_factory=dict)  # even time -> count
    estimates: dict = field(default_factory=dict)      # even time -> p
    stderr: dict = field(default_factory=dict)         # even time -> binomial sd
    exact: dict = field(default_factory=dict)          # even time -> exact p


def srw_estimate(graph: ActionGraph, max_time: int, trials: int, seed: int,
                 exact_limit: int = 16) -> WalkStats:
    """Return-probability estimates at the origin, exact + Monte Carlo."""
    if max_time % 2:
        raise PreconditionFailed("maxTime must be even")
    if trials < 1:
        raise PreconditionFailed("trials must be >= 1")
    if graph.safe_horizon() < max_time:
        raise WindowTooSmall(
            f"safe horizon {graph.safe_horizon()} below maxTime {max_time}; "
            "enlarge the window"
        )
    deg = graph.degree
    ws = WalkStats(max_time, trials, seed)
    # Clipped steps only occur beyond the safe horizon, so no mass ever moves
    # along them; self-loops are a harmless placeholder.
    step_matrix = np.array(
        [[u if v is None else v for v in row] for u, row in enumerate(graph.steps)],
        dtype=np.int64,
    )
    dist = np.zeros(len(graph))
    dist[graph.origin] = 1.0
    for t in range(1, min(exact_limit, max_time) + 1):
        nxt = np.zeros(len(graph))
        np.add.at(nxt, step_matrix.ravel(), np.repeat(dist / deg, deg))
        dist = nxt
        if t % 2 == 0:
            ws.exact[t] = float(dist[graph.origin])
    # Monte Carlo
    rng = np.random.default_rng(seed)
    pos = np.full(trials, graph.origin, dtype=np.int64)
    for t in range(1, max_time + 1):
        choices = rng.integers(0, deg, trials)
        pos = step_matrix[pos, choices]
        if t % 2 == 0:
            count = int(np.sum(pos == graph.origin))
            p = count / trials
            ws.return_counts[t] = count
            ws.estimates[t] = p
            ws.stderr[t] = math.sqrt(max(p * (1 - p), 1e-12) / trials)
    return ws


def decay_classify(ws: WalkStats) -> dict:
    """Fit p_{2n} against power-law and exponential decay; report the profile.

    Exact values take precedence over Monte Carlo estimates at each time.
    The exponential model allows a power-law prefactor so the per-step rate
    is not biased by it.  Never emits the word "recurrent".
    """
    times, values = [], []
    for t in range(2, ws.step_count + 1, 2):
        p = ws.exact.get(t, ws.estimates.get(t))
        if p is not None and p > 0:
            times.append(t)
            values.append(p)
    if len(times) < 5:
        return {"profile": "inconclusive",
                "reason": f"only {len(times)} usable even-time estimates"}
    t = np.array(times, dtype=float)
    n = t / 2.0
    y = np.log(np.array(values))
    # power law: log p = c - alpha log n
    X1 = np.column_stack([np.ones_like(n), np.log(n)])
    coef1, res1 = _lstsq(X1, y)
    alpha = -coef1[1]
    alpha_se = _slope_stderr(X1, y, coef1, 1)
    # exponential with power prefactor: log p = c + b log n + t log(rate)
    X2 = np.column_stack([np.ones_like(n), np.log(n), t])
    coef2, res2 = _lstsq(X2, y)
    rate = float(np.exp(coef2[2]))
    if rate < 0.98:
        return {
            "profile": "exponential",
            "rate": rate,
            "residual": res2,
            "points": len(times),
        }
    return {
        "profile": "polynomial",
        "alpha": float(alpha),
        "alphaStderr": float(alpha_se),
        "residual": res1,
        "points": len(times),
    }


def _lstsq(X, y):
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return coef, float(np.sum(resid ** 2))


def _slope_stderr(X, y, coef, column):
    resid = y - X @ coef
    dof = max(len(y) - X.shape[1], 1)
    sigma2 = float(np.sum(resid ** 2)) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return math.sqrt(max(cov[column, column], 0.0))


def walk_csv(ws: WalkStats) -> str:
    """CSV with a header line recording seed and trial count."""
    lines = [f"# seed={ws.seed} trials={ws.trials} maxTime={ws.step_count}"]
    lines.append("time,exact,estimate,stderr")
    for t in range(2, ws.step_count + 1, 2):
        exact = f"{ws.exact[t]:.12g}" if t in ws.exact else ""
        est = f"{ws.estimates[t]:.12g}" if t in ws.estimates else ""
        se = f"{ws.stderr[t]:.12g}" if t in ws.stderr else ""
        lines.append(f"{t},{exact},{est},{se}")
    return "\n".join(lines) + "\n"
