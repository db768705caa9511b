"""Orbit coordinates, the half-line set A and exact cocycle computation.

A virtually-Z group acts on the orbit of a point with finite stabilizer H.
The orbit splits into m lines indexed by coset representatives of pi(H) in
Q; every point has unique coordinates (k, i).  Group elements act on each
line by an affine map k -> eps*k + c together with a permutation of the
lines, which is what makes the EPSet algebra close under images.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .epset import EPSet
from .errors import (
    BackendMismatch,
    InfiniteStabilizer,
    InternalInconsistency,
    NotBijective,
    NotCommuting,
    NotSubgroup,
    PreconditionFailed,
)
from .groups import VIRTZ, GroupElement, VirtZBackend, VirtZData


@dataclass(frozen=True)
class OrbitPoint:
    k: int
    line: int  # 1-based line index

    def __repr__(self):
        return f"({self.k},line{self.line})"


class LineAffineAction:
    """Per-line affine data: line i maps to (target[i], sign[i], offset[i])."""

    def __init__(self, target: Sequence[int], sign: Sequence[int], offset: Sequence[int]):
        self.target = tuple(target)
        self.sign = tuple(sign)
        self.offset = tuple(offset)
        m = len(self.target)
        if sorted(self.target) != list(range(1, m + 1)):
            raise InternalInconsistency("line map is not a permutation")

    @property
    def m(self):
        return len(self.target)

    def apply(self, p: OrbitPoint) -> OrbitPoint:
        i = p.line - 1
        return OrbitPoint(self.sign[i] * p.k + self.offset[i], self.target[i])

    def apply_set(self, line: int, s: EPSet) -> tuple[int, EPSet]:
        """Image of the set s on `line`; returns (target line, image set)."""
        i = line - 1
        return self.target[i], s.affine(self.sign[i], self.offset[i])

    def compose(self, other: "LineAffineAction") -> "LineAffineAction":
        """self after other (matches group multiplication g*h acting as g(h(.)))."""
        m = other.m
        target, sign, offset = [], [], []
        for i in range(m):
            j = other.target[i] - 1
            target.append(self.target[j])
            sign.append(self.sign[j] * other.sign[i])
            offset.append(self.sign[j] * other.offset[i] + self.offset[j])
        return LineAffineAction(target, sign, offset)

    def __eq__(self, other):
        return (
            isinstance(other, LineAffineAction)
            and self.target == other.target
            and self.sign == other.sign
            and self.offset == other.offset
        )

    def __repr__(self):
        return f"LineAffineAction(target={self.target}, sign={self.sign}, offset={self.offset})"


class OrbitModel:
    """Coordinates for the orbit of a point with finite stabilizer H."""

    def __init__(self, d: VirtZData, H: Iterable[GroupElement]):
        self.d = d
        self.backend = VirtZBackend(d)
        H = list(H)
        ident = self.backend.identity()
        if ident not in H:
            H = [ident] + H
        for g in H:
            if g.backend != VIRTZ:
                raise BackendMismatch("stabilizer elements must be virtually-Z")
        e = d.Q.identity
        for g in H:
            a, x = g.payload
            if x == e and a != 0:
                raise InfiniteStabilizer(f"{g} lies in Z x {{e}} \\ {{id}}")
        hset = set(H)
        for g in H:
            if self.backend.inv(g) not in hset:
                raise NotSubgroup(f"missing inverse of {g}")
            for h in H:
                if self.backend.mul(g, h) not in hset:
                    raise NotSubgroup(f"product {g}*{h} escapes H")
        # pi restricted to H must be injective, otherwise a quotient of two
        # elements with equal Q-part lands in Z x {e} nontrivially.
        by_q = {}
        for g in H:
            a, x = g.payload
            if x in by_q and by_q[x] != a:
                raise InfiniteStabilizer(f"two elements of H project to Q index {x}")
            by_q[x] = a
        for x in by_q:
            if d.alpha[x] != 1:
                raise NotCommuting(
                    f"alpha is -1 on pi(H) at Q index {x}; H does not commute with Z x {{e}}"
                )
        self.H = sorted(hset, key=lambda g: g.payload)
        self.h_by_q = by_q  # Q index -> first coordinate of the unique preimage in H
        # Left cosets x * pi(H); representative = minimal Q index, x_1 = e_Q.
        piH = sorted(by_q)
        cosets = []
        assigned = {}
        for x in range(d.Q.order):
            if x in assigned:
                continue
            members = sorted(d.Q.mul[x][z] for z in piH)
            rep = e if e in members else members[0]
            for y in members:
                assigned[y] = rep
            cosets.append(rep)
        cosets.remove(e)
        cosets.sort()
        self.reps = [e] + cosets  # x_1 = e_Q first, then ascending Q index
        self.m = len(self.reps)
        if self.m * len(piH) != d.Q.order:
            raise InternalInconsistency("coset count does not tile Q")
        self.rep_index = {}  # Q index -> (1-based line, H element (t, z) with x*z = x_i)
        for x in range(d.Q.order):
            xi = assigned[x]
            line = self.reps.index(xi) + 1
            # unique z in pi(H) with x*z = x_i
            z = next(z for z in piH if d.Q.mul[x][z] == xi)
            self.rep_index[x] = (line, (by_q[z], z))

    def to_point(self, g: GroupElement) -> OrbitPoint:
        """Coordinates of g . p, i.e. canonicalize (a, x) modulo H."""
        if g.backend != VIRTZ:
            raise BackendMismatch("expected virtually-Z element")
        a, x = g.payload
        line, (t, z) = self.rep_index[x]
        # (a, x)(t, z) = (f(x,z) + a + alpha_x t, x z)
        k = self.d.f[x][z] + a + self.d.alpha[x] * t
        return OrbitPoint(k, line)

    def from_point(self, p: OrbitPoint) -> GroupElement:
        """The canonical representative (k, x_i) of the orbit point."""
        return GroupElement(VIRTZ, (p.k, self.reps[p.line - 1]))

    def line_sign(self, line: int) -> int:
        return self.d.alpha[self.reps[line - 1]]


def line_action(mo: OrbitModel, g: GroupElement) -> LineAffineAction:
    """The affine action of g on orbit coordinates, line by line."""
    if g.backend != VIRTZ:
        raise BackendMismatch("expected virtually-Z element")
    ell, y = g.payload
    d = mo.d
    target, sign, offset = [], [], []
    for xi in mo.reps:
        yxi = d.Q.mul[y][xi]
        line, (t, z) = mo.rep_index[yxi]
        c = d.f[yxi][z] + d.f[y][xi] + ell + d.alpha[yxi] * t
        target.append(line)
        sign.append(d.alpha[y])
        offset.append(c)
    return LineAffineAction(target, sign, offset)


def halfline_A(mo: OrbitModel) -> list[EPSet]:
    """The per-line half-line family: k >= 0 on +1 lines, k <= 0 on -1 lines."""
    return [EPSet.halfline(mo.line_sign(i)) for i in range(1, mo.m + 1)]


def translate_defect(mo: OrbitModel, g: GroupElement) -> list[OrbitPoint]:
    """The finite set gA \\ A, sorted by (line, k)."""
    A = halfline_A(mo)
    act = line_action(mo, g)
    image = [EPSet.empty()] * mo.m
    for i in range(1, mo.m + 1):
        j, s = act.apply_set(i, A[i - 1])
        image[j - 1] = image[j - 1].union(s)
    return _collect_finite(mo, [image[i].difference(A[i]) for i in range(mo.m)])


def _collect_finite(mo: OrbitModel, per_line: list[EPSet]) -> list[OrbitPoint]:
    out = []
    for i, s in enumerate(per_line, start=1):
        if not s.is_finite():
            raise InternalInconsistency(f"line {i} carries an infinite set")
        out.extend(OrbitPoint(k, i) for k in s.finite_elements())
    out.sort(key=lambda p: (p.line, p.k))
    return out


class PiecewiseElement:
    """Bijection of the orbit given by finitely many group elements on EPSet pieces."""

    def __init__(self, mo: OrbitModel, pieces: Sequence[tuple[Sequence[EPSet], GroupElement]]):
        self.mo = mo
        self.pieces = [
            (list(per_line), g, line_action(mo, g)) for per_line, g in pieces
        ]
        for per_line, g, _ in self.pieces:
            if len(per_line) != mo.m:
                raise NotBijective("piece does not cover every line")
        self._validate()

    def _validate(self):
        m = self.mo.m
        for i in range(m):
            union = EPSet.empty()
            for per_line, _, _ in self.pieces:
                union = union.union(per_line[i])
            if union != EPSet.all():
                raise NotBijective(f"pieces do not cover line {i + 1}")
            for a in range(len(self.pieces)):
                for b in range(a + 1, len(self.pieces)):
                    inter = self.pieces[a][0][i].intersection(self.pieces[b][0][i])
                    if not inter.is_empty():
                        raise NotBijective(f"pieces {a} and {b} overlap on line {i + 1}")
        images = self._image_family()
        for i in range(m):
            if images[i] != EPSet.all():
                raise NotBijective(f"images do not cover line {i + 1}")

    def _image_family(self) -> list[EPSet]:
        """Union of piece images per line; raises if images overlap."""
        m = self.mo.m
        images = [EPSet.empty()] * m
        for per_line, _, act in self.pieces:
            for i in range(1, m + 1):
                j, s = act.apply_set(i, per_line[i - 1])
                if not images[j - 1].intersection(s).is_empty():
                    raise NotBijective(f"piece images overlap on line {j}")
                images[j - 1] = images[j - 1].union(s)
        return images

    def apply(self, p: OrbitPoint) -> OrbitPoint:
        for per_line, _, act in self.pieces:
            if p.k in per_line[p.line - 1]:
                return act.apply(p)
        raise InternalInconsistency(f"point {p} not covered by any piece")

    def image_of(self, family: Sequence[EPSet]) -> list[EPSet]:
        """Image of a per-line EPSet family under this bijection."""
        m = self.mo.m
        out = [EPSet.empty()] * m
        for per_line, _, act in self.pieces:
            for i in range(1, m + 1):
                j, s = act.apply_set(i, per_line[i - 1].intersection(family[i - 1]))
                out[j - 1] = out[j - 1].union(s)
        return out

    def compose(self, other: "PiecewiseElement") -> "PiecewiseElement":
        """The bijection x -> self(other(x)), with refined pieces."""
        if other.mo is not self.mo and other.mo.d is not self.mo.d:
            raise BackendMismatch("piecewise elements over different models")
        backend = self.mo.backend
        m = self.mo.m
        pieces = []
        for o_per_line, og, oact in other.pieces:
            for s_per_line, sg, sact in self.pieces:
                # points x in the o-piece with other(x) in the s-piece
                per_line = []
                for i in range(1, m + 1):
                    wanted = s_per_line[oact.target[i - 1] - 1]
                    # preimage of wanted through the affine map k -> eps*k + c
                    eps, c = oact.sign[i - 1], oact.offset[i - 1]
                    back = wanted.translate(-c)
                    if eps == -1:
                        back = back.negate()
                    per_line.append(o_per_line[i - 1].intersection(back))
                if all(s.is_empty() for s in per_line):
                    continue
                pieces.append((per_line, backend.mul(sg, og)))
        return PiecewiseElement(self.mo, pieces)

    def inverse(self) -> "PiecewiseElement":
        backend = self.mo.backend
        m = self.mo.m
        pieces = []
        for per_line, g, act in self.pieces:
            image = [EPSet.empty()] * m
            for i in range(1, m + 1):
                j, s = act.apply_set(i, per_line[i - 1])
                image[j - 1] = image[j - 1].union(s)
            pieces.append((image, backend.inv(g)))
        return PiecewiseElement(self.mo, pieces)

    @staticmethod
    def identity(mo: OrbitModel) -> "PiecewiseElement":
        return PiecewiseElement.global_element(mo, mo.backend.identity())

    @staticmethod
    def global_element(mo: OrbitModel, g: GroupElement) -> "PiecewiseElement":
        return PiecewiseElement(mo, [([EPSet.all()] * mo.m, g)])

    @staticmethod
    def transposition(mo: OrbitModel, p: OrbitPoint, q: OrbitPoint) -> "PiecewiseElement":
        """Swap two orbit points, identity elsewhere."""
        if p == q:
            return PiecewiseElement.identity(mo)
        backend = mo.backend
        gp, gq = mo.from_point(p), mo.from_point(q)
        fwd = backend.mul(gq, backend.inv(gp))  # sends p to q
        bwd = backend.inv(fwd)
        if line_action(mo, fwd).apply(p) != q:
            raise InternalInconsistency("transposition element misses its target")
        single_p = _singleton_family(mo, p)
        single_q = _singleton_family(mo, q)
        rest = [
            EPSet.all().difference(single_p[i]).difference(single_q[i])
            for i in range(mo.m)
        ]
        return PiecewiseElement(
            mo, [(single_p, fwd), (single_q, bwd), (rest, backend.identity())]
        )


def _singleton_family(mo: OrbitModel, p: OrbitPoint) -> list[EPSet]:
    fam = [EPSet.empty()] * mo.m
    fam[p.line - 1] = EPSet.finite([p.k])
    return fam


def model_to_dict(mo: OrbitModel) -> dict:
    from .groups import group_spec_dict

    return {
        "group": group_spec_dict(mo.backend),
        "H": [list(g.payload) for g in mo.H],
    }


def model_from_dict(data: dict) -> OrbitModel:
    from .groups import load_group_spec

    backend = load_group_spec(data["group"])
    if not isinstance(backend, VirtZBackend):
        raise BackendMismatch("orbit models require a virtually-Z group spec")
    H = [GroupElement(VIRTZ, tuple(p)) for p in data["H"]]
    return OrbitModel(backend.data, H)


def piecewise_to_dict(phi: PiecewiseElement) -> dict:
    return {
        "pieces": [
            {
                "line": [s.to_descriptors() for s in per_line],
                "g": list(g.payload),
            }
            for per_line, g, _ in phi.pieces
        ]
    }


def piecewise_from_dict(mo: OrbitModel, data: dict) -> PiecewiseElement:
    pieces = []
    for piece in data["pieces"]:
        per_line = [EPSet.from_descriptors(descs) for descs in piece["line"]]
        g = GroupElement(VIRTZ, tuple(piece["g"]))
        pieces.append((per_line, g))
    return PiecewiseElement(mo, pieces)


def cocycle(mo: OrbitModel, phi: PiecewiseElement) -> list[OrbitPoint]:
    """The finite symmetric difference A \\triangle phi(A), sorted by (line, k)."""
    A = halfline_A(mo)
    phiA = phi.image_of(A)
    return _collect_finite(
        mo, [A[i].symmetric_difference(phiA[i]) for i in range(mo.m)]
    )


def defect_bound(mo: OrbitModel, phi: PiecewiseElement, window: int) -> dict:
    """Measured coordinate defect over |k| <= window, plus the closed-form bound.

    The per-generator coordinate change is 1 for tau and at most 2*f0 + l0
    for the sigma generators, so the bound is |phi| * max(1, 2*f0 + l0)
    with |phi| the largest graph displacement seen over the window.
    """
    if window < 1:
        raise PreconditionFailed("window must be >= 1")
    from .walks import schreier_graph  # local import; walks builds on orbits

    measured = 0
    pairs = []
    for i in range(1, mo.m + 1):
        for k in range(-window, window + 1):
            p = OrbitPoint(k, i)
            q = phi.apply(p)
            measured = max(measured, abs(abs(p.k) - abs(q.k)))
            pairs.append((p, q))
    graph = schreier_graph(mo, window=window + _max_offset(phi) + 1)
    disp = 0
    for p, q in pairs:
        disp = max(disp, graph.distance(p, q))
    f0 = mo.d.f0
    l0 = max(abs(g.payload[0]) for g in mo.H)
    per_step = max(1, 2 * f0 + l0)
    return {
        "measuredMax": measured,
        "displacement": disp,
        "perStep": per_step,
        "closedFormBound": disp * per_step,
    }


def _max_offset(phi: PiecewiseElement) -> int:
    return max(
        (abs(c) for _, _, act in phi.pieces for c in act.offset), default=0
    )


def stabilizer_orbit_probe(
    mo: OrbitModel,
    F: Sequence[PiecewiseElement],
    p: OrbitPoint,
    cap: int,
) -> dict:
    """Close {p} under F and inverses; the empirical local-finiteness probe.

    Every element of F must have an empty cocycle (it stabilizes A).
    Returns the orbit and its size, or reports the cap being hit.
    """
    gens = []
    for phi in F:
        if cocycle(mo, phi):
            raise PreconditionFailed("an element of F does not stabilize A")
        gens.append(phi)
        gens.append(phi.inverse())
    orbit = {p}
    frontier = [p]
    while frontier:
        nxt = []
        for q in frontier:
            for phi in gens:
                r = phi.apply(q)
                if r not in orbit:
                    orbit.add(r)
                    nxt.append(r)
                    if len(orbit) > cap:
                        return {"capHit": True, "size": len(orbit), "orbit": None}
        frontier = nxt
    return {"capHit": False, "size": len(orbit), "orbit": sorted(orbit, key=lambda x: (x.line, x.k))}
