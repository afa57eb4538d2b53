"""Dual quivers of GL_m-dimers, dimer-model axioms, and potential relations.

The quiver has one vertex per connected component of the dimer's complement
in the disk.  Components are found by face-tracing the rotation system of
the dimer augmented with the polygon boundary circle (arcs between
consecutive boundary blacks); the outer region then splits into the m*n
boundary components.  One arrow per dimer edge, oriented so the white
endpoint lies on the arrow's left; one counterclockwise face per white
node, one clockwise face per internal black node.

Boundary vertices are labelled 1..m*n counterclockwise; label 1 is the
component containing polygon vertex 1.  Internal vertices get stable ids
from the subdivision lattice: ('I', triangle, point) inside a triangle,
('L', edge, position) on a diagonal.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .dimer import (
    BLACK,
    GLmDimer,
    LOC_BOUNDARY,
    WHITE,
    _plus_e,
    trace_faces,
)
from .rewrite import Path, RelationSet


class QuiverError(ValueError):
    """Base class for errors raised by this module."""


class MustReduceFirstError(QuiverError):
    """dual_quiver needs a reduced dimer (no 2-valent internal blacks)."""


class MalformedQuiverError(QuiverError):
    """An internal arrow is missing one of its two faces."""


class NoCycleError(QuiverError):
    """No face passes through the requested vertex."""


def p2(s: int, k: int) -> int:
    """Polygonal number of second order, (k^2 (s-2) + k (s-4)) / 2."""
    if s < 3 or k < 0:
        raise QuiverError(f"p2 needs s >= 3 and k >= 0, got {(s, k)}")
    val = k * k * (s - 2) + k * (s - 4)
    assert val % 2 == 0
    return val // 2


@dataclass(frozen=True)
class Arrow:
    source: object
    target: object
    kind: str  # 'boundary' (face multiplicity 1) or 'internal' (multiplicity 2)
    dual: tuple  # construction tag (triangle, upward point, side index)


@dataclass(frozen=True)
class Face:
    orientation: str  # '+' or '-'
    cycle: tuple[int, ...]  # arrow ids, chained head-to-tail
    dual: tuple  # dimer node id


class QuiverWithFaces:
    """A quiver with oriented faces, dual to a reduced GL_m-dimer."""

    def __init__(self, m, n, vertices, arrows, faces):
        self.m = m
        self.n = n
        self.vertices = dict(vertices)  # vid -> 'boundary' | 'internal'
        self.arrows = list(arrows)
        self.faces = tuple(faces)
        self.arrow_source = [a.source for a in self.arrows]
        self.arrow_target = [a.target for a in self.arrows]
        out, inc = defaultdict(list), defaultdict(list)
        for aid, a in enumerate(self.arrows):
            out[a.source].append(aid)
            inc[a.target].append(aid)
        self.out_arrows = {v: tuple(out[v]) for v in self.vertices}
        self.in_arrows = {v: tuple(inc[v]) for v in self.vertices}
        byarrow = defaultdict(list)
        for fi, f in enumerate(self.faces):
            for aid in f.cycle:
                byarrow[aid].append(fi)
        self.faces_by_arrow = {aid: tuple(byarrow[aid]) for aid in range(len(self.arrows))}

    @property
    def boundary_vertices(self) -> list[int]:
        return sorted(v for v, kind in self.vertices.items() if kind == "boundary")

    @property
    def internal_vertices(self) -> list:
        return sorted(
            (v for v, kind in self.vertices.items() if kind == "internal"), key=str
        )

    def faces_at(self, v) -> list[int]:
        out = []
        for fi, f in enumerate(self.faces):
            if any(self.arrow_source[aid] == v for aid in f.cycle):
                out.append(fi)
        return out

    def arrows_between_boundary(self) -> list[int]:
        return [
            aid
            for aid, a in enumerate(self.arrows)
            if self.vertices[a.source] == "boundary" and self.vertices[a.target] == "boundary"
        ]

    def trivial_path(self, v) -> Path:
        return Path(self, (), anchor=v)

    def path(self, arrow_ids) -> Path:
        return Path(self, tuple(arrow_ids))

    def arrow_path(self, aid: int) -> Path:
        return Path(self, (aid,))

    def find_arrow(self, source, target) -> int | None:
        hits = [aid for aid in self.out_arrows.get(source, ()) if self.arrow_target[aid] == target]
        if len(hits) > 1:
            raise QuiverError(f"parallel arrows {source}->{target}")
        return hits[0] if hits else None

    def __eq__(self, other):
        if not isinstance(other, QuiverWithFaces):
            return NotImplemented
        return (
            self.m == other.m
            and self.n == other.n
            and self.vertices == other.vertices
            and self.arrows == other.arrows
            and self.faces == other.faces
        )

    def to_json(self) -> dict:
        from .dimer import _encode

        return {
            "m": self.m,
            "n": self.n,
            "vertices": [
                {"id": _encode(v), "kind": kind}
                for v, kind in sorted(self.vertices.items(), key=lambda kv: str(kv[0]))
            ],
            "arrows": [
                {
                    "id": aid,
                    "source": _encode(a.source),
                    "target": _encode(a.target),
                    "kind": a.kind,
                    "dual": _encode(a.dual),
                }
                for aid, a in enumerate(self.arrows)
            ],
            "faces": [
                {"orientation": f.orientation, "cycle": list(f.cycle), "dual": _encode(f.dual)}
                for f in self.faces
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuiverWithFaces":
        from .dimer import _decode

        vertices = {_decode(r["id"]): r["kind"] for r in data["vertices"]}
        arrows = [None] * len(data["arrows"])
        for r in data["arrows"]:
            arrows[r["id"]] = Arrow(
                _decode(r["source"]), _decode(r["target"]), r["kind"], _decode(r["dual"])
            )
        faces = [
            Face(r["orientation"], tuple(r["cycle"]), _decode(r["dual"]))
            for r in data["faces"]
        ]
        return cls(data["m"], data["n"], vertices, arrows, faces)

    def to_dot(self) -> str:
        """DOT export with boundary vertices pinned on the outer rim."""
        import math

        lines = ["digraph quiver {", "  layout=neato;", "  node [shape=circle];"]
        mn = self.m * self.n
        radius = max(2.0, mn / 4.0)
        names = {}
        for v, kind in sorted(self.vertices.items(), key=lambda kv: str(kv[0])):
            if kind == "boundary":
                names[v] = f"b{v}"
                # label 1 sits near polygon vertex 1; go counterclockwise
                ang = 2 * math.pi * (v - 1) / mn + math.pi / 2
                x, y = round(radius * math.cos(ang), 4), round(radius * math.sin(ang), 4)
                lines.append(f'  {names[v]} [label="{v}", pos="{x},{y}!"];')
        for i, v in enumerate(self.internal_vertices):
            names[v] = f"i{i + 1}"
            lines.append(f'  {names[v]} [label="{names[v]}", style=dashed];')
        for a in self.arrows:
            style = "" if a.kind == "boundary" else " [style=bold]"
            lines.append(f"  {names[a.source]} -> {names[a.target]}{style};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def lattice_id(tri: tuple, pt: tuple):
    """Global id of a subdivision lattice point given in one triangle's frame."""
    zeros = [j for j in range(3) if pt[j] == 0]
    if len(zeros) == 2:
        (j,) = [j for j in range(3) if pt[j] != 0]
        return ("C", tri[j])
    if len(zeros) == 1:
        j = zeros[0]
        u, v = [x for x in range(3) if x != j]
        return ("L", (tri[u], tri[v]), pt[v])
    return ("I", tri, pt)


def _expected_boundary_lattice(label: int, m: int, n: int):
    v, t = divmod(label - 1, m)
    v += 1
    if t == 0:
        return ("C", v)
    if v < n:
        return ("L", (v, v + 1), t)
    return ("L", (1, n), m - t)


def dual_quiver(D: GLmDimer) -> QuiverWithFaces:
    """The quiver with faces dual to a reduced GL_m-dimer."""
    bad = D.contractible_blacks()
    if bad:
        raise MustReduceFirstError(
            f"dimer has 2-valent internal blacks (e.g. {bad[0]}); reduce first"
        )
    m, n = D.m, D.n
    mn = m * n

    rot = {v: list(r) for v, r in D.rotation.items()}
    bdry = D.boundary
    for k, b in enumerate(bdry):
        (white,) = D.rotation[b]
        rot[b] = [bdry[(k + 1) % mn], white, bdry[(k - 1) % mn]]
    dart_faces = trace_faces({v: tuple(r) for v, r in rot.items()})

    face_of_dart = {}
    for fi, cyc in enumerate(dart_faces):
        for dart in cyc:
            face_of_dart[dart] = fi
    outer = face_of_dart[(bdry[0], bdry[-1])]

    # boundary label k <-> the face crossed by the arc from the (k-1)-th to
    # the k-th boundary black
    label_of_face = {}
    for k in range(1, mn + 1):
        fi = face_of_dart[(bdry[k - 2], bdry[k - 1])]
        if fi == outer:
            raise QuiverError("boundary arc traced into the outer face")
        label_of_face[fi] = k

    # internal faces: identify each with its lattice point via the edge tags;
    # every dart of a face must agree, which pins down the embedding
    def dart_lattice(dart):
        u, v = dart
        tag = D.edge_tags.get(frozenset((u, v)))
        if tag is None:
            return None  # an arc
        tri, p, j = tag
        if D.nodes[u].color == WHITE:
            return lattice_id(tri, _plus_e(p, (j + 2) % 3))
        return lattice_id(tri, _plus_e(p, (j + 1) % 3))

    vertex_of_face = {}
    for fi, cyc in enumerate(dart_faces):
        if fi == outer:
            continue
        points = {dart_lattice(d) for d in cyc} - {None}
        if len(points) != 1:
            raise QuiverError(f"face {fi} has inconsistent lattice points {points}")
        (pt,) = points
        if fi in label_of_face:
            lbl = label_of_face[fi]
            if pt != _expected_boundary_lattice(lbl, m, n):
                raise QuiverError(f"boundary face {lbl} sits at unexpected point {pt}")
            vertex_of_face[fi] = lbl
        else:
            vertex_of_face[fi] = pt

    vertices = {}
    for fi, vid in vertex_of_face.items():
        vertices[vid] = "boundary" if fi in label_of_face else "internal"

    edges = sorted(D.edge_tags.items(), key=lambda kv: kv[1])
    arrows = []
    aid_of_edge = {}
    for e, tag in edges:
        w, b = sorted(e, key=lambda v: D.nodes[v].color, reverse=True)  # white first
        assert D.nodes[w].color == WHITE and D.nodes[b].color == BLACK
        src = vertex_of_face[face_of_dart[(b, w)]]
        tgt = vertex_of_face[face_of_dart[(w, b)]]
        kind = "boundary" if D.nodes[b].location == LOC_BOUNDARY else "internal"
        aid_of_edge[e] = len(arrows)
        arrows.append(Arrow(src, tgt, kind, tag))

    faces = []
    for w in D.whites():
        cyc = [aid_of_edge[frozenset((w, nb))] for nb in D.rotation[w]]
        faces.append(Face("+", _normalize_cycle(cyc), w))
    for b in D.internal_blacks():
        cyc = [aid_of_edge[frozenset((b, nb))] for nb in reversed(D.rotation[b])]
        faces.append(Face("-", _normalize_cycle(cyc), b))

    Q = QuiverWithFaces(m, n, vertices, arrows, faces)
    for f in Q.faces:
        for i, aid in enumerate(f.cycle):
            nxt = f.cycle[(i + 1) % len(f.cycle)]
            if Q.arrow_target[aid] != Q.arrow_source[nxt]:
                raise QuiverError(f"face {f} does not chain at arrow {aid}")
    if sorted(v for v, k in Q.vertices.items() if k == "boundary") != list(range(1, mn + 1)):
        raise QuiverError("boundary labels do not cover 1..m*n")
    return Q


def _normalize_cycle(cyc: list[int]) -> tuple[int, ...]:
    k = cyc.index(min(cyc))
    return tuple(cyc[k:] + cyc[:k])


def validate_dimer_model(Q: QuiverWithFaces):
    """Check the dimer-model-with-boundary axioms plus the faces-per-vertex counts."""
    from .dimer import ValidationReport

    rep = ValidationReport()
    loops = [aid for aid, a in enumerate(Q.arrows) if a.source == a.target]
    rep.add("no-loops", not loops, f"loop arrows: {loops[:3]}" if loops else "")

    mult_bad, kind_bad = [], []
    signs_bad = []
    for aid, a in enumerate(Q.arrows):
        fis = Q.faces_by_arrow.get(aid, ())
        if len(fis) not in (1, 2):
            mult_bad.append((aid, len(fis)))
            continue
        want = "boundary" if len(fis) == 1 else "internal"
        if a.kind != want:
            kind_bad.append(aid)
        if len(fis) == 2:
            signs = sorted(Q.faces[fi].orientation for fi in fis)
            if signs != ["+", "-"]:
                signs_bad.append((aid, signs))
    rep.add(
        "face-multiplicity",
        not mult_bad,
        f"arrows with multiplicity not in {{1,2}}: {mult_bad[:3]}" if mult_bad else "",
    )
    rep.add(
        "kind-matches-multiplicity",
        not kind_bad,
        f"mislabelled arrows: {kind_bad[:3]}" if kind_bad else "",
    )
    rep.add(
        "internal-arrow-signs",
        not signs_bad,
        f"internal arrows without one + and one - face: {signs_bad[:3]}" if signs_bad else "",
    )

    disconnected = []
    counts_bad = []
    for v, kind in Q.vertices.items():
        incident = set(Q.out_arrows[v]) | set(Q.in_arrows[v])
        if not incident:
            disconnected.append(v)
            continue
        adj = {a: set() for a in incident}
        nfaces = 0
        for f in Q.faces:
            cyc = f.cycle
            hits = [i for i, aid in enumerate(cyc) if Q.arrow_target[aid] == v]
            if hits:
                nfaces += len(hits)
            for i in hits:
                a_in, a_out = cyc[i], cyc[(i + 1) % len(cyc)]
                adj[a_in].add(a_out)
                adj[a_out].add(a_in)
        stack = [next(iter(incident))]
        seen = set(stack)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != incident:
            disconnected.append(v)
        allowed = {1, 3} if kind == "boundary" else {4, 6}
        if nfaces not in allowed:
            counts_bad.append((v, nfaces))
    rep.add(
        "incidence-connected",
        not disconnected,
        f"disconnected incidence graph at: {disconnected[:3]}" if disconnected else "",
    )
    rep.add(
        "faces-per-vertex",
        not counts_bad,
        f"vertices with face count outside {{1,3}}/{{4,6}}: {counts_bad[:3]}"
        if counts_bad
        else "",
    )
    return rep


def potential_relations(Q: QuiverWithFaces) -> RelationSet:
    """The cyclic derivatives of the natural potential, one per internal arrow.

    For an internal arrow in the counterclockwise cycle (a p1 .. pk) and the
    clockwise cycle (a q1 .. ql), emit the pair (p1..pk, q1..ql).
    """
    relations = []
    for aid, a in enumerate(Q.arrows):
        if a.kind != "internal":
            continue
        fis = Q.faces_by_arrow.get(aid, ())
        plus = [fi for fi in fis if Q.faces[fi].orientation == "+"]
        minus = [fi for fi in fis if Q.faces[fi].orientation == "-"]
        if len(plus) != 1 or len(minus) != 1:
            raise MalformedQuiverError(f"internal arrow {aid} lacks a +/- face pair")
        sides = []
        for fi in (plus[0], minus[0]):
            cyc = list(Q.faces[fi].cycle)
            k = cyc.index(aid)
            rest = cyc[k + 1 :] + cyc[:k]
            sides.append(Path(Q, tuple(rest)))
        lhs, rhs = sides
        assert lhs.source == rhs.source == a.target
        assert lhs.target == rhs.target == a.source
        relations.append((lhs, rhs))
    return RelationSet(Q, tuple(relations))


def chordless_cycle_at(Q: QuiverWithFaces, v) -> Path:
    """The boundary cycle of the shortest face through v, rotated to start at v."""
    best = None
    for fi, f in enumerate(Q.faces):
        cyc = list(f.cycle)
        for i, aid in enumerate(cyc):
            if Q.arrow_source[aid] == v:
                if best is None or len(cyc) < len(best[0]):
                    best = (cyc, i)
                break
    if best is None:
        raise NoCycleError(f"no face passes through vertex {v!r}")
    cyc, i = best
    return Path(Q, tuple(cyc[i:] + cyc[:i]))
