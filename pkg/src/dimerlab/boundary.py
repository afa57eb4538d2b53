"""Boundary-algebra presentations and the canonical quiver Gamma(m, n).

The boundary algebra is spanned by paths that start and end on boundary
vertices.  Its quiver is extracted from a dimer-model quiver by
enumerating primitive boundary-to-boundary paths (interior vertices all
internal), merging them up to path equality, and discarding classes equal
to a composition of two others.  The surviving classes are matched, up to
rotation of the boundary labels, against the canonical quiver Gamma(m, n):
m*n cyclic vertices with arrow families

    x_k : k-1 -> k                     every k,
    y_k : k+2+2k' -> k   k' = (-k) mod m,   k != 1 (mod m),
    z_k : k+1 -> k                     k != 0, 1 (mod m),

3*n*(m-1) arrows in total.  The relation families of the main theorem,
the generator-path formulas for fan triangulations, the central element,
and flip transport are all verified against the extracted presentation by
the path-equality engine.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .dimer import build_dimer, reduce_dimer
from .polygon import Triangulation, flip
from .quiver import QuiverWithFaces, chordless_cycle_at, dual_quiver, potential_relations
from .rewrite import (
    DISTINCT,
    EQUAL,
    UNKNOWN,
    EqualityVerdict,
    Path,
    RelationSet,
    SearchBudget,
    default_max_visited as rewrite_default_max_visited,
    paths_equal,
)


class BoundaryError(ValueError):
    """Base class for errors raised by this module."""


class InconclusivePresentationError(BoundaryError):
    """The search budget ran out while grouping boundary path classes."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class IncompatibleGammaError(BoundaryError):
    """Vertex counts of a presentation and a Gamma quiver differ."""


class FormulaMismatchError(BoundaryError):
    """A generator-path formula fails to compose in the fan quiver."""


def modl(x: int, modulus: int) -> int:
    """Reduce an index into [1, modulus] (0 is never used as an index)."""
    return (x - 1) % modulus + 1


# ---------------------------------------------------------------------------
# Gamma(m, n)


@dataclass(frozen=True)
class GammaQuiver:
    m: int
    n: int
    arrows: dict = field(hash=False)  # name ('x'|'y'|'z', k) -> (source, target)

    @property
    def vertex_count(self) -> int:
        return self.m * self.n

    def arrow_multiset(self) -> Counter:
        return Counter(
            (src, tgt, name[0]) for name, (src, tgt) in self.arrows.items()
        )

    def name_by_signature(self) -> dict:
        return {
            (src, tgt, name[0]): name for name, (src, tgt) in self.arrows.items()
        }

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "vertices": self.vertex_count,
            "arrows": [
                {"name": f"{fam}_{k}", "source": src, "target": tgt}
                for (fam, k), (src, tgt) in sorted(self.arrows.items())
            ],
        }

    def to_dot(self) -> str:
        import math

        mn = self.vertex_count
        radius = max(2.0, mn / 4.0)
        lines = ["digraph gamma {", "  layout=neato;", "  node [shape=circle];"]
        for v in range(1, mn + 1):
            ang = 2 * math.pi * (v - 1) / mn + math.pi / 2
            x, y = round(radius * math.cos(ang), 4), round(radius * math.sin(ang), 4)
            lines.append(f'  v{v} [label="{v}", pos="{x},{y}!"];')
        styles = {"x": "", "y": " [color=red]", "z": " [color=blue]"}
        for (fam, k), (src, tgt) in sorted(self.arrows.items()):
            lines.append(f"  v{src} -> v{tgt}{styles[fam]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def gamma_tail(k: int, m: int, mn: int) -> int:
    """Source of the y-arrow with sink k: k + 2 + 2*((-k) mod m)."""
    return modl(k + 2 + 2 * ((-k) % m), mn)


def build_gamma(m: int, n: int) -> GammaQuiver:
    """The canonical boundary quiver: m*n cyclic vertices, arrow families x, y, z."""
    if m < 2 or n < 3:
        raise BoundaryError(f"Gamma(m, n) needs m >= 2 and n >= 3, got {(m, n)}")
    mn = m * n
    arrows = {}
    for k in range(1, mn + 1):
        arrows[("x", k)] = (modl(k - 1, mn), k)
        if k % m != 1 % m:
            arrows[("y", k)] = (gamma_tail(k, m, mn), k)
        if k % m not in (0, 1 % m):
            arrows[("z", k)] = (modl(k + 1, mn), k)
    assert len(arrows) == 3 * n * (m - 1)
    return GammaQuiver(m, n, arrows)


# ---------------------------------------------------------------------------
# Presentation extraction


@dataclass(frozen=True)
class GeneratorClass:
    source: int
    target: int
    tag: str | None  # 'x' | 'y' | 'z' | None when outside the Gamma pattern
    rep: Path
    size: int  # number of primitive paths merged into the class

    def describe(self) -> str:
        return f"{self.tag or '?'}:{self.source}->{self.target}"


@dataclass
class BoundaryPresentation:
    quiver: QuiverWithFaces
    classes: tuple[GeneratorClass, ...]

    @property
    def m(self) -> int:
        return self.quiver.m

    @property
    def n(self) -> int:
        return self.quiver.n

    @property
    def boundary_count(self) -> int:
        return len(self.quiver.boundary_vertices)

    def by_signature(self) -> dict:
        out = {}
        for c in self.classes:
            key = (c.source, c.target, c.tag)
            if key in out:
                raise BoundaryError(f"duplicate generator signature {key}")
            out[key] = c
        return out

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "boundary_vertices": self.boundary_count,
            "generators": [
                {
                    "source": c.source,
                    "target": c.target,
                    "tag": c.tag,
                    "representative": list(c.rep.arrows),
                    "class_size": c.size,
                }
                for c in self.classes
            ],
        }


def intrinsic_tag(source: int, target: int, m: int, mn: int) -> str | None:
    diff = (source - target) % mn
    if diff == mn - 1:
        return "x"
    if diff == 1:
        return "z"
    if diff % 2 == 0 and 2 <= diff <= 2 * m - 2:
        return "y"
    return None


def _primitive_paths(Q: QuiverWithFaces) -> list[tuple]:
    """Arrow tuples from boundary to boundary through internal vertices only,
    each visiting an internal vertex at most once."""
    out = []
    internal = {v for v, kind in Q.vertices.items() if kind == "internal"}

    def walk(prefix: list[int], at, seen: set) -> None:
        for aid in Q.out_arrows[at]:
            tgt = Q.arrow_target[aid]
            if tgt in internal:
                if tgt in seen:
                    continue
                prefix.append(aid)
                seen.add(tgt)
                walk(prefix, tgt, seen)
                seen.remove(tgt)
                prefix.pop()
            else:
                out.append(tuple(prefix + [aid]))

    for s in Q.boundary_vertices:
        walk([], s, set())
    return sorted(out, key=lambda a: (len(a), a))


def boundary_generators(
    Q: QuiverWithFaces, R: RelationSet, budget: SearchBudget | None = None
) -> BoundaryPresentation:
    """Extract the generator classes of the boundary algebra.

    Primitive paths (boundary to boundary through internal vertices) are
    grouped up to path equality, then every class whose representative
    factors through an intermediate boundary vertex is discarded as a
    composition of two shorter classes.  Budget exhaustion anywhere raises
    InconclusivePresentationError with the offending pair attached.
    """
    buckets: dict[tuple, list[tuple]] = defaultdict(list)
    for arrows in _primitive_paths(Q):
        p = Path(Q, arrows)
        buckets[(p.source, p.target)].append(arrows)

    classes = []
    for (src, tgt), paths in sorted(buckets.items()):
        groups: list[list[tuple]] = []
        for arrows in paths:
            p = Path(Q, arrows)
            placed = False
            for g in groups:
                verdict = paths_equal(p, Path(Q, g[0]), R, budget)
                if verdict.outcome == EQUAL:
                    g.append(arrows)
                    placed = True
                    break
                if verdict.outcome == UNKNOWN:
                    raise InconclusivePresentationError(
                        f"cannot decide {arrows} vs {g[0]} within budget",
                        pair=(arrows, g[0]),
                    )
            if not placed:
                groups.append([arrows])
        for g in groups:
            rep = min(g, key=lambda a: (len(a), a))
            classes.append(
                GeneratorClass(
                    source=src,
                    target=tgt,
                    tag=intrinsic_tag(src, tgt, Q.m, Q.m * Q.n),
                    rep=Path(Q, rep),
                    size=len(g),
                )
            )

    survivors = []
    for c in classes:
        verdict = factors_through_boundary(c.rep, R, budget)
        if verdict == "composite":
            continue
        if verdict == "truncated":
            raise InconclusivePresentationError(
                f"cannot decide within budget whether {c.describe()} is a generator",
                pair=(c.rep.arrows, None),
            )
        survivors.append(c)
    survivors.sort(key=lambda c: (c.target, c.source, c.rep.arrows))
    return BoundaryPresentation(quiver=Q, classes=tuple(survivors))


def factors_through_boundary(
    p: Path, R: RelationSet, budget: SearchBudget | None = None
) -> str:
    """Whether some path equal to p visits a boundary vertex strictly inside.

    Such a path splits into two shorter boundary-to-boundary paths, so the
    class of p is a composition of shorter classes and is no generator.
    Returns 'composite' when a split is found, 'generator' when the whole
    equality class was enumerated without one, and 'truncated' when the
    budget ran out first.
    """
    Q = p.quiver
    if budget is None:
        budget = SearchBudget(
            max_path_length=2 * R.max_side_length + len(p),
            max_visited=rewrite_default_max_visited(),
        )
    boundary = {v for v, kind in Q.vertices.items() if kind == "boundary"}

    def visits_boundary(arrows: tuple) -> bool:
        return any(Q.arrow_target[a] in boundary for a in arrows[:-1])

    if visits_boundary(p.arrows):
        return "composite"
    seen = {p.arrows}
    front = [p.arrows]
    pruned = False
    while front:
        new_front = []
        for key in front:
            for _, _, _, res in R.sites(key):
                if len(res) > budget.max_path_length:
                    pruned = True
                    continue
                if res in seen:
                    continue
                if visits_boundary(res):
                    return "composite"
                if len(seen) >= budget.max_visited:
                    return "truncated"
                seen.add(res)
                new_front.append(res)
        front = new_front
    return "truncated" if pruned else "generator"


# ---------------------------------------------------------------------------
# Gamma matching


@dataclass
class GammaMatch:
    ok: bool
    rotation: int | None = None
    reflected: bool = False
    vertex_map: dict | None = None
    assignment: dict | None = None  # Gamma arrow name -> GeneratorClass
    obstruction: str | None = None

    def rep_of(self, name: tuple) -> Path:
        return self.assignment[name].rep


def match_gamma(
    BP: BoundaryPresentation, G: GammaQuiver, allow_reflection: bool = False
) -> GammaMatch:
    """Search rotations (optionally reflections) of the boundary labels for a
    bijection carrying the presentation's generators onto Gamma's arrows."""
    mn = G.vertex_count
    if BP.boundary_count != mn:
        raise IncompatibleGammaError(
            f"presentation has {BP.boundary_count} boundary vertices, Gamma has {mn}"
        )
    gamma_sig = G.arrow_multiset()
    names = G.name_by_signature()
    if len(BP.classes) != len(G.arrows):
        return GammaMatch(
            ok=False,
            obstruction=(
                f"generator count {len(BP.classes)} != arrow count {len(G.arrows)}"
            ),
        )

    modes = [(r, False) for r in range(mn)]
    if allow_reflection:
        modes += [(r, True) for r in range(mn)]
    for r, refl in modes:
        if refl:
            vmap = {v: modl(r - (v - 1), mn) for v in range(1, mn + 1)}
        else:
            vmap = {v: modl(v + r, mn) for v in range(1, mn + 1)}
        sig = Counter(
            (vmap[c.source], vmap[c.target], c.tag) for c in BP.classes
        )
        if sig == gamma_sig:
            assignment = {
                names[(vmap[c.source], vmap[c.target], c.tag)]: c for c in BP.classes
            }
            return GammaMatch(
                ok=True,
                rotation=r,
                reflected=refl,
                vertex_map=vmap,
                assignment=assignment,
            )
    missing = [c.describe() for c in BP.classes if c.tag is None]
    detail = f"; untaggable classes: {missing[:4]}" if missing else ""
    return GammaMatch(
        ok=False,
        obstruction=f"no rotation aligns the generators with Gamma({G.m},{G.n}){detail}",
    )


# ---------------------------------------------------------------------------
# Theorem relations, central element


@dataclass
class RelationInstance:
    family: str
    k: int
    description: str
    verdict: EqualityVerdict


@dataclass
class RelationReport:
    instances: list[RelationInstance] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.instances) and all(
            inst.verdict.outcome == EQUAL for inst in self.instances
        )

    def unknowns(self) -> list[RelationInstance]:
        return [i for i in self.instances if i.verdict.outcome == UNKNOWN]

    def failures(self) -> list[RelationInstance]:
        return [i for i in self.instances if i.verdict.outcome == DISTINCT]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "instances": [
                {
                    "family": i.family,
                    "k": i.k,
                    "relation": i.description,
                    "verdict": i.verdict.outcome,
                }
                for i in self.instances
            ],
        }


def verify_theorem_relations(
    BP: BoundaryPresentation,
    R: RelationSet,
    budget: SearchBudget | None = None,
    match: GammaMatch | None = None,
) -> RelationReport:
    """Check every instance of the main theorem's relation families.

    Families, for k in [1, m*n] (indices mod m*n, k' = (-k) mod m):
      I    x_{k+2+2k'} y_k = y_{k+1} z_k          k != 0,1 (mod m)
      II   x_{k+1} z_k = z_{k-1} x_k              k != 0,1,2 (mod m)
      III  x_{k+1} z_k = y_{k-2} x_{k-1} x_k      k == 2 (mod m)
      IV   x_{k+1} x_{k+2} y_k = z_{k-1} x_k      k == 0 (mod m)
      V    y_{k+2+2k'} y_k = x_{k+2m+1} .. x_k    k != 1 (mod m)
    For m = 2 families I-III are empty and IV degenerates to
    x_{k+1} x_{k+2} y_k = y_{k-2} x_{k-1} x_k.
    """
    m, n = BP.m, BP.n
    mn = m * n
    if match is None:
        match = match_gamma(BP, build_gamma(m, n))
    if not match.ok:
        raise BoundaryError(f"Gamma match required first: {match.obstruction}")

    def rep(fam: str, k: int) -> Path:
        return match.rep_of((fam, modl(k, mn)))

    def chain(*parts: Path) -> Path:
        out = parts[0]
        for p in parts[1:]:
            out = out * p
        return out

    def xprod(start: int, count: int) -> Path:
        return chain(*[rep("x", start + i) for i in range(count)])

    report = RelationReport()

    def check(family: str, k: int, desc: str, lhs: Path, rhs: Path) -> None:
        verdict = paths_equal(lhs, rhs, R, budget)
        report.instances.append(RelationInstance(family, k, desc, verdict))

    for k in range(1, mn + 1):
        km = k % m
        kp = (-k) % m
        if m == 2:
            if km == 0:
                check(
                    "IV",
                    k,
                    f"x_{modl(k + 1, mn)} x_{modl(k + 2, mn)} y_{k} = "
                    f"y_{modl(k - 2, mn)} x_{modl(k - 1, mn)} x_{k}",
                    chain(rep("x", k + 1), rep("x", k + 2), rep("y", k)),
                    chain(rep("y", k - 2), rep("x", k - 1), rep("x", k)),
                )
        else:
            if km not in (0, 1):
                check(
                    "I",
                    k,
                    f"x_{modl(k + 2 + 2 * kp, mn)} y_{k} = y_{modl(k + 1, mn)} z_{k}",
                    chain(rep("x", k + 2 + 2 * kp), rep("y", k)),
                    chain(rep("y", k + 1), rep("z", k)),
                )
            if km not in (0, 1, 2):
                check(
                    "II",
                    k,
                    f"x_{modl(k + 1, mn)} z_{k} = z_{modl(k - 1, mn)} x_{k}",
                    chain(rep("x", k + 1), rep("z", k)),
                    chain(rep("z", k - 1), rep("x", k)),
                )
            if km == 2:
                check(
                    "III",
                    k,
                    f"x_{modl(k + 1, mn)} z_{k} = "
                    f"y_{modl(k - 2, mn)} x_{modl(k - 1, mn)} x_{k}",
                    chain(rep("x", k + 1), rep("z", k)),
                    chain(rep("y", k - 2), rep("x", k - 1), rep("x", k)),
                )
            if km == 0:
                check(
                    "IV",
                    k,
                    f"x_{modl(k + 1, mn)} x_{modl(k + 2, mn)} y_{k} = "
                    f"z_{modl(k - 1, mn)} x_{k}",
                    chain(rep("x", k + 1), rep("x", k + 2), rep("y", k)),
                    chain(rep("z", k - 1), rep("x", k)),
                )
        if km != 1 % m:
            check(
                "V",
                k,
                f"y_{modl(k + 2 + 2 * kp, mn)} y_{k} = "
                f"x_{modl(k + 2 * m + 1, mn)}..x_{k} ({mn - 2 * m} arrows)",
                chain(rep("y", k + 2 + 2 * kp), rep("y", k)),
                xprod(k + 2 * m + 1, mn - 2 * m),
            )
    return report


@dataclass
class CentralElementReport:
    entries: list[tuple[str, EqualityVerdict]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(
            v.outcome == EQUAL for _, v in self.entries
        )

    def unknowns(self) -> list[str]:
        return [d for d, v in self.entries if v.outcome == UNKNOWN]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "generators": [
                {"generator": d, "verdict": v.outcome} for d, v in self.entries
            ],
        }


def verify_central_element(
    BP: BoundaryPresentation, R: RelationSet, budget: SearchBudget | None = None
) -> CentralElementReport:
    """Check u_{s(a)} a = a u_{t(a)} for every boundary generator a.

    This is the generator-wise restatement of the centrality of the sum of
    one chordless cycle per boundary vertex.
    """
    Q = BP.quiver
    report = CentralElementReport()
    for c in BP.classes:
        u_s = chordless_cycle_at(Q, c.source)
        u_t = chordless_cycle_at(Q, c.target)
        verdict = paths_equal(u_s * c.rep, c.rep * u_t, R, budget)
        report.entries.append((c.describe(), verdict))
    return report


# ---------------------------------------------------------------------------
# Fan structure and the named generator-path formulas of the fan quiver


def fan_m2_structure_report(Q: QuiverWithFaces):
    """Check that the dual quiver of a GL_2 fan has the canonical fan shape.

    Expected: 2n boundary and n-3 internal vertices; boundary arrows
    x_1..x_{2n}, a single arrow 4 -> 2 and a single arrow 2n -> 2n-2; an
    internal chain 2 -> i_1 -> .. -> i_{n-3} -> 2n with side arrows
    i_k -> 2k+2 and 2k+4 -> i_k; and 2n-2 faces.  For n = 3 the chain
    collapses to the single arrow 2 -> 6.
    """
    from .dimer import ValidationReport

    rep = ValidationReport()
    n = Q.n
    mn = 2 * n
    if Q.m != 2:
        rep.add("m", False, f"expected m=2, got {Q.m}")
        return rep
    rep.add(
        "vertex-counts",
        len(Q.boundary_vertices) == mn and len(Q.internal_vertices) == n - 3,
        f"{len(Q.boundary_vertices)} boundary, {len(Q.internal_vertices)} internal",
    )
    missing_x = [
        k for k in range(1, mn + 1) if Q.find_arrow(modl(k - 1, mn), k) is None
    ]
    rep.add("x-arrows", not missing_x, f"missing x at {missing_x}" if missing_x else "")
    rep.add("y4", Q.find_arrow(4, 2) is not None, "missing arrow 4->2")
    rep.add(
        "y2n",
        Q.find_arrow(mn, mn - 2) is not None,
        f"missing arrow {mn}->{mn - 2}",
    )

    expected = {(modl(k - 1, mn), k) for k in range(1, mn + 1)}
    expected |= {(4, 2), (mn, mn - 2)}
    if n == 3:
        expected.add((2, 6))
    else:
        inner = []
        cur = 2
        for k in range(1, n - 2):
            hits = [
                aid
                for aid in Q.out_arrows[cur]
                if Q.vertices[Q.arrow_target[aid]] == "internal"
            ]
            if len(hits) != 1:
                rep.add("alpha-chain", False, f"no unique chain arrow out of {cur!r}")
                return rep
            cur = Q.arrow_target[hits[0]]
            inner.append(cur)
        rep.add(
            "alpha-chain",
            Q.find_arrow(inner[-1], mn) is not None,
            f"chain does not close onto {mn}",
        )
        expected.add((2, inner[0]))
        expected |= {(inner[k], inner[k + 1]) for k in range(len(inner) - 1)}
        expected.add((inner[-1], mn))
        beta_gamma_ok = True
        for k in range(1, n - 2):
            i_k = inner[k - 1]
            expected.add((i_k, 2 * k + 2))
            expected.add((2 * k + 4, i_k))
            if (
                Q.find_arrow(i_k, 2 * k + 2) is None
                or Q.find_arrow(2 * k + 4, i_k) is None
            ):
                beta_gamma_ok = False
        rep.add("beta-gamma", beta_gamma_ok, "missing beta/gamma arrows")

    actual = {(a.source, a.target) for a in Q.arrows}
    rep.add(
        "exact-arrow-set",
        actual == expected and len(Q.arrows) == len(expected),
        f"extra: {sorted(map(str, actual - expected))[:3]}, "
        f"missing: {sorted(map(str, expected - actual))[:3]}",
    )
    rep.add("face-count", len(Q.faces) == mn - 2, f"{len(Q.faces)} faces")
    return rep


def _move_class(tag: tuple) -> str:
    """Geometric class of a fan-quiver arrow from its dual-edge tag.

    In a triangle whose first corner is the fan apex, side index j yields
    the lattice move p+e_{j+1} -> p+e_{j+2}: j=0 circles the apex (class A,
    the nested alpha chains), j=1 steps toward the apex (class C),
    j=2 steps away from it (class B).
    """
    return {0: "A", 1: "C", 2: "B"}[tag[2]]


def fan_generator_paths(m: int, n: int, Q: QuiverWithFaces) -> dict:
    """The named generator paths of the fan quiver, built structurally.

    Yields a table name -> Path covering all of Gamma(m, n): x arrows, the
    z paths (one internal stopover), and the y paths as class chains
    (k'+1 apex-ward C moves and/or k'+1 outward B moves, or a full circular
    A chain).  Raises FormulaMismatchError where the expected arrow does
    not exist or is ambiguous.
    """
    if Q.m != m or Q.n != n:
        raise FormulaMismatchError(f"quiver is for (m,n)=({Q.m},{Q.n}), not ({m},{n})")
    tris = {a.dual[0] for a in Q.arrows}
    if any(tri[0] != 1 for tri in tris):
        raise FormulaMismatchError("quiver is not the fan with apex 1")
    mn = m * n

    def out_arrow_of_class(v, cls: str) -> int:
        hits = [
            aid for aid in Q.out_arrows[v] if _move_class(Q.arrows[aid].dual) == cls
        ]
        if len(hits) != 1:
            raise FormulaMismatchError(
                f"expected one class-{cls} arrow out of {v!r}, found {len(hits)}"
            )
        return hits[0]

    table: dict[tuple, Path] = {}
    for k in range(1, mn + 1):
        aid = Q.find_arrow(modl(k - 1, mn), k)
        if aid is None:
            raise FormulaMismatchError(f"missing boundary arrow x_{k}")
        table[("x", k)] = Q.arrow_path(aid)

    for h in range(1, mn + 1):
        if h % m == 1 % m:
            continue
        kp = (-h) % m
        tail = modl(h + 2 + 2 * kp, mn)
        if h >= m * (n - 1) + 2:
            arrows, v = [], tail
            for _ in range(mn):
                if v == h:
                    break
                aid = out_arrow_of_class(v, "A")
                arrows.append(aid)
                v = Q.arrow_target[aid]
            if v != h:
                raise FormulaMismatchError(f"alpha chain from {tail} misses {h}")
        else:
            if 2 <= h <= m:
                steps = ["C"] * (kp + 1)
            elif m * (n - 2) + 2 <= h <= m * (n - 1):
                steps = ["B"] * (kp + 1)
            else:
                steps = ["C"] * (kp + 1) + ["B"] * (kp + 1)
            arrows, v = [], tail
            for cls in steps:
                aid = out_arrow_of_class(v, cls)
                arrows.append(aid)
                v = Q.arrow_target[aid]
            if v != h:
                raise FormulaMismatchError(
                    f"y_{h} path lands on {v!r} instead of {h}"
                )
        table[("y", h)] = Q.path(arrows)

    for h in range(1, mn + 1):
        if h % m in (0, 1 % m):
            continue
        tail = modl(h + 1, mn)
        stops = [
            aid
            for aid in Q.out_arrows[tail]
            if Q.vertices[Q.arrow_target[aid]] == "internal"
            and Q.find_arrow(Q.arrow_target[aid], h) is not None
        ]
        if len(stops) != 1:
            raise FormulaMismatchError(
                f"z_{h} needs one internal stopover {tail}->v->{h}, found {len(stops)}"
            )
        v = Q.arrow_target[stops[0]]
        table[("z", h)] = Q.path((stops[0], Q.find_arrow(v, h)))
    return table


def check_fan_formulas(
    BP: BoundaryPresentation,
    R: RelationSet,
    budget: SearchBudget | None = None,
    match: GammaMatch | None = None,
):
    """Assert each formula path equals the extracted class with its name."""
    from .dimer import ValidationReport

    if match is None:
        match = match_gamma(BP, build_gamma(BP.m, BP.n))
    if not match.ok:
        raise BoundaryError(f"Gamma match required first: {match.obstruction}")
    table = fan_generator_paths(BP.m, BP.n, BP.quiver)
    rep = ValidationReport()
    for name, path in sorted(table.items()):
        cls = match.assignment.get(name)
        if cls is None:
            rep.add(f"{name[0]}_{name[1]}", False, "no extracted class with this name")
            continue
        verdict = paths_equal(path, cls.rep, R, budget)
        rep.add(
            f"{name[0]}_{name[1]}",
            verdict.outcome == EQUAL,
            "" if verdict.outcome == EQUAL else f"verdict {verdict.outcome}",
        )
    return rep


# ---------------------------------------------------------------------------
# Full pipeline and flip transport


@dataclass
class VerificationOutcome:
    n: int
    m: int
    triangulation: Triangulation
    matched: bool = False
    rotation: int | None = None
    generator_count: int = 0
    obstruction: str | None = None
    presentation: BoundaryPresentation | None = None
    relations: RelationReport | None = None
    central: CentralElementReport | None = None
    inconclusive: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.matched
            and not self.inconclusive
            and self.relations is not None
            and self.relations.passed
            and self.central is not None
            and self.central.passed
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "triangulation": self.triangulation.to_json(),
            "matched": self.matched,
            "rotation": self.rotation,
            "generators": self.generator_count,
            "obstruction": self.obstruction,
            "presentation": self.presentation.to_json() if self.presentation else None,
            "relations": self.relations.to_json() if self.relations else None,
            "central_element": self.central.to_json() if self.central else None,
            "inconclusive": self.inconclusive,
            "passed": self.passed,
        }


def verify_boundary_algebra(
    T: Triangulation,
    m: int,
    budget: SearchBudget | None = None,
    allow_reflection: bool = False,
) -> VerificationOutcome:
    """Run the full pipeline on one triangulation: build, reduce, dualize,
    extract, match against Gamma(m, n), verify relations and centrality."""
    outcome = VerificationOutcome(n=T.n, m=m, triangulation=T)
    Q = dual_quiver(reduce_dimer(build_dimer(T, m)))
    R = potential_relations(Q)
    try:
        BP = boundary_generators(Q, R, budget)
    except InconclusivePresentationError as exc:
        outcome.inconclusive.append(f"presentation: {exc}")
        return outcome
    outcome.generator_count = len(BP.classes)
    outcome.presentation = BP
    match = match_gamma(BP, build_gamma(m, T.n), allow_reflection=allow_reflection)
    outcome.matched = match.ok
    outcome.rotation = match.rotation
    outcome.obstruction = match.obstruction
    if not match.ok:
        return outcome
    outcome.relations = verify_theorem_relations(BP, R, budget, match)
    outcome.central = verify_central_element(BP, R, budget)
    outcome.inconclusive.extend(
        f"relation {i.family}@{i.k}" for i in outcome.relations.unknowns()
    )
    outcome.inconclusive.extend(
        f"central {d}" for d in outcome.central.unknowns()
    )
    return outcome


@dataclass
class FlipTransportCertificate:
    move: object
    matched_before: bool
    matched_after: bool
    affected: dict = field(default_factory=dict)
    unaffected_identical: bool = True
    relations_after: RelationReport | None = None
    inconclusive: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.matched_before
            and self.matched_after
            and self.unaffected_identical
            and not self.inconclusive
            and self.relations_after is not None
            and self.relations_after.passed
        )

    def to_json(self) -> dict:
        return {
            "move": self.move.to_json(),
            "matched_before": self.matched_before,
            "matched_after": self.matched_after,
            "affected": {
                f"{k[2]}:{k[0]}->{k[1]}": v for k, v in sorted(self.affected.items(), key=str)
            },
            "unaffected_identical": self.unaffected_identical,
            "relations_after": self.relations_after.to_json()
            if self.relations_after
            else None,
            "inconclusive": self.inconclusive,
            "ok": self.ok,
        }


def _tag_sequence(p: Path) -> tuple:
    return tuple(p.quiver.arrows[aid].dual for aid in p.arrows)


def verify_flip_transport(
    T: Triangulation, d, m: int, budget: SearchBudget | None = None
) -> FlipTransportCertificate:
    """Exhibit how one diagonal flip transports the boundary presentation.

    Both sides are extracted and matched against Gamma(m, n); generator
    classes touching the flip quadrilateral get their old and new
    representatives recorded (the new one split into connecting paths
    around the arrows of the new quadrilateral), classes away from it must
    keep literally identical representatives, and the full relation suite
    is re-verified on the flipped side.
    """
    T2, move = flip(T, d)
    quad_old = {tri for tri in T.triangles if set(move.removed) <= set(tri)}
    quad_new = {tri for tri in T2.triangles if set(move.inserted) <= set(tri)}

    def pipeline(tri: Triangulation):
        Q = dual_quiver(reduce_dimer(build_dimer(tri, m)))
        R = potential_relations(Q)
        BP = boundary_generators(Q, R, budget)
        match = match_gamma(BP, build_gamma(m, tri.n))
        return Q, R, BP, match

    _, R1, BP1, match1 = pipeline(T)
    _, R2, BP2, match2 = pipeline(T2)
    cert = FlipTransportCertificate(
        move=move, matched_before=match1.ok, matched_after=match2.ok
    )
    if not (match1.ok and match2.ok):
        return cert

    old_sig, new_sig = BP1.by_signature(), BP2.by_signature()
    if set(old_sig) != set(new_sig):
        cert.unaffected_identical = False
        return cert
    for key, old in sorted(old_sig.items(), key=str):
        new = new_sig[key]
        old_tags, new_tags = _tag_sequence(old.rep), _tag_sequence(new.rep)
        touches_old = any(t[0] in quad_old for t in old_tags)
        touches_new = any(t[0] in quad_new for t in new_tags)
        if touches_old or touches_new:
            core_idx = [i for i, t in enumerate(new_tags) if t[0] in quad_new]
            lo = core_idx[0] if core_idx else len(new_tags)
            hi = core_idx[-1] + 1 if core_idx else len(new_tags)
            cert.affected[key] = {
                "old": list(old.rep.arrows),
                "new": list(new.rep.arrows),
                "delta_prefix": list(new.rep.arrows[:lo]),
                "core": list(new.rep.arrows[lo:hi]),
                "delta_suffix": list(new.rep.arrows[hi:]),
            }
        elif old_tags != new_tags:
            cert.unaffected_identical = False
    cert.relations_after = verify_theorem_relations(BP2, R2, budget, match2)
    cert.inconclusive.extend(
        f"relation {i.family}@{i.k}" for i in cert.relations_after.unknowns()
    )
    return cert
