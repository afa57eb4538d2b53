"""Path equality in the dimer algebra, decided by certified bounded search.

The dimer algebra is the path algebra modulo the binomial relations derived
from the natural potential, so two paths are equal iff one rewrites into
the other by substituting one side of a relation for the other.  There is
no length grading (faces of different sizes coexist), hence no terminating
normal form is assumed: equality is semidecided by bidirectional
breadth-first search under an explicit budget, and Unknown is a first-class
verdict.

Positive answers carry a replayable certificate; negative answers name a
separating invariant (an abelianized arrow-count residue, or exhaustion of
a complete finite closure).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import gcd

EQUAL = "equal"
DISTINCT = "distinct"
UNKNOWN = "unknown"

DEFAULT_MAX_VISITED = 1_000_000
ENV_BUDGET_VISITED = "DIMERLAB_BUDGET_VISITED"


class RewriteError(ValueError):
    """Base class for errors raised by this module."""


class PathError(RewriteError):
    """A non-composable arrow sequence."""


class IncomparablePathsError(RewriteError):
    """paths_equal needs a shared source and target."""


class OracleSoundnessError(RewriteError):
    """An Equal verdict failed its own replay or invariant cross-check."""


def default_max_visited() -> int:
    raw = os.environ.get(ENV_BUDGET_VISITED)
    if raw is None:
        return DEFAULT_MAX_VISITED
    try:
        return int(raw)
    except ValueError:
        raise RewriteError(f"{ENV_BUDGET_VISITED} must be an integer, got {raw!r}")


@dataclass(frozen=True)
class SearchBudget:
    max_path_length: int
    max_visited: int

    def __post_init__(self):
        if self.max_path_length <= 0 or self.max_visited <= 0:
            raise RewriteError(f"budget must be positive, got {self}")


class Path:
    """A composable arrow sequence; empty paths are anchored at a vertex.

    Compositions read left to right: Path((a, b)) means first a, then b.
    """

    __slots__ = ("quiver", "arrows", "anchor", "source", "target")

    def __init__(self, quiver, arrows=(), anchor=None):
        arrows = tuple(arrows)
        if arrows:
            src = quiver.arrow_source[arrows[0]]
            for a, b in zip(arrows, arrows[1:]):
                if quiver.arrow_target[a] != quiver.arrow_source[b]:
                    raise PathError(f"arrows {a} and {b} do not compose")
            tgt = quiver.arrow_target[arrows[-1]]
            anchor = None
        else:
            if anchor is None:
                raise PathError("an empty path needs an anchor vertex")
            if anchor not in quiver.vertices:
                raise PathError(f"anchor {anchor!r} is not a vertex")
            src = tgt = anchor
        self.quiver = quiver
        self.arrows = arrows
        self.anchor = anchor
        self.source = src
        self.target = tgt

    def __len__(self) -> int:
        return len(self.arrows)

    def key(self) -> tuple:
        return (self.arrows, self.anchor)

    def __eq__(self, other):
        if not isinstance(other, Path):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __mul__(self, other: "Path") -> "Path":
        if self.target != other.source:
            raise PathError(
                f"cannot compose: target {self.target!r} != source {other.source!r}"
            )
        if not self.arrows and not other.arrows:
            return Path(self.quiver, (), anchor=self.anchor)
        return Path(self.quiver, self.arrows + other.arrows)

    def __repr__(self):
        if not self.arrows:
            return f"Path(e_{self.anchor!r})"
        return f"Path({self.source!r}->{self.target!r} via {list(self.arrows)})"


class RelationSet:
    """The relation pairs of a potential, with the indexes rewriting needs."""

    def __init__(self, quiver, relations):
        self.quiver = quiver
        self.relations = tuple(relations)
        for lhs, rhs in self.relations:
            if lhs.source != rhs.source or lhs.target != rhs.target:
                raise RewriteError(f"relation endpoints differ: {lhs} vs {rhs}")
        self.max_side_length = max(
            (max(len(l), len(r)) for l, r in self.relations), default=1
        )
        # pattern index: first arrow id -> [(side, replacement, relation, direction)]
        self._patterns: dict[int, list] = {}
        for ridx, (lhs, rhs) in enumerate(self.relations):
            for side, other, direction in (
                (lhs.arrows, rhs.arrows, "lr"),
                (rhs.arrows, lhs.arrows, "rl"),
            ):
                self._patterns.setdefault(side[0], []).append(
                    (side, other, ridx, direction)
                )
        self._lattice_basis = None

    def __len__(self):
        return len(self.relations)

    def sites(self, arrows: tuple) -> list[tuple]:
        """All rewrite sites of a raw arrow tuple, deterministically ordered.

        Each site is (position, relation, direction, resulting tuple).
        """
        out = []
        n = len(arrows)
        for pos in range(n):
            for side, other, ridx, direction in self._patterns.get(arrows[pos], ()):
                if arrows[pos : pos + len(side)] == side:
                    out.append(
                        (pos, ridx, direction, arrows[:pos] + other + arrows[pos + len(side) :])
                    )
        out.sort(key=lambda s: (s[0], s[1], s[2]))
        return out

    def lattice_basis(self) -> list[list[int]]:
        """Row-echelon integer basis of the span of count(lhs) - count(rhs)."""
        if self._lattice_basis is None:
            dim = len(self.quiver.arrows)
            basis: list[list[int]] = []  # pivot columns strictly increasing
            for lhs, rhs in self.relations:
                vec = [0] * dim
                for a in lhs.arrows:
                    vec[a] += 1
                for a in rhs.arrows:
                    vec[a] -= 1
                _lattice_insert(basis, vec)
            self._lattice_basis = basis
        return self._lattice_basis

    def residue(self, arrows: tuple) -> tuple[int, ...]:
        vec = [0] * len(self.quiver.arrows)
        for a in arrows:
            vec[a] += 1
        return _lattice_reduce(self.lattice_basis(), vec)


def _pivot(row: list[int]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    return -1


def _lattice_insert(basis: list[list[int]], vec: list[int]) -> None:
    v = list(vec)
    i = 0
    while True:
        j = _pivot(v)
        if j < 0:
            return
        while i < len(basis) and _pivot(basis[i]) < j:
            i += 1
        if i == len(basis) or _pivot(basis[i]) > j:
            if v[j] < 0:
                v = [-x for x in v]
            basis.insert(i, v)
            return
        row = basis[i]
        d, b = row[j], v[j]
        if b % d == 0:
            q = b // d
            v = [x - q * y for x, y in zip(v, row)]
        else:
            g, x, y = _xgcd(d, b)
            new_row = [x * r + y * w for r, w in zip(row, v)]
            v = [(d // g) * w - (b // g) * r for r, w in zip(row, v)]
            basis[i] = new_row


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    assert old_s * a + old_t * b == old_r == gcd(a, b)
    return old_r, old_s, old_t


def _lattice_reduce(basis: list[list[int]], vec: list[int]) -> tuple[int, ...]:
    v = list(vec)
    for row in basis:
        j = _pivot(row)
        q = v[j] // row[j]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return tuple(v)


@dataclass(frozen=True)
class RewriteSite:
    position: int
    relation: int
    direction: str  # 'lr' replaces the + side by the - side, 'rl' the reverse
    result: Path


def rewrite_sites(p: Path, R: RelationSet) -> list[RewriteSite]:
    """Every occurrence of either side of every relation inside p."""
    return [
        RewriteSite(pos, ridx, direction, Path(p.quiver, res))
        for pos, ridx, direction, res in R.sites(p.arrows)
    ]


def abelian_invariant(p: Path, R: RelationSet) -> tuple[int, ...]:
    """Arrow-count vector of p, canonically reduced modulo the relation lattice.

    Equal paths always share the residue, so differing residues certify
    Distinct; the converse does not hold.
    """
    return R.residue(p.arrows)


@dataclass(frozen=True)
class EqualityVerdict:
    outcome: str  # EQUAL | DISTINCT | UNKNOWN
    certificate: tuple | None = None  # for EQUAL: ((position, relation, direction), ...)
    separating: str | None = None  # for DISTINCT: name of the invariant
    visited: int = 0
    budget: SearchBudget | None = None

    @property
    def is_equal(self) -> bool:
        return self.outcome == EQUAL

    def certificate_json(self) -> list[dict]:
        if self.certificate is None:
            return []
        return [
            {"step": i, "relation": r, "direction": d, "position": pos}
            for i, (pos, r, d) in enumerate(self.certificate)
        ]


def default_budget(R: RelationSet, p: Path, q: Path) -> SearchBudget:
    return SearchBudget(
        max_path_length=2 * R.max_side_length + max(len(p), len(q)),
        max_visited=default_max_visited(),
    )


def apply_step(arrows: tuple, step: tuple, R: RelationSet) -> tuple:
    pos, ridx, direction = step
    lhs, rhs = R.relations[ridx]
    src, dst = (lhs.arrows, rhs.arrows) if direction == "lr" else (rhs.arrows, lhs.arrows)
    if arrows[pos : pos + len(src)] != src:
        raise OracleSoundnessError(f"step {step} does not match path {arrows}")
    return arrows[:pos] + dst + arrows[pos + len(src) :]


def replay_certificate(p: Path, certificate, R: RelationSet) -> Path:
    """Apply a certificate's steps to p; raises if any step fails to match."""
    arrows = p.arrows
    for step in certificate:
        arrows = apply_step(arrows, step, R)
    if arrows:
        return Path(p.quiver, arrows)
    return Path(p.quiver, (), anchor=p.anchor)


def _invert(steps: tuple) -> tuple:
    flip = {"lr": "rl", "rl": "lr"}
    return tuple((pos, ridx, flip[d]) for pos, ridx, d in reversed(steps))


def paths_equal(p: Path, q: Path, R: RelationSet, budget: SearchBudget | None = None) -> EqualityVerdict:
    """Decide p = q in the dimer algebra, within budget.

    Bidirectional breadth-first closure under the relation rewrites; a
    meeting point yields Equal with a certificate that is replayed before
    being returned.  A differing abelian residue, or exhaustion of a
    complete (never length-pruned) closure, yields Distinct.  Everything
    else is Unknown.
    """
    if p.source != q.source or p.target != q.target:
        raise IncomparablePathsError(
            f"endpoints differ: {p.source!r}->{p.target!r} vs {q.source!r}->{q.target!r}"
        )
    if budget is None:
        budget = default_budget(R, p, q)
    if p.key() == q.key():
        return EqualityVerdict(EQUAL, certificate=(), visited=1, budget=budget)
    if budget.max_visited < 2:
        return EqualityVerdict(UNKNOWN, visited=0, budget=budget)
    if R.residue(p.arrows) != R.residue(q.arrows):
        return EqualityVerdict(DISTINCT, separating="abelian_invariant", visited=2, budget=budget)

    kp, kq = p.arrows, q.arrows
    side_p: dict[tuple, tuple] = {kp: ()}
    side_q: dict[tuple, tuple] = {kq: ()}
    front_p, front_q = [kp], [kq]
    visited = 2
    pruned_p = pruned_q = False
    max_len = budget.max_path_length

    def finish(meet_steps_p: tuple, meet_steps_q: tuple) -> EqualityVerdict:
        cert = meet_steps_p + _invert(meet_steps_q)
        final = replay_certificate(p, cert, R)
        if final.key() != q.key():
            raise OracleSoundnessError("certificate replay did not reach the target path")
        if R.residue(p.arrows) != R.residue(q.arrows):
            raise OracleSoundnessError("abelian invariant separated a proven-equal pair")
        return EqualityVerdict(EQUAL, certificate=cert, visited=visited, budget=budget)

    while front_p or front_q:
        expand_p = bool(front_p) and (not front_q or len(front_p) <= len(front_q))
        mine, other = (side_p, side_q) if expand_p else (side_q, side_p)
        front = front_p if expand_p else front_q
        new_front = []
        overflow = False
        for key in front:
            chain = mine[key]
            for pos, ridx, direction, res in R.sites(key):
                if len(res) > max_len:
                    if expand_p:
                        pruned_p = True
                    else:
                        pruned_q = True
                    continue
                if res in mine:
                    continue
                step_chain = chain + ((pos, ridx, direction),)
                if res in other:
                    if expand_p:
                        return finish(step_chain, other[res])
                    return finish(other[res], step_chain)
                if visited >= budget.max_visited:
                    overflow = True
                    break
                mine[res] = step_chain
                new_front.append(res)
                visited += 1
            if overflow:
                break
        if overflow:
            return EqualityVerdict(UNKNOWN, visited=visited, budget=budget)
        if expand_p:
            front_p = new_front
        else:
            front_q = new_front
        if not front_p and not pruned_p:
            break
        if not front_q and not pruned_q:
            break

    if (not front_p and not pruned_p) or (not front_q and not pruned_q):
        return EqualityVerdict(
            DISTINCT, separating="exhausted_closure", visited=visited, budget=budget
        )
    return EqualityVerdict(UNKNOWN, visited=visited, budget=budget)
