"""Triangulations of the convex n-gon and their diagonal flips.

Polygon vertices are labelled 1..n counterclockwise.  Everything is purely
combinatorial: a triangulation is its set of diagonals, a diagonal is an
unordered pair of nonadjacent vertices, and crossing is decided cyclically.
No coordinates are ever used.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property


class PolygonError(ValueError):
    """Base class for errors raised by this module."""


class InvalidPolygonError(PolygonError):
    """n < 3, or a diagonal set does not define a triangulation."""


class UnknownDiagonalError(PolygonError):
    """A flip was requested on a diagonal that is not present."""


class IncompatiblePolygonsError(PolygonError):
    """Two triangulations of different polygons were combined."""


def normalize_diagonal(n: int, pair) -> tuple[int, int]:
    """Return the pair as a sorted tuple, checking it is a diagonal of the n-gon."""
    a, b = pair
    if not (1 <= a <= n and 1 <= b <= n):
        raise InvalidPolygonError(f"vertex out of range in diagonal {pair!r} (n={n})")
    a, b = min(a, b), max(a, b)
    gap = (b - a) % n
    if gap in (0, 1, n - 1):
        raise InvalidPolygonError(f"{(a, b)} is not a diagonal of the {n}-gon")
    return (a, b)


def is_polygon_edge(n: int, pair) -> bool:
    a, b = min(pair), max(pair)
    return b - a == 1 or (a, b) == (1, n)


def diagonals_cross(n: int, d1, d2) -> bool:
    """Whether two diagonals cross in the interior of the n-gon.

    {a,b} and {c,d} cross iff exactly one of c, d lies strictly between
    a and b in cyclic order.
    """
    a, b = d1
    c, d = d2
    if len({a, b, c, d}) < 4:
        return False

    def strictly_between(x: int) -> bool:
        # x strictly inside the cyclic arc from a to b (counterclockwise)
        return 0 < (x - a) % n < (b - a) % n

    return strictly_between(c) != strictly_between(d)


@dataclass(frozen=True)
class Triangulation:
    """A triangulation of the convex n-gon, stored as its diagonal set.

    Invariants (checked at construction): exactly n-3 diagonals, pairwise
    noncrossing.  Instances are immutable and hashable.
    """

    n: int
    diagonals: frozenset[tuple[int, int]]

    def __init__(self, n: int, diagonals):
        if n < 3:
            raise InvalidPolygonError(f"polygon needs at least 3 vertices, got {n}")
        diags = frozenset(normalize_diagonal(n, d) for d in diagonals)
        if len(diags) != n - 3:
            raise InvalidPolygonError(
                f"a triangulation of the {n}-gon has {n - 3} diagonals, got {len(diags)}"
            )
        ds = sorted(diags)
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                if diagonals_cross(n, ds[i], ds[j]):
                    raise InvalidPolygonError(f"diagonals {ds[i]} and {ds[j]} cross")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "diagonals", diags)

    @cached_property
    def sorted_diagonals(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.diagonals))

    def edges(self) -> set[tuple[int, int]]:
        """All edges: the n polygon sides plus the diagonals."""
        out = {(k, k + 1) for k in range(1, self.n)}
        out.add((1, self.n))
        out |= self.diagonals
        return out

    @cached_property
    def triangles(self) -> tuple[tuple[int, int, int], ...]:
        """The triangles of the triangulation as ascending vertex triples.

        In a triangulation of a convex polygon a vertex triple bounds a
        triangle iff all three pairs are edges, so a clique scan suffices.
        """
        edges = self.edges()
        n = self.n
        out = []
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                if (a, b) not in edges:
                    continue
                for c in range(b + 1, n + 1):
                    if (a, c) in edges and (b, c) in edges:
                        out.append((a, b, c))
        assert len(out) == n - 2
        return tuple(out)

    def key(self) -> tuple:
        return (self.n, self.sorted_diagonals)

    def to_json(self) -> dict:
        return {"n": self.n, "diagonals": [list(d) for d in self.sorted_diagonals]}

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        return cls(data["n"], [tuple(d) for d in data["diagonals"]])

    def __repr__(self) -> str:
        return f"Triangulation(n={self.n}, diagonals={list(self.sorted_diagonals)})"


@dataclass(frozen=True)
class FlipMove:
    """One diagonal flip: `removed` and `inserted` are the two diagonals of
    the quadrilateral (given in cyclic = ascending vertex order)."""

    removed: tuple[int, int]
    inserted: tuple[int, int]
    quadrilateral: tuple[int, int, int, int]

    def __post_init__(self):
        q = self.quadrilateral
        if sorted(q) != list(q) or len(set(q)) != 4:
            raise PolygonError(f"quadrilateral {q} not in ascending order")
        diags = {(q[0], q[2]), (q[1], q[3])}
        if {self.removed, self.inserted} != diags:
            raise PolygonError(
                f"{self.removed}/{self.inserted} are not the diagonals of {q}"
            )

    def to_json(self) -> dict:
        return {
            "removed": list(self.removed),
            "inserted": list(self.inserted),
            "quadrilateral": list(self.quadrilateral),
        }


def fan_triangulation(n: int, apex: int = 1) -> Triangulation:
    """The triangulation whose diagonals all contain `apex`."""
    if n < 3:
        raise InvalidPolygonError(f"polygon needs at least 3 vertices, got {n}")
    if not 1 <= apex <= n:
        raise InvalidPolygonError(f"apex {apex} out of range for the {n}-gon")
    diags = []
    for v in range(1, n + 1):
        if v == apex:
            continue
        gap = (v - apex) % n
        if gap not in (1, n - 1):
            diags.append((min(apex, v), max(apex, v)))
    return Triangulation(n, diags)


def enumerate_triangulations(n: int) -> list[Triangulation]:
    """All triangulations of the n-gon, each exactly once, deterministically.

    Recursive construction: the triangle on the chord (lo, hi) is chosen by
    its third vertex, so every triangulation is produced once.  Counts follow
    the Catalan numbers C(n-2).
    """
    if n < 3:
        raise InvalidPolygonError(f"polygon needs at least 3 vertices, got {n}")

    def rec(lo: int, hi: int) -> list[frozenset]:
        if hi - lo < 2:
            return [frozenset()]
        out = []
        for k in range(lo + 1, hi):
            for left in rec(lo, k):
                for right in rec(k, hi):
                    d = set(left) | set(right)
                    if k - lo >= 2:
                        d.add((lo, k))
                    if hi - k >= 2:
                        d.add((k, hi))
                    out.append(frozenset(d))
        return out

    sets = sorted(rec(1, n), key=lambda s: tuple(sorted(s)))
    return [Triangulation(n, s) for s in sets]


def flip(T: Triangulation, d) -> tuple[Triangulation, FlipMove]:
    """Flip diagonal `d`: replace it by the opposite diagonal of its quadrilateral."""
    d = normalize_diagonal(T.n, d)
    if d not in T.diagonals:
        raise UnknownDiagonalError(f"{d} is not a diagonal of {T!r}")
    a, b = d
    others = [
        v
        for tri in T.triangles
        if a in tri and b in tri
        for v in tri
        if v not in (a, b)
    ]
    assert len(others) == 2
    k, l = sorted(others)
    inserted = (k, l)
    quad = tuple(sorted((a, b, k, l)))
    new_diags = (T.diagonals - {d}) | {inserted}
    move = FlipMove(removed=d, inserted=inserted, quadrilateral=quad)
    return Triangulation(T.n, new_diags), move


def flip_sequence(src: Triangulation, dst: Triangulation) -> list[FlipMove]:
    """A shortest sequence of flips carrying `src` to `dst` (BFS on the flip graph)."""
    if src.n != dst.n:
        raise IncompatiblePolygonsError(f"cannot connect n={src.n} to n={dst.n}")
    if src.key() == dst.key():
        return []
    start, goal = src.key(), dst.key()
    parent: dict[tuple, tuple] = {start: None}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        for d in cur.sorted_diagonals:
            nxt, move = flip(cur, d)
            k = nxt.key()
            if k in parent:
                continue
            parent[k] = (cur.key(), move, nxt)
            if k == goal:
                queue.clear()
                break
            queue.append(nxt)
        else:
            continue
        break
    if goal not in parent:
        raise PolygonError("flip graph is connected; this should not happen")
    moves = []
    k = goal
    while parent[k] is not None:
        prev, move, _ = parent[k]
        moves.append(move)
        k = prev
    moves.reverse()
    return moves


def apply_moves(T: Triangulation, moves) -> Triangulation:
    """Replay a flip sequence (used to check flip_sequence results)."""
    cur = T
    for mv in moves:
        cur, got = flip(cur, mv.removed)
        if got.inserted != mv.inserted:
            raise PolygonError(f"move {mv} does not replay on {cur!r}")
    return cur
