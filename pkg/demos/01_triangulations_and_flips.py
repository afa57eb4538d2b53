"""Triangulations of the convex n-gon: enumeration and diagonal flips.

Every triangulation of the n-gon uses n-3 pairwise noncrossing diagonals,
and any two triangulations are connected by diagonal flips.  This script
enumerates them, shows a flip, and walks a shortest flip path between two
fans.
"""

import dimerlab as dl

for n in range(3, 9):
    print(f"n={n}: {len(dl.enumerate_triangulations(n)):4d} triangulations")

T = dl.fan_triangulation(6, 1)
print(f"\nfan(6, 1) diagonals: {sorted(T.diagonals)}")
print(f"triangles:           {T.triangles}")

T2, move = dl.flip(T, (1, 4))
print(f"\nflip (1,4): remove {move.removed}, insert {move.inserted} "
      f"in quadrilateral {move.quadrilateral}")
print(f"result: {sorted(T2.diagonals)}")

src, dst = dl.fan_triangulation(6, 1), dl.fan_triangulation(6, 4)
moves = dl.flip_sequence(src, dst)
print(f"\nshortest flip path fan(6,1) -> fan(6,4): {len(moves)} moves")
cur = src
for mv in moves:
    cur, _ = dl.flip(cur, mv.removed)
    print(f"  flip {mv.removed} -> {mv.inserted}: {sorted(cur.diagonals)}")
assert cur.key() == dst.key()
