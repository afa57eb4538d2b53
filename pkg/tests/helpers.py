"""Shared pipeline builders, cached so the suite builds each quiver once."""

import functools

import dimerlab as dl


@functools.lru_cache(maxsize=None)
def pipeline(n, m, diagonals):
    T = dl.Triangulation(n, diagonals)
    D = dl.reduce_dimer(dl.build_dimer(T, m))
    Q = dl.dual_quiver(D)
    R = dl.potential_relations(Q)
    return T, D, Q, R


def fan_key(n):
    return dl.fan_triangulation(n, 1).sorted_diagonals


def fan_pipeline(n, m):
    return pipeline(n, m, fan_key(n))


@functools.lru_cache(maxsize=None)
def presentation(n, m, diagonals):
    _, _, Q, R = pipeline(n, m, diagonals)
    BP = dl.boundary_generators(Q, R)
    match = dl.match_gamma(BP, dl.build_gamma(m, n))
    return BP, match


def fan_presentation(n, m):
    return presentation(n, m, fan_key(n))


CRITERION3_GRID = (
    [(2, n) for n in range(3, 9)]
    + [(3, n) for n in range(3, 7)]
    + [(4, n) for n in range(3, 6)]
    + [(5, n) for n in (3, 4)]
)

CRITERION5_GRID = [(2, n) for n in range(4, 8)] + [(3, n) for n in (4, 5)]
