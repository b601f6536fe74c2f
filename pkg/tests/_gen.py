"""Random lattice pairs for the property and acceptance suites."""
from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from latticetile import exact
from latticetile.lattice import Lattice

ENTRY_BOUND = 8
DIAG_CHOICES = (Fraction(2), Fraction(1, 2), Fraction(3), Fraction(1, 3), Fraction(3, 2), Fraction(2, 3))


def small_rational(rng: random.Random, bound: int = ENTRY_BOUND) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def entries_ok(vectors, bound: int = ENTRY_BOUND) -> bool:
    return all(abs(x.numerator) <= bound and x.denominator <= bound for v in vectors for x in v)


def random_lattice(rng: random.Random, d: int, bound: int = ENTRY_BOUND) -> Lattice:
    while True:
        vecs = tuple(tuple(small_rational(rng, bound) for _ in range(d)) for _ in range(d))
        if exact.det(vecs) != 0:
            return Lattice(vecs)


def random_unimodular(rng: random.Random, d: int, steps: int = 3) -> list[list[int]]:
    u = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(steps):
        if d < 2:
            break
        i, j = rng.sample(range(d), 2)
        c = rng.choice((-1, 1))
        for row in u:
            row[j] += c * row[i]
    if rng.random() < 0.5:
        u = [[-x for x in row] for row in u] if d % 2 else u
    return u


def random_det_one_diagonal(rng: random.Random, d: int) -> list[list[Fraction]]:
    diag = [Fraction(1)] * d
    for _ in range(rng.randint(1, 2)):
        if d < 2:
            break
        i, j = rng.sample(range(d), 2)
        s = rng.choice(DIAG_CHOICES)
        diag[i] *= s
        diag[j] /= s
    return [[diag[i] if i == j else Fraction(0) for j in range(d)] for i in range(d)]


def commensurable_pair(rng: random.Random, d: int, bound: int = ENTRY_BOUND, tries: int = 200):
    """``(L, M)`` with ``M = A U D V`` for a basis matrix ``A`` of ``L``: equal volume, commensurable.

    Both bases keep entries ``p/q`` with ``|p|, q <= bound`` (rejection sampling).
    For ``d >= 2`` the diagonal factor is never the identity.
    """
    den = math.lcm(*range(1, bound + 1))
    while True:
        L = random_lattice(rng, d, rng.randint(2, bound))
        Af = np.array(L.matrix, dtype=float)
        for _ in range(tries):
            U, D, V = random_unimodular(rng, d), random_det_one_diagonal(rng, d), random_unimodular(rng, d)
            # cheap necessary conditions in floats before the exact product
            approx = Af @ np.array(U, float) @ np.array(D, float) @ np.array(V, float)
            if np.abs(approx).max() > bound + 1e-9 or np.abs(approx * den - np.round(approx * den)).max() > 1e-6:
                continue
            cols = exact.matmul(L.matrix, exact.matmul(exact.matmul(U, D), V))
            vecs = exact.transpose(cols)
            if entries_ok(vecs, bound):
                return L, Lattice(vecs)


def unequal_pair(rng: random.Random, d: int, bound: int = ENTRY_BOUND):
    """Commensurable pair whose volumes differ by a factor in {2, 3, 4, 1/2, 1/3, 1/4}."""
    L, M = commensurable_pair(rng, d, bound)
    k = rng.choice((2, 3, 4))
    j = rng.randrange(d)
    vecs = [list(v) for v in M.vectors]
    vecs[j] = [x * k for x in vecs[j]]
    M = Lattice(tuple(tuple(v) for v in vecs))
    return (L, M) if rng.random() < 0.5 else (M, L)
