"""Brute-force reference computations, written without the package's helpers."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def subsets(n: int, min_size: int = 1):
    for k in range(max(min_size, 1), n + 1):
        yield from itertools.combinations(range(n), k)


def block_density(adj: np.ndarray, xs, ys) -> Fraction:
    return Fraction(int(adj[np.ix_(list(xs), list(ys))].sum()), len(xs) * len(ys))


def max_deviation_both_sides(adj: np.ndarray, eps: Fraction) -> Fraction:
    """Largest |d(A,B) - d(X,Y)| over all X, Y with |X| >= eps m, |Y| >= eps m."""
    n_a, n_b = adj.shape
    d = Fraction(int(adj.sum()), n_a * n_b)
    lo_a, lo_b = math.ceil(eps * n_a), math.ceil(eps * n_b)
    best = Fraction(0)
    for xs in subsets(n_a, lo_a):
        for ys in subsets(n_b, lo_b):
            best = max(best, abs(d - block_density(adj, xs, ys)))
    return best


def regular_both_sides(adj: np.ndarray, eps: Fraction) -> bool:
    return max_deviation_both_sides(adj, eps) <= eps


def best_phi(adj: np.ndarray, r: int) -> Fraction:
    """max of d^r * 2k over all balanced k x k subpairs (best Y per X is the top-k columns)."""
    m = adj.shape[0]
    best = Fraction(0)
    for k in range(1, m + 1):
        for xs in itertools.combinations(range(m), k):
            cols = sorted(adj[list(xs)].sum(axis=0).tolist(), reverse=True)[:k]
            best = max(best, Fraction(sum(cols), k * k) ** r * 2 * k)
    return best


def good_c5(xy_owner: dict, yz: np.ndarray, zx: np.ndarray, n: int) -> list[int]:
    """Ordered tuples (x1, y1, x2, y2, z) with the three X-Y edges in one bundle."""
    per_z = [0] * n
    for x1, y1, x2, y2 in itertools.product(range(n), repeat=4):
        if x1 == x2 or y1 == y2:
            continue
        i = xy_owner.get((x1, y1))
        if i is None or xy_owner.get((x2, y1)) != i or xy_owner.get((x2, y2)) != i:
            continue
        for z in range(n):
            if yz[y2, z] and zx[z, x1]:
                per_z[z] += 1
    return per_z


def triangles(xy: np.ndarray, yz: np.ndarray, zx: np.ndarray) -> int:
    n = xy.shape[0]
    return sum(1 for x, y, z in itertools.product(range(n), repeat=3) if xy[x, y] and yz[y, z] and zx[z, x])


def five_cycles(adj: np.ndarray) -> int:
    """Undirected 5-cycles of a simple graph, each counted once."""
    n = adj.shape[0]
    count = 0
    for v in itertools.combinations(range(n), 5):
        first = v[0]
        # fix the smallest vertex first and halve for direction
        for rest in itertools.permutations(v[1:]):
            cyc = (first,) + rest
            if all(adj[cyc[i], cyc[(i + 1) % 5]] for i in range(5)):
                count += 1
    return count // 2


def tripartite_simple(xy, yz, zx) -> np.ndarray:
    n = xy.shape[0]
    a = np.zeros((3 * n, 3 * n), dtype=bool)
    a[:n, n:2 * n] = xy
    a[n:2 * n, 2 * n:] = yz
    a[2 * n:, :n] = zx
    return a | a.T


def best_balanced_split(adj: np.ndarray) -> Fraction:
    """Largest cross density over all floor(n/2)-subsets."""
    n = adj.shape[0]
    k = n // 2
    best = Fraction(0)
    for xs in itertools.combinations(range(n), k):
        rest = [v for v in range(n) if v not in xs]
        best = max(best, block_density(adj, xs, rest))
    return best
