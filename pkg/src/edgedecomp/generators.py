"""Seeded test-instance generators."""

from __future__ import annotations

import numpy as np

from .errors import DecompError
from .graph import BipartiteGraph, TripartiteGraph, as_fraction
from .packing import RootedTree
from .regularity import ORACLE_LIMIT, is_super_regular

MODELS = ("random", "planted-regular", "two-blocks", "low-c5", "forest")


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_bipartite(n: int, p, seed: int, n_b: int | None = None) -> BipartiteGraph:
    """Each of the ``n x n_b`` edges independently with probability ``p``."""
    p = float(as_fraction(p))
    if not 0 <= p <= 1 or n < 0:
        raise DecompError("gen-unsat", f"need n >= 0 and 0 <= p <= 1, got n={n}, p={p}")
    rng = rng_for(seed)
    return BipartiteGraph.from_matrix(rng.random((n, n if n_b is None else n_b)) < p)


def two_blocks(k: int) -> BipartiteGraph:
    """Two disjoint copies of ``K_{k,k}`` side by side: density 1/2, far from regular."""
    if k < 1:
        raise DecompError("gen-unsat", f"block size must be positive, got {k}")
    adj = np.zeros((2 * k, 2 * k), dtype=bool)
    adj[:k, :k] = True
    adj[k:, k:] = True
    return BipartiteGraph.from_matrix(adj)


def planted_regular(m: int, epsilon, delta, seed: int, p=None, *, max_tries: int = 200,
                    oracle_limit: int = ORACLE_LIMIT) -> BipartiteGraph:
    """Rejection-sample ``G(m, m, p)`` until it is (eps, delta)-super-regular.

    ``p`` defaults to ``min(1, delta + 2 eps)``.
    """
    eps = as_fraction(epsilon)
    delta = as_fraction(delta)
    if p is None:
        p = min(as_fraction(1), delta + 2 * eps)
    p = as_fraction(p)
    if m < 1 or not 0 < eps < 1 or not 0 < delta <= 1 or not 0 < p <= 1:
        raise DecompError("gen-unsat", f"bad parameters m={m}, eps={eps}, delta={delta}, p={p}")
    rng = rng_for(seed)
    for _ in range(max_tries):
        g = BipartiteGraph.from_matrix(rng.random((m, m)) < float(p))
        if is_super_regular(g, eps, delta, oracle_limit=oracle_limit):
            return g
    raise DecompError("gen-unsat", f"no (eps, delta)-super-regular sample in {max_tries} tries")


def low_c5(n: int, seed: int, p_xy=0.8, matchings: int = 1) -> TripartiteGraph:
    """Dense random XY block; YZ and ZX are unions of random perfect matchings."""
    p_xy = float(as_fraction(p_xy))
    if n < 1 or not 0 <= p_xy <= 1 or not 0 <= matchings <= n:
        raise DecompError("gen-unsat", f"bad parameters n={n}, p_xy={p_xy}, matchings={matchings}")
    rng = rng_for(seed)
    xy = rng.random((n, n)) < p_xy
    blocks = [BipartiteGraph.from_matrix(xy)]
    for _ in range(2):
        adj = np.zeros((n, n), dtype=bool)
        for _ in range(matchings):
            adj[np.arange(n), rng.permutation(n)] = True
        blocks.append(BipartiteGraph.from_matrix(adj))
    return TripartiteGraph(*blocks)


def random_tree(t: int, max_level: int, rng: np.random.Generator) -> RootedTree:
    """Grow level by level; each new level has 1..max_level vertices with parents in the previous level."""
    if t < 1 or max_level < 1:
        raise DecompError("gen-unsat", f"need t >= 1 and max_level >= 1, got {t}, {max_level}")
    parent = [-1]
    prev = [0]
    while len(parent) < t:
        size = int(rng.integers(1, min(max_level, t - len(parent)) + 1))
        level = []
        for _ in range(size):
            level.append(len(parent))
            parent.append(prev[int(rng.integers(len(prev)))])
        prev = level
    return RootedTree(tuple(parent))


def forest(count: int, max_size: int, max_level: int, seed: int, min_size: int = 2) -> list[RootedTree]:
    """``count`` random trees with sizes in ``[min_size, max_size]`` and bounded level sizes."""
    if count < 0 or not 1 <= min_size <= max_size:
        raise DecompError("gen-unsat", f"bad forest parameters count={count}, sizes {min_size}..{max_size}")
    rng = rng_for(seed)
    return [random_tree(int(rng.integers(min_size, max_size + 1)), max_level, rng) for _ in range(count)]
