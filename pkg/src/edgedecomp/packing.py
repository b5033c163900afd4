"""Embedding rooted trees into super-regular pairs and packing them edge-disjointly."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DecompError
from .extract import DEFAULT_FLOOR, MODES, _extract_functional, extract_regular_subgraph
from .graph import BipartiteGraph, as_fraction, density
from .regularity import ORACLE_LIMIT, is_super_regular, super_regularize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootedTree:
    """Tree on ``0 .. t-1`` rooted at 0; ``parent[0] == -1``."""

    parent: tuple[int, ...]

    def __post_init__(self):
        parent = tuple(int(p) for p in self.parent)
        object.__setattr__(self, "parent", parent)
        t = len(parent)
        if t == 0 or parent[0] != -1:
            raise DecompError("bad-tree", "vertex 0 must be the root (parent -1)")
        for v, p in enumerate(parent[1:], start=1):
            if not 0 <= p < t or p == v:
                raise DecompError("bad-tree", f"vertex {v} has invalid parent {p}")
        # every vertex must reach the root
        depth = [0] + [-1] * (t - 1)
        for v in range(1, t):
            path = []
            u = v
            while depth[u] < 0:
                if u in path:
                    raise DecompError("bad-tree", f"cycle through vertex {u}")
                path.append(u)
                u = parent[u]
            for w in reversed(path):
                depth[w] = depth[parent[w]] + 1
        children = [[] for _ in range(t)]
        for v in range(1, t):
            children[parent[v]].append(v)
        levels = [[0]]
        while True:
            nxt = [c for x in levels[-1] for c in children[x]]
            if not nxt:
                break
            levels.append(nxt)
        object.__setattr__(self, "_children", tuple(tuple(c) for c in children))
        object.__setattr__(self, "_levels", tuple(tuple(lv) for lv in levels))

    @classmethod
    def path(cls, t: int) -> RootedTree:
        return cls((-1,) + tuple(range(t - 1)))

    @classmethod
    def star(cls, leaves: int) -> RootedTree:
        return cls((-1,) + (0,) * leaves)

    @property
    def t(self) -> int:
        return len(self.parent)

    @property
    def edge_count(self) -> int:
        return self.t - 1

    def children(self, x: int) -> tuple[int, ...]:
        return self._children[x]

    @property
    def levels(self) -> tuple[tuple[int, ...], ...]:
        """``levels[i]`` holds the vertices at distance ``i`` from the root."""
        return self._levels

    @property
    def s(self) -> int:
        return len(self._levels)

    @property
    def max_level_size(self) -> int:
        return max(len(lv) for lv in self._levels)


@dataclass(frozen=True)
class Embedding:
    """``host[x]`` is the image of tree vertex ``x`` on side ``side[x]`` ("A"/"B")."""

    tree: RootedTree
    side: tuple[str, ...]
    host: tuple[int, ...]

    def edges(self) -> list[tuple[int, int]]:
        """Host edges used, as ``(a, b)`` pairs."""
        out = []
        for x in range(1, self.tree.t):
            p = self.tree.parent[x]
            if self.side[x] == "A":
                out.append((self.host[x], self.host[p]))
            else:
                out.append((self.host[p], self.host[x]))
        return out

    def relabel(self, xs: Sequence[int], ys: Sequence[int]) -> Embedding:
        """Map local pair indices back to the parent graph."""
        host = tuple(xs[h] if s == "A" else ys[h] for s, h in zip(self.side, self.host))
        return Embedding(self.tree, self.side, host)


def check_embedding(g: BipartiteGraph, emb: Embedding) -> bool:
    """Injective on each side, levels alternate sides, and every tree edge is a host edge."""
    images = list(zip(emb.side, emb.host))
    if len(set(images)) != len(images):
        return False
    for x in range(1, emb.tree.t):
        if emb.side[x] == emb.side[emb.tree.parent[x]]:
            return False
    return all(g.has_edge(a, b) for a, b in emb.edges())


@dataclass
class EmbedState:
    """Snapshot passed to the instrumentation hook after each level."""

    level: int
    A_u: frozenset
    B_u: frozenset
    A_prime: frozenset
    B_prime: frozenset


def embed_tree(h: BipartiteGraph, tree: RootedTree, epsilon, delta,
               occupied: tuple[Sequence[int], Sequence[int]] = ((), ()), *,
               check_host: bool = True, hook: Callable[[EmbedState], None] | None = None,
               oracle_limit: int = ORACLE_LIMIT) -> Embedding:
    """Greedy level-by-level embedding of ``tree`` into the pair ``h``.

    Hypotheses: ``h`` is (eps, delta)-super-regular with parts of size
    ``m >= 2t``, ``delta >= 3 eps`` and every level has at most ``delta m / 4``
    vertices.  Levels go to alternating sides starting with the root in A.
    ``A_u``/``B_u`` are the uncovered vertices and ``A'``/``B'`` those of them
    with degree at least ``(delta - eps)`` times the uncovered opposite side;
    children are placed on the lowest-index free neighbours inside ``A'`` or
    ``B'``.  ``occupied`` vertices start out covered.
    """
    eps = as_fraction(epsilon)
    delta = as_fraction(delta)
    m = h.n_a
    problems = []
    if not h.is_balanced():
        problems.append("host is unbalanced")
    if m < 2 * tree.t:
        problems.append(f"m={m} < 2t={2 * tree.t}")
    if delta < 3 * eps:
        problems.append(f"delta={delta} < 3 eps")
    if tree.max_level_size > delta * m / 4:
        problems.append(f"level size {tree.max_level_size} > delta m / 4 = {delta * m / 4}")
    if not problems and check_host and not is_super_regular(h, eps, delta, oracle_limit=oracle_limit):
        problems.append("host is not (certifiably) (eps, delta)-super-regular")
    if problems:
        raise DecompError("hypotheses-violated", "; ".join(problems))

    adj = h.adj
    bar = delta - eps
    unc = [np.ones(m, dtype=bool), np.ones(m, dtype=bool)]
    unc[0][list(occupied[0])] = False
    unc[1][list(occupied[1])] = False
    mats = [adj, adj.T]

    def qualified(side):
        other = unc[1 - side]
        deg = mats[side][:, other].sum(axis=1)
        return unc[side] & (deg >= bar * int(other.sum()))

    prime = [qualified(0), qualified(1)]

    def snapshot(level):
        if hook is not None:
            sets = [frozenset(np.flatnonzero(s).tolist()) for s in (*unc, *prime)]
            hook(EmbedState(level, *sets))

    side_of = [""] * tree.t
    host = [-1] * tree.t
    roots = np.flatnonzero(prime[0])
    if len(roots) == 0:
        raise DecompError("embedding-stuck", "no admissible vertex for the root",
                          state=[int(s.sum()) for s in (*unc, *prime)])
    side_of[0], host[0] = "A", int(roots[0])
    side = 0
    for i, level in enumerate(tree.levels):
        if i > 0:
            taken = np.zeros(m, dtype=bool)
            for x in tree.levels[i - 1]:
                kids = tree.children(x)
                if not kids:
                    continue
                free = mats[1 - side][host[x]] & prime[side] & ~taken
                picks = np.flatnonzero(free)[:len(kids)]
                if len(picks) < len(kids):
                    raise DecompError("embedding-stuck", f"level {i + 1}: vertex {x} has {len(picks)} "
                                      f"free neighbours for {len(kids)} children",
                                      state=[int(s.sum()) for s in (*unc, *prime)])
                for c, v in zip(kids, picks.tolist()):
                    side_of[c], host[c] = "AB"[side], v
                    taken[v] = True
        imgs = [host[x] for x in level]
        unc[side][imgs] = False
        prime[side][imgs] = False
        # the opposite qualified set only shrinks
        prime[1 - side] &= qualified(1 - side)
        snapshot(i + 1)
        side = 1 - side

    emb = Embedding(tree, tuple(side_of), tuple(host))
    if not check_embedding(h, emb):  # pragma: no cover - guarded by construction
        raise DecompError("embedding-stuck", "constructed map is not an embedding")
    return emb


@dataclass
class Packing:
    embeddings: list[Embedding]
    status: str
    first_unplaced: int | None
    consumed_edges: int
    epsilon: Fraction
    delta: Fraction
    events: list[dict] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.status == "complete"


def edge_disjoint(embeddings: Sequence[Embedding]) -> bool:
    seen = set()
    for emb in embeddings:
        for e in emb.edges():
            if e in seen:
                return False
            seen.add(e)
    return True


def pack_trees(g: BipartiteGraph, trees: Sequence[RootedTree], epsilon, delta,
               mode: str = "algorithmic", *, floor: int = DEFAULT_FLOOR, oracle_limit: int = ORACLE_LIMIT) -> Packing:
    """Pack ``trees`` edge-disjointly into ``g``, one extracted pair per tree.

    For each tree: extract a certified eps-regular pair from what is left of
    ``g``, trim it with :func:`super_regularize`, confirm the embedding
    hypotheses, embed, and delete exactly the tree's edges.  The rest of the
    pair stays in the graph.  Stops with status ``packing-incomplete`` at the
    first tree that cannot be placed.  ``functional`` mode takes the pair from
    the local maximiser of ``d^r v`` instead.
    """
    eps = as_fraction(epsilon)
    delta = as_fraction(delta)
    if mode not in MODES:
        raise DecompError("bad-mode", f"mode must be one of {MODES}, got {mode!r}")
    if not g.is_balanced():
        raise DecompError("unbalanced", f"parts have sizes {g.n_a} and {g.n_b}")
    n = g.n_a
    events: list[dict] = []
    e_t = sum(t.edge_count for t in trees)
    if e_t + (delta + eps) * n * n > g.edge_count:
        events.append({"event": "edge-budget-warning",
                       "message": f"sum e(T)={e_t} + (delta+eps) n^2 exceeds e(G)={g.edge_count}"})
    working = g.copy()
    out: list[Embedding] = []

    def stop(i, reason, **extra):
        events.append({"event": "packing-incomplete", "tree": i, "message": reason, **extra})
        log.info("tree %d not placed: %s", i, reason)
        return Packing(out, "packing-incomplete", i, sum(t.edge_count for t in trees[:i]), eps, delta, events)

    for i, tree in enumerate(trees):
        if density(working) < delta + eps:
            return stop(i, f"density {density(working)} < delta + eps")
        try:
            if mode == "algorithmic":
                ext = extract_regular_subgraph(working, eps, floor=floor, oracle_limit=oracle_limit)
                found, iters = ext.subpair, ext.iterations
                trimmed = super_regularize(found.graph(), eps, check=False)
            else:
                found, _ = _extract_functional(working, eps, floor, oracle_limit)
                iters = 0
                trimmed = super_regularize(found.graph(), eps, oracle_limit=oracle_limit)
        except DecompError as exc:
            return stop(i, str(exc))
        pair = found.restrict(trimmed.X, trimmed.Y)
        host = pair.graph()
        try:
            emb = embed_tree(host, tree, eps, delta, oracle_limit=oracle_limit)
        except DecompError as exc:
            return stop(i, str(exc), pair_size=len(pair.X))
        emb = emb.relabel(pair.X, pair.Y)
        working.remove_edges(emb.edges())
        out.append(emb)
        events.append({"event": "placed", "tree": i, "pair_size": len(pair.X),
                       "pair_density": pair.density(), "iterations": iters})
    return Packing(out, "complete", None, e_t, eps, delta, events)
