"""Dense bipartite and tripartite graphs with exact densities.

Vertices of each part are numbered ``0 .. n-1``.  Densities are returned as
:class:`fractions.Fraction` so that threshold comparisons never depend on
floating-point rounding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DecompError

Rational = Fraction


def as_fraction(value) -> Fraction:
    """Parse ``value`` exactly; strings may be ``"p/q"`` or decimals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, np.integer):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        # repr gives the shortest decimal that round-trips
        return Fraction(repr(float(value)))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DecompError("bad-rational", f"cannot parse {value!r}") from exc


class BipartiteGraph:
    """Bipartite graph on parts ``A`` (rows) and ``B`` (columns).

    ``edge_count`` is maintained on every mutation; :meth:`recount` checks it
    against the adjacency matrix.
    """

    __slots__ = ("adj", "edge_count")

    def __init__(self, n_a: int, n_b: int, edges: Iterable[tuple[int, int]] = ()):
        if n_a < 0 or n_b < 0:
            raise DecompError("bad-size", f"part sizes must be non-negative, got {n_a}, {n_b}")
        self.adj = np.zeros((n_a, n_b), dtype=bool)
        self.edge_count = 0
        for a, b in edges:
            self.add_edge(a, b)

    @classmethod
    def from_matrix(cls, adj) -> BipartiteGraph:
        adj = np.array(adj, dtype=bool)
        if adj.ndim != 2:
            raise DecompError("bad-size", "adjacency must be two-dimensional")
        g = cls.__new__(cls)
        g.adj = adj
        g.edge_count = int(adj.sum())
        return g

    @classmethod
    def complete(cls, n_a: int, n_b: int | None = None) -> BipartiteGraph:
        return cls.from_matrix(np.ones((n_a, n_a if n_b is None else n_b), dtype=bool))

    @property
    def n_a(self) -> int:
        return self.adj.shape[0]

    @property
    def n_b(self) -> int:
        return self.adj.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.adj.shape

    def is_balanced(self) -> bool:
        return self.n_a == self.n_b

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adj[a, b])

    def _check_vertex(self, a: int, b: int) -> None:
        if not (0 <= a < self.n_a and 0 <= b < self.n_b):
            raise DecompError("bad-vertex", f"({a}, {b}) outside {self.n_a}x{self.n_b}")

    def add_edge(self, a: int, b: int) -> bool:
        """Insert edge ``ab``; return False if it was already present."""
        self._check_vertex(a, b)
        if self.adj[a, b]:
            return False
        self.adj[a, b] = True
        self.edge_count += 1
        return True

    def remove_edge(self, a: int, b: int) -> bool:
        self._check_vertex(a, b)
        if not self.adj[a, b]:
            return False
        self.adj[a, b] = False
        self.edge_count -= 1
        return True

    def remove_edges(self, edges: Iterable[tuple[int, int]]) -> int:
        removed = 0
        for a, b in edges:
            removed += self.remove_edge(a, b)
        return removed

    def degrees_a(self) -> np.ndarray:
        return self.adj.sum(axis=1, dtype=np.int64)

    def degrees_b(self) -> np.ndarray:
        return self.adj.sum(axis=0, dtype=np.int64)

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(self.adj)
        return list(zip(rows.tolist(), cols.tolist()))

    def recount(self) -> int:
        return int(self.adj.sum())

    def check(self) -> None:
        if self.recount() != self.edge_count:
            raise DecompError("corrupt-count", f"stored {self.edge_count} != actual {self.recount()}")

    def copy(self) -> BipartiteGraph:
        g = BipartiteGraph.__new__(BipartiteGraph)
        g.adj = self.adj.copy()
        g.edge_count = self.edge_count
        return g

    def induced(self, xs: Sequence[int], ys: Sequence[int]) -> BipartiteGraph:
        """Induced subgraph on ``xs`` x ``ys``, renumbered in the given order."""
        return BipartiteGraph.from_matrix(self.adj[np.ix_(list(xs), list(ys))])

    def transpose(self) -> BipartiteGraph:
        return BipartiteGraph.from_matrix(self.adj.T.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.adj, other.adj))

    def __repr__(self) -> str:
        return f"BipartiteGraph({self.n_a}x{self.n_b}, e={self.edge_count})"


def density(g: BipartiteGraph) -> Fraction:
    """Bipartite density ``e(G) / (|A| |B|)``."""
    if g.n_a < 1 or g.n_b < 1:
        raise DecompError("empty-part", f"graph has shape {g.n_a}x{g.n_b}")
    return Fraction(g.edge_count, g.n_a * g.n_b)


def _sorted_indices(idx: Iterable[int], bound: int, name: str) -> tuple[int, ...]:
    out = tuple(sorted(int(i) for i in idx))
    if not out:
        raise DecompError("empty-part", f"{name} is empty")
    if len(set(out)) != len(out):
        raise DecompError("bad-subpair", f"{name} has repeated indices")
    if out[0] < 0 or out[-1] >= bound:
        raise DecompError("bad-subpair", f"{name} index out of range 0..{bound - 1}")
    return out


@dataclass(frozen=True)
class Subpair:
    """The sub-bipartite-graph of ``parent`` spanned by ``X`` x ``Y``."""

    parent: BipartiteGraph = field(compare=False, repr=False)
    X: tuple[int, ...]
    Y: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "X", _sorted_indices(self.X, self.parent.n_a, "X"))
        object.__setattr__(self, "Y", _sorted_indices(self.Y, self.parent.n_b, "Y"))

    @classmethod
    def whole(cls, g: BipartiteGraph) -> Subpair:
        return cls(g, tuple(range(g.n_a)), tuple(range(g.n_b)))

    @property
    def size(self) -> tuple[int, int]:
        return len(self.X), len(self.Y)

    def is_balanced(self) -> bool:
        return len(self.X) == len(self.Y)

    def block(self) -> np.ndarray:
        return self.parent.adj[np.ix_(self.X, self.Y)]

    def edge_count(self) -> int:
        return int(self.block().sum())

    def density(self) -> Fraction:
        return subpair_density(self)

    def graph(self) -> BipartiteGraph:
        return BipartiteGraph.from_matrix(self.block())

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(self.block())
        return [(self.X[r], self.Y[c]) for r, c in zip(rows.tolist(), cols.tolist())]

    def restrict(self, xs_local: Iterable[int], ys_local: Iterable[int]) -> Subpair:
        """Subpair given by positions inside ``X`` and ``Y``."""
        return Subpair(self.parent, [self.X[i] for i in xs_local], [self.Y[j] for j in ys_local])


def subpair_density(p: Subpair) -> Fraction:
    return Fraction(p.edge_count(), len(p.X) * len(p.Y))


@dataclass
class TripartiteGraph:
    """Three parts X, Y, Z of common size ``n`` joined by three bipartite blocks.

    ``xy`` has rows X and columns Y, ``yz`` rows Y and columns Z, ``zx`` rows Z
    and columns X.
    """

    xy: BipartiteGraph
    yz: BipartiteGraph
    zx: BipartiteGraph

    def __post_init__(self):
        shapes = {self.xy.shape, self.yz.shape, self.zx.shape}
        if len(shapes) != 1 or not self.xy.is_balanced():
            raise DecompError("bad-size", f"blocks must share one square shape, got {sorted(shapes)}")

    @classmethod
    def empty(cls, n: int) -> TripartiteGraph:
        return cls(BipartiteGraph(n, n), BipartiteGraph(n, n), BipartiteGraph(n, n))

    @property
    def n(self) -> int:
        return self.xy.n_a

    @property
    def edge_count(self) -> int:
        return self.xy.edge_count + self.yz.edge_count + self.zx.edge_count

    def copy(self) -> TripartiteGraph:
        return TripartiteGraph(self.xy.copy(), self.yz.copy(), self.zx.copy())

    def triangle_count(self) -> int:
        """``trace(XY . YZ . ZX)``: the number of triangles ``xyz``."""
        xy = self.xy.adj.astype(np.int64)
        yz = self.yz.adj.astype(np.int64)
        zx = self.zx.adj.astype(np.int64)
        return int(np.einsum("xy,yz,zx->", xy, yz, zx))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TripartiteGraph):
            return NotImplemented
        return self.xy == other.xy and self.yz == other.yz and self.zx == other.zx


# ---------------------------------------------------------------------------
# dense balanced subpairs
# ---------------------------------------------------------------------------

def _simple_adjacency(adj) -> np.ndarray:
    adj = np.array(adj, dtype=bool)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise DecompError("bad-size", "adjacency of a simple graph must be square")
    if not np.array_equal(adj, adj.T) or adj.diagonal().any():
        raise DecompError("bad-graph", "adjacency must be symmetric with an empty diagonal")
    return adj


def graph_density(adj) -> Fraction:
    """Density ``e / C(n, 2)`` of a simple graph given by a symmetric matrix."""
    adj = _simple_adjacency(adj)
    n = adj.shape[0]
    if n < 2:
        raise DecompError("empty-part", "need at least two vertices")
    return Fraction(int(adj.sum()) // 2, n * (n - 1) // 2)


def _cut_edges(adj: np.ndarray, inside: np.ndarray) -> int:
    return int(adj[np.ix_(inside, ~inside)].sum())


def _exhaustive_split(adj: np.ndarray) -> tuple[int, ...]:
    n = adj.shape[0]
    best, best_cut = None, -1
    for xs in itertools.combinations(range(n), n // 2):
        inside = np.zeros(n, dtype=bool)
        inside[list(xs)] = True
        cut = _cut_edges(adj, inside)
        if cut > best_cut:
            best, best_cut = xs, cut
    return best


def _local_search_split(adj: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Swap pairs across the cut while the number of cut edges increases."""
    a = adj.astype(np.int64)
    inside = inside.copy()
    while True:
        # gain of moving v to the other side: edges to own side - edges across
        own = np.where(inside, a @ inside, a @ ~inside)
        gain = own - np.where(inside, a @ ~inside, a @ inside)
        xs = np.flatnonzero(inside)
        ys = np.flatnonzero(~inside)
        # swapping x and y loses the xy edge twice
        total = gain[xs][:, None] + gain[ys][None, :] - 2 * a[np.ix_(xs, ys)]
        i, j = np.unravel_index(np.argmax(total), total.shape)
        if total[i, j] <= 0:
            return inside
        inside[xs[i]] = False
        inside[ys[j]] = True


def balanced_split(adj, *, seed: int = 0, exhaustive_limit: int = 12,
                   max_restarts: int = 1000) -> tuple[tuple[int, ...], tuple[int, ...], BipartiteGraph]:
    """Split a simple graph into ``X`` (``floor(n/2)`` vertices) and ``V - X``
    so that the bipartite density across the cut is at least the density of
    the graph.

    Local search runs first; if it stalls below the target the split is found
    exhaustively (``n <= exhaustive_limit``) or by seeded random restarts.
    Averaging over all balanced splits shows such a split exists.
    """
    adj = _simple_adjacency(adj)
    n = adj.shape[0]
    target = graph_density(adj)
    k = n // 2

    def ok(inside):
        return Fraction(_cut_edges(adj, inside), k * (n - k)) >= target

    inside = np.zeros(n, dtype=bool)
    inside[:k] = True
    inside = _local_search_split(adj, inside)
    if not ok(inside):
        if n <= exhaustive_limit:
            inside = np.zeros(n, dtype=bool)
            inside[list(_exhaustive_split(adj))] = True
        else:
            rng = np.random.default_rng(seed)
            for _ in range(max_restarts):
                start = np.zeros(n, dtype=bool)
                start[rng.permutation(n)[:k]] = True
                inside = _local_search_split(adj, start)
                if ok(inside):
                    break
            else:  # pragma: no cover - probability of reaching here is negligible
                raise DecompError("split-failed", "random restarts exhausted")
    xs = tuple(np.flatnonzero(inside).tolist())
    rest = tuple(np.flatnonzero(~inside).tolist())
    return xs, rest, BipartiteGraph.from_matrix(adj[np.ix_(xs, rest)])


def find_dense_subpair(g: BipartiteGraph, k: int, m: int) -> Subpair:
    """Subpair with ``|X| = k`` (side A) and ``|Y| = m`` (side B) whose density
    is at least ``density(g)``.

    Greedy peeling: while a side is above its target, drop a vertex of minimum
    degree into the other side (lowest index on ties), alternating sides.  A
    minimum-degree vertex has at most average degree, so density never drops.
    """
    if not (1 <= k <= g.n_a and 1 <= m <= g.n_b):
        raise DecompError("size-out-of-range", f"k={k}, m={m} for a {g.n_a}x{g.n_b} graph")
    xs = list(range(g.n_a))
    ys = list(range(g.n_b))
    adj = g.adj.astype(np.int64)
    row = adj.sum(axis=1)
    col = adj.sum(axis=0)
    turn_a = True
    while len(xs) > k or len(ys) > m:
        drop_a = len(xs) > k and (turn_a or len(ys) <= m)
        if drop_a:
            i = min(xs, key=lambda v: (row[v], v))
            xs.remove(i)
            col -= adj[i]
        else:
            j = min(ys, key=lambda v: (col[v], v))
            ys.remove(j)
            row -= adj[:, j]
        turn_a = not turn_a
    return Subpair(g, xs, ys)
