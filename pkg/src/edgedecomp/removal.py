"""Triangle removal in tripartite graphs with few good five-cycles."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DecompError
from .extract import Decomposition, decompose
from .graph import BipartiteGraph, TripartiteGraph, as_fraction
from .regularity import ORACLE_LIMIT

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 30
# single-edge bundles are regular, so a floor of 1 lets every decomposition finish
REMOVAL_FLOOR = 1


def _bundle_matrix(n: int, edges) -> np.ndarray:
    b = np.zeros((n, n), dtype=np.int64)
    if edges:
        idx = np.asarray(edges, dtype=np.int64)
        b[idx[:, 0], idx[:, 1]] = 1
    return b


def count_good_c5(tg: TripartiteGraph, bundles: Decomposition) -> tuple[int, np.ndarray]:
    """Count ordered 5-cycles ``(x1, y1, x2, y2, z)`` whose X-Y edges share a bundle.

    Per bundle ``B`` the number of paths ``x1 y1 x2 y2`` with ``x1 != x2`` and
    ``y1 != y2`` is ``B B^T B`` minus the degenerate walks; closing through
    ``z`` contracts that matrix with the ZX and YZ blocks.
    """
    n = tg.n
    xy = tg.xy.adj
    zx = tg.zx.adj.astype(np.int64)
    yz_t = tg.yz.adj.T.astype(np.int64)
    per_z = np.zeros(n, dtype=np.int64)
    for i, bundle in enumerate(bundles.pairs):
        xs, ys = set(bundle.X), set(bundle.Y)
        for a, b in bundle.edges:
            if not (0 <= a < n and 0 <= b < n) or not xy[a, b]:
                raise DecompError("bundle-mismatch", f"bundle {i} edge ({a}, {b}) is not an XY edge")
            if a not in xs or b not in ys:
                raise DecompError("bundle-mismatch", f"bundle {i} edge ({a}, {b}) lies outside its parts")
        b = _bundle_matrix(n, bundle.edges)
        paths = b @ b.T @ b - b * (b.sum(axis=1)[:, None] + b.sum(axis=0)[None, :] - 1)
        per_z += ((zx @ paths) * yz_t).sum(axis=1)
    return int(per_z.sum()), per_z


def _simple_adjacency(tg: TripartiteGraph) -> np.ndarray:
    n = tg.n
    a = np.zeros((3 * n, 3 * n), dtype=np.int64)
    x, y, z = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n)
    a[x, y] = tg.xy.adj
    a[y, z] = tg.yz.adj
    a[z, x] = tg.zx.adj
    return a + a.T


def count_c5(tg: TripartiteGraph) -> int:
    """All 5-cycles of the underlying simple graph.

    A closed 5-walk is either a 5-cycle (counted 10 times) or a triangle plus
    one back-and-forth step.
    """
    a = _simple_adjacency(tg)
    a2 = a @ a
    a3 = a2 @ a
    tr5 = int(np.trace(a3 @ a2))
    deg = a.sum(axis=1)
    extra = 5 * int((np.diag(a3) * (deg - 1)).sum())
    return (tr5 - extra) // 10


def triangles_brute_force(tg: TripartiteGraph) -> int:
    yz, zx = tg.yz.adj, tg.zx.adj
    count = 0
    for x, y in tg.xy.edges():
        for z in range(tg.n):
            if yz[y, z] and zx[z, x]:
                count += 1
    return count


@dataclass
class RemovalReport:
    bundles: Decomposition
    good_c5_total: int
    per_z: tuple[int, ...]
    threshold: Fraction | None
    bad_vertices: tuple[int, ...]
    phase_deletions: dict[str, int]
    edges_deleted: int
    triangle_free: bool
    triangles_before: int
    c5_total: int
    budget: Fraction
    reference: dict = field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.edges_deleted <= self.budget


def reference_values(n: int, epsilon) -> dict:
    """The size, count and cycle bounds at which the removal statement applies (natural logs)."""
    eps = float(as_fraction(epsilon))
    log_m = -10 * math.log(1 / eps) ** 2 / eps ** 2 + math.log(n)
    log_k0 = 10 * math.log(1 / eps) ** 2 / eps ** 2 - math.log(eps) + math.log(2)
    # delta n^5 = eps^6 m^2 n^3 / (2 K0^2)
    log_delta_n5 = 6 * math.log(eps) + 2 * log_m + 3 * math.log(n) - math.log(2) - 2 * log_k0
    return {"log_m": log_m, "log_K0": log_k0, "log_delta_n5": log_delta_n5}


def conditional_triangle_removal(tg: TripartiteGraph, epsilon, mode: str = "algorithmic", *,
                                 floor: int = REMOVAL_FLOOR, oracle_limit: int = ORACLE_LIMIT,
                                 brute_force_limit: int = BRUTE_FORCE_LIMIT
                                 ) -> tuple[TripartiteGraph, RemovalReport]:
    """Delete edges until no triangle with one vertex per part survives.

    1. Decompose the XY block at threshold ``2 eps`` and delete the residual.
    2. A vertex ``z`` is bad when its good-C5 count exceeds
       ``eps^5 m^2 n^2 / (2 K^2)`` (``m`` the smallest bundle part, ``K`` the
       bundle count of this run); delete its ZX edges.
    3. For each good ``z`` and bundle, delete ``z``'s edges into whichever of
       the bundle's parts it has fewer neighbours in (X on ties).

    The output is checked for triangles by a trace and, up to
    ``brute_force_limit``, by enumeration.  A surviving triangle is reported,
    not raised: it means the input had too many good five-cycles.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps <= Fraction(1, 4):
        raise DecompError("bad-epsilon", f"need 0 < eps <= 1/4, got {eps}")
    n = tg.n
    xy, yz, zx = tg.xy.adj.copy(), tg.yz.adj.copy(), tg.zx.adj.copy()
    triangles_before = tg.triangle_count()
    dec = decompose(tg.xy, eps, 2 * eps, mode, floor=floor, oracle_limit=oracle_limit)
    phases = {"residual": 0, "bad-vertices": 0, "bundle-sides": 0}

    res = dec.residual.adj
    phases["residual"] = int(res.sum())
    xy &= ~res
    owned = np.zeros((n, n), dtype=bool)
    for p in dec.pairs:
        for a, b in p.edges:
            owned[a, b] = True
    # any surviving XY edge, hence any surviving triangle, sits in one bundle
    assert np.array_equal(xy, owned), "XY block not covered by bundles"

    def current():
        return TripartiteGraph(*(BipartiteGraph.from_matrix(b) for b in (xy, yz, zx)))

    total, per_z = count_good_c5(current(), dec)
    k = dec.K
    threshold = None
    bad: list[int] = []
    if k:
        m = dec.m_min
        threshold = eps ** 5 * m * m * n * n / (2 * k * k)
        bad = [z for z in range(n) if per_z[z] > threshold]
    for z in bad:
        phases["bad-vertices"] += int(zx[z].sum())
        zx[z] = False

    bad_set = set(bad)
    for z in range(n):
        if z in bad_set:
            continue
        for p in dec.pairs:
            xs, ys = list(p.X), list(p.Y)
            to_x = int(zx[z, xs].sum())
            to_y = int(yz[ys, z].sum())
            if to_x <= to_y:
                phases["bundle-sides"] += to_x
                zx[z, xs] = False
            else:
                phases["bundle-sides"] += to_y
                yz[ys, z] = False

    out = current()
    remaining = out.triangle_count()
    if n <= brute_force_limit:
        brute = triangles_brute_force(out)
        if brute != remaining:  # pragma: no cover - two independent counts
            raise DecompError("certificate-mismatch", f"trace gives {remaining}, enumeration {brute}")
    deleted = tg.edge_count - out.edge_count
    assert deleted == sum(phases.values())
    report = RemovalReport(
        bundles=dec, good_c5_total=total, per_z=tuple(int(c) for c in per_z),
        threshold=threshold, bad_vertices=tuple(bad), phase_deletions=phases,
        edges_deleted=deleted, triangle_free=remaining == 0, triangles_before=triangles_before,
        c5_total=count_c5(tg), budget=4 * eps * n * n, reference=reference_values(n, eps) if n else {})
    log.info("removal: K=%d bad=%d deleted=%d triangle_free=%s", k, len(bad), deleted, remaining == 0)
    return out, report


def good_c5_brute_force(tg: TripartiteGraph, bundles: Decomposition) -> tuple[int, list[int]]:
    """Direct enumeration of good ordered 5-cycles; for small ``n`` only."""
    n = tg.n
    owner = bundles.owner()
    per_z = [0] * n
    for x1, y1, x2, y2, z in itertools.product(range(n), repeat=5):
        if x1 == x2 or y1 == y2:
            continue
        i = owner.get((x1, y1))
        if i is None or owner.get((x2, y1)) != i or owner.get((x2, y2)) != i:
            continue
        if tg.yz.adj[y2, z] and tg.zx.adj[z, x1]:
            per_z[z] += 1
    return sum(per_z), per_z
