"""Density boosting, regular-subgraph extraction and edge decomposition."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DecompError, ParameterRangeWarning
from .graph import BipartiteGraph, Subpair, as_fraction, density
from .regularity import (
    ORACLE_LIMIT,
    Verdict,
    is_super_regular,
    super_regularize,
    verify_regularity,
)

log = logging.getLogger(__name__)

DEFAULT_FLOOR = 4
MODES = ("algorithmic", "functional")


def boost_eta(epsilon) -> Fraction:
    """The boosting parameter used with eps^4-witnesses: ``eps^4 / 16``."""
    return as_fraction(epsilon) ** 4 / 16


def _equalize(adj: np.ndarray, xs: list[int], ys: list[int]) -> tuple[list[int], list[int]]:
    """Trim the larger side to the size of the smaller one, keeping the
    vertices of highest degree into the other side (lowest index on ties)."""
    if len(xs) > len(ys):
        deg = adj[np.ix_(xs, ys)].sum(axis=1)
        keep = sorted(range(len(xs)), key=lambda i: (-deg[i], xs[i]))[:len(ys)]
        xs = sorted(xs[i] for i in keep)
    elif len(ys) > len(xs):
        deg = adj[np.ix_(xs, ys)].sum(axis=0)
        keep = sorted(range(len(ys)), key=lambda j: (-deg[j], ys[j]))[:len(xs)]
        ys = sorted(ys[j] for j in keep)
    return xs, ys


def _block_density(adj: np.ndarray, xs, ys) -> Fraction:
    return Fraction(int(adj[np.ix_(xs, ys)].sum()), len(xs) * len(ys))


def _grow(adj: np.ndarray, xs: list[int], ys: list[int], k: int) -> tuple[list[int], list[int]]:
    """Pad each side up to ``k`` vertices with the outside vertices of most
    neighbours in the other side, then equalize."""
    n = adj.shape[0]
    xs, ys = list(xs), list(ys)
    while len(xs) < k or len(ys) < k:
        if len(xs) < k:
            deg = adj[:, ys].sum(axis=1) if ys else np.zeros(n, dtype=int)
            outside = [a for a in range(n) if a not in set(xs)]
            xs.append(min(outside, key=lambda a: (-deg[a], a)))
        if len(ys) < k:
            deg = adj[xs, :].sum(axis=0)
            outside = [b for b in range(n) if b not in set(ys)]
            ys.append(min(outside, key=lambda b: (-deg[b], b)))
    return _equalize(adj, sorted(xs), sorted(ys))


def boost_density(g: BipartiteGraph, a1: Sequence[int], b1: Sequence[int], eta) -> Subpair:
    """Turn witnesses of irregularity into a denser balanced subpair.

    Given ``|A1|, |B1| >= eta n`` and ``|d - d(A1, B1)| >= eta`` with
    ``0 < eta < d``, returns ``(A', B')`` with ``|A'| = |B'| >= eta n`` and
    ``d(A', B') >= d + eta^3``:

    * sparse witness, ``|A1| < n``: the densest of the complementary blocks
      ``A1 x B2``, ``A2 x B1``, ``A2 x B2`` (the larger one on ties);
    * sparse witness, ``A1 = A``: ``B' = B - B1`` and the ``|B'|`` vertices of
      ``A`` with most neighbours in it;
    * dense witness: ``(A1, B1)`` itself.

    The larger side is then trimmed to the smaller, keeping high degrees.
    When that leaves a side shorter than ``eta n`` (a witness whose complement
    is tiny), every block above is padded to ``ceil(eta n)`` with high-degree
    vertices and the densest padded block is used instead.
    """
    eta = as_fraction(eta)
    if not g.is_balanced():
        raise DecompError("unbalanced", f"parts have sizes {g.n_a} and {g.n_b}")
    n = g.n_a
    d = density(g)
    adj = g.adj
    a1 = sorted(set(int(a) for a in a1))
    b1 = sorted(set(int(b) for b in b1))
    if not (0 < eta < d <= 1):
        raise DecompError("invalid-witnesses", f"need 0 < eta < d, got eta={eta}, d={d}")
    if not a1 or not b1 or len(a1) < eta * n or len(b1) < eta * n:
        raise DecompError("invalid-witnesses", f"witness sides {len(a1)}, {len(b1)} below eta*n")
    if a1[0] < 0 or a1[-1] >= n or b1[0] < 0 or b1[-1] >= n:
        raise DecompError("invalid-witnesses", "witness index out of range")
    d1 = _block_density(adj, a1, b1)
    if abs(d - d1) < eta:
        raise DecompError("invalid-witnesses", f"deviation {abs(d - d1)} < eta")

    a2 = sorted(set(range(n)) - set(a1))
    b2 = sorted(set(range(n)) - set(b1))
    if d1 >= d + eta:
        xs, ys = _equalize(adj, a1, b1)
    elif len(a1) < n:
        quads = [(a1, b2), (a2, b1), (a2, b2)]
        quads = [(x, y) for x, y in quads if x and y]
        xs, ys = max(quads, key=lambda q: (_block_density(adj, *q), min(len(q[0]), len(q[1]))))
        xs, ys = _equalize(adj, xs, ys)
    else:
        # A1 = A, so B2 is non-empty and d(A, B2) >= d + eta^2
        deg = adj[:, b2].sum(axis=1)
        keep = sorted(range(n), key=lambda a: (-deg[a], a))[:len(b2)]
        xs, ys = sorted(keep), b2

    k = math.ceil(eta * n)
    target = d + eta ** 3
    if len(xs) < k or _block_density(adj, xs, ys) < target:
        blocks = [(a1, b1), (a1, b2), (a2, b1), (a2, b2), (list(range(n)), b2), (a2, list(range(n)))]
        padded = [_grow(adj, x, y, k) for x, y in blocks if x or y]
        best = max(padded, key=lambda q: (_block_density(adj, *q), len(q[0])))
        if _block_density(adj, *best) >= target:
            xs, ys = best

    out = Subpair(g, xs, ys)
    if not (len(xs) == len(ys) >= eta * n):
        raise DecompError("boost-failed", f"sizes {len(xs)}, {len(ys)} violate |A'| = |B'| >= eta n")
    if out.density() < d + eta ** 3:
        raise DecompError("boost-failed", f"density {out.density()} < d + eta^3")
    return out


@dataclass
class Extraction:
    """Result of :func:`extract_regular_subgraph`; ``densities`` lists the
    density at the start of every iteration."""

    subpair: Subpair
    verdict: Verdict
    iterations: int
    densities: list[Fraction]


def iteration_cap(epsilon) -> int:
    """Density rises by at least ``(eps^4/16)^3`` per round and cannot exceed 1."""
    return math.ceil(1 / boost_eta(epsilon) ** 3)


def extract_regular_subgraph(g: BipartiteGraph, epsilon, *, floor: int = DEFAULT_FLOOR,
                             min_density=None, oracle_limit: int = ORACLE_LIMIT) -> Extraction:
    """Find a certified eps-regular balanced subgraph of density >= density(g).

    Repeats: verify; on witnesses, boost with ``eta = eps^4/16`` and restrict.
    Raises ``shrunk-out`` (with the last subpair in ``details``) when a part
    drops below ``floor`` before certification.
    """
    eps = as_fraction(epsilon)
    if not g.is_balanced():
        raise DecompError("unbalanced", f"parts have sizes {g.n_a} and {g.n_b}")
    if min_density is not None and density(g) < as_fraction(min_density):
        raise DecompError("too-sparse", f"density {density(g)} < {min_density}")
    eta = boost_eta(eps)
    current = Subpair.whole(g)
    densities = []
    cap = iteration_cap(eps)
    for it in range(1, cap + 1):
        if len(current.X) < floor:
            raise DecompError("shrunk-out", f"part size {len(current.X)} < floor {floor}",
                              subpair=current, iterations=it - 1)
        sub = current.graph()
        densities.append(density(sub))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ParameterRangeWarning)
            verdict = verify_regularity(sub, eps, oracle_limit=oracle_limit)
        if verdict.regular:
            return Extraction(current, verdict, it, densities)
        boosted = boost_density(sub, verdict.A1, verdict.B1, eta)
        current = current.restrict(boosted.X, boosted.Y)
    raise DecompError("iteration-cap", f"no certificate after {cap} iterations")  # pragma: no cover


@dataclass
class Bundle:
    """One extracted pair of the decomposition with the edges it owns."""

    X: tuple[int, ...]
    Y: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    density: Fraction
    epsilon: Fraction
    certified: bool
    super_regular: bool | None = None
    iterations: int = 0

    @property
    def size(self) -> int:
        return min(len(self.X), len(self.Y))


@dataclass
class Decomposition:
    """Edge-disjoint bundles plus the residual graph ``H0``."""

    pairs: list[Bundle]
    residual: BipartiteGraph
    epsilon: Fraction
    threshold: Fraction
    mode: str
    events: list[dict] = field(default_factory=list)

    @property
    def K(self) -> int:
        return len(self.pairs)

    @property
    def m_min(self) -> int | None:
        return min((p.size for p in self.pairs), default=None)

    @property
    def residual_below_threshold(self) -> bool:
        return self.residual.n_a == 0 or density(self.residual) < self.threshold

    def owner(self) -> dict[tuple[int, int], int]:
        """Map each bundle edge to its bundle index."""
        return {e: i for i, p in enumerate(self.pairs) for e in p.edges}

    def check_partition(self, g: BipartiteGraph) -> bool:
        """True when the bundle edges and residual edges partition ``E(g)``."""
        seen = set()
        total = 0
        for p in self.pairs:
            total += len(p.edges)
            seen.update(p.edges)
        total += self.residual.edge_count
        seen.update(self.residual.edges())
        return total == len(seen) == g.edge_count and seen == set(g.edges())

    def is_partial(self) -> bool:
        return any(ev.get("event") in ("shrunk-out", "inconclusive-large") for ev in self.events)


def _mode_warnings(mode: str, eps: Fraction) -> list[str]:
    out = []
    if mode == "algorithmic" and not eps < Fraction(1, 4):
        out.append(f"eps={eps} >= 1/4: outside the range of the algorithmic decomposition")
    if mode == "functional" and not eps < Fraction(1, 12):
        out.append(f"eps={eps} >= 1/12: outside the range of the functional decomposition")
    return out


def asymptotic_bounds(n: int, d_g: Fraction, epsilon, threshold) -> dict:
    """Asymptotic pair-size and pair-count bounds of both modes, as natural logs where huge."""
    eps = float(as_fraction(epsilon))
    thr = float(as_fraction(threshold))
    r_func = 10 / eps ** 2 * math.log(1 / eps)
    r_alg = 16 ** 3 / eps ** 12 * math.log(16 ** 3 / eps ** 12)
    out = {
        "r_functional": r_func,
        "r_algorithmic": r_alg,
        # m >= d^{r} n / 2 and K <= 2 d_G d^{-2r} / d
        "log_m_functional": r_func * math.log(thr) + math.log(n / 2) if thr > 0 else None,
        "log_K_functional": (math.log(2 * float(d_g)) - 2 * r_func * math.log(thr) - math.log(thr)
                             if d_g > 0 and thr > 0 else None),
        # m >= e^{-r} n and K <= d_G e^{r} / delta
        "log_m_algorithmic": -r_alg + math.log(n) if n > 0 else None,
        "log_K_algorithmic": (math.log(float(d_g)) + r_alg - math.log(thr) if d_g > 0 and thr > 0 else None),
    }
    return out


def _extract_functional(working: BipartiteGraph, eps: Fraction, floor: int, oracle_limit: int):
    from .functional import FunctionalParams, maximize_phi

    params = FunctionalParams(eps)
    sub = maximize_phi(working, params)
    if len(sub.X) < floor:
        raise DecompError("shrunk-out", f"maximizer returned part size {len(sub.X)} < floor {floor}",
                          subpair=sub, iterations=0)
    try:
        trimmed = super_regularize(sub.graph(), eps, oracle_limit=oracle_limit)
    except DecompError:
        trimmed = None
    if trimmed is not None and len(trimmed.X) >= floor and trimmed.density() >= density(working):
        sub = sub.restrict(trimmed.X, trimmed.Y)
    delta = sub.density() - eps
    flag = delta > 0 and is_super_regular(sub.graph(), eps, delta, oracle_limit=oracle_limit)
    return sub, flag


def decompose(g: BipartiteGraph, epsilon, threshold, mode: str = "algorithmic", *,
              floor: int = DEFAULT_FLOOR, oracle_limit: int = ORACLE_LIMIT,
              max_rounds: int | None = None) -> Decomposition:
    """Peel edge-disjoint dense regular pairs off ``g`` until its density drops
    below ``threshold``.

    ``algorithmic`` mode extracts certified eps-regular pairs of density at
    least ``threshold``; ``functional``
    mode takes local maximisers of ``d^r v`` and flags which of them are
    super-regular (``threshold`` then plays the role of ``d``).  Each bundle
    owns the working-graph edges inside its parts; those edges are deleted
    before the next round.  ``g`` is never mutated.

    When an extraction shrinks below ``floor`` its candidate edges are parked
    in the residual and extraction is retried once; a second consecutive
    failure ends the run.  Every such event is recorded in ``events``.
    """
    eps = as_fraction(epsilon)
    thr = as_fraction(threshold)
    if mode not in MODES:
        raise DecompError("bad-mode", f"mode must be one of {MODES}, got {mode!r}")
    if not g.is_balanced():
        raise DecompError("unbalanced", f"parts have sizes {g.n_a} and {g.n_b}")
    if not 0 < eps < 1:
        raise DecompError("bad-epsilon", f"epsilon must lie in (0, 1), got {eps}")
    if not 0 < thr <= 1:
        raise DecompError("bad-delta", f"threshold must lie in (0, 1], got {thr}")
    events: list[dict] = [{"event": "range-warning", "message": w} for w in _mode_warnings(mode, eps)]
    working = g.copy()
    parked = BipartiteGraph(g.n_a, g.n_b)
    pairs: list[Bundle] = []
    failures = 0
    rounds = 0
    while g.n_a > 0 and density(working) >= thr:
        if max_rounds is not None and rounds >= max_rounds:
            events.append({"event": "round-cap", "rounds": rounds})
            break
        rounds += 1
        try:
            if mode == "algorithmic":
                ext = extract_regular_subgraph(working, eps, floor=floor, oracle_limit=oracle_limit)
                sub, certified, flag, iters = ext.subpair, True, None, ext.iterations
            else:
                sub, flag = _extract_functional(working, eps, floor, oracle_limit)
                certified, iters = False, 0
        except DecompError as exc:
            if exc.code not in ("shrunk-out", "inconclusive-large"):
                raise
            failures += 1
            candidate = exc.details.get("subpair")
            moved = 0
            if candidate is not None:
                for a, b in candidate.edges():
                    working.remove_edge(a, b)
                    parked.add_edge(a, b)
                    moved += 1
            events.append({"event": exc.code, "round": rounds, "parked_edges": moved,
                           "message": str(exc)})
            log.info("round %d: %s, parked %d edges", rounds, exc.code, moved)
            if failures >= 2 or moved == 0:
                break
            continue
        failures = 0
        edges = tuple(sub.edges())
        d_sub = sub.density()
        working.remove_edges(edges)
        pairs.append(Bundle(sub.X, sub.Y, edges, d_sub, eps, certified, flag, iters))

    residual = working
    residual.adj |= parked.adj
    residual.edge_count += parked.edge_count
    out = Decomposition(pairs, residual, eps, thr, mode, events)
    if not out.residual_below_threshold:
        events.append({"event": "residual-above-threshold", "density": density(residual)})
    return out
