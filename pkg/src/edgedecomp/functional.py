"""Graph functionals ``d_H^r v(H)`` on balanced bipartite subgraphs.

``phi`` uses the exponent ``r(eps) = (10/eps^2) log(1/eps)``, which is in the
thousands for small eps, so values are kept as logarithms.  Comparisons are
exact whenever the exponent is rational and fall back to high-precision
logarithms with increasing precision otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DecompError
from .graph import BipartiteGraph, Subpair, as_fraction, density

PRECISION_BITS = 128
REFINE_BITS = (128, 256, 512)


def r_of_epsilon(epsilon) -> mpmath.mpf:
    """``(10 / eps^2) * log(1/eps)`` (natural logarithm)."""
    eps = as_fraction(epsilon)
    with mpmath.workprec(PRECISION_BITS):
        e = mpmath.mpf(eps.numerator) / eps.denominator
        return 10 / e ** 2 * mpmath.log(1 / e)


@dataclass(frozen=True)
class FunctionalParams:
    """``epsilon`` in (0, 1/4); ``r`` defaults to ``r(epsilon)``; ``q`` is the
    optional exponent of the auxiliary functional, at least ``2/epsilon``."""

    epsilon: Fraction
    r: object = None
    q: Fraction | None = None

    def __post_init__(self):
        eps = as_fraction(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps < Fraction(1, 4):
            raise DecompError("bad-epsilon", f"functional parameters need 0 < eps < 1/4, got {eps}")
        r = r_of_epsilon(eps) if self.r is None else self.r
        if not isinstance(r, mpmath.mpf):
            r = as_fraction(r)
        if not r > 0:
            raise DecompError("bad-exponent", f"r must be positive, got {r}")
        object.__setattr__(self, "r", r)
        if self.q is not None:
            q = as_fraction(self.q)
            if q < 2 / eps:
                raise DecompError("bad-exponent", f"q={q} < 2/eps")
            object.__setattr__(self, "q", q)


def _mpf(x, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


@dataclass(frozen=True)
class FunctionalValue:
    """``density^exponent * size`` kept as its natural logarithm."""

    log_value: mpmath.mpf
    density: Fraction
    size: int
    exponent: object

    def log_at(self, prec: int) -> mpmath.mpf:
        if self.density == 0:
            return mpmath.ninf
        with mpmath.workprec(prec):
            return _mpf(self.exponent, prec) * mpmath.log(_mpf(self.density, prec)) + mpmath.log(self.size)

    def value(self) -> mpmath.mpf:
        with mpmath.workprec(PRECISION_BITS):
            return mpmath.exp(self.log_value)

    def __float__(self) -> float:
        return float(self.log_value)


def functional_value(d: Fraction, size: int, exponent) -> FunctionalValue:
    fv = FunctionalValue(mpmath.ninf, d, size, exponent)
    if d == 0:
        return fv
    return FunctionalValue(fv.log_at(PRECISION_BITS), d, size, exponent)


def compare(a: FunctionalValue, b: FunctionalValue) -> int:
    """Sign of ``a - b``.

    With a common rational exponent ``p/s`` the comparison of
    ``d1^(p/s) v1`` and ``d2^(p/s) v2`` is done on ``d^p v^s`` in integers.
    """
    if a.density == 0 or b.density == 0:
        return (a.density != 0) - (b.density != 0)
    if isinstance(a.exponent, Fraction) and a.exponent == b.exponent:
        p, s = a.exponent.numerator, a.exponent.denominator
        lhs = a.density ** p * a.size ** s
        rhs = b.density ** p * b.size ** s
        return (lhs > rhs) - (lhs < rhs)
    for prec in REFINE_BITS:
        diff = a.log_at(prec) - b.log_at(prec)
        scale = max(abs(a.log_at(prec)), abs(b.log_at(prec)), 1)
        if abs(diff) > scale * mpmath.mpf(2) ** (16 - prec):
            return 1 if diff > 0 else -1
    return 0


def _balanced_size(g: BipartiteGraph) -> int:
    if not g.is_balanced():
        raise DecompError("unbalanced", f"parts have sizes {g.n_a} and {g.n_b}")
    if g.n_a == 0:
        raise DecompError("empty-part", "graph has empty parts")
    return g.n_a


def phi(g: BipartiteGraph, params: FunctionalParams) -> FunctionalValue:
    """``d_g^r * v(g)`` with ``v`` the total vertex count ``2m``."""
    m = _balanced_size(g)
    return functional_value(density(g), 2 * m, params.r)


def psi(g: BipartiteGraph, q) -> FunctionalValue:
    """``d_g^q * v(g)``."""
    m = _balanced_size(g)
    return functional_value(density(g), 2 * m, as_fraction(q))


def _peel_choice(g: BipartiteGraph, eps: Fraction):
    """Deficient vertex (side, index) and its partner on the other side, or None."""
    m = g.n_a
    d = density(g)
    bar = (d - eps) * m
    deg_a = g.degrees_a()
    deg_b = g.degrees_b()
    cands = [(int(k), 0, v) for v, k in enumerate(deg_a.tolist()) if k <= bar]
    cands += [(int(k), 1, v) for v, k in enumerate(deg_b.tolist()) if k <= bar]
    if not cands:
        return None
    _, side, v = min(cands)
    other = deg_b if side == 0 else deg_a
    w = int(np.lexsort((np.arange(m), other))[0])
    return (v, w) if side == 0 else (w, v)


def peel_step(g: BipartiteGraph, epsilon, q) -> Subpair | None:
    """Remove a vertex of degree ``<= (d - eps) m`` and a minimum-degree vertex
    of the opposite part.

    Returns the remaining subpair, or None when every degree exceeds
    ``(d - eps) m``.  For ``q >= 2/eps`` the auxiliary functional ``d^q v``
    strictly increases once ``eps m > d``; the increase is checked and a
    failure raises ``peel-failed``.
    """
    eps = as_fraction(epsilon)
    q = as_fraction(q)
    m = _balanced_size(g)
    if q < 2 / eps:
        raise DecompError("bad-exponent", f"q={q} < 2/eps = {2 / eps}")
    choice = _peel_choice(g, eps)
    if choice is None:
        return None
    a, b = choice
    out = Subpair(g, [x for x in range(m) if x != a], [y for y in range(m) if y != b])
    if compare(psi(out.graph(), q), psi(g, q)) <= 0:
        raise DecompError("peel-failed", "auxiliary functional did not increase")
    return out


def parameter_inequalities(epsilon, prec: int = PRECISION_BITS) -> dict:
    """Both inequalities on ``r(eps)`` used in the regularity argument.

    ``first``: ``(1 + eps^2/5)^r > 1/eps``; ``second``:
    ``exp(eps^3/4) < 1 + eps^3/3``.  Sides are returned with the verdicts.
    """
    eps = as_fraction(epsilon)
    with mpmath.workprec(prec):
        e = _mpf(eps, prec)
        r = 10 / e ** 2 * mpmath.log(1 / e)
        lhs1, rhs1 = (1 + e ** 2 / 5) ** r, 1 / e
        lhs2, rhs2 = mpmath.exp(e ** 3 / 4), 1 + e ** 3 / 3
        return {"first": lhs1 > rhs1, "first_sides": (lhs1, rhs1),
                "second": lhs2 < rhs2, "second_sides": (lhs2, rhs2)}


# ---------------------------------------------------------------------------
# local search maximiser
# ---------------------------------------------------------------------------

class _State:
    """Balanced selection ``X x Y`` with incremental degree sums."""

    def __init__(self, adj: np.ndarray, xs: np.ndarray, ys: np.ndarray):
        self.adj = adj
        self.xs = xs.copy()
        self.ys = ys.copy()
        self.row = adj[:, self.ys].sum(axis=1)  # neighbours of each A-vertex inside Y
        self.col = adj[self.xs].sum(axis=0)     # neighbours of each B-vertex inside X
        self.e = int(self.row[self.xs].sum())

    @property
    def k(self) -> int:
        return int(self.xs.sum())


def _log_score(e, k, r: float):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = r * np.log(e / (k * k)) + np.log(2.0 * k)
    return np.where(np.asarray(e) > 0, out, -np.inf)


def _moves(st: _State, r: float):
    """Yield ``(log score, new xs, new ys)`` for the best move of each kind."""
    adj = st.adj
    ins_a, out_a = np.flatnonzero(st.xs), np.flatnonzero(~st.xs)
    ins_b, out_b = np.flatnonzero(st.ys), np.flatnonzero(~st.ys)
    k = st.k
    found = []

    def best(scores, build):
        idx = int(np.argmax(scores))
        if np.isfinite(scores.flat[idx]):
            found.append((float(scores.flat[idx]), *build(idx)))

    if k >= 2:
        e_rm = st.e - st.row[ins_a][:, None] - st.col[ins_b][None, :] + adj[np.ix_(ins_a, ins_b)]
        sc = _log_score(e_rm, k - 1, r)

        def rm(idx):
            i, j = np.unravel_index(idx, sc.shape)
            xs, ys = st.xs.copy(), st.ys.copy()
            xs[ins_a[i]] = False
            ys[ins_b[j]] = False
            return xs, ys
        best(sc, rm)
    if len(out_a) and len(out_b):
        e_add = st.e + st.row[out_a][:, None] + st.col[out_b][None, :] + adj[np.ix_(out_a, out_b)]
        sc = _log_score(e_add, k + 1, r)

        def add(idx):
            i, j = np.unravel_index(idx, sc.shape)
            xs, ys = st.xs.copy(), st.ys.copy()
            xs[out_a[i]] = True
            ys[out_b[j]] = True
            return xs, ys
        best(sc, add)
    if len(out_a):
        e_sw = st.e - st.row[ins_a][:, None] + st.row[out_a][None, :]
        sc = _log_score(e_sw, k, r)

        def swap_a(idx):
            i, j = np.unravel_index(idx, sc.shape)
            xs = st.xs.copy()
            xs[ins_a[i]] = False
            xs[out_a[j]] = True
            return xs, st.ys.copy()
        best(sc, swap_a)
    if len(out_b):
        e_sw = st.e - st.col[ins_b][:, None] + st.col[out_b][None, :]
        sc = _log_score(e_sw, k, r)

        def swap_b(idx):
            i, j = np.unravel_index(idx, sc.shape)
            ys = st.ys.copy()
            ys[ins_b[i]] = False
            ys[out_b[j]] = True
            return st.xs.copy(), ys
        best(sc, swap_b)
    return found


def _value(adj: np.ndarray, xs: np.ndarray, ys: np.ndarray, exponent) -> FunctionalValue:
    k = int(xs.sum())
    e = int(adj[np.ix_(xs, ys)].sum())
    return functional_value(Fraction(e, k * k), 2 * k, exponent)


def _witness_move(g: BipartiteGraph, xs: np.ndarray, ys: np.ndarray, eps: Fraction):
    """Witness-guided jump: verify the current pair and boost on its witnesses."""
    import warnings

    from .errors import ParameterRangeWarning
    from .extract import boost_density, boost_eta
    from .regularity import verify_regularity

    sub = Subpair(g, np.flatnonzero(xs), np.flatnonzero(ys))
    graph = sub.graph()
    if graph.edge_count in (0, graph.n_a * graph.n_b):
        return None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ParameterRangeWarning)
            verdict = verify_regularity(graph, eps)
        if verdict.regular:
            return None
        boosted = boost_density(graph, verdict.A1, verdict.B1, boost_eta(eps))
    except DecompError:
        return None
    jump = sub.restrict(boosted.X, boosted.Y)
    nx = np.zeros_like(xs)
    ny = np.zeros_like(ys)
    nx[list(jump.X)] = True
    ny[list(jump.Y)] = True
    return nx, ny


def maximize_phi(g: BipartiteGraph, params: FunctionalParams, budget: int | None = None) -> Subpair:
    """Local maximum of ``d^r v`` over balanced subpairs of ``g``.

    Heuristic: starting from the whole graph, repeatedly take the best of the
    moves "remove a vertex pair" (which includes the peel step), "add a vertex
    pair", "swap one vertex" on either side, and, when those stall, a jump to
    the boosted witnesses of the verifier.  Only strict improvements are
    accepted, so the result is never worse than ``g`` itself.  Super-regularity
    of the output is not guaranteed; check it with ``is_super_regular``.
    """
    m = _balanced_size(g)
    eps = params.epsilon
    if density(g) <= eps:
        raise DecompError("too-sparse", f"density {density(g)} <= eps={eps}")
    budget = 10 * m if budget is None else budget
    adj = g.adj.astype(np.int64)
    r_float = float(params.r)
    st = _State(adj, np.ones(m, dtype=bool), np.ones(m, dtype=bool))
    current = _value(adj, st.xs, st.ys, params.r)
    tried_witness = False
    for _ in range(budget):
        moves = sorted(_moves(st, r_float), key=lambda mv: -mv[0])
        accepted = False
        for _, xs, ys in moves:
            cand = _value(adj, xs, ys, params.r)
            if compare(cand, current) > 0:
                st, current, accepted = _State(adj, xs, ys), cand, True
                break
        if not accepted and not tried_witness:
            tried_witness = True
            jump = _witness_move(g, st.xs, st.ys, eps)
            if jump is not None:
                cand = _value(adj, *jump, params.r)
                if compare(cand, current) > 0:
                    st, current, accepted = _State(adj, *jump), cand, True
        if not accepted:
            break
        tried_witness = False
    return Subpair(g, np.flatnonzero(st.xs), np.flatnonzero(st.ys))
