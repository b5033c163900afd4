import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgedecomp.errors import DecompError
from edgedecomp.functional import (FunctionalParams, compare, functional_value, maximize_phi, parameter_inequalities,
                                   peel_step, phi, psi, r_of_epsilon)
from edgedecomp.generators import random_bipartite, two_blocks
from edgedecomp.graph import BipartiteGraph, density
from oracles import best_phi


def k4_minus_vertex():
    g = BipartiteGraph.complete(4)
    for b in range(4):
        g.remove_edge(0, b)
    return g


class TestParams:
    def test_r_of_epsilon(self):
        eps = Fraction(1, 10)
        assert abs(r_of_epsilon(eps) - 1000 * math.log(10)) < 1e-9
        assert FunctionalParams(eps).r == r_of_epsilon(eps)

    @pytest.mark.parametrize("eps", [0, Fraction(1, 4), Fraction(1, 2)])
    def test_epsilon_range(self, eps):
        with pytest.raises(DecompError):
            FunctionalParams(eps)

    def test_q_lower_bound(self):
        with pytest.raises(DecompError):
            FunctionalParams(Fraction(1, 5), q=9)
        assert FunctionalParams(Fraction(1, 5), q=10).q == 10


class TestValues:
    def test_complete_graph_is_vertex_count(self):
        params = FunctionalParams(Fraction(1, 5), r=3)
        fv = phi(BipartiteGraph.complete(5), params)
        assert fv.density == 1 and fv.size == 10
        assert abs(fv.value() - 10) < 1e-20

    def test_half_density_square(self):
        params = FunctionalParams(Fraction(1, 5), r=2)
        fv = phi(two_blocks(2), params)
        assert fv.density == Fraction(1, 2)
        assert abs(fv.value() - Fraction(1, 4) * 8) < 1e-20

    def test_empty_graph(self):
        fv = phi(BipartiteGraph(3, 3), FunctionalParams(Fraction(1, 5)))
        assert fv.log_value == mpmath.ninf

    def test_large_exponent_stays_finite(self):
        params = FunctionalParams(Fraction(1, 10))
        fv = phi(two_blocks(4), params)
        assert mpmath.isfinite(fv.log_value)
        assert fv.log_value < -1000

    def test_unbalanced(self):
        with pytest.raises(DecompError):
            psi(BipartiteGraph(2, 3), 10)

    def test_compare_exact_rational(self):
        a = functional_value(Fraction(3, 4), 8, Fraction(6))
        b = functional_value(Fraction(1), 6, Fraction(6))
        assert compare(a, b) == -1 and compare(b, a) == 1 and compare(a, a) == 0

    def test_compare_exact_tie(self):
        # (1/2)^2 * 8 == 1^2 * 2
        a = functional_value(Fraction(1, 2), 8, Fraction(2))
        b = functional_value(Fraction(1), 2, Fraction(2))
        assert compare(a, b) == 0

    def test_compare_zero_density(self):
        z = functional_value(Fraction(0), 4, Fraction(3))
        assert compare(z, functional_value(Fraction(1, 9), 2, Fraction(3))) == -1
        assert compare(z, z) == 0

    def test_compare_irrational_exponent(self):
        r = r_of_epsilon(Fraction(1, 5))
        a = functional_value(Fraction(9, 10), 20, r)
        b = functional_value(Fraction(9, 10), 18, r)
        assert compare(a, b) == 1


class TestPeel:
    def test_k4_example(self):
        g = k4_minus_vertex()
        out = peel_step(g, Fraction(1, 3), 6)
        assert out is not None and out.size == (3, 3)
        assert 0 not in out.X
        before, after = psi(g, 6), psi(out.graph(), 6)
        assert after.density ** 6 * after.size == 6
        assert before.density ** 6 * before.size == Fraction(3, 4) ** 6 * 8
        assert abs(before.value() - Fraction(3, 4) ** 6 * 8) < 1e-20
        assert compare(after, before) == 1

    def test_no_deficient_vertex(self):
        assert peel_step(BipartiteGraph.complete(4), Fraction(1, 5), 10) is None

    def test_partner_is_lowest_min_degree(self):
        g = BipartiteGraph.complete(6)
        for b in range(6):
            g.remove_edge(2, b)
        for a in (0, 1, 3):
            g.remove_edge(a, 4)
            g.remove_edge(a, 5)
        out = peel_step(g, Fraction(1, 5), 10)
        # columns 4 and 5 tie for minimum degree; the lower index goes
        assert 2 not in out.X and 4 not in out.Y and 5 in out.Y

    def test_q_too_small(self):
        with pytest.raises(DecompError) as exc:
            peel_step(k4_minus_vertex(), Fraction(1, 3), 5)
        assert exc.value.code == "bad-exponent"

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_iteration_reaches_min_degree(self, seed):
        eps, q = Fraction(1, 5), Fraction(10)
        g = random_bipartite(int(np.random.default_rng(seed).integers(8, 15)), 0.6, seed)
        if g.edge_count == 0:
            return
        m0 = g.n_a
        steps = 0
        while True:
            out = peel_step(g, eps, q)
            if out is None:
                break
            g = out.graph()
            steps += 1
            assert steps <= m0
        bar = (density(g) - eps) * g.n_a
        assert min(g.degrees_a().min(), g.degrees_b().min()) > bar


class TestInequalities:
    @pytest.mark.parametrize("eps", [Fraction(1, 100), Fraction(1, 10), Fraction(1, 5), Fraction(6, 25)])
    def test_both_hold(self, eps):
        out = parameter_inequalities(eps)
        assert out["first"] and out["second"]
        lhs1, rhs1 = out["first_sides"]
        assert lhs1 > rhs1

    def test_precision_argument(self):
        out = parameter_inequalities(Fraction(1, 7), prec=80)
        assert out["first"] and out["second"]


class TestMaximize:
    def test_complete_graph_is_kept(self):
        g = BipartiteGraph.complete(6)
        p = maximize_phi(g, FunctionalParams(Fraction(1, 5), r=3))
        assert p.X == tuple(range(6)) and p.Y == tuple(range(6))

    def test_two_blocks_returns_one_block(self):
        g = two_blocks(5)
        p = maximize_phi(g, FunctionalParams(Fraction(1, 5), r=3))
        assert p.density() == 1 and p.size == (5, 5)
        assert set(p.X) in ({0, 1, 2, 3, 4}, {5, 6, 7, 8, 9})

    def test_too_sparse(self):
        g = BipartiteGraph(5, 5, [(0, 0)])
        with pytest.raises(DecompError) as exc:
            maximize_phi(g, FunctionalParams(Fraction(1, 5)))
        assert exc.value.code == "too-sparse"

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_never_below_whole_graph(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(3, 9))
        g = random_bipartite(m, rng.uniform(0.4, 0.95), seed)
        params = FunctionalParams(Fraction(1, 5), r=3)
        if density(g) <= params.epsilon:
            return
        p = maximize_phi(g, params)
        assert p.is_balanced()
        assert compare(phi(p.graph(), params), phi(g, params)) >= 0
        if m <= 5:
            assert p.density() ** 3 * 2 * len(p.X) <= best_phi(g.adj, 3)
