from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgedecomp.errors import DecompError
from edgedecomp.generators import forest, planted_regular, random_bipartite, random_tree
from edgedecomp.graph import BipartiteGraph
from edgedecomp.packing import (Embedding, RootedTree, check_embedding, edge_disjoint, embed_tree, pack_trees)
from edgedecomp.regularity import is_regular_oracle, is_super_regular

EPS, DELTA = Fraction(1, 5), Fraction(3, 5)


class TestRootedTree:
    def test_path_levels(self):
        t = RootedTree.path(4)
        assert t.levels == ((0,), (1,), (2,), (3,))
        assert t.s == 4 and t.max_level_size == 1 and t.edge_count == 3

    def test_star_levels(self):
        t = RootedTree.star(5)
        assert t.levels == ((0,), (1, 2, 3, 4, 5))
        assert t.children(0) == (1, 2, 3, 4, 5)

    @pytest.mark.parametrize("parent", [(), (0,), (-1, 5), (-1, 1), (-1, 2, 1)])
    def test_rejects_non_trees(self, parent):
        with pytest.raises(DecompError) as exc:
            RootedTree(parent)
        assert exc.value.code == "bad-tree"

    @given(st.integers(1, 30), st.integers(1, 5), st.integers(0, 10 ** 6))
    def test_levels_partition_by_depth(self, t, max_level, seed):
        tree = random_tree(t, max_level, np.random.default_rng(seed))
        flat = sorted(v for lv in tree.levels for v in lv)
        assert flat == list(range(t))
        assert tree.max_level_size <= max_level
        for j, lv in enumerate(tree.levels[1:], start=1):
            assert all(tree.parent[v] in tree.levels[j - 1] for v in lv)


class TestEmbed:
    def test_single_vertex(self):
        g = BipartiteGraph.complete(8)
        emb = embed_tree(g, RootedTree((-1,)), EPS, DELTA)
        assert emb.side == ("A",) and emb.host == (0,)

    def test_path_into_complete(self):
        g = BipartiteGraph.complete(8)
        emb = embed_tree(g, RootedTree.path(4), EPS, DELTA)
        assert emb.side == ("A", "B", "A", "B")
        assert emb.host == (0, 0, 1, 1)
        assert check_embedding(g, emb)

    def test_star_into_planted_pair(self):
        g = planted_regular(40, EPS, DELTA, seed=0, p=Fraction(49, 50))
        assert DELTA * 40 / 4 >= 5
        emb = embed_tree(g, RootedTree.star(5), EPS, DELTA)
        assert emb.side == ("A",) + ("B",) * 5
        assert len(set(emb.host[1:])) == 5
        for a, b in emb.edges():
            assert g.adj[a, b]

    def test_occupied_vertices_are_avoided(self):
        g = BipartiteGraph.complete(8)
        emb = embed_tree(g, RootedTree.path(3), EPS, DELTA, occupied=([0, 1], [0]))
        assert emb.host == (2, 1, 3)

    @pytest.mark.parametrize("host,tree,eps,delta", [
        (BipartiteGraph.complete(5), RootedTree.path(3), EPS, DELTA),  # m < 2t
        (BipartiteGraph.complete(8), RootedTree.path(2), Fraction(1, 4), Fraction(1, 2)),  # delta < 3 eps
        (BipartiteGraph.complete(8), RootedTree.star(3), EPS, DELTA),  # level 3 > delta m / 4
        (BipartiteGraph(6, 8), RootedTree.path(2), EPS, DELTA),
    ])
    def test_hypotheses_violated(self, host, tree, eps, delta):
        with pytest.raises(DecompError) as exc:
            embed_tree(host, tree, eps, delta)
        assert exc.value.code == "hypotheses-violated"

    def test_non_super_regular_host(self):
        g = BipartiteGraph.complete(8)
        for b in range(8):
            g.remove_edge(0, b)
        with pytest.raises(DecompError) as exc:
            embed_tree(g, RootedTree.path(2), EPS, DELTA)
        assert exc.value.code == "hypotheses-violated"

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_dynamic_sets_on_oracle_verified_hosts(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(10, 15))
        g = BipartiteGraph.from_matrix(rng.random((m, m)) < rng.uniform(0.96, 1.0))
        if not is_regular_oracle(g, EPS) or not is_super_regular(g, EPS, DELTA):
            return
        max_level = int(DELTA * m / 4)
        tree = random_tree(int(rng.integers(1, m // 2 + 1)), max_level, rng)
        states = []
        emb = embed_tree(g, tree, EPS, DELTA, hook=states.append)
        assert check_embedding(g, emb)
        assert len(states) == tree.s
        for s in states:
            a_u, b_u = sorted(s.A_u), sorted(s.B_u)
            assert s.A_prime <= s.A_u and s.B_prime <= s.B_u
            for a in s.A_prime:
                assert g.adj[a, b_u].sum() >= (DELTA - EPS) * len(b_u)
            for b in s.B_prime:
                assert g.adj[a_u, b].sum() >= (DELTA - EPS) * len(a_u)
            assert len(s.B_u) - len(s.B_prime) <= EPS * m
            assert len(s.A_u) - len(s.A_prime) <= EPS * m

    def test_check_embedding_rejects(self):
        g = BipartiteGraph.complete(4)
        path = RootedTree.path(3)
        assert not check_embedding(g, Embedding(path, ("A", "B", "A"), (0, 0, 0)))
        assert not check_embedding(g, Embedding(path, ("A", "A", "B"), (0, 1, 0)))
        g.remove_edge(1, 0)
        assert not check_embedding(g, Embedding(path, ("A", "B", "A"), (0, 0, 1)))


class TestPack:
    def test_single_edge(self):
        g = BipartiteGraph.complete(8)
        pk = pack_trees(g, [RootedTree.path(2)], EPS, DELTA)
        assert pk.complete and pk.consumed_edges == 1
        assert len(pk.embeddings[0].edges()) == 1

    def test_many_single_edges(self):
        # at m = 8 one missing edge already makes K_{8,8} irregular and the pairs shrink too fast
        g = BipartiteGraph.complete(12)
        trees = [RootedTree.path(2)] * 6
        pk = pack_trees(g, trees, EPS, DELTA)
        assert pk.complete
        used = [e for emb in pk.embeddings for e in emb.edges()]
        assert len(set(used)) == len(used) == 6
        assert edge_disjoint(pk.embeddings)

    def test_does_not_mutate_input(self):
        g = BipartiteGraph.complete(8)
        pack_trees(g, [RootedTree.path(2)], EPS, DELTA)
        assert g.edge_count == 64

    def test_three_random_trees(self):
        m = 48
        g = random_bipartite(m, 0.985, 7)
        trees = forest(3, m // 4, int(DELTA * m / 8), seed=7)
        pk = pack_trees(g, trees, EPS, DELTA)
        assert pk.complete
        for emb in pk.embeddings:
            assert check_embedding(g, emb)
        assert edge_disjoint(pk.embeddings)
        assert pk.consumed_edges == sum(t.edge_count for t in trees)

    def test_sparse_graph_is_incomplete(self):
        g = random_bipartite(12, 0.3, 1)
        pk = pack_trees(g, [RootedTree.path(2)], EPS, DELTA)
        assert pk.status == "packing-incomplete" and pk.first_unplaced == 0
        assert pk.embeddings == []

    def test_budget_warning(self):
        g = BipartiteGraph.complete(8)
        pk = pack_trees(g, [RootedTree.path(2)] * 30, EPS, DELTA)
        assert pk.events[0]["event"] == "edge-budget-warning"

    def test_bad_mode(self):
        with pytest.raises(DecompError):
            pack_trees(BipartiteGraph.complete(4), [], EPS, DELTA, mode="other")
