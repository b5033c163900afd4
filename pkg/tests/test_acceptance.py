"""Acceptance criteria 1-10, one test each.

Every test records a PASS/FAIL line through the ``criterion`` fixture and then
asserts the same condition, so ``pytest tests/test_acceptance.py -s`` shows the
per-criterion verdicts and the terminal summary repeats them.
"""

import math
import time
from fractions import Fraction

import numpy as np

from edgedecomp import io
from edgedecomp.errors import DecompError
from edgedecomp.extract import Bundle, Decomposition, boost_density, decompose
from edgedecomp.functional import FunctionalParams, maximize_phi, parameter_inequalities, peel_step
from edgedecomp.generators import forest, low_c5, random_bipartite, random_tree
from edgedecomp.graph import BipartiteGraph, TripartiteGraph, density
from edgedecomp.packing import check_embedding, edge_disjoint, pack_trees
from edgedecomp.regularity import is_regular_oracle, max_deviation_oracle, verify_regularity, witness_size
from edgedecomp.cli import main
from edgedecomp.removal import conditional_triangle_removal, count_good_c5
from oracles import best_phi, block_density, good_c5, triangles


def test_partition_exactness(criterion):
    eps, thr = Fraction(1, 5), Fraction(1, 4)
    densities = [0.3, 0.5, 0.8]
    bad, slowest = [], 0.0
    for seed in range(50):
        m = int(np.random.default_rng(seed).integers(8, 65))
        g = random_bipartite(m, densities[seed % 3], seed)
        original = set(g.edges())
        for mode in ("algorithmic", "functional"):
            start = time.perf_counter()
            dec = decompose(g, eps, thr, mode)
            elapsed = time.perf_counter() - start
            slowest = max(slowest, elapsed)
            owned = [e for p in dec.pairs for e in p.edges] + dec.residual.edges()
            if len(owned) != len(set(owned)) or set(owned) != original or elapsed >= 10:
                bad.append((seed, mode))
    ok = not bad
    criterion(1, ok, f"100 decompositions, {len(bad)} inexact or slow, slowest {slowest:.2f}s")
    assert ok, bad


def test_verifier_contract(criterion):
    bad, kinds = [], {"regular": 0, "witnesses": 0}
    for seed in range(200):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 13))
        g = random_bipartite(m, rng.uniform(0.1, 0.9), seed)
        eps = [Fraction(1, 2), Fraction(1, 4)][seed % 2]
        v = verify_regularity(g, eps)
        kinds[v.kind] += 1
        if v.regular:
            good = is_regular_oracle(g, eps)
        else:
            need = math.ceil(eps ** 4 * m / 16)
            dev = abs(Fraction(g.edge_count, m * m) - block_density(g.adj, v.A1, v.B1))
            good = len(v.A1) >= need and len(v.B1) >= need and dev >= eps ** 4 and need == witness_size(m, eps)
        if not good:
            bad.append(seed)
    ok = not bad
    criterion(2, ok, f"200 verdicts ({kinds['regular']} regular, {kinds['witnesses']} witnesses), {len(bad)} wrong")
    assert ok, bad


def test_boost_gain(criterion):
    done, bad, seed = 0, [], 0
    while done < 1000:
        seed += 1
        rng = np.random.default_rng(seed)
        m = int(rng.integers(3, 11))
        g = random_bipartite(m, rng.uniform(0.2, 0.9), seed)
        if g.edge_count in (0, m * m):
            continue
        dev, xs, ys = max_deviation_oracle(g, Fraction(int(rng.integers(1, 4)), 8))
        d = density(g)
        eta = min(dev, Fraction(min(len(xs), len(ys)), m))
        if eta >= d:
            eta = d / 2
        if eta == 0:
            continue
        done += 1
        try:
            out = boost_density(g, xs, ys, eta)
            good = (len(out.X) == len(out.Y) >= math.ceil(eta * m)
                    and block_density(g.adj, out.X, out.Y) >= d + eta ** 3)
        except DecompError:
            good = False
        if not good:
            bad.append(seed)
    ok = not bad
    criterion(3, ok, f"{done} boosts from oracle witnesses, {len(bad)} below d + eta^3 or undersized")
    assert ok, bad


def test_peel_monotonicity(criterion):
    eps, q = Fraction(1, 5), 10
    bad = []
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(10, 17))
        g = BipartiteGraph.from_matrix(rng.random((m, m)) < rng.uniform(0.5, 0.95))
        row = bool(rng.integers(2))
        v = int(rng.integers(m))
        # strip edges at v until deg(v) <= (d - eps) m for the current density
        while True:
            line = g.adj[v] if row else g.adj[:, v]
            if line.sum() <= (density(g) - eps) * m:
                break
            u = int(rng.choice(np.flatnonzero(line)))
            g.remove_edge(*((v, u) if row else (u, v)))
        d = density(g)
        try:
            out = peel_step(g, eps, q)
        except DecompError:
            out = None
        # exact comparison of d^q * 2m before and after
        if out is None or not out.density() ** q * 2 * (m - 1) > d ** q * 2 * m:
            bad.append(seed)
    ok = not bad
    criterion(4, ok, f"1000 planted deficient vertices, {len(bad)} without a strict increase")
    assert ok, bad


def test_parameter_function(criterion):
    grid = [Fraction(k, 404) for k in range(1, 101)]
    bad = [eps for eps in grid if not all(parameter_inequalities(eps, prec=96)[key] for key in ("first", "second"))]
    ok = not bad
    criterion(5, ok, f"100 grid points in (0, 1/4) at 96 bits, {len(bad)} violations")
    assert ok, bad


def test_tree_packing(criterion):
    eps, delta = Fraction(1, 5), Fraction(3, 5)
    bad = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(48, 61))
        g = random_bipartite(n, 0.985, seed)
        # extracted pairs shrink to about n/3 here, so size the trees for m = n/3
        trees = forest(int(rng.integers(2, 6)), n // 6, int(delta * n / 12), seed)
        pk = pack_trees(g, trees, eps, delta)
        used = [e for emb in pk.embeddings for e in emb.edges()]
        good = (density(g) >= delta + eps + Fraction(1, 10) and pk.complete
                and all(check_embedding(g, emb) for emb in pk.embeddings)
                and edge_disjoint(pk.embeddings) and len(set(used)) == len(used)
                and pk.consumed_edges == len(used) == sum(t.edge_count for t in trees))
        if not good:
            bad.append(seed)
    ok = not bad
    criterion(6, ok, f"20 forests, {len(bad)} incomplete or invalid packings")
    assert ok, bad


def test_good_c5_oracle(criterion):
    bad = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 9))
        blocks = [BipartiteGraph.from_matrix(rng.random((n, n)) < rng.uniform(0.2, 0.9)) for _ in range(3)]
        tg = TripartiteGraph(*blocks)
        dec = decompose(tg.xy, Fraction(1, 4), Fraction(1, 4), floor=1)
        _, per_z = count_good_c5(tg, dec)
        if per_z.tolist() != good_c5(dec.owner(), tg.yz.adj, tg.zx.adj, n):
            bad.append(seed)
    k333 = TripartiteGraph(*(BipartiteGraph.complete(3) for _ in range(3)))
    whole = Bundle((0, 1, 2), (0, 1, 2), k333.xy.edges(), Fraction(1), Fraction(1, 4), True)
    dec = Decomposition([whole], BipartiteGraph(3, 3), Fraction(1, 4), Fraction(1, 2), "algorithmic", [])
    per_z = count_good_c5(k333, dec)[1].tolist()
    closed_form = per_z == [36, 36, 36] == good_c5(dec.owner(), k333.yz.adj, k333.zx.adj, 3)
    ok = not bad and closed_form
    criterion(7, ok, f"100 random instances, {len(bad)} mismatches; K_333 per z = 36: {closed_form}")
    assert ok, bad


def test_removal_certificate(criterion):
    eps = Fraction(1, 4)
    bad, worst = [], 0.0
    for seed in range(20):
        n = int(np.random.default_rng(seed).integers(12, 61))
        tg = low_c5(n, seed)
        out, rep = conditional_triangle_removal(tg, eps)
        trace_zero = int(np.trace(out.xy.adj.astype(np.int64) @ out.yz.adj @ out.zx.adj)) == 0
        brute_zero = triangles(out.xy.adj, out.yz.adj, out.zx.adj) == 0
        worst = max(worst, rep.edges_deleted / (n * n))
        if not (rep.triangle_free and trace_zero and brute_zero and rep.edges_deleted <= 4 * eps * n * n):
            bad.append(seed)
    ok = not bad
    criterion(8, ok, f"20 low-c5 instances, {len(bad)} failures, worst deletions {worst:.3f} n^2 (budget 1.000 n^2)")
    assert ok, bad


def test_functional_maximizer(criterion):
    params = FunctionalParams(Fraction(1, 5), r=3)
    hits, below, done, seed = 0, 0, 0, 0
    while done < 100:
        seed += 1
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 6))
        g = random_bipartite(m, rng.uniform(0.3, 0.9), seed)
        if density(g) <= params.epsilon:
            continue
        done += 1
        p = maximize_phi(g, params)
        value = p.density() ** 3 * 2 * len(p.X)
        hits += value == best_phi(g.adj, 3)
        below += value < density(g) ** 3 * 2 * m
    ok = hits >= 90 and below == 0
    criterion(9, ok, f"{hits}/100 exhaustive optima, {below} below the whole graph")
    assert ok


def test_determinism_and_roundtrip(criterion, tmp_path, capsys):
    problems = []
    # generated files
    for model in ("random", "planted-regular", "two-blocks", "low-c5", "forest"):
        outs = []
        for k in range(2):
            path = tmp_path / f"{model}{k}.txt"
            main(["gen", "--model", model, "--seed", "3", "--out", str(path)])
            outs.append(path.read_bytes())
        if outs[0] != outs[1]:
            problems.append(f"gen {model}")
    gen = tmp_path / "random0.txt"
    low = tmp_path / "low-c50.txt"
    trees = tmp_path / "forest0.txt"
    main(["gen", "--model", "random", "--seed", "3", "--n", "24", "--p", "0.97", "--out", str(gen)])
    runs = {
        "verify": ["verify", "--input", gen, "--epsilon", "1/4"],
        "decompose": ["decompose", "--input", gen, "--epsilon", "1/5", "--delta", "1/4"],
        "decompose-functional": ["decompose", "--input", gen, "--epsilon", "1/5", "--delta", "1/4",
                                 "--mode", "functional"],
        "pack-trees": ["pack-trees", "--input", gen, "--trees", trees, "--epsilon", "1/5", "--delta", "3/5"],
        "removal": ["removal", "--input", low, "--epsilon", "1/4"],
    }
    for name, argv in runs.items():
        texts = []
        for k in range(2):
            out = tmp_path / f"{name}{k}.json"
            main([str(a) for a in argv] + ["--out", str(out)])
            texts.append(out.read_text())
        if texts[0] != texts[1]:
            problems.append(f"report {name}")
        if io.dumps_report(io.loads_report(texts[0])) != texts[0]:
            problems.append(f"report round-trip {name}")
    capsys.readouterr()
    # text formats
    rng = np.random.default_rng(0)
    for seed in range(20):
        g = random_bipartite(int(rng.integers(1, 20)), rng.uniform(0, 1), seed)
        tg = low_c5(int(rng.integers(1, 20)), seed)
        fs = [random_tree(int(rng.integers(1, 12)), 3, rng) for _ in range(3)]
        if io.parse_bipartite(io.format_bipartite(g)) != g:
            problems.append(f"bipartite {seed}")
        if io.parse_tripartite(io.format_tripartite(tg)) != tg:
            problems.append(f"tripartite {seed}")
        if io.parse_forest(io.format_forest(fs)) != fs:
            problems.append(f"forest {seed}")
        pairs = [(io.format_bipartite(g), io.parse_bipartite, io.format_bipartite),
                 (io.format_tripartite(tg), io.parse_tripartite, io.format_tripartite),
                 (io.format_forest(fs), io.parse_forest, io.format_forest)]
        for text, parse, emit in pairs:
            if emit(parse(text)) != text:
                problems.append(f"emit-parse {seed}")
    ok = not problems
    criterion(10, ok, f"5 generators, 5 report kinds, 120 text round-trips, {len(problems)} problems")
    assert ok, problems
