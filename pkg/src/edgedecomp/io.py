"""Text formats for graphs and trees, and the JSON report schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__
from .errors import DecompError
from .extract import Bundle, Decomposition
from .graph import BipartiteGraph, TripartiteGraph
from .packing import Embedding, Packing, RootedTree
from .regularity import Verdict
from .removal import RemovalReport

GENERATOR_ID = "numpy.random.PCG64"


def _lines(text: str) -> list[tuple[int, list[str]]]:
    """Non-blank lines with their 1-based line numbers, split on whitespace."""
    return [(k, line.split()) for k, line in enumerate(text.splitlines(), start=1) if line.strip()]


def _ints(k: int, toks: list[str], count: int, what: str) -> list[int]:
    if len(toks) != count:
        raise DecompError("parse-error", f"line {k}: expected {count} fields for {what}, got {len(toks)}")
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise DecompError("parse-error", f"line {k}: non-integer field in {' '.join(toks)!r}") from None


def _read_edges(rows, start: int, count: int, n_a: int, n_b: int, block: str) -> list[tuple[int, int]]:
    if len(rows) < start + count:
        last = rows[-1][0] if rows else 0
        raise DecompError("parse-error", f"line {last}: {block} block ends after "
                          f"{len(rows) - start} of {count} edges")
    seen = set()
    out = []
    for k, toks in rows[start:start + count]:
        a, b = _ints(k, toks, 2, f"a {block} edge")
        if not (1 <= a <= n_a and 1 <= b <= n_b):
            raise DecompError("parse-error", f"line {k}: vertex out of range in edge {a} {b}")
        if (a, b) in seen:
            raise DecompError("duplicate-edge", f"line {k}: edge {a} {b} repeated")
        seen.add((a, b))
        out.append((a - 1, b - 1))
    return out


def parse_bipartite(text: str) -> BipartiteGraph:
    """``bipartite nA nB m`` then ``m`` lines ``a b`` (1-based)."""
    rows = _lines(text)
    if not rows or rows[0][1][0] != "bipartite":
        raise DecompError("parse-error", f"line {rows[0][0] if rows else 1}: expected 'bipartite nA nB m' header")
    k, toks = rows[0]
    n_a, n_b, m = _ints(k, toks[1:], 3, "the header")
    edges = _read_edges(rows, 1, m, n_a, n_b, "bipartite")
    if len(rows) > m + 1:
        raise DecompError("parse-error", f"line {rows[m + 1][0]}: trailing content after {m} edges")
    return BipartiteGraph(n_a, n_b, edges)


def format_bipartite(g: BipartiteGraph) -> str:
    lines = [f"bipartite {g.n_a} {g.n_b} {g.edge_count}"]
    lines += [f"{a + 1} {b + 1}" for a, b in g.edges()]
    return "\n".join(lines) + "\n"


_BLOCKS = ("XY", "YZ", "ZX")


def parse_tripartite(text: str) -> TripartiteGraph:
    """``tripartite n mXY mYZ mZX`` then ``# XY``, ``# YZ``, ``# ZX`` edge blocks."""
    rows = _lines(text)
    if not rows or rows[0][1][0] != "tripartite":
        line = rows[0][0] if rows else 1
        raise DecompError("parse-error", f"line {line}: expected 'tripartite n mXY mYZ mZX' header")
    k, toks = rows[0]
    n, *counts = _ints(k, toks[1:], 4, "the header")
    pos = 1
    blocks = []
    for name, count in zip(_BLOCKS, counts):
        if pos >= len(rows) or rows[pos][1] != ["#", name]:
            line = rows[pos][0] if pos < len(rows) else rows[-1][0] + 1
            raise DecompError("parse-error", f"line {line}: expected '# {name}'")
        edges = _read_edges(rows, pos + 1, count, n, n, name)
        blocks.append(BipartiteGraph(n, n, edges))
        pos += count + 1
    if pos < len(rows):
        raise DecompError("parse-error", f"line {rows[pos][0]}: trailing content after the ZX block")
    return TripartiteGraph(*blocks)


def format_tripartite(tg: TripartiteGraph) -> str:
    blocks = (tg.xy, tg.yz, tg.zx)
    lines = [f"tripartite {tg.n} " + " ".join(str(b.edge_count) for b in blocks)]
    for name, b in zip(_BLOCKS, blocks):
        lines.append(f"# {name}")
        lines += [f"{u + 1} {v + 1}" for u, v in b.edges()]
    return "\n".join(lines) + "\n"


def parse_forest(text: str) -> list[RootedTree]:
    """Blocks of ``tree t`` followed by ``t - 1`` lines ``child parent``; vertex 1 is the root."""
    rows = _lines(text)
    trees = []
    pos = 0
    while pos < len(rows):
        k, toks = rows[pos]
        if toks[0] != "tree":
            raise DecompError("parse-error", f"line {k}: expected 'tree t' header")
        (t,) = _ints(k, toks[1:], 1, "the tree header")
        if t < 1:
            raise DecompError("parse-error", f"line {k}: tree must have at least one vertex")
        if len(rows) < pos + t:
            raise DecompError("parse-error", f"line {rows[-1][0]}: tree ends after {len(rows) - pos - 1} "
                              f"of {t - 1} edges")
        parent = [-1] * t
        for k2, toks2 in rows[pos + 1:pos + t]:
            c, p = _ints(k2, toks2, 2, "a tree edge")
            if not (2 <= c <= t and 1 <= p <= t):
                raise DecompError("parse-error", f"line {k2}: bad child/parent {c} {p}")
            if parent[c - 1] != -1:
                raise DecompError("duplicate-edge", f"line {k2}: vertex {c} already has a parent")
            parent[c - 1] = p - 1
        try:
            trees.append(RootedTree(tuple(parent)))
        except DecompError as exc:
            raise DecompError("parse-error", f"line {k}: {exc}") from None
        pos += t
    return trees


def format_forest(trees: Iterable[RootedTree]) -> str:
    lines = []
    for tree in trees:
        lines.append(f"tree {tree.t}")
        lines += [f"{c + 1} {tree.parent[c] + 1}" for c in range(1, tree.t)]
    return "\n".join(lines) + "\n"


def read_graph(path) -> BipartiteGraph | TripartiteGraph:
    """Dispatch on the header word."""
    text = Path(path).read_text()
    head = text.split(None, 1)[0] if text.strip() else ""
    if head == "tripartite":
        return parse_tripartite(text)
    return parse_bipartite(text)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def rational(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "approx": float(x)}


def from_rational(obj) -> Fraction | None:
    if obj is None:
        return None
    return Fraction(int(obj["num"]), int(obj["den"]))


def _pairs(edges) -> list[list[int]]:
    return [[int(a), int(b)] for a, b in edges]


def _tuples(rows) -> tuple[tuple[int, int], ...]:
    return tuple((int(a), int(b)) for a, b in rows)


def encode_graph(g: BipartiteGraph) -> dict:
    return {"n_a": g.n_a, "n_b": g.n_b, "edges": _pairs(g.edges())}


def decode_graph(obj) -> BipartiteGraph:
    return BipartiteGraph(obj["n_a"], obj["n_b"], _tuples(obj["edges"]))


def encode_verdict(v: Verdict) -> dict:
    return {"verdict": v.kind, "density": rational(v.density), "epsilon": rational(v.epsilon),
            "A1": list(v.A1), "B1": list(v.B1),
            "deviation": rational(v.deviation) if v.deviation is not None else None,
            "method": v.method}


def decode_verdict(obj) -> Verdict:
    return Verdict(obj["verdict"] == "regular", from_rational(obj["density"]), from_rational(obj["epsilon"]),
                   tuple(obj["A1"]), tuple(obj["B1"]),
                   from_rational(obj["deviation"]), obj["method"])


def _encode_value(x):
    if isinstance(x, Fraction):
        return rational(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, dict):
        return {k: _encode_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode_value(v) for v in x]
    return x


def _decode_value(x):
    if isinstance(x, dict):
        if set(x) == {"num", "den", "approx"}:
            return from_rational(x)
        return {k: _decode_value(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_decode_value(v) for v in x]
    return x


def encode_decomposition(d: Decomposition) -> dict:
    return {
        "mode": d.mode, "epsilon": rational(d.epsilon), "threshold": rational(d.threshold),
        "K": d.K, "m_min": d.m_min, "residual_below_threshold": d.residual_below_threshold,
        "pairs": [{"X": list(p.X), "Y": list(p.Y), "edges": _pairs(p.edges), "edge_count": len(p.edges),
                   "density": rational(p.density), "epsilon": rational(p.epsilon), "certified": p.certified,
                   "super_regular": p.super_regular, "iterations": p.iterations} for p in d.pairs],
        "residual": encode_graph(d.residual),
        "events": _encode_value(d.events),
    }


def decode_decomposition(obj) -> Decomposition:
    pairs = [Bundle(tuple(p["X"]), tuple(p["Y"]), _tuples(p["edges"]), from_rational(p["density"]),
                    from_rational(p["epsilon"]), p["certified"], p["super_regular"], p["iterations"])
             for p in obj["pairs"]]
    return Decomposition(pairs, decode_graph(obj["residual"]), from_rational(obj["epsilon"]),
                         from_rational(obj["threshold"]), obj["mode"], _decode_value(obj["events"]))


def encode_packing(p: Packing) -> dict:
    return {
        "status": p.status, "first_unplaced": p.first_unplaced, "consumed_edges": p.consumed_edges,
        "epsilon": rational(p.epsilon), "delta": rational(p.delta),
        "embeddings": [{"parent": list(e.tree.parent), "side": "".join(e.side), "host": list(e.host),
                        "edges": _pairs(e.edges())} for e in p.embeddings],
        "events": _encode_value(p.events),
    }


def decode_packing(obj) -> Packing:
    embs = [Embedding(RootedTree(tuple(e["parent"])), tuple(e["side"]), tuple(e["host"]))
            for e in obj["embeddings"]]
    return Packing(embs, obj["status"], obj["first_unplaced"], obj["consumed_edges"],
                   from_rational(obj["epsilon"]), from_rational(obj["delta"]), _decode_value(obj["events"]))


def encode_removal(r: RemovalReport) -> dict:
    return {
        "bundles": encode_decomposition(r.bundles), "good_c5_total": r.good_c5_total,
        "per_z": list(r.per_z), "threshold": rational(r.threshold) if r.threshold is not None else None,
        "bad_vertices": list(r.bad_vertices), "phase_deletions": dict(r.phase_deletions),
        "edges_deleted": r.edges_deleted, "triangle_free": r.triangle_free,
        "triangles_before": r.triangles_before, "c5_total": r.c5_total, "budget": rational(r.budget),
        "within_budget": r.within_budget, "reference": r.reference,
    }


def decode_removal(obj) -> RemovalReport:
    return RemovalReport(
        decode_decomposition(obj["bundles"]), obj["good_c5_total"], tuple(obj["per_z"]),
        from_rational(obj["threshold"]), tuple(obj["bad_vertices"]), dict(obj["phase_deletions"]),
        obj["edges_deleted"], obj["triangle_free"], obj["triangles_before"], obj["c5_total"],
        from_rational(obj["budget"]), dict(obj["reference"]))


_CODECS = {
    "verdict": (Verdict, encode_verdict, decode_verdict),
    "decomposition": (Decomposition, encode_decomposition, decode_decomposition),
    "packing": (Packing, encode_packing, decode_packing),
    "removal": (RemovalReport, encode_removal, decode_removal),
    "graph": (BipartiteGraph, encode_graph, decode_graph),
}


@dataclass
class Report:
    command: str
    params: dict
    result: Any
    seed: int | None = None
    timing: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def result_type(self) -> str:
        for name, (cls, _, _) in _CODECS.items():
            if isinstance(self.result, cls):
                return name
        raise TypeError(f"no codec for {type(self.result).__name__}")


def report_to_dict(r: Report) -> dict:
    kind = r.result_type
    out = {
        "command": r.command,
        "params": _encode_value(r.params),
        "result_type": kind,
        "result": _CODECS[kind][1](r.result),
        "seed": r.seed,
        "generator": GENERATOR_ID,
        "version": __version__,
        "extra": _encode_value(r.extra),
    }
    if r.timing is not None:
        out["timing"] = r.timing
    return out


def report_from_dict(obj: dict) -> Report:
    kind = obj["result_type"]
    return Report(obj["command"], _decode_value(obj["params"]), _CODECS[kind][2](obj["result"]),
                  obj.get("seed"), obj.get("timing"), _decode_value(obj.get("extra", {})))


def dumps_report(r: Report) -> str:
    return json.dumps(report_to_dict(r), indent=2, sort_keys=True) + "\n"


def loads_report(text: str) -> Report:
    return report_from_dict(json.loads(text))
