"""Figures for CLI reports, rendered off-screen to PNG."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .extract import Decomposition  # noqa: E402
from .graph import BipartiteGraph  # noqa: E402
from .packing import Packing  # noqa: E402
from .regularity import Verdict  # noqa: E402
from .removal import RemovalReport  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 4.0),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "image.interpolation": "nearest",
    "savefig.bbox": "tight",
}

# no timestamps or version strings, so reruns write identical files
_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def _owner_matrix(shape, dec: Decomposition) -> np.ndarray:
    owner = np.full(shape, np.nan)
    for i, p in enumerate(dec.pairs):
        for a, b in p.edges:
            owner[a, b] = i
    for a, b in dec.residual.edges():
        owner[a, b] = -1
    return owner


def plot_decomposition(g: BipartiteGraph, dec: Decomposition, outdir, stem: str = "decompose") -> list[Path]:
    outdir = Path(outdir)
    paths = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        owner = _owner_matrix(g.shape, dec)
        cmap = plt.get_cmap("tab20").copy()
        cmap.set_under("0.3")
        cmap.set_bad("white")
        ax.imshow(np.ma.masked_invalid(owner), cmap=cmap, vmin=0, vmax=max(dec.K - 1, 1))
        ax.set_xlabel("B vertex")
        ax.set_ylabel("A vertex")
        ax.set_title(f"edges by bundle (K={dec.K}, residual grey)")
        paths.append(_save(fig, outdir / f"{stem}_bundles.png"))

        fig, ax = plt.subplots()
        sizes = [p.size for p in dec.pairs]
        dens = [float(p.density) for p in dec.pairs]
        ax.bar(range(dec.K), sizes, color="#4eb3d3")
        ax.set_xlabel("bundle")
        ax.set_ylabel("part size")
        twin = ax.twinx()
        twin.plot(range(dec.K), dens, "o-", color="#08589e")
        twin.axhline(float(dec.threshold), ls="--", color="0.5", lw=0.8)
        twin.set_ylim(0, 1.05)
        twin.set_ylabel("density")
        ax.set_title("bundle sizes and densities")
        paths.append(_save(fig, outdir / f"{stem}_sizes.png"))
    return paths


def plot_verdict(g: BipartiteGraph, verdict: Verdict, outdir, stem: str = "verify") -> list[Path]:
    outdir = Path(outdir)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        rows = list(verdict.A1) + [i for i in range(g.n_a) if i not in set(verdict.A1)]
        cols = list(verdict.B1) + [j for j in range(g.n_b) if j not in set(verdict.B1)]
        ax.imshow(g.adj[np.ix_(rows, cols)], cmap="Greys")
        if not verdict.regular:
            ax.add_patch(Rectangle((-0.5, -0.5), len(verdict.B1), len(verdict.A1),
                                   fill=False, ec="#d62728", lw=1.5))
            ax.set_title(f"witnesses, deviation {float(verdict.deviation):.3f}")
        else:
            ax.set_title(f"regular ({verdict.method})")
        ax.set_xlabel("B vertex (witness first)")
        ax.set_ylabel("A vertex (witness first)")
        return [_save(fig, outdir / f"{stem}_adjacency.png")]


def plot_packing(g: BipartiteGraph, packing: Packing, outdir, stem: str = "pack") -> list[Path]:
    outdir = Path(outdir)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        img = np.where(g.adj, -1.0, np.nan)
        for i, emb in enumerate(packing.embeddings):
            for a, b in emb.edges():
                img[a, b] = i
        cmap = plt.get_cmap("tab10").copy()
        cmap.set_under("0.9")
        cmap.set_bad("white")
        ax.imshow(np.ma.masked_invalid(img), cmap=cmap, vmin=0, vmax=max(len(packing.embeddings) - 1, 1))
        ax.set_xlabel("B vertex")
        ax.set_ylabel("A vertex")
        ax.set_title(f"tree edges ({packing.status})")
        return [_save(fig, outdir / f"{stem}_trees.png")]


def plot_removal(report: RemovalReport, outdir, stem: str = "removal") -> list[Path]:
    outdir = Path(outdir)
    paths = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(range(len(report.per_z)), report.per_z, color="#7bccc4")
        if report.threshold is not None:
            ax.axhline(float(report.threshold), ls="--", color="#d62728", lw=0.8, label="bad threshold")
            ax.legend(frameon=False)
        ax.set_xlabel("z")
        ax.set_ylabel("good C5 count")
        ax.set_title(f"good five-cycles per vertex (total {report.good_c5_total})")
        paths.append(_save(fig, outdir / f"{stem}_per_z.png"))

        fig, ax = plt.subplots()
        names = list(report.phase_deletions)
        ax.bar(names, [report.phase_deletions[k] for k in names], color="#2b8cbe")
        ax.axhline(float(report.budget), ls="--", color="0.4", lw=0.8, label="4 eps n^2")
        ax.legend(frameon=False)
        ax.set_ylabel("edges deleted")
        ax.set_title("deletions by phase")
        paths.append(_save(fig, outdir / f"{stem}_phases.png"))
    return paths
