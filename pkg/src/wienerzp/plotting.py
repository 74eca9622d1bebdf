"""Matplotlib figures written next to the CSV/JSON reports.

Everything renders through the Agg backend straight to files; nothing here
opens a window.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
    "legend.frameon": False,
    # keep output byte-stable across runs
    "svg.hashsalt": "wienerzp",
    "pdf.compression": 0,
}


@contextmanager
def _figure(path, **kw):
    with matplotlib.rc_context(RC):
        fig, ax = plt.subplots(**kw)
        try:
            yield fig, ax
            fig.tight_layout()
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
        finally:
            plt.close(fig)


def plot_ap_profile(rows, p: int, path) -> Path:
    """Norm of the AP {0..n-1} and the ratio norm / ln n against n."""
    rows = [r for r in rows if r.n >= 2]
    n = np.array([r.n for r in rows])
    with _figure(path, ncols=2, figsize=(9, 3.6)) as (fig, (ax1, ax2)):
        ax1.semilogx(n, [r.norm for r in rows], "o-", ms=3, label=r"$\|\chi_P\|_A$")
        ax1.semilogx(n, np.log(n), "--", label=r"$\ln n$")
        ax1.set_xlabel("AP length n")
        ax1.set_ylabel("Wiener norm")
        ax1.legend()
        ax2.semilogx(n, [r.ratio for r in rows], "s-", ms=3, color="C2")
        ax2.set_xlabel("AP length n")
        ax2.set_ylabel(r"norm / $\ln n$")
        fig.suptitle(f"arithmetic progressions in $Z_{{{p}}}$")
    return Path(path)


def plot_search(results, path) -> Path:
    """Best norm found per set size against the leading-order bound curves."""
    results = sorted(results, key=lambda r: r.n)
    n = np.array([r.n for r in results])
    with _figure(path) as (fig, ax):
        ax.plot(n, [r.best_norm for r in results], "o-", label="min norm found")
        for name, style in (("conjecture", "--"), ("mediumsize", ":")):
            vals = [r.bound_comparisons.get(name, {}).get("value", math.nan) for r in results]
            if any(v == v for v in vals):
                ax.plot(n, vals, style, label=f"{name} (constant 1)")
        ax.axhline(1.0, color="grey", lw=0.8, label="trivial bound")
        ax.set_xlabel("|A|")
        ax.set_ylabel("Wiener norm")
        if results:
            ax.set_title(f"extremal search, p = {results[0].p}")
        ax.legend()
    return Path(path)


def plot_spectrum(spectrum, path) -> Path:
    mags = np.abs(spectrum.values).astype(float)
    with _figure(path) as (fig, ax):
        ax.stem(np.arange(mags.size), mags, markerfmt=" ", basefmt=" ")
        ax.set_xlabel(r"$\gamma$")
        ax.set_ylabel(r"$|\hat\chi_A(\gamma)|$")
        ax.set_title(f"spectrum, p = {spectrum.p}, L1 = {mags.sum():.6g}")
    return Path(path)


def plot_vdp_norms(table, p: int, path) -> Path:
    """``sum |V_n|`` over all admissible orders against the 3p ceiling."""
    n = np.array([t[0] for t in table])
    with _figure(path) as (fig, ax):
        ax.plot(n, [t[1] / p for t in table], ".-", ms=3, label=r"$\sum_\gamma |V_n(\gamma)| / p$")
        ax.axhline(3.0, color="C3", ls="--", label="ceiling 3")
        ax.set_xlabel("order n")
        ax.set_ylabel("normalised kernel norm")
        ax.set_title(f"de la Vallee-Poussin kernels, p = {p}")
        ax.legend()
    return Path(path)
