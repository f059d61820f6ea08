"""PNG figures for the CLI report commands.

Everything goes through the non-interactive Agg backend; the PNG
software tag is dropped so files do not embed the matplotlib version.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return Path(path)


def plot_constellation(c, path: Path, annotate_labels: bool = True) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        A = c.amplitude_bound
        t = np.linspace(0, 2 * np.pi, 400)
        ax.plot(A * np.cos(t), A * np.sin(t), color="0.6", lw=0.8, ls="--")
        ax.scatter(c.points.real, c.points.imag, s=14, color="C0", zorder=3)
        if annotate_labels and c.bit_map is not None and c.M <= 64:
            w = c.bits_per_symbol
            for z, b in zip(c.points, c.bit_map):
                ax.annotate(format(int(b), f"0{w}b"), (z.real, z.imag), fontsize=5,
                            xytext=(2, 3), textcoords="offset points")
        ax.set_aspect("equal")
        ax.set_xlabel("in-phase")
        ax.set_ylabel("quadrature")
        ax.set_title(c.name or f"M={c.M}")
        return _save(fig, path)


def plot_axis_patterns(patterns: dict, path: Path, band=None) -> Path:
    """``patterns`` maps a label to (psi, amplitude) arrays."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, (psi, amp) in patterns.items():
            ax.plot(psi, amp, label=label, lw=1.0)
        if band is not None:
            ax.axvspan(band[0], band[1], color="C2", alpha=0.08)
        ax.set_xlabel("direction cosine")
        ax.set_ylabel("|v^H f|")
        ax.legend()
        return _save(fig, path)


def plot_pattern_2d(psi_x, psi_y, amp, path: Path, title: str = "") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        im = ax.pcolormesh(psi_x, psi_y, amp.T, shading="auto", cmap="viridis")
        fig.colorbar(im, ax=ax, label="|v^H f|")
        ax.set_xlabel("psi_x")
        ax.set_ylabel("psi_y")
        ax.set_title(title)
        return _save(fig, path)


def plot_ber(curves, path: Path, title: str = "") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for i, cur in enumerate(curves):
            x, y = cur.ebn0_db, cur.ber
            ok = y > 0
            ax.semilogy(x[ok], y[ok], marker="os^dv<>"[i % 7], ms=3, lw=1.0,
                        label=cur.label or f"curve {i}")
        ax.set_xlabel("Eb/N0 (dB)")
        ax.set_ylabel("BER")
        ax.set_title(title)
        ax.legend()
        return _save(fig, path)


def plot_cdfs(cdfs: dict, path: Path) -> Path:
    """``cdfs`` maps a label to a list of (amp_db, cdf) pairs."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, rows in cdfs.items():
            x, y = zip(*rows)
            ax.step(x, y, where="post", label=label, lw=1.0)
        ax.set_xlabel("20 log10(amplitude / 10) (dB)")
        ax.set_ylabel("CDF")
        ax.legend()
        return _save(fig, path)


def plot_table(header, rows, path: Path, title: str = "") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 0.45 * (len(rows) + 2)))
        ax.axis("off")
        cells = [[f"{v:.4f}" if isinstance(v, float) else str(v) for v in r] for r in rows]
        tbl = ax.table(cellText=cells, colLabels=list(header), loc="center")
        tbl.scale(1, 1.3)
        ax.set_title(title)
        return _save(fig, path)
