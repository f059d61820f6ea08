"""Bit labelling for constellations.

PSK rings and rectangular QAM get exact Gray maps.  Multi-ring APSK and
cross QAM start from a Gray sequence laid along the rings (or rows) and
are refined by pairwise label swaps that lower a union-bound proxy of
the bit error rate: sum over point pairs of Hamming distance times
Q(d_ij / 2 sigma), with sigma set so that the nearest pair sits at
Q = 1e-4.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.special import erfc

from .constellation import Constellation

# Q^{-1}(1e-4): nearest-pair argument of the design-point weight
DESIGN_Q_ARG = 3.719016485455709


def gray(n: int | np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    return n ^ (n >> 1)


def hamming_table(M: int) -> np.ndarray:
    """``H[a, b]`` = number of differing bits between labels a and b."""
    x = np.arange(M)[:, None] ^ np.arange(M)[None, :]
    h = np.zeros_like(x)
    while x.any():
        h += x & 1
        x >>= 1
    return h


def pair_weights(points: np.ndarray) -> np.ndarray:
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    sigma = d.min() / (2 * DESIGN_Q_ARG)
    w = 0.5 * erfc(d / (2 * sigma) / math.sqrt(2))
    np.fill_diagonal(w, 0.0)
    return w


def labeling_cost(points: np.ndarray, bit_map: np.ndarray) -> float:
    w = pair_weights(points)
    H = hamming_table(points.size)
    return float(0.5 * np.sum(w * H[np.ix_(bit_map, bit_map)]))


def swap_descent(points: np.ndarray, labels: np.ndarray, max_sweeps: int = 200) -> np.ndarray:
    """Greedy pairwise label swaps until no single swap lowers the cost."""
    labels = np.array(labels, dtype=np.int64)
    M = points.size
    W = pair_weights(points)
    H = hamming_table(M)
    for _ in range(max_sweeps):
        improved = False
        for i in range(M):
            Hl = H[np.ix_(labels, labels)]
            # cost change for swapping labels of i and every j
            delta = (Hl @ W[i] - W[i] @ Hl[i] - (W * Hl).sum(axis=1) + W @ Hl[i]
                     + 2 * W[i] * Hl[i])
            delta[i] = 0.0
            j = int(np.argmin(delta))
            if delta[j] < -1e-12:
                labels[i], labels[j] = labels[j], labels[i]
                improved = True
        if not improved:
            break
    return labels


def _lattice_axes(points: np.ndarray):
    xs = np.unique(np.round(points.real, 12))
    ys = np.unique(np.round(points.imag, 12))
    return xs, ys


def _qam_gray(points: np.ndarray) -> np.ndarray | None:
    """Per-axis Gray product when the points fill a power-of-two rectangle."""
    xs, ys = _lattice_axes(points)
    nx, ny = xs.size, ys.size
    if nx * ny != points.size or nx & (nx - 1) or ny & (ny - 1):
        return None
    by = int(round(math.log2(ny)))
    ix = np.searchsorted(xs, np.round(points.real, 12))
    iy = np.searchsorted(ys, np.round(points.imag, 12))
    return (gray(ix) << by) | gray(iy)


def _ring_order(c: Constellation) -> np.ndarray:
    """Point indices ring by ring, counter-clockwise inside each ring."""
    if c.params is not None:
        return np.arange(c.M)
    r = np.round(np.abs(c.points), 12)
    ang = np.mod(np.angle(c.points), 2 * np.pi)
    return np.lexsort((ang, r))


def _row_order(points: np.ndarray) -> np.ndarray:
    """Boustrophedon row scan so consecutive indices are lattice neighbours."""
    xs, ys = _lattice_axes(points)
    iy = np.searchsorted(ys, np.round(points.imag, 12))
    x = np.where(iy % 2 == 0, points.real, -points.real)
    return np.lexsort((x, iy))


def assign_bit_labels(c: Constellation) -> Constellation:
    M = c.M
    if M & (M - 1):
        raise ValueError(f"M={M} is not a power of two")
    if c.params is not None and c.params.rings.n_rings == 1:
        return replace(c, bit_map=gray(np.arange(M)))
    if c.params is None:
        qam = _qam_gray(c.points)
        if qam is not None:
            return replace(c, bit_map=qam)
        order = _row_order(c.points)
    else:
        order = _ring_order(c)
    labels = np.empty(M, dtype=np.int64)
    labels[order] = gray(np.arange(M))
    labels = swap_descent(c.points, labels)
    return replace(c, bit_map=labels)
