"""Planar-array response, coverage matrices and pattern metrics.

Element (kx, ky) of an n_x by n_y array sits at flat index kx * n_y + ky,
matching v(psi_x, psi_y) = v(psi_x) kron v(psi_y).  Direction cosines
live in [-1, 1) with half-wavelength spacing, so v(psi)_k = exp(j k pi psi).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

# dense Kronecker products are only formed up to this many elements
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class ArrayGeometry:
    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("array dimensions must be positive")

    @property
    def n(self) -> int:
        return self.n_x * self.n_y


@dataclass(frozen=True)
class AngularRange:
    """Rectangle [x_lo, x_hi) x [y_lo, y_hi) of direction cosines."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        for lo, hi in ((self.x_lo, self.x_hi), (self.y_lo, self.y_hi)):
            if not (-1.0 <= lo < hi <= 1.0):
                raise ValueError(f"need -1 <= lo < hi <= 1, got [{lo}, {hi})")

    @property
    def area(self) -> float:
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)

    @property
    def x(self) -> tuple[float, float]:
        return self.x_lo, self.x_hi

    @property
    def y(self) -> tuple[float, float]:
        return self.y_lo, self.y_hi

    @classmethod
    def full(cls) -> "AngularRange":
        return cls(-1.0, 1.0, -1.0, 1.0)

    def to_json_dict(self) -> dict:
        return {"x": [self.x_lo, self.x_hi], "y": [self.y_lo, self.y_hi]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "AngularRange":
        (xl, xh), (yl, yh) = d["x"], d["y"]
        return cls(float(xl), float(xh), float(yl), float(yh))


def axis_steering(n: int, psi) -> np.ndarray:
    """ULA response; a vector for scalar ``psi``, one row per angle otherwise."""
    k = np.arange(n)
    psi = np.asarray(psi, dtype=float)
    return np.exp(1j * np.pi * np.multiply.outer(psi, k))


def steering_vector(geom: ArrayGeometry, psi_x: float, psi_y: float) -> np.ndarray:
    return np.kron(axis_steering(geom.n_x, psi_x), axis_steering(geom.n_y, psi_y))


def axis_grid(n: int, lo: float, hi: float, oversample: int = 1) -> np.ndarray:
    """lo + (2 / (n * oversample)) * k for k = 0 .. floor((hi - lo) / step) - 1."""
    step = 2.0 / (n * oversample)
    # tolerance keeps exact multiples like 1 / 0.125 from flooring down
    count = int(math.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(count)


def angle_grid(geom: ArrayGeometry, rng: AngularRange, oversample: int = 1) -> np.ndarray:
    """All (psi_x, psi_y) grid pairs, x-major, shape (K, 2)."""
    gx = axis_grid(geom.n_x, rng.x_lo, rng.x_hi, oversample)
    gy = axis_grid(geom.n_y, rng.y_lo, rng.y_hi, oversample)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def axis_coverage(n: int, lo: float, hi: float) -> np.ndarray:
    """Integral of v(psi) v(psi)^H over [lo, hi), closed form."""
    k = np.arange(n)
    d = (k[:, None] - k[None, :]).astype(float)
    V = np.empty((n, n), dtype=complex)
    off = d != 0
    dd = d[off]
    V[off] = (np.exp(1j * dd * np.pi * hi) - np.exp(1j * dd * np.pi * lo)) / (1j * dd * np.pi)
    V[~off] = hi - lo
    return V


@dataclass
class CoverageMatrix:
    """Kronecker factors of the in-range coverage matrix."""

    v_x: np.ndarray
    v_y: np.ndarray

    @property
    def n_x(self) -> int:
        return self.v_x.shape[0]

    @property
    def n_y(self) -> int:
        return self.v_y.shape[0]

    def dense(self) -> np.ndarray:
        if self.n_x * self.n_y > DENSE_LIMIT:
            raise MemoryError(f"refusing to materialise a {self.n_x * self.n_y}-square Kronecker product")
        return np.kron(self.v_x, self.v_y)


def coverage_matrix(geom: ArrayGeometry, rng: AngularRange) -> CoverageMatrix:
    return CoverageMatrix(axis_coverage(geom.n_x, rng.x_lo, rng.x_hi),
                          axis_coverage(geom.n_y, rng.y_lo, rng.y_hi))


def in_band_power(f: np.ndarray, cov: CoverageMatrix) -> float:
    """f^H (V_x kron V_y) f without forming the Kronecker product."""
    f = np.asarray(f, dtype=complex).ravel()
    if f.size != cov.n_x * cov.n_y:
        raise ValueError(f"beam vector has {f.size} entries, coverage expects {cov.n_x * cov.n_y}")
    F = f.reshape(cov.n_x, cov.n_y)
    return float(np.real(np.sum(F.conj() * (cov.v_x @ F @ cov.v_y.T))))


def pattern_amplitude(f: np.ndarray, geom: ArrayGeometry, psi_x, psi_y) -> np.ndarray:
    """|v^H(psi_x, psi_y) f| on the tensor grid psi_x by psi_y."""
    F = np.asarray(f, dtype=complex).reshape(geom.n_x, geom.n_y)
    Ax = np.atleast_2d(axis_steering(geom.n_x, np.atleast_1d(psi_x)))
    Ay = np.atleast_2d(axis_steering(geom.n_y, np.atleast_1d(psi_y)))
    return np.abs(Ax.conj() @ F @ Ay.conj().T)


def pattern_amplitude_at(f: np.ndarray, geom: ArrayGeometry, psi_x, psi_y) -> np.ndarray:
    """|v^H f| at paired angles (psi_x[i], psi_y[i])."""
    F = np.asarray(f, dtype=complex).reshape(geom.n_x, geom.n_y)
    Ax = axis_steering(geom.n_x, np.asarray(psi_x))
    Ay = axis_steering(geom.n_y, np.asarray(psi_y))
    return np.abs(np.einsum("ik,kl,il->i", Ax.conj(), F, Ay.conj()))


@dataclass
class PatternMetrics:
    ripple_factor: float
    v_mean: float
    in_band_power: float
    power_ratio: float
    converged: Optional[bool] = None

    def to_json_dict(self) -> dict:
        d = asdict(self)
        if self.converged is None:
            d.pop("converged")
        return d


def pattern_metrics(f: np.ndarray, geom: ArrayGeometry, rng: AngularRange,
                    samples: int = 256 * 256) -> PatternMetrics:
    """Ripple factor and power ratio of a beam over ``rng``.

    Mean and RMS ripple of |v^H f| use a midpoint tensor grid with about
    ``samples`` points; in-band power is exact.  The power ratio divides by
    4N, the all-directions power of a unit-modulus beam.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    side = int(math.isqrt(samples))
    xs = rng.x_lo + (np.arange(side) + 0.5) * (rng.x_hi - rng.x_lo) / side
    ys = rng.y_lo + (np.arange(side) + 0.5) * (rng.y_hi - rng.y_lo) / side
    amp = pattern_amplitude(f, geom, xs, ys)
    v_mean = float(amp.mean())
    ripple = float(np.sqrt(np.mean((amp - v_mean) ** 2)))
    p = in_band_power(f, coverage_matrix(geom, rng))
    return PatternMetrics(ripple / v_mean if v_mean > 0 else math.inf, v_mean, p,
                          p / (4 * geom.n))
