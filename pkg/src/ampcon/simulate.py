"""Monte-Carlo bit error rates and beam amplitude statistics.

Random draws come from counter-based substreams, one generator per
(seed, curve point, batch) triple, so a curve does not depend on how
batches are spread over worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import erfc

from .arraymodel import AngularRange, pattern_amplitude_at, steering_vector
from .beamforming import BeamVector
from .constellation import Constellation
from .labeling import hamming_table

ENERGY_CONVENTIONS = ("peak", "mean")


def qfunc(x):
    """Gaussian tail probability Q(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


@dataclass
class AwgnConfig:
    """Monte-Carlo settings shared by the AWGN and directional simulations.

    ``energy`` picks the symbol energy used to turn Eb/N0 into a noise
    level: ``"peak"`` (largest point energy, the fair choice when every
    design meets the same amplitude bound) or ``"mean"``.
    ``max_symbols = 0`` requests a vacuous run with an empty curve.
    """

    ebn0_db_list: Sequence[float]
    min_errors: int = 200
    max_symbols: int = 1_000_000
    seed: int = 0
    batch_size: int = 50_000
    energy: str = "peak"
    workers: int = 1

    def __post_init__(self):
        self.ebn0_db_list = [float(x) for x in self.ebn0_db_list]
        if self.min_errors < 100:
            raise ValueError("min_errors must be at least 100")
        if self.max_symbols != 0 and self.max_symbols < 10_000:
            raise ValueError("max_symbols must be 0 or at least 10^4")
        if self.batch_size < 1 or self.workers < 1:
            raise ValueError("batch_size and workers must be positive")
        if self.energy not in ENERGY_CONVENTIONS:
            raise ValueError(f"energy must be one of {ENERGY_CONVENTIONS}")


@dataclass
class ChannelConfig:
    pathloss_db: float = 20.0
    nlos_gap_db: float = 10.0
    range: AngularRange = field(default_factory=lambda: AngularRange(-0.5, 0.5, -0.25, 0.25))
    realizations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")

    @property
    def los_gain(self) -> float:
        return 10.0 ** (-self.pathloss_db / 20.0)

    @property
    def nlos_variance(self) -> float:
        return 10.0 ** ((-self.pathloss_db - self.nlos_gap_db) / 10.0)


@dataclass
class BerPoint:
    ebn0_db: float
    ber: float
    symbols: int
    errors: int
    symbol_energy: float = float("nan")  # empirical mean |s|^2 over the run


@dataclass
class BerCurve:
    points: list = field(default_factory=list)
    label: str = ""

    def csv_rows(self):
        return [(p.ebn0_db, p.ber, p.symbols, p.errors) for p in self.points]

    @property
    def ebn0_db(self) -> np.ndarray:
        return np.array([p.ebn0_db for p in self.points])

    @property
    def ber(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])


CSV_HEADER = ("ebn0_db", "ber", "symbols", "errors")


def _stream(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in key])))


def symbol_energy(c: Constellation, energy: str) -> float:
    return c.peak_energy() if energy == "peak" else c.mean_energy()


def noise_variance(es: float, bits: int, ebn0_db: float) -> float:
    """Total complex noise variance N0 for symbol energy ``es``."""
    return es / (bits * 10.0 ** (ebn0_db / 10.0))


def frame_angle(c: Constellation) -> float:
    """Phase of the first non-zero point; noise is drawn in this frame."""
    nz = np.flatnonzero(np.abs(c.points) > 0)
    return float(np.angle(c.points[nz[0]]))


class _Detector:
    """Nearest-point detection and bit-error counting."""

    def __init__(self, c: Constellation):
        if c.bit_map is None:
            raise ValueError("constellation has no bit labels")
        self.points = c.points
        self.P = np.vstack([c.points.real, c.points.imag])
        self.half_norm = 0.5 * np.abs(c.points) ** 2
        lab = c.bit_map
        self.H = hamming_table(c.M)[np.ix_(lab, lab)]

    def detect(self, y: np.ndarray) -> np.ndarray:
        score = y.real[:, None] * self.P[0] + y.imag[:, None] * self.P[1] - self.half_norm
        return np.argmax(score, axis=1)

    def bit_errors(self, tx: np.ndarray, y: np.ndarray) -> int:
        return int(self.H[tx, self.detect(y)].sum())


def _awgn_batch(det: _Detector, c: Constellation, sigma2: float, rot: complex,
                seed: int, point: int, batch: int, size: int):
    g = _stream(seed, point, batch)
    tx = g.integers(0, c.M, size)
    noise = (g.standard_normal(size) + 1j * g.standard_normal(size)) * math.sqrt(sigma2 / 2)
    y = c.points[tx] + rot * noise
    return det.bit_errors(tx, y), float(np.sum(np.abs(c.points[tx]) ** 2))


def awgn_ber(c: Constellation, cfg: AwgnConfig) -> BerCurve:
    """Uncoded BER of ``c`` over AWGN with nearest-point detection.

    Each point stops once ``min_errors`` bit errors are seen or
    ``max_symbols`` symbols are sent, whichever comes first.
    """
    curve = BerCurve(label=c.name)
    if cfg.max_symbols == 0:
        return curve
    det = _Detector(c)
    bits = c.bits_per_symbol
    es = symbol_energy(c, cfg.energy)
    rot = np.exp(1j * frame_angle(c))
    n_batches = -(-cfg.max_symbols // cfg.batch_size)
    sizes = [min(cfg.batch_size, cfg.max_symbols - b * cfg.batch_size) for b in range(n_batches)]
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for k, ebn0 in enumerate(cfg.ebn0_db_list):
            if math.isinf(ebn0) and ebn0 > 0:
                curve.points.append(BerPoint(ebn0, 0.0, cfg.max_symbols, 0, c.mean_energy()))
                continue
            sigma2 = noise_variance(es, bits, ebn0)
            errors = symbols = 0
            energy = 0.0
            b = 0
            while b < n_batches and errors < cfg.min_errors:
                # evaluate a block of batches, then consume them in order
                block = range(b, min(n_batches, b + cfg.workers))
                args = [(det, c, sigma2, rot, cfg.seed, k, i, sizes[i]) for i in block]
                if pool is None:
                    results = [_awgn_batch(*a) for a in args]
                else:
                    results = list(pool.map(lambda a: _awgn_batch(*a), args))
                for i, (e, en) in zip(block, results):
                    errors += e
                    energy += en
                    symbols += sizes[i]
                    b = i + 1
                    if errors >= cfg.min_errors:
                        break
            curve.points.append(BerPoint(ebn0, errors / (symbols * bits), symbols, errors,
                                         energy / symbols))
    finally:
        if pool is not None:
            pool.shutdown()
    return curve


def sample_beam_amplitude(f: BeamVector, rng_range: AngularRange, samples: int,
                          seed: int = 0) -> np.ndarray:
    """|v^H f| at ``samples`` angles drawn uniformly over ``rng_range``."""
    g = _stream(seed, 0)
    px = g.uniform(rng_range.x_lo, rng_range.x_hi, samples)
    py = g.uniform(rng_range.y_lo, rng_range.y_hi, samples)
    return pattern_amplitude_at(f.values, f.geometry, px, py)


def amplitude_db(amp) -> np.ndarray:
    """Amplitude on the plotting scale 20 log10(amp / 10)."""
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.asarray(amp, dtype=float) / 10.0)


def empirical_cdf(values_db: np.ndarray, bin_db: float = 0.5) -> list[tuple[float, float]]:
    """CDF at bin edges spaced ``bin_db`` apart, covering all finite values."""
    v = np.sort(np.asarray(values_db, dtype=float))
    finite = v[np.isfinite(v)]
    lo = math.floor(finite.min() / bin_db) - 1
    hi = math.ceil(finite.max() / bin_db)
    edges = np.arange(lo, hi + 1) * bin_db
    cdf = np.searchsorted(v, edges, side="right") / v.size
    return [(float(e), float(p)) for e, p in zip(edges, cdf)]


def beam_amplitude_cdf(f: BeamVector, rng_range: AngularRange, samples: int = 100_000,
                       seed: int = 0) -> list[tuple[float, float]]:
    if samples < 10_000:
        raise ValueError("need at least 10^4 samples")
    return empirical_cdf(amplitude_db(sample_beam_amplitude(f, rng_range, samples, seed)))


def draw_channel_gains(f: BeamVector, ch: ChannelConfig) -> np.ndarray:
    """Effective scalar gains g = h^T f, one per channel realisation."""
    geom = f.geometry
    sigma = math.sqrt(ch.nlos_variance / 2)
    gains = np.empty(ch.realizations, dtype=complex)
    for r in range(ch.realizations):
        g = _stream(ch.seed, r)
        px = g.uniform(ch.range.x_lo, ch.range.x_hi)
        py = g.uniform(ch.range.y_lo, ch.range.y_hi)
        h = ch.los_gain * steering_vector(geom, px, py)
        h = h + sigma * (g.standard_normal(geom.n) + 1j * g.standard_normal(geom.n))
        gains[r] = h @ f.values
    return gains


def directional_ber(c: Constellation, f: BeamVector, ch: ChannelConfig,
                    cfg: AwgnConfig) -> BerCurve:
    """BER of backscatter through ``f`` over LoS plus NLoS channels.

    The receiver knows each realisation's gain g and detects y / g.
    Every realisation carries ``max_symbols // realizations`` symbols;
    there is no early stop, so all realisations weigh equally.
    """
    curve = BerCurve(label=c.name)
    per = cfg.max_symbols // ch.realizations
    if per == 0:
        return curve
    det = _Detector(c)
    bits = c.bits_per_symbol
    es = symbol_energy(c, cfg.energy)
    gains = draw_channel_gains(f, ch)
    for k, ebn0 in enumerate(cfg.ebn0_db_list):
        if math.isinf(ebn0) and ebn0 > 0:
            n = per * ch.realizations
            curve.points.append(BerPoint(ebn0, 0.0, n, 0, c.mean_energy()))
            continue
        sigma = math.sqrt(noise_variance(es, bits, ebn0) / 2)
        errors = 0
        energy = 0.0
        for r, gain in enumerate(gains):
            g = _stream(cfg.seed, k, r)
            tx = g.integers(0, c.M, per)
            noise = (g.standard_normal(per) + 1j * g.standard_normal(per)) * sigma
            y = gain * c.points[tx] + noise
            errors += det.bit_errors(tx, y / gain)
            energy += float(np.sum(np.abs(c.points[tx]) ** 2))
        n = per * ch.realizations
        curve.points.append(BerPoint(ebn0, errors / (n * bits), n, errors, energy / n))
    return curve


def ebn0_at_ber(curve: BerCurve, target: float) -> Optional[float]:
    """Eb/N0 where the curve first falls to ``target``, log-linear interpolation."""
    pts = [(p.ebn0_db, p.ber) for p in curve.points if math.isfinite(p.ebn0_db)]
    for (x0, b0), (x1, b1) in zip(pts, pts[1:]):
        if b0 >= target > b1:
            if b1 <= 0:
                return x1  # no errors seen at x1; report the bracket's upper end
            t = (math.log10(b0) - math.log10(target)) / (math.log10(b0) - math.log10(b1))
            return x0 + t * (x1 - x0)
    return None
