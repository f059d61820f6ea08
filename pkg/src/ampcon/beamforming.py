"""Constant-modulus reflection pattern synthesis.

Each axis is designed separately by a max-min constant-modulus power
iteration: repeatedly find the grid angle with the weakest combined
objective |v^H f|^2 + alpha f^H V f and take one power-iteration step on
that angle's matrix, followed by per-entry phase normalisation.  The
planar beam is the Kronecker product of the two axis beams.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .arraymodel import (AngularRange, ArrayGeometry, axis_coverage, axis_grid,
                         axis_steering)

log = logging.getLogger(__name__)

UNIT = "unit-modulus"
BOUNDED = "amplitude-bounded"


@dataclass
class BeamVector:
    """Reflection coefficients of an n_x by n_y array, flat index kx * n_y + ky."""

    values: np.ndarray
    n_x: int
    n_y: int
    modulus_contract: str = UNIT
    fx: Optional[np.ndarray] = None
    fy: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).ravel()
        if self.values.size != self.n_x * self.n_y:
            raise ValueError("beam length does not match the array size")
        mag = np.abs(self.values)
        if self.modulus_contract == UNIT:
            if np.any(np.abs(mag - 1) > 1e-12):
                raise ValueError("unit-modulus beam has entries off the unit circle")
        elif self.modulus_contract == BOUNDED:
            if np.any(mag > 1 + 1e-12):
                raise ValueError("amplitude-bounded beam has entries above 1")
        else:
            raise ValueError(f"unknown modulus contract {self.modulus_contract!r}")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.n_x, self.n_y)

    @classmethod
    def from_factors(cls, fx, fy, modulus_contract: str = UNIT) -> "BeamVector":
        fx = np.asarray(fx, dtype=complex).ravel()
        fy = np.asarray(fy, dtype=complex).ravel()
        return cls(np.kron(fx, fy), fx.size, fy.size, modulus_contract, fx, fy)

    def to_json_dict(self, dense: bool = False) -> dict:
        def cx(v):
            return None if v is None else [[float(z.real), float(z.imag)] for z in v]

        d = {"n_x": self.n_x, "n_y": self.n_y, "fx": cx(self.fx), "fy": cx(self.fy)}
        if dense or self.fx is None:
            d["f"] = cx(self.values)
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "BeamVector":
        def cx(v):
            return np.array([complex(a, b) for a, b in v])

        if d.get("fx") is not None and d.get("fy") is not None:
            fx, fy = cx(d["fx"]), cx(d["fy"])
            contract = UNIT if np.allclose(np.abs(np.kron(fx, fy)), 1, atol=1e-12) else BOUNDED
            return cls.from_factors(fx, fy, contract)
        f = cx(d["f"])
        contract = UNIT if np.allclose(np.abs(f), 1, atol=1e-12) else BOUNDED
        return cls(f, int(d["n_x"]), int(d["n_y"]), contract)


@dataclass
class CmpimConfig:
    """Settings for the max-min power iteration.

    ``step`` and ``tol`` default to 0.1 / lambda_max of the band-centre
    objective matrix and 1e-8 * sqrt(n).  The step is halved whenever the
    worst grid objective has not improved for ``patience`` iterations,
    which is what lets the max-min iteration settle under ``tol``.
    ``grid_oversample`` refines the max-min grid below the 2/n spacing.
    """

    alpha: float = 4.0
    step: Optional[float] = None
    tol: Optional[float] = None
    max_iters: int = 10_000
    restarts: int = 64
    seed: int = 0
    grid_oversample: int = 4
    patience: int = 50
    workers: int = 1

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1 or self.restarts < 1 or self.grid_oversample < 1:
            raise ValueError("max_iters, restarts and grid_oversample must be >= 1")
        if self.patience < 1 or self.workers < 1:
            raise ValueError("patience and workers must be >= 1")


@dataclass
class P6Diagnostics:
    iterations: int
    converged: bool
    achieved_min: float
    objective_trace: list = field(default_factory=list)
    argmin_trace: list = field(default_factory=list)
    restart: int = 0
    zero_entries: int = 0
    step: float = 0.0

    def rows(self):
        """(iter, min_objective, argmin_psi) rows for CSV output."""
        return [(i, o, p) for i, (o, p) in enumerate(zip(self.objective_trace, self.argmin_trace))]


def objective_matrix(n: int, psi: float, alpha: float, coverage: np.ndarray) -> np.ndarray:
    """v(psi) v(psi)^H + alpha * V for one axis."""
    v = axis_steering(n, psi)
    return np.outer(v, v.conj()) + alpha * coverage


def _normalize(t: np.ndarray, prev: np.ndarray) -> tuple[np.ndarray, int]:
    mag = np.abs(t)
    zero = mag == 0
    out = np.where(zero, prev, t / np.where(zero, 1.0, mag))
    return out, int(zero.sum())


def cmpim_step(f: np.ndarray, m: np.ndarray, step: float) -> np.ndarray:
    """One constant-modulus power-iteration update of ``f`` for matrix ``m``.

    An entry whose update lands exactly on zero keeps its previous phase.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    f = np.asarray(f, dtype=complex)
    out, _ = _normalize(f + step * (m @ f), f)
    return out


class _AxisProblem:
    """Grid, coverage matrix and objective evaluation for one axis."""

    def __init__(self, n: int, lo: float, hi: float, cfg: CmpimConfig):
        self.n, self.alpha = n, cfg.alpha
        self.grid = axis_grid(n, lo, hi, cfg.grid_oversample)
        if self.grid.size == 0:
            raise ValueError(f"angle grid over [{lo}, {hi}) is empty for n={n}")
        self.A = axis_steering(n, self.grid)
        self.V = axis_coverage(n, lo, hi)
        center = objective_matrix(n, 0.5 * (lo + hi), cfg.alpha, self.V)
        self.step = cfg.step if cfg.step is not None else 0.1 / np.linalg.eigvalsh(center)[-1]
        self.tol = cfg.tol if cfg.tol is not None else 1e-8 * math.sqrt(n)

    def objectives(self, f: np.ndarray) -> np.ndarray:
        beam = np.abs(self.A.conj() @ f) ** 2
        return beam + self.alpha * float(np.real(f.conj() @ (self.V @ f)))

    def matvec(self, k: int, f: np.ndarray) -> np.ndarray:
        v = self.A[k]
        return v * (v.conj() @ f) + self.alpha * (self.V @ f)


def _run_once(prob: _AxisProblem, f0: np.ndarray, cfg: CmpimConfig, restart: int):
    f = f0.copy()
    step = prob.step
    vals = prob.objectives(f)
    best_min, best_f = float(vals.min()), f
    stall, zeros, converged = 0, 0, False
    trace, where = [], []
    it = 0
    for it in range(1, cfg.max_iters + 1):
        k = int(np.argmin(vals))  # first index on ties = smallest psi
        trace.append(float(vals[k]))
        where.append(float(prob.grid[k]))
        fn, nz = _normalize(f + step * prob.matvec(k, f), f)
        zeros += nz
        moved = float(np.linalg.norm(fn - f))
        f = fn
        vals = prob.objectives(f)
        m = float(vals.min())
        if m > best_min:
            best_min, best_f, stall = m, f, 0
        else:
            stall += 1
            if stall >= cfg.patience:
                step *= 0.5
                stall = 0
        if moved <= prob.tol:
            converged = True
            break
    if zeros:
        log.warning("restart %d: %d zero-magnitude updates kept their previous phase", restart, zeros)
    diag = P6Diagnostics(it, converged, best_min, trace, where, restart, zeros, step)
    return best_f, diag


def random_unit_modulus(n: int, rng: np.random.Generator) -> np.ndarray:
    return np.exp(1j * rng.uniform(0.0, 2 * np.pi, n))


def solve_p6(n: int, axis_range: tuple[float, float], cfg: CmpimConfig = CmpimConfig(),
             init: Optional[np.ndarray] = None) -> tuple[np.ndarray, P6Diagnostics]:
    """Max-min constant-modulus beam for one axis.

    Runs ``cfg.restarts`` random starts (or the single ``init``) and keeps
    the beam with the largest worst-case grid objective; ties go to the
    lower restart index.
    """
    lo, hi = axis_range
    prob = _AxisProblem(n, lo, hi, cfg)
    if n == 1:
        # a single element has only a global phase; pin it to 1
        f = np.ones(1, dtype=complex)
        return f, P6Diagnostics(0, True, float(prob.objectives(f).min()), step=prob.step)
    if init is not None:
        f0 = np.asarray(init, dtype=complex)
        if f0.size != n or np.any(np.abs(np.abs(f0) - 1) > 1e-12):
            raise ValueError("init must be a unit-modulus vector of length n")
        return _run_once(prob, f0, cfg, 0)

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    starts = [random_unit_modulus(n, np.random.default_rng(s)) for s in seeds]

    def job(i):
        return _run_once(prob, starts[i], cfg, i)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(job, range(cfg.restarts)))
    else:
        results = [job(i) for i in range(cfg.restarts)]
    best = max(range(len(results)), key=lambda i: (results[i][1].achieved_min, -i))
    f, diag = results[best]
    if not diag.converged:
        warnings.warn(f"axis design hit max_iters={cfg.max_iters} before converging",
                      RuntimeWarning, stacklevel=2)
    return f, diag


def solve_p5_separable(geom: ArrayGeometry, rng: AngularRange,
                       cfg: CmpimConfig = CmpimConfig()):
    """Planar unit-modulus beam f = f_x kron f_y; returns (beam, (diag_x, diag_y))."""
    fx, dx = solve_p6(geom.n_x, rng.x, cfg)
    fy, dy = solve_p6(geom.n_y, rng.y, replace(cfg, seed=cfg.seed + 1))
    return BeamVector.from_factors(fx, fy, UNIT), (dx, dy)


def axis_min_objective(f: np.ndarray, axis_range: tuple[float, float],
                       cfg: CmpimConfig = CmpimConfig()) -> float:
    """Worst grid objective of an arbitrary axis beam under ``cfg``'s grid and alpha."""
    f = np.asarray(f, dtype=complex)
    prob = _AxisProblem(f.size, axis_range[0], axis_range[1], cfg)
    return float(prob.objectives(f).min())


def ls_axis_beam(n: int, lo: float, hi: float, grid_oversample: int = 4,
                 ridge: float = 1e-9) -> np.ndarray:
    """Least-squares fit of v(psi)^H f to the 0/1 band mask, before normalisation."""
    if grid_oversample < 2:
        raise ValueError("grid_oversample must be >= 2")
    K = grid_oversample * n
    psi = -1.0 + 2.0 * np.arange(K) / K
    B = axis_steering(n, psi).conj()  # row k maps f to v(psi_k)^H f
    mask = ((psi >= lo) & (psi < hi)).astype(float)
    G = B.conj().T @ B
    rhs = B.conj().T @ mask
    while True:
        A = G + ridge * np.eye(n)
        if np.linalg.cond(A) < 1e12:
            break
        ridge *= 10
        warnings.warn(f"normal equations ill-conditioned; ridge raised to {ridge:g}",
                      RuntimeWarning, stacklevel=2)
    return np.linalg.solve(A, rhs)


def normalized_ls_baseline(geom: ArrayGeometry, rng: AngularRange,
                           grid_oversample: int = 4) -> BeamVector:
    """Per-axis LS mask fit scaled to peak modulus one, composed by Kronecker."""
    fx = ls_axis_beam(geom.n_x, rng.x_lo, rng.x_hi, grid_oversample)
    fy = ls_axis_beam(geom.n_y, rng.y_lo, rng.y_hi, grid_oversample)
    fx = fx / np.abs(fx).max()
    fy = fy / np.abs(fy).max()
    return BeamVector.from_factors(fx, fy, BOUNDED)
