"""APSK constellation design under a peak-amplitude constraint.

Rings are built from the innermost outward: each new ring gets the phase
offset that maximises its angular separation from the previous ring and
the smallest radius that keeps both the intra-ring and the adjacent
inter-ring distance at or above the target.  The ring partition itself
is found by exhaustive search, scored on the realised point set.

PSK and QAM baselines and an exact O(M^2) distance oracle live here too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
# relative slack when testing r_{l+1} > r_l
RADIUS_RTOL = 1e-9
# relative slack when comparing realised d_min values across candidates
SCORE_RTOL = 1e-12


class InfeasibleCombination(ValueError):
    """A ring partition cannot be realised with strictly increasing radii."""


@dataclass(frozen=True)
class RingSpec:
    """Number of points on each ring, innermost first."""

    points_per_ring: tuple[int, ...]

    def __post_init__(self):
        n = tuple(int(v) for v in self.points_per_ring)
        object.__setattr__(self, "points_per_ring", n)
        if not n:
            raise ValueError("a ring specification needs at least one ring")
        if any(v < 1 for v in n):
            raise ValueError(f"ring sizes must be positive, got {n}")
        if any(a > b for a, b in zip(n, n[1:])):
            raise ValueError(f"ring sizes must be non-decreasing, got {n}")
        if any(v == 1 for v in n[1:]):
            raise ValueError("only the innermost ring may hold a single point")
        if n == (1,):
            raise ValueError("a lone centre point is not a constellation")

    @property
    def order(self) -> int:
        return sum(self.points_per_ring)

    @property
    def n_rings(self) -> int:
        return len(self.points_per_ring)

    @property
    def has_center(self) -> bool:
        return self.points_per_ring[0] == 1


@dataclass(frozen=True)
class ApskParams:
    """Ring sizes, radii and reference phases of an APSK constellation.

    ``phases`` are kept as accumulated offsets (omega_{l+1} = omega_l +
    delta); :meth:`canonical_phases` reduces them into [0, 2*pi/N_l).
    Both give the same point set.
    """

    rings: RingSpec
    radii: tuple[float, ...]
    phases: tuple[float, ...]
    amplitude_bound: float = 1.0

    def __post_init__(self):
        if self.amplitude_bound <= 0:
            raise ValueError("amplitude bound must be positive")
        L = self.rings.n_rings
        if len(self.radii) != L or len(self.phases) != L:
            raise ValueError("radii and phases must have one entry per ring")
        r = self.radii
        if any(v < 0 or v > self.amplitude_bound * (1 + RADIUS_RTOL) for v in r):
            raise ValueError(f"radii must lie in [0, A], got {r}")
        for a, b in zip(r, r[1:]):
            if not b > a * (1 + RADIUS_RTOL):
                raise ValueError(f"radii must be strictly increasing, got {r}")
        if r[0] == 0 and not self.rings.has_center:
            raise ValueError("zero radius requires a single centre point")

    def canonical_phases(self) -> tuple[float, ...]:
        return tuple(
            math.fmod(w, TWO_PI / n) % (TWO_PI / n)
            for w, n in zip(self.phases, self.rings.points_per_ring)
        )

    def ring_points(self) -> list[np.ndarray]:
        out = []
        for n, r, w in zip(self.rings.points_per_ring, self.radii, self.phases):
            k = np.arange(n)
            out.append(r * np.exp(1j * (TWO_PI * k / n + w)))
        return out

    def points(self) -> np.ndarray:
        return np.concatenate(self.ring_points())

    def ring_index(self) -> np.ndarray:
        """Ring number of each point in :meth:`points` order."""
        return np.repeat(np.arange(self.rings.n_rings), self.rings.points_per_ring)

    def scaled(self, amplitude_bound: float) -> "ApskParams":
        s = amplitude_bound / self.amplitude_bound
        return ApskParams(self.rings, tuple(s * r for r in self.radii),
                          self.phases, amplitude_bound)


@dataclass
class Constellation:
    """An ordered complex point set with an optional APSK description.

    ``bit_map[i]`` is the integer label carried by ``points[i]``.
    """

    points: np.ndarray
    amplitude_bound: float
    params: Optional[ApskParams] = None
    bit_map: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).ravel()
        if self.points.size < 2:
            raise ValueError("a constellation needs at least two points")
        peak = np.abs(self.points).max()
        if peak > self.amplitude_bound + 1e-12:
            raise ValueError(f"peak modulus {peak} exceeds bound {self.amplitude_bound}")
        if self.bit_map is not None:
            self.bit_map = np.asarray(self.bit_map, dtype=np.int64)
            if sorted(self.bit_map.tolist()) != list(range(self.M)):
                raise ValueError("bit_map must be a permutation of 0..M-1")

    @property
    def M(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        m = int(round(math.log2(self.M)))
        if 2 ** m != self.M:
            raise ValueError(f"M={self.M} is not a power of two")
        return m

    def peak_energy(self) -> float:
        return float(np.max(np.abs(self.points) ** 2))

    def mean_energy(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))

    def rotated(self, theta: float) -> "Constellation":
        params = None
        if self.params is not None:
            p = self.params
            params = ApskParams(p.rings, p.radii, tuple(w + theta for w in p.phases),
                                p.amplitude_bound)
        return Constellation(self.points * np.exp(1j * theta), self.amplitude_bound,
                             params, self.bit_map, self.name)

    def rescaled_mean_power(self, power: float = 1.0) -> "Constellation":
        """Copy scaled to mean energy ``power`` (the amplitude bound follows)."""
        s = math.sqrt(power / self.mean_energy())
        params = self.params.scaled(self.params.amplitude_bound * s) if self.params else None
        return Constellation(self.points * s, self.amplitude_bound * s, params,
                             self.bit_map, self.name)

    def to_json_dict(self) -> dict:
        rings = []
        if self.params is not None:
            p = self.params
            rings = [{"n": n, "r": r, "omega": w}
                     for n, r, w in zip(p.rings.points_per_ring, p.radii, p.phases)]
        return {
            "M": self.M,
            "amplitude_bound": self.amplitude_bound,
            "rings": rings,
            "points": [[float(z.real), float(z.imag)] for z in self.points],
            "bit_map": None if self.bit_map is None else [int(b) for b in self.bit_map],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Constellation":
        A = float(d["amplitude_bound"])
        params = None
        if d.get("rings"):
            rings = RingSpec(tuple(int(r["n"]) for r in d["rings"]))
            params = ApskParams(rings, tuple(float(r["r"]) for r in d["rings"]),
                                tuple(float(r["omega"]) for r in d["rings"]), A)
        pts = np.array([complex(re, im) for re, im in d["points"]])
        if len(pts) != int(d["M"]):
            raise ValueError("point count does not match M")
        return cls(pts, A, params, d.get("bit_map"))


@dataclass
class DistanceReport:
    d_min: float
    arg_pair: tuple[int, int]
    per_ring_intra: list = field(default_factory=list)
    inter_adjacent: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# closed-form pieces


def intra_ring_dmin(r: float, n: int) -> float:
    """Smallest distance between neighbours on a ring of ``n`` points."""
    if n < 2:
        raise ValueError("a ring needs at least two points to have an intra distance")
    if r < 0:
        raise ValueError("radius must be non-negative")
    return math.sqrt(2 * r * r - 2 * r * r * math.cos(TWO_PI / n))


def inter_ring_dmin(r1: float, r2: float, phi: float) -> float:
    return math.sqrt(max(0.0, r1 * r1 + r2 * r2 - 2 * r1 * r2 * math.cos(phi)))


def min_inter_ring_phase(n_l: int, n_next: int, delta_omega: float) -> float:
    """Minimum angle between any point of ring ``l`` and any point of ring ``l+1``.

    Exhaustive over all n_l * n_next point pairs.
    """
    if n_l < 1 or n_next < 1:
        raise ValueError("ring sizes must be positive")
    k1 = np.arange(n_l)[:, None] / n_l
    k2 = np.arange(n_next)[None, :] / n_next
    c = np.cos(TWO_PI * (k1 - k2) + delta_omega).max()
    return float(math.acos(min(1.0, max(-1.0, c))))


def optimal_phase_shift(n_l: int, n_next: int) -> tuple[float, float]:
    """Return ``(delta_omega, phi)``, both equal to pi / lcm(n_l, n_next)."""
    if n_l < 1 or n_next < 1:
        raise ValueError("ring sizes must be positive")
    v = math.pi / math.lcm(n_l, n_next)
    return v, v


def radius_bounds(r_prev: float, n_next: int, phi_star: float,
                  d_target: float) -> tuple[float, Optional[float]]:
    """The intra-ring and adjacent inter-ring lower bounds on the next radius.

    The second bound is ``None`` when its discriminant is negative.
    """
    if n_next < 2:
        raise ValueError("the next ring needs at least two points")
    if d_target <= 0 or r_prev < 0:
        raise ValueError("need r_prev >= 0 and d_target > 0")
    b1 = math.sqrt(d_target ** 2 / (2 - 2 * math.cos(TWO_PI / n_next)))
    c = math.cos(phi_star)
    disc = r_prev ** 2 * c * c - r_prev ** 2 + d_target ** 2
    b2 = r_prev * c + math.sqrt(disc) if disc >= 0 else None
    return b1, b2


def next_ring_radius(r_prev: float, n_next: int, phi_star: float, d_target: float) -> float:
    b1, b2 = radius_bounds(r_prev, n_next, phi_star, d_target)
    r = b1 if b2 is None else max(b1, b2)
    if not r > r_prev * (1 + RADIUS_RTOL):
        raise InfeasibleCombination(
            f"radius {r} does not exceed previous radius {r_prev} for n={n_next}")
    return r


def _seed_rings(n: Sequence[int]) -> tuple[list[float], list[float], float, int]:
    """Unnormalised radii/phases for the first one or two rings and the target distance."""
    if n[0] == 1:
        # centre point: the second ring is the reference, at unit radius
        d = min(intra_ring_dmin(1.0, n[1]), 1.0)
        dw, _ = optimal_phase_shift(1, n[1])
        return [0.0, 1.0], [0.0, dw], d, 2
    return [1.0], [0.0], intra_ring_dmin(1.0, n[0]), 1


def construct_apsk(rings: RingSpec | Sequence[int], amplitude_bound: float = 1.0) -> ApskParams:
    """Build radii and phases for a fixed ring partition, outermost radius = A."""
    if not isinstance(rings, RingSpec):
        rings = RingSpec(tuple(rings))
    n = rings.points_per_ring
    if len(n) == 1:
        return ApskParams(rings, (float(amplitude_bound),), (0.0,), amplitude_bound)
    r, w, d, start = _seed_rings(n)
    for l in range(start, len(n)):
        dw, phi = optimal_phase_shift(n[l - 1], n[l])
        r.append(next_ring_radius(r[-1], n[l], phi, d))
        w.append(w[-1] + dw)
    scale = amplitude_bound / r[-1]
    return ApskParams(rings, tuple(v * scale for v in r), tuple(w), amplitude_bound)


def model_dmin(params: ApskParams) -> float:
    """d_min counting intra-ring and adjacent inter-ring pairs only.

    This is an upper bound on the realised d_min; non-adjacent ring pairs
    are ignored.
    """
    n, r, w = params.rings.points_per_ring, params.radii, params.phases
    vals = [intra_ring_dmin(ri, ni) for ni, ri in zip(n, r) if ni >= 2]
    for l in range(len(n) - 1):
        phi = min_inter_ring_phase(n[l], n[l + 1], w[l + 1] - w[l])
        vals.append(inter_ring_dmin(r[l], r[l + 1], phi))
    return min(vals)


# ---------------------------------------------------------------------------
# exact distance oracle


def _pairwise_min(a: np.ndarray, b: Optional[np.ndarray] = None, chunk: int = 2048):
    """Exact minimum |a_i - b_j| and its indices; excludes i == j when b is None."""
    same = b is None
    b = a if same else b
    best, arg = math.inf, (-1, -1)
    for s in range(0, a.size, chunk):
        blk = np.abs(a[s:s + chunk, None] - b[None, :])
        if same:
            i = np.arange(blk.shape[0])
            blk[i, s + i] = np.inf
            # keep i < j so arg_pair is ordered
            blk[np.tril_indices(blk.shape[0], k=s, m=b.size)] = np.inf
        k = int(np.argmin(blk))
        v = float(blk.flat[k])
        if v < best:
            best, arg = v, (s + k // b.size, k % b.size)
    return best, arg


def brute_force_dmin(c: Constellation | np.ndarray) -> DistanceReport:
    """Exact minimum pairwise distance by full O(M^2) scan."""
    pts = c.points if isinstance(c, Constellation) else np.asarray(c, dtype=complex).ravel()
    if pts.size < 2:
        raise ValueError("need at least two points")
    d, arg = _pairwise_min(pts)
    report = DistanceReport(d, arg)
    params = c.params if isinstance(c, Constellation) else None
    if params is not None:
        rings = params.ring_points()
        report.per_ring_intra = [_pairwise_min(p)[0] if p.size > 1 else None for p in rings]
        report.inter_adjacent = [_pairwise_min(a, b)[0] for a, b in zip(rings, rings[1:])]
    return report


def apsk_constellation(params: ApskParams, name: str = "") -> Constellation:
    return Constellation(params.points(), params.amplitude_bound, params,
                         name=name or f"{params.rings.order}-APSK")


# ---------------------------------------------------------------------------
# Algorithm-1 search


def enumerate_ring_specs(M: int, max_rings: int = 6, prune: bool = True) -> Iterator[RingSpec]:
    """All non-decreasing ring partitions of ``M`` with at most ``max_rings`` rings.

    With ``prune`` two-point rings are skipped (they never win for M <= 64).
    """
    def rec(rem, lo, cur):
        if rem == 0:
            if tuple(cur) != (1,):
                yield RingSpec(tuple(cur))
            return
        if len(cur) == max_rings:
            return
        first = not cur
        for v in range(lo, rem + 1):
            if v == 1 and not first:
                continue
            if prune and v == 2:
                continue
            yield from rec(rem - v, v, cur + [v])

    yield from rec(M, 1, [])


def _area_proportional_specs(M: int, max_rings: int, prune: bool) -> list[tuple[int, ...]]:
    """Ring partitions with sizes roughly proportional to ring circumference."""
    out = set()
    for L in range(1, max_rings + 1):
        for center in (False, True):
            k = L - 1 if center else L
            rem = M - 1 if center else M
            if k < 1 or rem < k:
                continue
            for shift in (0.0, 0.5, 1.0, 2.0):
                w = np.arange(1, k + 1) + shift
                raw = rem * w / w.sum()
                n = np.floor(raw).astype(int)
                n[np.argsort(raw - n)[::-1][: rem - n.sum()]] += 1
                n = sorted(int(v) for v in n)
                spec = ([1] if center else []) + n
                if min(n) < 2 or (prune and 2 in spec) or (len(spec) == 1 and spec[0] == 1):
                    continue
                out.add(tuple(spec))
    return sorted(out)


def design_best_apsk(M: int, amplitude_bound: float = 1.0, max_rings: int = 6,
                     prune: bool = True) -> tuple[ApskParams, DistanceReport]:
    """Search every ring partition and keep the one with the largest realised d_min.

    Candidates are visited depth-first; a partial partition is dropped once
    its radius already rules out beating the incumbent (the relaxed model
    d_min bounds the realised one from above).  Ties within a relative
    1e-12 go to fewer rings, then the lexicographically smallest partition.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    if max_rings < 1:
        raise ValueError("max_rings must be >= 1")

    best: dict = {"d": -1.0, "rings": None, "params": None, "report": None}

    def consider(n: tuple[int, ...], r: list[float], w: list[float], d: float):
        model = d * amplitude_bound / r[-1]
        if best["rings"] is not None and model < best["d"] * (1 - SCORE_RTOL):
            return
        rings = RingSpec(n)
        params = ApskParams(rings, tuple(v * amplitude_bound / r[-1] for v in r),
                            tuple(w), amplitude_bound)
        rep = brute_force_dmin(apsk_constellation(params))
        if best["rings"] is not None:
            if abs(rep.d_min - best["d"]) <= SCORE_RTOL * best["d"]:
                if (rings.n_rings, n) >= (best["rings"].n_rings, best["rings"].points_per_ring):
                    return
            elif rep.d_min < best["d"]:
                return
        best.update(d=rep.d_min, rings=rings, params=params, report=rep)

    # a good incumbent first, so the radius bound below prunes early
    for n in _area_proportional_specs(M, max_rings, prune):
        try:
            r, w, d, start = _seed_rings(n)
            for l in range(start, len(n)):
                dw, phi = optimal_phase_shift(n[l - 1], n[l])
                r.append(next_ring_radius(r[-1], n[l], phi, d))
                w.append(w[-1] + dw)
        except InfeasibleCombination:
            continue
        consider(n, r, w, d)

    def allowed(v: int) -> bool:
        return not (prune and v == 2)

    def final_radius_floor(rem: int, last_n: int, rings_left: int, d: float) -> float:
        if rem == 0:
            return 0.0
        rings_used = max(1, min(rings_left, rem // max(last_n, 1)))
        n_last = max(last_n, -(-rem // rings_used))
        return d / (2 * math.sin(math.pi / n_last)) if n_last >= 2 else 0.0

    def grow(n: list[int], r: list[float], w: list[float], d: float):
        rem = M - sum(n)
        if rem == 0:
            consider(tuple(n), r, w, d)
            return
        rings_left = max_rings - len(n)
        if rings_left == 0:
            return
        if best["rings"] is not None:
            # disks of radius d/2 around the remaining points fit in the
            # annulus between r[-1] - d/2 and the final radius + d/2
            inner = max(0.0, r[-1] - d / 2)
            annulus = math.sqrt(rem * d * d / 4 + inner * inner) - d / 2
            floor = max(r[-1], annulus, final_radius_floor(rem, n[-1], rings_left, d))
            if d / floor < best["d"] * (1 - SCORE_RTOL):
                return
        for v in range(n[-1], rem + 1):
            if not allowed(v) or v < 2:
                continue
            if rings_left == 1 and v != rem:
                continue
            if v != rem and rem - v < v:
                # the next ring would have to be smaller than this one
                continue
            if best["rings"] is not None and \
                    d / radius_bounds(0.0, v, 0.0, d)[0] < best["d"] * (1 - SCORE_RTOL):
                # the intra-ring bound only grows with v
                break
            dw, phi = optimal_phase_shift(n[-1], v)
            try:
                rn = next_ring_radius(r[-1], v, phi, d)
            except InfeasibleCombination:
                continue
            grow(n + [v], r + [rn], w + [w[-1] + dw], d)

    for n1 in range(1, M + 1):
        if not allowed(n1):
            continue
        if n1 == 1:
            if max_rings < 2:
                continue
            for n2 in range(2, M):
                if not allowed(n2) or (n2 != M - 1 and M - 1 - n2 < n2):
                    continue
                r, w, d, _ = _seed_rings((1, n2))
                grow([1, n2], r, w, d)
        else:
            if n1 != M and M - n1 < n1:
                continue
            r, w, d, _ = _seed_rings((n1,))
            grow([n1], r, w, d)

    if best["rings"] is None:
        raise InfeasibleCombination(f"no feasible ring partition for M={M}")
    return best["params"], best["report"]


# ---------------------------------------------------------------------------
# baselines


def _qam_grid(M: int) -> np.ndarray:
    """Odd-integer lattice coordinates for square, 4x2 and cross QAM layouts."""
    k = int(round(math.log2(M)))
    if 2 ** k != M or M < 4:
        raise ValueError(f"unsupported QAM order {M}")
    if k % 2 == 0:
        side = 2 ** (k // 2)
        c = 2 * np.arange(side) - (side - 1)
        x, y = np.meshgrid(c, c, indexing="ij")
    elif M == 8:
        x, y = np.meshgrid(2 * np.arange(4) - 3, 2 * np.arange(2) - 1, indexing="ij")
    else:
        # cross layout: a (3*2^m)^2 square with 2^(m-1) x 2^(m-1) corners removed
        m = (k - 3) // 2
        side, corner = 3 * 2 ** m, 2 ** (m - 1)
        c = 2 * np.arange(side) - (side - 1)
        x, y = np.meshgrid(c, c, indexing="ij")
        lim = side - 1 - 2 * corner
        keep = ~((np.abs(x) > lim) & (np.abs(y) > lim))
        x, y = x[keep], y[keep]
    pts = (np.asarray(x) + 1j * np.asarray(y)).ravel()
    assert pts.size == M
    return pts


def baseline_constellation(kind: str, M: int, constraint: str = "amplitude",
                           bound: float = 1.0) -> Constellation:
    """PSK or QAM scaled to peak modulus ``bound`` or RMS modulus ``bound``."""
    kind = kind.lower()
    if kind == "psk":
        k = int(round(math.log2(M))) if M >= 2 else 0
        if M < 2 or 2 ** k != M:
            raise ValueError(f"unsupported PSK order {M}")
        pts = np.exp(1j * TWO_PI * np.arange(M) / M)
    elif kind == "qam":
        pts = _qam_grid(M).astype(complex)
    else:
        raise ValueError(f"unknown baseline kind {kind!r}")
    if constraint == "amplitude":
        pts = pts * bound / np.abs(pts).max()
        A = bound
    elif constraint == "power":
        pts = pts * bound / math.sqrt(np.mean(np.abs(pts) ** 2))
        A = float(np.abs(pts).max())
    else:
        raise ValueError(f"unknown constraint {constraint!r}")
    params = None
    if kind == "psk":
        params = ApskParams(RingSpec((M,)), (A,), (0.0,), A)
        pts = params.points()
    return Constellation(pts, A, params, name=f"{M}-{kind.upper()}")


def design_constellation(kind: str, M: int, amplitude_bound: float = 1.0,
                         max_rings: int = 6) -> Constellation:
    """Constellation of the given family under the amplitude constraint, labelled."""
    from .labeling import assign_bit_labels

    if kind.lower() == "apsk":
        params, _ = design_best_apsk(M, amplitude_bound, max_rings)
        c = apsk_constellation(params)
    else:
        c = baseline_constellation(kind, M, "amplitude", amplitude_bound)
    return assign_bit_labels(c)
