import math
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ampcon.constellation import (
    ApskParams, Constellation, InfeasibleCombination, RingSpec, apsk_constellation,
    baseline_constellation, brute_force_dmin, construct_apsk, design_best_apsk,
    enumerate_ring_specs, intra_ring_dmin, min_inter_ring_phase, model_dmin,
    next_ring_radius, optimal_phase_shift, radius_bounds,
)

# frozen reference designs: partition, radii, cumulative phases, d_min
DESIGNS = {
    8: ((1, 7), (0.0, 1.0), (0.0, 0.4488), 0.8678),
    16: ((5, 11), (0.4603, 1.0), (0.0, 0.0571), 0.5411),
    32: ((5, 10, 17), (0.3068, 0.6397, 1.0), (0.0, 0.3142, 0.3326), 0.3606),
    64: ((1, 6, 13, 19, 25), (0.0, 0.2446, 0.5110, 0.7555, 1.0),
         (0.0, 0.5236, 0.5639, 0.5766, 0.5832), 0.2446),
}


def naive_dmin(pts):
    best = math.inf
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = min(best, abs(pts[i] - pts[j]))
    return best


# ---- ring specs and parameter validation ----

def test_ringspec_rejects_bad_partitions():
    for bad in [(), (0, 4), (5, 3), (1, 1, 6), (3, 1, 4), (1,)]:
        with pytest.raises(ValueError):
            RingSpec(bad)
    s = RingSpec((1, 6, 9))
    assert s.order == 16 and s.n_rings == 3 and s.has_center


def test_apsk_params_require_increasing_radii():
    with pytest.raises(ValueError):
        ApskParams(RingSpec((4, 8)), (1.0, 1.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        ApskParams(RingSpec((4, 8)), (0.0, 1.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        ApskParams(RingSpec((4, 8)), (0.5, 1.2), (0.0, 0.0))


def test_constellation_peak_bound_enforced():
    with pytest.raises(ValueError):
        Constellation(np.array([1.0, -1.01]), 1.0)


# ---- closed-form pieces ----

def test_intra_ring_dmin_values():
    assert intra_ring_dmin(1, 4) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert intra_ring_dmin(1, 16) == pytest.approx(0.3902, abs=1e-4)
    assert intra_ring_dmin(0.4603, 5) == pytest.approx(0.5411, abs=1e-4)
    with pytest.raises(ValueError):
        intra_ring_dmin(1, 1)


def test_min_inter_ring_phase_values():
    assert min_inter_ring_phase(8, 8, 0.0) == pytest.approx(0.0, abs=1e-7)
    assert min_inter_ring_phase(8, 8, math.pi / 8) == pytest.approx(math.pi / 8, abs=1e-12)
    assert min_inter_ring_phase(5, 11, math.pi / 55) == pytest.approx(0.05712, abs=1e-5)


def test_optimal_phase_shift_values():
    assert optimal_phase_shift(8, 8) == pytest.approx((math.pi / 8, math.pi / 8))
    assert optimal_phase_shift(5, 11) == pytest.approx((math.pi / 55, math.pi / 55))
    assert optimal_phase_shift(6, 13)[0] == pytest.approx(0.04027, abs=1e-5)


@pytest.mark.parametrize("n1,n2", [(6, 13), (5, 11), (4, 6), (3, 9)])
def test_phase_shift_is_grid_optimum(n1, n2):
    lcm = math.lcm(n1, n2)
    dw_star, phi_star = optimal_phase_shift(n1, n2)
    sweep = np.linspace(0, 2 * math.pi / lcm, 2001)
    vals = [min_inter_ring_phase(n1, n2, d) for d in sweep]
    assert max(vals) <= phi_star + 1e-6
    assert min_inter_ring_phase(n1, n2, dw_star) == pytest.approx(phi_star, abs=1e-6)


def test_optimal_ring_offset_all_small_pairs():
    rng = np.random.default_rng(3)
    for n1, n2 in itertools.product(range(1, 17), repeat=2):
        lcm = math.lcm(n1, n2)
        _, phi_star = optimal_phase_shift(n1, n2)
        for d in rng.uniform(0, 2 * math.pi / lcm, 40):
            assert min_inter_ring_phase(n1, n2, d) <= phi_star + 1e-6


def test_next_ring_radius_examples():
    d = math.sqrt(2 - 2 * math.cos(2 * math.pi / 5))
    r2 = next_ring_radius(1.0, 11, math.pi / 55, d)
    # hand value: cos(pi/55) + sqrt(cos^2(pi/55) - 1 + d^2) = 2.172553
    assert r2 == pytest.approx(2.172553, abs=1e-6)
    assert 1 / r2 == pytest.approx(0.4603, abs=1e-4)

    b1, b2 = radius_bounds(0.0, 7, 0.3, 1.0)
    assert b1 == pytest.approx(1.15238, abs=1e-5)
    assert b2 == pytest.approx(1.0, abs=1e-12)

    b1, b2 = radius_bounds(1.0, 4, math.pi / 4, math.sqrt(2))
    assert b1 == pytest.approx(1.0, abs=1e-12)
    # root of r^2 - sqrt(2) r - 1 = 0: a point pi/4 away at distance sqrt(2)
    assert b2 == pytest.approx((math.sqrt(2) + math.sqrt(6)) / 2, abs=1e-12)
    assert next_ring_radius(1.0, 4, math.pi / 4, math.sqrt(2)) == pytest.approx(b2)


def test_negative_discriminant_drops_second_bound():
    # r_prev large, tiny target: r^2 cos^2 - r^2 + d^2 < 0
    b1, b2 = radius_bounds(2.0, 200, 0.5, 0.01)
    assert b2 is None
    with pytest.raises(InfeasibleCombination):
        next_ring_radius(2.0, 200, 0.5, 0.01)


# ---- construction ----

@pytest.mark.parametrize("M", sorted(DESIGNS))
def test_construct_apsk_matches_reference(M):
    rings, radii, phases, dmin = DESIGNS[M]
    p = construct_apsk(rings)
    assert p.radii == pytest.approx(radii, abs=1e-3)
    assert p.phases == pytest.approx(phases, abs=1e-3)
    assert brute_force_dmin(apsk_constellation(p)).d_min == pytest.approx(dmin, abs=1e-4)


def test_center_point_phase():
    p = construct_apsk((1, 7))
    assert p.phases[1] == pytest.approx(0.4488, abs=1e-4)
    assert p.radii == (0.0, 1.0)


def test_canonical_phases_in_range():
    p = construct_apsk((1, 6, 13, 19, 25))
    for w, n in zip(p.canonical_phases(), p.rings.points_per_ring):
        assert 0 <= w < 2 * math.pi / n
    # reduction leaves the point set unchanged
    q = ApskParams(p.rings, p.radii, p.canonical_phases())
    assert np.allclose(np.sort_complex(p.points()), np.sort_complex(q.points()), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(3, 20), min_size=1, max_size=4).map(sorted),
       st.booleans(), st.floats(0.1, 10.0))
def test_scaling_covariance(n, center, A):
    spec = ([1] if center else []) + n
    if center and len(n) < 1:
        return
    try:
        p1 = construct_apsk(spec, 1.0)
        pA = construct_apsk(spec, A)
    except InfeasibleCombination:
        return
    assert np.allclose(pA.radii, A * np.array(p1.radii), rtol=1e-12, atol=1e-15)
    d1 = brute_force_dmin(apsk_constellation(p1)).d_min
    dA = brute_force_dmin(apsk_constellation(pA)).d_min
    assert dA == pytest.approx(A * d1, rel=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(3, 24), min_size=1, max_size=5).map(sorted), st.booleans())
def test_realized_dmin_never_exceeds_model(n, center):
    # the model ignores non-adjacent ring pairs, so it can only over-estimate
    spec = ([1] if center else []) + n
    try:
        p = construct_apsk(spec)
    except InfeasibleCombination:
        return
    real = brute_force_dmin(apsk_constellation(p)).d_min
    assert real <= model_dmin(p) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(-10, 10))
def test_rotation_leaves_distances_unchanged(theta):
    c = apsk_constellation(construct_apsk((5, 10, 17)))
    a = brute_force_dmin(c)
    b = brute_force_dmin(c.rotated(theta))
    assert b.d_min == pytest.approx(a.d_min, abs=1e-12)
    assert b.per_ring_intra == pytest.approx(a.per_ring_intra, abs=1e-12)
    assert b.inter_adjacent == pytest.approx(a.inter_adjacent, abs=1e-12)


# ---- distance oracle ----

def test_brute_force_small_cases():
    r = brute_force_dmin(np.array([1, 1j, -1, -1j]))
    assert r.d_min == pytest.approx(math.sqrt(2))
    i, j = r.arg_pair
    assert i < j


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2 ** 31))
def test_brute_force_matches_double_loop(M, seed):
    pts = np.random.default_rng(seed).normal(size=M) + 1j * np.random.default_rng(seed + 1).normal(size=M)
    rep = brute_force_dmin(pts)
    assert rep.d_min == pytest.approx(naive_dmin(pts), abs=1e-14)
    i, j = rep.arg_pair
    assert abs(pts[i] - pts[j]) == pytest.approx(rep.d_min, abs=1e-14)


def test_brute_force_chunking_consistent():
    from ampcon.constellation import _pairwise_min
    pts = np.exp(1j * np.random.default_rng(0).uniform(0, 6.28, 300)) * np.random.default_rng(1).uniform(0.1, 1, 300)
    full = _pairwise_min(pts, chunk=4096)
    small = _pairwise_min(pts, chunk=7)
    assert full == small


# ---- baselines ----

@pytest.mark.parametrize("kind,M,constraint,expected", [
    ("qam", 16, "amplitude", 2 / math.sqrt(18)),
    ("psk", 32, "amplitude", 2 * math.sin(math.pi / 32)),
    ("qam", 32, "power", 0.4472),
    ("qam", 8, "amplitude", 2 / math.sqrt(10)),
    ("qam", 32, "amplitude", 2 / math.sqrt(34)),
])
def test_baseline_values(kind, M, constraint, expected):
    c = baseline_constellation(kind, M, constraint)
    assert brute_force_dmin(c).d_min == pytest.approx(expected, abs=1e-4)


def test_baseline_scaling_rules():
    c = baseline_constellation("qam", 64, "amplitude", 2.0)
    assert np.abs(c.points).max() == pytest.approx(2.0)
    c = baseline_constellation("qam", 64, "power", 2.0)
    assert np.mean(np.abs(c.points) ** 2) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        baseline_constellation("qam", 12)
    with pytest.raises(ValueError):
        baseline_constellation("hex", 16)


@pytest.mark.parametrize("M", [128, 512])
def test_cross_qam_larger_orders(M):
    c = baseline_constellation("qam", M)
    assert c.M == M
    assert len(set(np.round(c.points, 9))) == M


# ---- search ----

def test_design_best_single_ring_qpsk():
    p, rep = design_best_apsk(4)
    assert p.rings.points_per_ring == (4,)
    assert rep.d_min == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("M", sorted(DESIGNS))
def test_design_best_apsk_reference(M):
    rings, radii, phases, dmin = DESIGNS[M]
    p, rep = design_best_apsk(M)
    assert p.rings.points_per_ring == rings
    assert rep.d_min == pytest.approx(dmin, abs=1e-4)


@pytest.mark.parametrize("M", [8, 16, 32])
def test_pruned_search_matches_exhaustive(M):
    best = None
    for spec in enumerate_ring_specs(M, max_rings=6, prune=False):
        try:
            p = construct_apsk(spec)
        except InfeasibleCombination:
            continue
        d = brute_force_dmin(apsk_constellation(p)).d_min
        key = (-d, spec.n_rings, spec.points_per_ring)
        if best is None or key < best[0]:
            best = (key, spec)
    p, rep = design_best_apsk(M, prune=True)
    assert p.rings == best[1]
    assert rep.d_min == pytest.approx(-best[0][0], abs=1e-12)


@pytest.mark.slow
def test_pruned_search_matches_exhaustive_64():
    best_d = -1.0
    for spec in enumerate_ring_specs(64, max_rings=6, prune=False):
        try:
            p = construct_apsk(spec)
        except InfeasibleCombination:
            continue
        p_model = model_dmin(p)
        if p_model <= best_d:
            continue  # realised <= model, cannot win
        best_d = max(best_d, brute_force_dmin(apsk_constellation(p)).d_min)
    _, rep = design_best_apsk(64)
    assert rep.d_min == pytest.approx(best_d, abs=1e-12)


def test_enumerate_counts():
    specs = list(enumerate_ring_specs(8, max_rings=6, prune=False))
    assert all(s.order == 8 for s in specs)
    assert RingSpec((8,)) in specs and RingSpec((1, 7)) in specs
    assert all(2 not in s.points_per_ring for s in enumerate_ring_specs(16, prune=True))


@pytest.mark.parametrize("M", [8, 16, 32, 64])
def test_apsk_dominates_baselines(M):
    _, rep = design_best_apsk(M)
    for kind in ("psk", "qam"):
        assert rep.d_min > brute_force_dmin(baseline_constellation(kind, M)).d_min


def test_design_amplitude_bound():
    p, rep = design_best_apsk(16, amplitude_bound=0.5)
    assert p.radii[-1] == pytest.approx(0.5)
    assert rep.d_min == pytest.approx(0.5 * 0.5411, abs=1e-4)


# ---- serialization ----

def test_json_round_trip():
    from ampcon.constellation import design_constellation
    c = design_constellation("apsk", 16)
    d = c.to_json_dict()
    assert list(d) == ["M", "amplitude_bound", "rings", "points", "bit_map"]
    c2 = Constellation.from_json_dict(d)
    assert np.allclose(c2.points, c.points, atol=0)
    assert (c2.bit_map == c.bit_map).all()
    assert c2.params.rings == c.params.rings
